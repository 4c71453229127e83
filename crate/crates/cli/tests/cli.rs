//! End-to-end runs of the binary on generated and synthetic documents.

use kokotsakis::io::{save_mesh, to_json_bytes, AnglesDocument, Meta};
use kokotsakis::mesh::extract_angles;
use kokotsakis::sampling::{random_planar_face_mesh, rng};
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kokotsakis"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn generate(dir: &Path, family: &str, seed: u64) -> (PathBuf, PathBuf) {
    let out = run(&["generate", family, "--seed", &seed.to_string(), "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stem = format!("{family}-{seed}");
    (dir.join(format!("{stem}.mesh.json")), dir.join(format!("{stem}.angles.json")))
}

/// Rigid fixture: a random mesh with planar faces and its angle document.
fn rigid_fixture(dir: &Path, n: usize, seed: u64) -> (PathBuf, PathBuf) {
    let mesh = random_planar_face_mesh(&mut rng(seed), n);
    let mesh_path = dir.join(format!("rigid-{seed}.mesh.json"));
    fs::write(&mesh_path, save_mesh(&mesh, Meta::default()).unwrap()).unwrap();
    let angles = extract_angles(&mesh, 1e-9).unwrap();
    let angles_path = dir.join(format!("rigid-{seed}.angles.json"));
    fs::write(&angles_path, to_json_bytes(&AnglesDocument::new(&angles, None, Meta::default())).unwrap()).unwrap();
    (mesh_path, angles_path)
}

fn json_stream(out: &Output) -> Vec<Value> {
    serde_json::Deserializer::from_slice(&out.stdout).into_iter::<Value>().map(|v| v.unwrap()).collect()
}

#[test]
fn generation_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (m1, g1) = generate(a.path(), "voss", 7);
    let (m2, g2) = generate(b.path(), "voss", 7);
    assert_eq!(fs::read(m1).unwrap(), fs::read(m2).unwrap());
    assert_eq!(fs::read(g1).unwrap(), fs::read(g2).unwrap());
}

#[test]
fn generated_families_check_and_certify_flexible() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["voss", "symmetric_12_43", "symmetric_14_23", "sign_flip"] {
        let (mesh, angles) = generate(dir.path(), family, 3);
        let out = run(&["check", mesh.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{family}: {}", String::from_utf8_lossy(&out.stdout));
        let out = run(&["certify", angles.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{family}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn sign_flip_metadata_lists_relations() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, _) = generate(dir.path(), "sign_flip", 11);
    let doc: Value = serde_json::from_slice(&fs::read(mesh).unwrap()).unwrap();
    let meta = &doc["meta"];
    assert_eq!(meta["family"], "sign_flip");
    assert!(!meta["flips"].as_array().unwrap().is_empty());
    let relations = meta["relations"].as_array().unwrap();
    assert!(relations.len() >= 8);
    assert!(relations.iter().all(|r| r.as_str().unwrap().contains('=')));
}

#[test]
fn malformed_documents_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, b"{ \"schema\": \"kokotsakis/1\", \"n\": 4, \"A\": [[0, 0]] }").unwrap();
    assert_eq!(code(&run(&["check", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["certify", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["simulate", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["check", missing.to_str().unwrap()])), 2);
}

#[test]
fn generic_triangle_mesh_is_rigid() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, _) = rigid_fixture(dir.path(), 3, 31);
    let out = run(&["check", "--json", mesh.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "rigid");
    assert_eq!(report["incidence"]["condition"], "II");
}

#[test]
fn certify_rejects_non_quadrilaterals() {
    let dir = tempfile::tempdir().unwrap();
    let (_, angles) = rigid_fixture(dir.path(), 3, 32);
    assert_eq!(code(&run(&["certify", angles.to_str().unwrap()])), 2);
    let (_, angles) = rigid_fixture(dir.path(), 4, 33);
    assert_eq!(code(&run(&["certify", angles.to_str().unwrap()])), 1);
}

#[test]
fn zero_duration_returns_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, _) = generate(dir.path(), "voss", 5);
    let frames = dir.path().join("frames");
    let out = run(&["simulate", mesh.to_str().unwrap(), "--duration", "0", "--out", frames.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let objs: Vec<_> = fs::read_dir(&frames).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "obj")).collect();
    assert_eq!(objs.len(), 1);
    let input = kokotsakis::io::load_mesh(&fs::read(&mesh).unwrap()).unwrap();
    let expected = kokotsakis::io::mesh_to_obj(&input, "");
    let got = fs::read_to_string(objs[0].as_ref().unwrap().path()).unwrap();
    let vertices = |s: &str| s.lines().filter(|l| l.starts_with("v ")).map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(vertices(&got), vertices(&expected));
}

#[test]
fn flexion_keeps_chi_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, _) = generate(dir.path(), "voss", 9);
    let frames = dir.path().join("frames");
    let out = run(&["simulate", mesh.to_str().unwrap(), "--duration", "1", "--frames", "20", "--out", frames.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(frames.join("monitor.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "chi_minus_one").unwrap();
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|x| x.abs() <= 1e-6), "{rows:?}");
}

#[test]
fn rigid_meshes_still_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, _) = rigid_fixture(dir.path(), 4, 34);
    let frames = dir.path().join("frames");
    let out = run(&["simulate", mesh.to_str().unwrap(), "--duration", "0.1", "--frames", "5", "--out", frames.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(frames.join("monitor.csv").exists());
}

#[test]
fn check_and_certify_agree_on_rigid_batches() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures: Vec<(PathBuf, PathBuf)> = (0..100).map(|k| rigid_fixture(dir.path(), 4, 100 + k)).collect();
    let meshes: Vec<&str> = fixtures.iter().map(|f| f.0.to_str().unwrap()).collect();
    let angles: Vec<&str> = fixtures.iter().map(|f| f.1.to_str().unwrap()).collect();
    let out = run(&[&["check", "--json", "--order", "1"][..], &meshes].concat());
    let reports = json_stream(&out).remove(0);
    let check: Vec<String> = reports.as_array().unwrap().iter().map(|r| r["verdict"].as_str().unwrap().to_owned()).collect();
    let out = run(&[&["certify", "--json"][..], &angles].concat());
    let certs: Vec<String> = json_stream(&out).iter().map(|c| c["verdict"].as_str().unwrap().to_owned()).collect();
    assert_eq!(check.len(), 100);
    assert_eq!(certs.len(), 100);
    for (k, (a, b)) in check.iter().zip(&certs).enumerate() {
        assert_eq!(a, b, "fixture {k}");
    }
    assert!(check.iter().all(|v| v == "rigid"));
}

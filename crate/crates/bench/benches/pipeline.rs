use criterion::{criterion_group, criterion_main, Criterion};
use kokotsakis::algebra::certificate::{flex_certificate_half_tan, flex_certificate_with, Arithmetic, CertificateOptions};
use kokotsakis::algebra::families::{draw_family, FamilyKind};
use kokotsakis::flow::{chi_prime, integrate_flow, FlowState};
use kokotsakis::infinitesimal::chi;
use kokotsakis::mesh::extract_angles;
use kokotsakis::sampling::{random_mesh, random_planar_face_mesh, rng};
use std::hint::black_box;

fn infinitesimal(c: &mut Criterion) {
    let mesh = random_mesh(&mut rng(1), 4);
    c.bench_function("chi n=4", |b| b.iter(|| chi(black_box(&mesh), 1e-12).unwrap()));
    let state = FlowState::new(mesh.clone(), 0.0).unwrap();
    c.bench_function("chi_prime n=4", |b| b.iter(|| chi_prime(black_box(&state))));
}

fn certificates(c: &mut Criterion) {
    let rigid = extract_angles(&random_planar_face_mesh(&mut rng(2), 4), 1e-9).unwrap();
    let (_, voss) = draw_family(FamilyKind::Voss, &mut rng(3)).unwrap();
    let mut group = c.benchmark_group("certificate");
    group.sample_size(10);
    for (name, arithmetic) in [("double", Arithmetic::Double), ("double-double", Arithmetic::DoubleDouble)] {
        let opts = CertificateOptions { arithmetic, ..Default::default() };
        group.bench_function(format!("rigid {name}"), |b| b.iter(|| flex_certificate_with(black_box(&rigid), &opts).unwrap()));
    }
    let exact = CertificateOptions { arithmetic: Arithmetic::Exact, ..Default::default() };
    group.bench_function("voss exact", |b| b.iter(|| flex_certificate_half_tan(black_box(&voss), &exact).unwrap()));
    group.finish();
}

fn flow(c: &mut Criterion) {
    let mesh = random_mesh(&mut rng(4), 4);
    let mut group = c.benchmark_group("flow");
    group.sample_size(20);
    group.bench_function("integrate 0.1", |b| b.iter(|| integrate_flow(black_box(&mesh), 0.1, 1, 1e-9).unwrap()));
    group.finish();
}

criterion_group!(benches, infinitesimal, certificates, flow);
criterion_main!(benches);

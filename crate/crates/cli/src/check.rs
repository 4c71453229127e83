use crate::output::{combine, to_json, write_atomic, DEGENERATE, FLEXIBLE, RIGID};
use crate::parse_positive;
use kokotsakis::flow::{chi_higher_derivatives, DerivativeReport, OrderStatus};
use kokotsakis::incidence::{build_trace_configuration, flexibility_via_incidence, geometric_condition_i, geometric_condition_ii, witness_csv, IncidenceVerdict};
use kokotsakis::infinitesimal::chi;
use kokotsakis::io::load_mesh;
use kokotsakis::mesh::{edge_face_planarity_defect, validate_theta};
use rayon::prelude::*;
use serde::Serialize;
use std::fs;
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Mesh documents (`kokotsakis/1` JSON).
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Tolerance on |chi - 1| for infinitesimal flexibility.
    #[arg(long, default_value = "1e-8", value_parser = parse_positive)]
    pub tol: f64,
    /// Highest derivative order of chi along the flow.
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// Print reports as JSON.
    #[arg(long)]
    pub json: bool,
    /// Write the incidence witness points as CSV (single input only).
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

/// Integration tolerance of the derivative test.
const FLOW_TOL: f64 = 1e-11;
/// Edge faces flatter than this count as planar for the incidence test.
const PLANAR_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct Report {
    pub file: String,
    pub verdict: &'static str,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_minus_one: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infinitesimally_flexible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incidence: Option<IncidenceVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<DerivativeReport>,
    pub diagnostics: Vec<String>,
}

impl Report {
    fn degenerate(file: String, why: String) -> Self {
        Report {
            file,
            verdict: "degenerate",
            exit_code: DEGENERATE,
            n: None,
            chi: None,
            chi_minus_one: None,
            infinitesimally_flexible: None,
            incidence: None,
            derivatives: None,
            diagnostics: vec![why],
        }
    }
}

pub fn check_file(path: &PathBuf, args: &Args) -> Report {
    let file = path.display().to_string();
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return Report::degenerate(file, format!("cannot read: {e}")),
    };
    let mesh = match load_mesh(&bytes) {
        Ok(m) => m,
        Err(e) => return Report::degenerate(file, e.to_string()),
    };
    let validation = validate_theta(&mesh, 1e-9);
    if !validation.accepted {
        return Report::degenerate(file, format!("degenerate mesh: {:?}", validation.flags));
    }
    let c = match chi(&mesh, 1e-12) {
        Ok(c) => c,
        Err(e) => return Report::degenerate(file, e.to_string()),
    };
    let flexible = (c.value - 1.0).abs() <= args.tol;
    let mut diagnostics = Vec::new();
    let mut incidence = None;
    if edge_face_planarity_defect(&mesh) <= PLANAR_TOL {
        match flexibility_via_incidence(&mesh, 1e-7, args.tol) {
            Ok(v) => incidence = Some(v),
            Err(e) => diagnostics.push(format!("incidence test skipped: {e}")),
        }
    } else {
        diagnostics.push("edge faces are not planar; incidence test skipped".into());
    }
    let mut derivatives = None;
    let mut code = if flexible { FLEXIBLE } else { RIGID };
    if flexible && args.order >= 1 {
        match chi_higher_derivatives(&mesh, args.order, FLOW_TOL) {
            Ok(r) => {
                if r.entries.iter().any(|e| e.status == OrderStatus::Nonzero) {
                    code = RIGID;
                }
                for e in r.entries.iter().filter(|e| e.status == OrderStatus::UnreliableOrder) {
                    diagnostics.push(format!("order {} is inconclusive (error bar {:e})", e.order, e.error));
                }
                derivatives = Some(r);
            }
            Err(e) => diagnostics.push(format!("derivative test failed: {e}")),
        }
    }
    Report {
        file,
        verdict: if code == FLEXIBLE { "flexible" } else { "rigid" },
        exit_code: code,
        n: Some(mesh.n()),
        chi: Some(c.value),
        chi_minus_one: Some(c.value - 1.0),
        infinitesimally_flexible: Some(flexible),
        incidence,
        derivatives,
        diagnostics,
    }
}

fn print_human(r: &Report) {
    println!("{}: {}", r.file, r.verdict);
    if let (Some(chi), Some(d)) = (r.chi, r.chi_minus_one) {
        println!("  chi = {chi:.17}  (chi - 1 = {d:e})");
    }
    if let Some(v) = &r.incidence {
        println!(
            "  condition {}: {} (measure {:e}, product {})",
            v.condition,
            if v.holds { "holds" } else { "fails" },
            v.measure,
            v.product.map_or("at infinity".to_string(), |p| format!("{p:.12}"))
        );
    }
    if let Some(d) = &r.derivatives {
        for e in &d.entries {
            println!("  chi^({}) = {:e} +- {:e}  {:?}", e.order, e.value, e.error, e.status);
        }
    }
}

pub fn run(args: &Args) -> u8 {
    let reports: Vec<Report> = args.files.par_iter().map(|p| check_file(p, args)).collect();
    for r in &reports {
        for d in &r.diagnostics {
            eprintln!("{}: {d}", r.file);
        }
    }
    if args.json {
        if reports.len() == 1 {
            println!("{}", to_json(&reports[0]));
        } else {
            println!("{}", to_json(&reports));
        }
    } else {
        reports.iter().for_each(print_human);
    }
    if let Some(path) = &args.witness {
        if let Err(e) = write_witness(&args.files[0], path) {
            eprintln!("witness: {e}");
            return DEGENERATE;
        }
    }
    combine(reports.iter().map(|r| r.exit_code))
}

fn write_witness(input: &PathBuf, out: &PathBuf) -> Result<(), String> {
    let mesh = load_mesh(&fs::read(input).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let config = build_trace_configuration(&mesh, 1e-9).map_err(|e| e.to_string())?;
    let report = if mesh.n() % 2 == 0 { geometric_condition_i(&config, 1e-7) } else { geometric_condition_ii(&config, 1e-7) }
        .map_err(|e| e.to_string())?;
    write_atomic(out, witness_csv(&config, &report).as_bytes()).map_err(|e| e.to_string())
}

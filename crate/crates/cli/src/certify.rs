use crate::output::{combine, to_json, write_atomic, DEGENERATE, FLEXIBLE, RIGID};
use crate::{parse_positive, parse_range};
use kokotsakis::algebra::certificate::{
    flex_certificate_half_tan, flex_certificate_with, Arithmetic, CertificateOptions, FlexCertificate,
};
use kokotsakis::algebra::families::HalfTan;
use kokotsakis::io::load_angles;
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ArithmeticArg {
    Double,
    DoubleDouble,
    Exact,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Angle documents (`kokotsakis-angles/1` JSON) with four vertices.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Integer sample values of t1, inclusive.
    #[arg(long, default_value = "-50..50", value_parser = parse_range, allow_hyphen_values = true)]
    pub samples: (i64, i64),
    /// Largest normalized sample magnitude read as zero.
    #[arg(long, default_value = "1e-6", value_parser = parse_positive)]
    pub tol: f64,
    /// Arithmetic; defaults to exact when the document carries rational
    /// half-angle tangents and to double-double otherwise.
    #[arg(long, value_enum)]
    pub arithmetic: Option<ArithmeticArg>,
    /// Print the certificate JSON on stdout.
    #[arg(long)]
    pub json: bool,
    /// Directory for `<input stem>.certificate.json` files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Rational tangents must describe the same angles as the float fields.
const HALF_TAN_AGREEMENT: f64 = 1e-9;

fn certify_file(path: &Path, args: &Args) -> Result<FlexCertificate, String> {
    let bytes = fs::read(path).map_err(|e| format!("cannot read: {e}"))?;
    let doc = load_angles(&bytes).map_err(|e| e.to_string())?;
    let angles = doc.angle_set().map_err(|e| e.to_string())?;
    let mut opts = CertificateOptions { samples: args.samples.0..=args.samples.1, threshold: args.tol, ..Default::default() };
    let exact = match &doc.half_tan {
        Some(h) => {
            let ht = HalfTan::from_strings(h).map_err(|e| e.to_string())?;
            if ht.n() != angles.n() {
                return Err("half_tan block does not match the angle arrays".into());
            }
            let gap = ht.to_angle_set().max_abs_diff(&angles);
            if gap > HALF_TAN_AGREEMENT {
                return Err(format!("half_tan block disagrees with the angles by {gap:e}"));
            }
            Some(ht)
        }
        None => None,
    };
    opts.arithmetic = match (args.arithmetic, &exact) {
        (Some(ArithmeticArg::Double), _) => Arithmetic::Double,
        (Some(ArithmeticArg::DoubleDouble), _) => Arithmetic::DoubleDouble,
        (Some(ArithmeticArg::Exact), _) | (None, Some(_)) => Arithmetic::Exact,
        (None, None) => Arithmetic::DoubleDouble,
    };
    match exact {
        Some(ht) => flex_certificate_half_tan(&ht, &opts),
        None => flex_certificate_with(&angles, &opts),
    }
    .map_err(|e| e.to_string())
}

pub fn run(args: &Args) -> u8 {
    let results: Vec<(PathBuf, Result<FlexCertificate, String>)> =
        args.files.par_iter().map(|p| (p.clone(), certify_file(p, args))).collect();
    let mut codes = Vec::new();
    for (path, res) in &results {
        match res {
            Ok(cert) => {
                codes.push(if cert.is_flexible() { FLEXIBLE } else { RIGID });
                if let Some(dir) = &args.out {
                    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    let stem = stem.trim_end_matches(".angles");
                    let target = dir.join(format!("{stem}.certificate.json"));
                    if let Err(e) = write_atomic(&target, (to_json(cert) + "\n").as_bytes()) {
                        eprintln!("{}: write failed: {e}", target.display());
                        codes.push(DEGENERATE);
                    }
                }
                if args.json {
                    println!("{}", to_json(cert));
                } else {
                    println!(
                        "{}: {:?} ({:?}; max normalized sample {:e}; {} of {} samples usable; {} normalization fallbacks)",
                        path.display(),
                        cert.verdict,
                        cert.arithmetic,
                        cert.max_abs,
                        cert.valid,
                        cert.samples.len(),
                        cert.fallbacks
                    );
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                codes.push(DEGENERATE);
            }
        }
    }
    combine(codes)
}

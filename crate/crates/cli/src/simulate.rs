use crate::output::{write_atomic, DEGENERATE, FLEXIBLE};
use crate::parse_positive;
use kokotsakis::flow::{integrate_to, monitor_csv};
use kokotsakis::io::{frame_name, load_mesh, mesh_to_obj};
use kokotsakis::mesh::validate_theta;
use std::fs;
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Mesh document to deform.
    pub file: PathBuf,
    /// Flow time to integrate (negative runs backwards).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub duration: f64,
    /// Number of frame intervals; `frames + 1` OBJ files are written.
    #[arg(long, default_value_t = 50)]
    pub frames: usize,
    /// Local error tolerance of the integrator.
    #[arg(long, default_value = "1e-9", value_parser = parse_positive)]
    pub tol: f64,
    /// Output directory for frames and `monitor.csv`.
    #[arg(long, default_value = "frames")]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> u8 {
    let mesh = match fs::read(&args.file).map_err(|e| e.to_string()).and_then(|b| load_mesh(&b).map_err(|e| e.to_string())) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{}: {e}", args.file.display());
            return DEGENERATE;
        }
    };
    if !validate_theta(&mesh, 1e-9).accepted {
        eprintln!("{}: degenerate mesh", args.file.display());
        return DEGENERATE;
    }
    if !args.duration.is_finite() {
        eprintln!("duration must be finite");
        return DEGENERATE;
    }
    // a zero-length run is the input itself
    let frames = if args.duration == 0.0 { 0 } else { args.frames.max(1) };
    let times: Vec<f64> = (0..=frames).map(|k| if frames == 0 { 0.0 } else { args.duration * k as f64 / frames as f64 }).collect();
    let traj = match integrate_to(&mesh, &times, args.tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("integration failed: {e}");
            return DEGENERATE;
        }
    };
    for (k, st) in traj.states.iter().enumerate() {
        let obj = mesh_to_obj(&st.mesh, &format!("t = {}\nchi = {}", st.time, st.chi()));
        if let Err(e) = write_atomic(&args.out.join(frame_name(k)), obj.as_bytes()) {
            eprintln!("write failed: {e}");
            return DEGENERATE;
        }
    }
    if let Err(e) = write_atomic(&args.out.join("monitor.csv"), monitor_csv(&traj).as_bytes()) {
        eprintln!("write failed: {e}");
        return DEGENERATE;
    }
    let worst = traj.states.iter().map(|s| (s.chi() - 1.0).abs()).fold(0.0, f64::max);
    println!("{} frames written to {}; max |chi - 1| = {worst:e}; {} steps", traj.states.len(), args.out.display(), traj.steps);
    if let Some((t, why)) = &traj.truncated {
        eprintln!("truncated at t = {t}: {why}");
    }
    FLEXIBLE
}

use crate::output::{to_json, write_atomic, DEGENERATE, FLEXIBLE};
use kokotsakis::algebra::families::{angle_relations, draw_family, sign_flip, FamilyKind, FamilyParams, Flip};
use kokotsakis::algebra::realize::{realizable_first_dihedrals, realize_mesh};
use kokotsakis::io::{save_mesh, to_json_bytes, AnglesDocument, Meta};
use kokotsakis::sampling::{rng, well_conditioned};
use rand::Rng;
use serde_json::json;
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// voss, symmetric_12_43, symmetric_14_23 or sign_flip.
    pub family: FamilyKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base family of sign_flip.
    #[arg(long, default_value = "voss")]
    pub base: FamilyKind,
    /// Wing vectors to negate for sign_flip, e.g. `w1,v2`; drawn as
    /// edge-face pairs when absent.
    #[arg(long, value_delimiter = ',')]
    pub flips: Option<Vec<Flip>>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Print a JSON summary.
    #[arg(long)]
    pub json: bool,
}

/// Attempts at drawing a realizable member before giving up.
const ATTEMPTS: usize = 200;

pub fn run(args: &Args) -> u8 {
    match generate(args) {
        Ok(summary) => {
            if args.json {
                println!("{}", to_json(&summary));
            } else {
                println!("{}", summary["mesh"].as_str().unwrap_or_default());
                println!("{}", summary["angles"].as_str().unwrap_or_default());
            }
            FLEXIBLE
        }
        Err(e) => {
            eprintln!("generate: {e}");
            DEGENERATE
        }
    }
}

fn generate(args: &Args) -> Result<serde_json::Value, String> {
    let base_kind = if args.family == FamilyKind::SignFlip { args.base } else { args.family };
    if base_kind == FamilyKind::SignFlip {
        return Err("the base of a sign flip must be voss or a symmetric family".into());
    }
    if args.flips.is_some() && args.family != FamilyKind::SignFlip {
        return Err("--flips applies to sign_flip only".into());
    }
    let mut r = rng(args.seed);
    for _ in 0..ATTEMPTS {
        let (_, base) = draw_family(base_kind, &mut r).map_err(|e| e.to_string())?;
        let flips: Vec<Flip> = match (&args.flips, args.family) {
            (Some(f), _) => f.clone(),
            (None, FamilyKind::SignFlip) => match draw_family(FamilyKind::SignFlip, &mut r).map_err(|e| e.to_string())?.0 {
                FamilyParams::SignFlip { flips, .. } => flips,
                _ => unreachable!("sign flip draw"),
            },
            (None, _) => Vec::new(),
        };
        let ht = sign_flip(&base, &flips).map_err(|e| e.to_string())?;
        let base_angles = base.to_angle_set();
        let omegas = realizable_first_dihedrals(&base_angles, 72);
        if omegas.is_empty() {
            continue;
        }
        let omega1 = omegas[r.random_range(0..omegas.len())];
        let Ok(mut mesh) = realize_mesh(&base_angles, omega1) else { continue };
        if !well_conditioned(&mesh) {
            continue;
        }
        // negating a wing vector keeps its line, so the flexion carries over
        for f in &flips {
            match *f {
                Flip::V(i) => mesh.v_wing[i] = mesh.centre[i] * 2.0 - mesh.v_wing[i],
                Flip::W(i) => mesh.w_wing[i] = mesh.centre[i] * 2.0 - mesh.w_wing[i],
            }
        }
        let relations = angle_relations(&ht);
        let mut meta = Meta { name: Some(format!("{}-{}", args.family.name(), args.seed)), family: Some(args.family.name().into()), ..Default::default() };
        meta.extra.insert("seed".into(), json!(args.seed));
        meta.extra.insert("omega1".into(), json!(omega1));
        meta.extra.insert("relations".into(), json!(relations));
        if args.family == FamilyKind::SignFlip {
            meta.extra.insert("base".into(), json!(base_kind.name()));
            meta.extra.insert("flips".into(), json!(flips.iter().map(|f| f.to_string()).collect::<Vec<_>>()));
        }
        let stem = format!("{}-{}", args.family.name(), args.seed);
        let mesh_path = args.out.join(format!("{stem}.mesh.json"));
        let angles_path = args.out.join(format!("{stem}.angles.json"));
        let mesh_bytes = save_mesh(&mesh, meta.clone()).map_err(|e| e.to_string())?;
        let doc = AnglesDocument::new(&ht.to_angle_set(), Some(ht.to_strings()), meta);
        let angle_bytes = to_json_bytes(&doc).map_err(|e| e.to_string())?;
        write_atomic(&mesh_path, &mesh_bytes).map_err(|e| e.to_string())?;
        write_atomic(&angles_path, &angle_bytes).map_err(|e| e.to_string())?;
        return Ok(json!({
            "mesh": mesh_path.display().to_string(),
            "angles": angles_path.display().to_string(),
            "family": args.family.name(),
            "seed": args.seed,
            "omega1": omega1,
            "relations": relations,
        }));
    }
    Err(format!("infeasible parameters: no realizable {} member in {ATTEMPTS} draws", base_kind.name()))
}

//! `quadlin startriangle`: the two-field map, its inverse, 4D consistency
//! draws and the elliptic special solution.

use std::path::PathBuf;

use clap::Subcommand;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use quadlin::pluri::{
    check_4d_consistency, elliptic_special_solution, two_field_f, two_field_g, weights2_from_json,
    weights2_to_json, BaseColor, CubeWeights2, FourDWeights, PlaquetteWeights2, RootSign,
};

use crate::common::{emit, CliError, CliResult, FamilyArgs};

type C = Complex64;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Apply the star-triangle map F to a weight triple.
    Apply {
        /// JSON file with an array of three {a, c} complex pairs.
        weights: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the inverse (triangle-star) map G.
    Invert {
        weights: PathBuf,
        /// Square-root branch: +1 or -1.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized 4D-consistency verification, both base colors.
    Consistency4d {
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks that the family weights at angles (phi1, phi2, 2pi-phi1-phi2)
    /// are mapped by F onto the flipped-angle weights.
    Special {
        #[arg(long, default_value_t = 2.0943951023931953)]
        phi1: f64,
        #[arg(long, default_value_t = 2.0943951023931953)]
        phi2: f64,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_weights(path: &PathBuf) -> Result<CubeWeights2<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    weights2_from_json(&text).map_err(|e| CliError(e.to_string()))
}

#[derive(Serialize)]
struct ConsistencyReport {
    case: String,
    draws: usize,
    max_discrepancy: f64,
}

pub fn run(args: Args) -> CliResult {
    match args.action {
        Action::Apply { weights, out } => {
            let w = load_weights(&weights)?;
            let flipped = two_field_f(&w).map_err(|e| CliError(e.to_string()))?;
            emit(&out, &weights2_to_json(&flipped))?;
            Ok(0)
        }
        Action::Invert { weights, sign, out } => {
            let sign = match sign {
                1 => RootSign::Plus,
                -1 => RootSign::Minus,
                other => return Err(CliError(format!("--sign must be 1 or -1, got {other}"))),
            };
            let w = load_weights(&weights)?;
            let back = two_field_g(&w, sign).map_err(|e| CliError(e.to_string()))?;
            emit(&out, &weights2_to_json(&back.weights))?;
            Ok(0)
        }
        Action::Consistency4d {
            draws,
            seed,
            tol,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut black_max = 0.0f64;
            let mut white_max = 0.0f64;
            let mut done = 0;
            while done < draws {
                let init = FourDWeights {
                    w: core::array::from_fn(|_| {
                        PlaquetteWeights2::new(crand(&mut rng), crand(&mut rng))
                    }),
                };
                let b = match check_4d_consistency(&init, BaseColor::Black, [RootSign::Plus; 4]) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                let mut w_all = 0.0f64;
                let mut ok = true;
                for bits in 0..16u8 {
                    let signs = core::array::from_fn(|k| {
                        if bits & (1 << k) != 0 {
                            RootSign::Minus
                        } else {
                            RootSign::Plus
                        }
                    });
                    match check_4d_consistency(&init, BaseColor::White, signs) {
                        Ok(d) => w_all = w_all.max(d),
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                black_max = black_max.max(b);
                white_max = white_max.max(w_all);
                done += 1;
            }
            let reports = vec![
                ConsistencyReport {
                    case: "black".into(),
                    draws,
                    max_discrepancy: black_max,
                },
                ConsistencyReport {
                    case: "white".into(),
                    draws,
                    max_discrepancy: white_max,
                },
            ];
            emit(&args_out(&out), &serde_json::to_string_pretty(&reports)?)?;
            Ok(if black_max < tol && white_max < tol {
                0
            } else {
                1
            })
        }
        Action::Special {
            phi1,
            phi2,
            family,
            tol,
            out,
        } => {
            let fam = family.family()?;
            let phi3 = std::f64::consts::TAU - phi1 - phi2;
            let (star, tri) = elliptic_special_solution((phi1, phi2, phi3), &fam)
                .map_err(|e| CliError(e.to_string()))?;
            let mapped = two_field_f(&star).map_err(|e| CliError(e.to_string()))?;
            let mut map_dev = 0.0f64;
            let mut unit_dev = 0.0f64;
            for k in 0..3 {
                map_dev = map_dev
                    .max((mapped.w[k].a - tri.w[k].a).norm())
                    .max((mapped.w[k].c - tri.w[k].c).norm());
                unit_dev = unit_dev.max((star.w[k].a * tri.w[k].a - C::new(1.0, 0.0)).norm());
            }
            let pass = map_dev < tol && unit_dev < tol * 10.0;
            let report = serde_json::json!({
                "phis": [phi1, phi2, phi3],
                "max_map_deviation": map_dev,
                "max_unit_deviation": unit_dev,
                "pass": pass,
            });
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn args_out(out: &Option<PathBuf>) -> Option<PathBuf> {
    out.clone()
}

fn crand(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

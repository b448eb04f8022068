//! `quadlin identities`: randomized identity suites with a JSON report.

use std::path::PathBuf;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use quadlin::coeffs::{CoefficientFamily, FamilyRegime};
use quadlin::scalar::{DoubleDouble, Scalar};
use quadlin::theta::ThetaParams;

use crate::common::{emit, extended_precision, CliError, CliResult, FamilyArgs};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Which identities to exercise.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Random draws per identity.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Pass threshold on the largest residual.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// RNG seed; identical seeds give identical reports.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Report destination (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    suite: String,
    samples: usize,
    max_residual: f64,
    pass: bool,
}

pub fn run(args: Args) -> CliResult {
    let regime = args.family.regime()?;
    let suites: Vec<&str> = match args.suite.as_str() {
        "all" => vec!["theta", "functional", "lemmas"],
        s @ ("theta" | "functional" | "lemmas") => vec![s],
        other => {
            return Err(CliError(format!(
                "unknown suite '{other}', expected theta | functional | lemmas | all"
            )))
        }
    };
    if suites.contains(&"lemmas") && regime == FamilyRegime::Degenerate {
        return Err(CliError(
            "the margin suite needs the rectangular or rhombic regime".into(),
        ));
    }
    let extended = extended_precision()?;

    let mut max_residual = 0.0f64;
    for suite in &suites {
        let r = if extended {
            run_suite::<DoubleDouble>(suite, &args)?
        } else {
            run_suite::<f64>(suite, &args)?
        };
        max_residual = max_residual.max(r);
    }
    let pass = max_residual < args.tol;
    let report = Report {
        suite: args.suite.clone(),
        samples: args.samples,
        max_residual,
        pass,
    };
    emit(&args.out, &serde_json::to_string_pretty(&report)?)?;
    Ok(if pass { 0 } else { 1 })
}

fn family_of<S: Scalar>(args: &Args) -> Result<CoefficientFamily<S>, CliError> {
    CoefficientFamily::new(
        args.family.regime()?,
        S::from_f64(args.family.tau0).unwrap(),
        S::from_f64(args.family.lambda0).unwrap(),
    )
    .map_err(|e| CliError(e.to_string()))
}

fn run_suite<S: Scalar>(suite: &str, args: &Args) -> Result<f64, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ suite_salt(suite));
    let max = match suite {
        "theta" => theta_suite::<S>(args, &mut rng)?,
        "functional" => functional_suite::<S>(args, &mut rng)?,
        "lemmas" => lemma_suite::<S>(args, &mut rng)?,
        _ => unreachable!(),
    };
    Ok(max)
}

fn suite_salt(suite: &str) -> u64 {
    match suite {
        "theta" => 0x7468,
        "functional" => 0x66756e,
        _ => 0x6c656d,
    }
}

fn sc<S: Scalar>(x: f64) -> S {
    S::from_f64(x).unwrap()
}

fn theta_suite<S: Scalar>(args: &Args, rng: &mut ChaCha8Rng) -> Result<f64, CliError> {
    let regime = args.family.regime()?;
    let params: ThetaParams<S> = match regime {
        FamilyRegime::Rectangular => ThetaParams::rectangular(sc(args.family.tau0)),
        FamilyRegime::Rhombic => ThetaParams::rhombic(sc(args.family.tau0)),
        FamilyRegime::Degenerate => Ok(ThetaParams::degenerate()),
    }
    .map_err(|e| CliError(e.to_string()))?;
    let mut max = S::zero();
    let one = S::one();
    for _ in 0..args.samples {
        let z = Complex::new(
            sc::<S>(rng.random_range(-3.0..3.0)),
            sc(rng.random_range(-0.4..0.4)),
        );
        let t1 = params.theta(1, z)?;
        max = max.max((t1 + params.theta(1, -z)?).norm() / (one + t1.norm()));
        for k in 2..=4u8 {
            let v = params.theta(k, z)?;
            max = max.max((v - params.theta(k, -z)?).norm() / (one + v.norm()));
        }
        let half = Complex::new(S::FRAC_PI_2(), S::zero());
        let shifts = [
            (params.theta(1, z + half)?, params.theta(2, z)?),
            (params.theta(2, z + half)?, -params.theta(1, z)?),
            (params.theta(3, z + half)?, params.theta(4, z)?),
            (params.theta(4, z + half)?, params.theta(3, z)?),
        ];
        for (lhs, rhs) in shifts {
            max = max.max((lhs - rhs).norm() / (one + rhs.norm()));
        }
    }
    let k = params.constants()?;
    let prod = k.theta2 * k.theta3 * k.theta4;
    max = max.max((k.theta1_prime - prod).norm() / (one + prod.norm()));
    Ok(max.approx_f64())
}

fn pole_free<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    loop {
        let a = rng.random_range(0.0..std::f64::consts::TAU);
        if (a - std::f64::consts::PI).abs() > 0.05 && a > 0.05 && std::f64::consts::TAU - a > 0.05 {
            return sc(a);
        }
    }
}

fn functional_suite<S: Scalar>(args: &Args, rng: &mut ChaCha8Rng) -> Result<f64, CliError> {
    let fam = family_of::<S>(args)?;
    let mut max = S::zero();
    let mut done = 0;
    while done < args.samples {
        let q: Vec<S> = (0..4).map(|_| pole_free::<S>(rng)).collect();
        let c = |x: S| Complex::new(x, S::zero());
        let fff = fam.check_fff(c(q[0]), c(q[1]), c(q[2]), c(q[3]));
        let fhh = fam.check_fhh(q[0], q[1], q[2]);
        let gsum = fam.check_gsum(c(q[0]), c(q[1]), c(q[2]));
        match (fff, fhh, gsum) {
            (Ok(a), Ok(b), Ok(g)) => {
                max = max.max(a.norm()).max(b.norm()).max(g.norm());
                done += 1;
            }
            _ => continue,
        }
    }
    Ok(max.approx_f64())
}

fn lemma_suite<S: Scalar>(args: &Args, rng: &mut ChaCha8Rng) -> Result<f64, CliError> {
    let fam = family_of::<S>(args)?;
    let mut max = S::zero();
    for _ in 0..args.samples {
        let a: S = sc(rng.random_range(0.05..std::f64::consts::PI - 0.05));
        let margin = fam.lemma_margin(a)?;
        if margin <= S::zero() {
            // a violated inequality is an immediate failure
            return Ok(f64::INFINITY);
        }
        let closed = fam.lemma_margin_closed_form(a)?;
        max = max.max((margin - closed).abs());
    }
    Ok(max.approx_f64())
}

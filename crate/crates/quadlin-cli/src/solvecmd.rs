//! `quadlin solve`: field propagation, Dirichlet problems, exponentials.

use std::path::PathBuf;

use clap::Subcommand;
use num_complex::Complex64;

use quadlin::laplace;
use quadlin::quadeq::{
    discrete_exponential, exponential_path_spread, max_face_residual, propagate, FieldAssignment,
};
use quadlin::quadgraph::{Color, QuadGraph};

use crate::common::{emit, CliError, CliResult, FamilyArgs, Format};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Propagate Cauchy data through the quad-equation face by face.
    Quad {
        /// Graph JSON path.
        graph: PathBuf,
        /// Cauchy data (field JSON) determining every face.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the Dirichlet problem of the massive Laplacian.
    Laplace {
        graph: PathBuf,
        /// Boundary values on the black boundary vertices (field JSON).
        #[arg(long)]
        data: PathBuf,
        /// Optional reference field; the maximum interior deviation is printed.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete exponential function from a base black vertex.
    Exp {
        graph: PathBuf,
        /// Bäcklund parameter.
        #[arg(long, default_value_t = 0.9)]
        lambda: f64,
        /// Base black vertex (defaults to the lowest black id).
        #[arg(long)]
        v0: Option<usize>,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_graph(path: &PathBuf) -> Result<QuadGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    QuadGraph::from_json(&text).map_err(|e| CliError(e.to_string()))
}

fn load_field(path: &PathBuf) -> Result<FieldAssignment, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    FieldAssignment::from_json(&text).map_err(|e| CliError(e.to_string()))
}

fn write_field(f: &FieldAssignment, format: Format, out: &Option<PathBuf>) -> Result<(), CliError> {
    let content = match format {
        Format::Json => f.to_json(),
        Format::Csv => f.to_csv(),
        Format::Svg => return Err(CliError("fields export as json or csv".into())),
    };
    emit(out, &content)
}

pub fn run(args: Args) -> CliResult {
    match args.action {
        Action::Quad {
            graph,
            data,
            family,
            tol,
            format,
            out,
        } => {
            let g = load_graph(&graph)?;
            let fam = family.family()?;
            let cauchy = load_field(&data)?;
            let field = propagate(&g, &fam, &cauchy).map_err(|e| CliError(e.to_string()))?;
            let resid = max_face_residual(&g, &fam, &field).map_err(|e| CliError(e.to_string()))?;
            let scale = 1.0 + field.max_abs();
            println!(
                "propagated {} vertices, max face residual {:.3e} (scale {:.3e})",
                field.len(),
                resid,
                scale
            );
            write_field(&field, format, &out)?;
            Ok(if resid < tol * scale { 0 } else { 1 })
        }
        Action::Laplace {
            graph,
            data,
            reference,
            family,
            tol,
            format,
            out,
        } => {
            let g = load_graph(&graph)?;
            let fam = family.family()?;
            let boundary = load_field(&data)?;
            let op = laplace::assemble(&g, &fam).map_err(|e| CliError(e.to_string()))?;
            let interior = op
                .solve_dirichlet(&boundary)
                .map_err(|e| CliError(e.to_string()))?;
            let full = laplace::merge_black_field(&boundary, &interior);
            let resid = op
                .max_residual(&full)
                .map_err(|e| CliError(e.to_string()))?;
            let scale = 1.0 + full.max_abs();
            println!(
                "solved {} interior vertices ({}), max residual {:.3e} (scale {:.3e})",
                interior.len(),
                if op.is_definite() {
                    "conjugate gradients"
                } else {
                    "dense LU"
                },
                resid,
                scale
            );
            if let Some(refpath) = reference {
                let reference = load_field(&refpath)?;
                let mut dev = 0.0f64;
                for (id, v) in interior.iter() {
                    if let Some(r) = reference.get(id) {
                        dev = dev.max((v - r).norm());
                    }
                }
                println!("max interior deviation from reference: {dev:.3e}");
            }
            write_field(&interior, format, &out)?;
            Ok(if resid < tol * scale { 0 } else { 1 })
        }
        Action::Exp {
            graph,
            lambda,
            v0,
            family,
            tol,
            format,
            out,
        } => {
            let g = load_graph(&graph)?;
            let fam = family.family()?;
            let base = match v0 {
                Some(v) => v,
                None => *g
                    .vertex_ids(Color::Black)
                    .first()
                    .ok_or_else(|| CliError("graph has no black vertices".into()))?,
            };
            let e = discrete_exponential(&g, &fam, lambda, base)
                .map_err(|e| CliError(e.to_string()))?;
            let spread = exponential_path_spread(&g, &fam, lambda, &e)
                .map_err(|e| CliError(e.to_string()))?;
            // the transform solves the dual family's quad-equation
            let resid = max_face_residual(&g, &fam.dual(), &e)
                .map_err(|e| CliError(e.to_string()))?
                / (1.0 + e.max_abs());
            println!(
                "exponential at {} vertices: path-independence spread {:.3e}, face residual {:.3e}",
                e.len(),
                spread,
                resid
            );
            debug_assert!(e.get(base) == Some(Complex64::new(1.0, 0.0)));
            write_field(&e, format, &out)?;
            Ok(if spread < tol { 0 } else { 1 })
        }
    }
}

//! `quadlin graph`: generation, flips, validation and export.

use std::path::PathBuf;

use clap::Subcommand;

use quadlin::quadgraph::{
    corner_patch, corner_surface, gen_from_stepped_surface, gen_square_grid, QuadGraph,
};

use crate::common::{emit, CliError, CliResult, Format};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Generate a square grid with (n+1)^2 vertices.
    Square {
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        beta: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the staircase corner patch in Z^3 (the flip testbed).
    Corner {
        /// Plaquette offsets per coordinate plane; 1 gives the bare 3-star.
        #[arg(long, default_value_t = 2)]
        extent: i64,
        /// Comma-separated direction angles.
        #[arg(long, default_value = "0.0,2.0943951023931953,4.1887902047863905")]
        alphas: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star-triangle flip at a degree-3 vertex of a stored graph.
    Flip {
        /// Input graph JSON.
        graph: PathBuf,
        /// Vertex id to flip at.
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG overlay of the flipped embedding.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Validate a stored graph; exits 1 with the violation list if invalid.
    Validate { graph: PathBuf },
}

fn load(path: &PathBuf) -> Result<QuadGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    QuadGraph::from_json(&text).map_err(|e| CliError(e.to_string()))
}

fn parse_alphas(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError(format!("bad angle '{t}': {e}")))
        })
        .collect()
}

fn write_graph(g: &QuadGraph, format: Format, out: &Option<PathBuf>) -> Result<(), CliError> {
    let content = match format {
        Format::Json => g.to_json(),
        Format::Svg => g.to_svg(None),
        Format::Csv => {
            return Err(CliError("graphs export as json or svg, not csv".into()));
        }
    };
    emit(out, &content)
}

pub fn run(args: Args) -> CliResult {
    match args.action {
        Action::Square {
            n,
            alpha,
            beta,
            format,
            out,
        } => {
            let g = gen_square_grid(n, alpha, beta).map_err(|e| CliError(e.to_string()))?;
            write_graph(&g, format, &out)?;
            Ok(0)
        }
        Action::Corner {
            extent,
            alphas,
            format,
            out,
        } => {
            let alphas = parse_alphas(&alphas)?;
            let plaquettes = if extent <= 1 {
                corner_surface()
            } else {
                corner_patch(extent)
            };
            let g = gen_from_stepped_surface(&plaquettes, &alphas)
                .map_err(|e| CliError(e.to_string()))?;
            write_graph(&g, format, &out)?;
            Ok(0)
        }
        Action::Flip {
            graph,
            vertex,
            format,
            out,
            svg,
        } => {
            let g = load(&graph)?;
            let flipped = g
                .star_triangle_flip(vertex)
                .map_err(|e| CliError(e.to_string()))?;
            write_graph(&flipped, format, &out)?;
            if let Some(path) = svg {
                std::fs::write(&path, flipped.to_svg(None))
                    .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(0)
        }
        Action::Validate { graph } => {
            let g = load(&graph)?;
            let violations = g.validate();
            if violations.is_empty() {
                println!(
                    "valid: {} vertices, {} faces",
                    g.vertices().len(),
                    g.faces().len()
                );
                Ok(0)
            } else {
                for v in &violations {
                    println!("violation: {v}");
                }
                Ok(1)
            }
        }
    }
}

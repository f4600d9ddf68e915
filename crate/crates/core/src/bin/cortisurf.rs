use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cortisurf::pipeline::{self, MeshFileFormat, PipelineConfig, RunManifest};
use cortisurf::{Error, ErrorCategory};

#[derive(Parser)]
#[command(name = "cortisurf", version, about = "Collision-free cortical surface meshes from label volumes")]
struct Cli {
    /// JSON config file, or a manifest whose config should be replayed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ply,
    Obj,
}

#[derive(Args)]
struct MeshOut {
    /// Format of written meshes.
    #[arg(long, value_enum)]
    mesh_format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Label volume to four collision-free genus-0 surfaces.
    InitSurfaces {
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Initial pial iso value.
        #[arg(long, allow_hyphen_values = true)]
        lambda_pial: Option<f64>,
        /// Smoothing of the signed distance fields, mm.
        #[arg(long)]
        sdf_sigma: Option<f64>,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[command(flatten)]
        out: MeshOut,
    },
    /// Warp four surfaces by a sequence of stationary velocity fields.
    Deform {
        /// Directory with lh_pial, rh_pial, lh_white and rh_white meshes.
        #[arg(long)]
        meshes: Option<PathBuf>,
        /// Velocity field volume; repeat for each level, coarsest first.
        #[arg(long = "svf")]
        svfs: Vec<PathBuf>,
        #[arg(long)]
        steps: Option<u32>,
        /// Velocity smoothing, mm.
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        out: MeshOut,
    },
    /// Distances, losses and collisions of predicted against reference meshes.
    Metrics {
        #[arg(long)]
        meshes: Option<PathBuf>,
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Points sampled per surface.
        #[arg(long)]
        samples: Option<usize>,
        /// Hausdorff percentile, e.g. 95.
        #[arg(long)]
        percentile: Option<f64>,
        /// Also check the cross-hemisphere pial/white pairs.
        #[arg(long)]
        cross_pairs: bool,
    },
    /// Self-intersections and pairwise collisions of four surfaces.
    Collide {
        #[arg(long)]
        meshes: Option<PathBuf>,
        #[arg(long)]
        cross_pairs: bool,
    },
    /// Synthetic two-hemisphere label volume.
    Phantom {
        /// Gap between the hemispheres, mm; random in 0.2..2 when absent.
        #[arg(long)]
        gap: Option<f64>,
        /// Interlock the hemispheres along the midline.
        #[arg(long)]
        touching: bool,
        #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"])]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// Mean and standard deviation of metrics across run manifests.
    Report {
        #[arg(required = false)]
        manifests: Vec<PathBuf>,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_format(config: &mut PipelineConfig, out: &MeshOut) {
    if let Some(f) = out.mesh_format {
        config.mesh_format = match f {
            Format::Ply => MeshFileFormat::Ply,
            Format::Obj => MeshFileFormat::Obj,
        };
    }
}

/// File config, then flags on top.
fn resolve(cli: &Cli) -> cortisurf::Result<PipelineConfig> {
    let mut c = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    set(&mut c.seed, cli.seed);
    set(&mut c.output, cli.output.clone());
    match &cli.command {
        Command::InitSurfaces {
            labels,
            lambda_pial,
            sdf_sigma,
            max_iterations,
            out,
        } => {
            if labels.is_some() {
                c.labels = labels.clone();
            }
            set(&mut c.init.extraction.lambda_pial_init, *lambda_pial);
            set(&mut c.init.sdf_sigma, *sdf_sigma);
            set(&mut c.init.extraction.max_iterations, *max_iterations);
            set_format(&mut c, out);
        }
        Command::Deform {
            meshes,
            svfs,
            steps,
            sigma,
            out,
        } => {
            if meshes.is_some() {
                c.meshes = meshes.clone();
            }
            if !svfs.is_empty() {
                c.svfs = svfs.clone();
            }
            set(&mut c.deformation.steps, *steps);
            set(&mut c.deformation.sigma, *sigma);
            set_format(&mut c, out);
        }
        Command::Metrics {
            meshes,
            reference,
            samples,
            percentile,
            cross_pairs,
        } => {
            if meshes.is_some() {
                c.meshes = meshes.clone();
            }
            if reference.is_some() {
                c.reference = reference.clone();
            }
            set(&mut c.metrics.samples, *samples);
            set(&mut c.metrics.hausdorff_percentile, *percentile);
            c.metrics.cross_pairs |= cross_pairs;
        }
        Command::Collide { meshes, cross_pairs } => {
            if meshes.is_some() {
                c.meshes = meshes.clone();
            }
            c.metrics.cross_pairs |= cross_pairs;
        }
        Command::Phantom {
            gap,
            touching,
            dims,
            spacing,
        } => {
            if gap.is_some() {
                c.phantom.gap_mm = *gap;
            }
            c.phantom.touching |= touching;
            if let Some(d) = dims {
                c.phantom.dims = [d[0], d[1], d[2]];
            }
            set(&mut c.phantom.spacing, *spacing);
        }
        Command::Report { .. } => {}
    }
    Ok(c)
}

fn summary(m: &RunManifest) -> serde_json::Value {
    let dir = &m.config.output;
    serde_json::json!({
        "command": m.command,
        "manifest": dir.join(pipeline::MANIFEST_FILE),
        "outputs": m.outputs.iter().map(|o| dir.join(o)).collect::<Vec<_>>(),
        "warnings": m.warnings,
    })
}

fn run(cli: Cli) -> cortisurf::Result<serde_json::Value> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Argument("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Argument(format!("cannot set up {n} threads: {e}")))?;
    }
    let config = resolve(&cli)?;
    let manifest = match &cli.command {
        Command::InitSurfaces { .. } => pipeline::cmd_init_surfaces(&config)?,
        Command::Deform { .. } => pipeline::cmd_deform(&config)?,
        Command::Metrics { .. } => pipeline::cmd_metrics(&config)?,
        Command::Collide { .. } => pipeline::cmd_collide(&config)?,
        Command::Phantom { .. } => pipeline::cmd_phantom(&config)?,
        Command::Report { manifests } => {
            let r = pipeline::cmd_report(manifests, &config)?;
            return Ok(serde_json::json!({
                "command": "report",
                "runs": r.runs,
                "outputs": [config.output.join(pipeline::REPORT_JSON)],
            }));
        }
    };
    Ok(summary(&manifest))
}

fn fail(category: ErrorCategory, message: &str) -> ExitCode {
    let line = serde_json::json!({
        "error": category.as_str(),
        "exit_code": category.exit_code(),
        "message": message,
    });
    eprintln!("{line}");
    ExitCode::from(category.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return fail(ErrorCategory::Argument, e.kind().as_str().unwrap_or("invalid arguments"));
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.category(), &e.to_string()),
    }
}

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use holoflow::elliptic::Lattice;
use holoflow::expr::{expr_to_rational, parse_with_lattice, Expr};
use holoflow::flow::{error_series, exact_trajectory, rk4, rkf45};
use holoflow::newton::FieldSpec;
use holoflow::render::{
    build_sphere_mesh, palette, render_level_curve, render_phase_portrait, render_strips_plane,
    render_strips_sphere, write_ply, RasterRegion, StripPartition,
};
use holoflow::Complex64;

use config::{
    parse_complex, parse_lattice, parse_region, parse_resolution, parse_rgb, PartialConfig,
    RunConfig,
};

/// Exact phase portraits of singular complex analytic vector fields.
#[derive(Parser)]
#[command(name = "holoflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strip-flow portrait on a plane raster (binary PPM)
    Plane(CommonArgs),
    /// Strip-flow portrait on the triangulated Riemann sphere (ascii PLY)
    Sphere(CommonArgs),
    /// Strip portrait with one specific level curve overlaid (binary PPM)
    Curve(CommonArgs),
    /// Exact trajectory samples as CSV (tau,re,im)
    Trajectory(CommonArgs),
    /// Error comparison of the exact method against RK4 or RKF45 (CSV)
    Compare(CommonArgs),
    /// Domain-coloring phase portrait of a function (binary PPM)
    Phase(CommonArgs),
    /// Sphere triangulation only (ascii PLY)
    Mesh(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Plane(_) => "plane",
            Command::Sphere(_) => "sphere",
            Command::Curve(_) => "curve",
            Command::Trajectory(_) => "trajectory",
            Command::Compare(_) => "compare",
            Command::Phase(_) => "phase",
            Command::Mesh(_) => "mesh",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Plane(a)
            | Command::Sphere(a)
            | Command::Curve(a)
            | Command::Trajectory(a)
            | Command::Compare(a)
            | Command::Phase(a)
            | Command::Mesh(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Field coefficient f(z), e.g. "exp(z)" or "-1*z^2*(z-1)/(z^2-z+1)"
    #[arg(long)]
    f: Option<String>,
    /// Rational field num/den, e.g. "z*(2*z-i)^2/(2*z+i)^2"
    #[arg(long)]
    rational: Option<String>,
    /// Distinguished parameter Psi(z); the field is 1/Psi'
    #[arg(long)]
    psi: Option<String>,
    /// Newton map Phi(z); the field is -Phi/Phi'
    #[arg(long)]
    phi: Option<String>,
    /// The invariant elliptic field -wp/wp' on the lattice
    #[arg(long = "elliptic-wp")]
    elliptic_wp: bool,
    /// Window x_min,x_max,y_min,y_max (default -2,2,-2,2)
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Raster size WIDTHxHEIGHT (default 800x800)
    #[arg(long)]
    res: Option<String>,
    /// Number of cyclic strip bins (default 24)
    #[arg(long)]
    bins: Option<usize>,
    /// Palette name: duotone | hue12 (default duotone)
    #[arg(long)]
    palette: Option<String>,
    /// Initial condition, complex literal a+bi (no spaces)
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    /// Base point for the Psi normalization (rational fields)
    #[arg(long = "z0-base", allow_hyphen_values = true)]
    z0_base: Option<String>,
    /// Flow time horizon (default 1)
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Trajectory sample count (default 100)
    #[arg(long)]
    steps: Option<usize>,
    /// RK4 step size (compare)
    #[arg(long)]
    h: Option<f64>,
    /// RKF45 tolerance (compare)
    #[arg(long)]
    tol: Option<f64>,
    /// Sphere subdivision depth (default 5)
    #[arg(long)]
    depth: Option<usize>,
    /// Lattice generators g1,g2 as complex literals (default 1+0i,0.25+1.25i)
    #[arg(long, allow_hyphen_values = true)]
    lattice: Option<String>,
    /// Level-curve overlay color r,g,b (default 255,0,0)
    #[arg(long)]
    overlay: Option<String>,
    /// Output path (PPM/PLY/CSV depending on the command)
    #[arg(short, long)]
    output: Option<String>,
    /// JSON config file; explicit flags win over its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective JSON config and exit
    #[arg(long = "dump-config")]
    dump_config: bool,
}

enum CliError {
    Config(String),
    Math(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        match self {
            CliError::Config(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Math(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(3)
            }
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn math_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Math(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    let args = command.args();
    let flags = flags_to_partial(args)?;
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let partial: PartialConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?;
            Some(partial)
        }
        None => None,
    };
    let cfg = PartialConfig::resolve(command.name(), flags, file);

    if args.dump_config {
        println!(
            "{}",
            serde_json::to_string_pretty(&cfg).expect("config serializes")
        );
        return Ok(());
    }
    run(&cfg)
}

fn flags_to_partial(args: &CommonArgs) -> Result<PartialConfig, CliError> {
    Ok(PartialConfig {
        f: args.f.clone(),
        rational: args.rational.clone(),
        psi: args.psi.clone(),
        phi: args.phi.clone(),
        elliptic_wp: args.elliptic_wp.then_some(true),
        region: args
            .region
            .as_deref()
            .map(parse_region)
            .transpose()
            .map_err(config_err)?,
        res: args
            .res
            .as_deref()
            .map(parse_resolution)
            .transpose()
            .map_err(config_err)?,
        bins: args.bins,
        palette: args.palette.clone(),
        z0: args.z0.clone(),
        z0_base: args.z0_base.clone(),
        tau: args.tau,
        steps: args.steps,
        h: args.h,
        tol: args.tol,
        depth: args.depth,
        lattice: args
            .lattice
            .as_deref()
            .map(parse_lattice)
            .transpose()
            .map_err(config_err)?,
        overlay: args
            .overlay
            .as_deref()
            .map(parse_rgb)
            .transpose()
            .map_err(config_err)?,
        output: args.output.clone(),
    })
}

/// Executes a resolved configuration. Artifacts are written atomically
/// (temp file in the same directory, then rename).
fn run(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command.as_str() {
        "plane" => {
            let spec = build_field(cfg)?;
            let region = region_of(cfg)?;
            let part = partition_of(cfg)?;
            let img = render_strips_plane(&spec, &region, &part);
            write_artifact(cfg, |out| img.write_ppm(out))
        }
        "sphere" => {
            let spec = build_field(cfg)?;
            let mesh = build_sphere_mesh(cfg.depth).map_err(config_err)?;
            let part = partition_of(cfg)?;
            let colors = render_strips_sphere(&spec, &mesh, &part);
            write_artifact(cfg, |out| write_ply(&mesh, Some(&colors), out))
        }
        "curve" => {
            let spec = build_field(cfg)?;
            let region = region_of(cfg)?;
            let part = partition_of(cfg)?;
            let z0 = required_z0(cfg)?;
            let mask = render_level_curve(&spec, z0, &region).map_err(math_err)?;
            let mut img = render_strips_plane(&spec, &region, &part);
            mask.overlay(&mut img, cfg.overlay);
            write_artifact(cfg, |out| img.write_ppm(out))
        }
        "trajectory" => {
            let spec = build_field(cfg)?;
            let z0 = required_z0(cfg)?;
            let traj = exact_trajectory(&spec, z0, cfg.tau, cfg.steps).map_err(math_err)?;
            if traj.samples.len() <= 1 {
                return Err(CliError::Math(
                    "trajectory immediately hits a singularity".into(),
                ));
            }
            write_artifact(cfg, |out| {
                writeln!(out, "tau,re,im")?;
                for &(tau, z) in &traj.samples {
                    writeln!(out, "{tau:.16e},{:.16e},{:.16e}", z.re, z.im)?;
                }
                Ok(())
            })
        }
        "compare" => {
            let spec = build_field(cfg)?;
            let z0 = required_z0(cfg)?;
            let traj = match (cfg.h, cfg.tol) {
                (Some(h), None) => {
                    let n = (cfg.tau / h).round().max(1.0) as usize;
                    rk4(&spec, z0, h, n)
                }
                (None, Some(tol)) => rkf45(&spec, z0, cfg.tau, tol),
                _ => {
                    return Err(CliError::Config(
                        "compare needs exactly one of --h (RK4) or --tol (RKF45)".into(),
                    ))
                }
            };
            let series = error_series(&spec, z0, &traj);
            write_artifact(cfg, |out| series.write_csv(out))
        }
        "phase" => {
            let function = phase_function(cfg)?;
            let region = region_of(cfg)?;
            let img = render_phase_portrait(&function, &region);
            write_artifact(cfg, |out| img.write_ppm(out))
        }
        "mesh" => {
            let mesh = build_sphere_mesh(cfg.depth).map_err(config_err)?;
            write_artifact(cfg, |out| write_ply(&mesh, None, out))
        }
        other => Err(CliError::Config(format!("unknown command `{other}`"))),
    }
}

fn lattice_of(cfg: &RunConfig) -> Result<Arc<Lattice>, CliError> {
    let (g1, g2) = match &cfg.lattice {
        Some([a, b]) => (
            parse_complex(a).map_err(config_err)?,
            parse_complex(b).map_err(config_err)?,
        ),
        // Default: the torus lattice used for the invariant elliptic field.
        None => (Complex64::new(1.0, 0.0), Complex64::new(0.25, 1.25)),
    };
    Ok(Arc::new(Lattice::new(g1, g2).map_err(math_err)?))
}

fn field_sources(cfg: &RunConfig) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if let Some(s) = &cfg.f {
        out.push(("f", s.clone()));
    }
    if let Some(s) = &cfg.rational {
        out.push(("rational", s.clone()));
    }
    if let Some(s) = &cfg.psi {
        out.push(("psi", s.clone()));
    }
    if let Some(s) = &cfg.phi {
        out.push(("phi", s.clone()));
    }
    if cfg.elliptic_wp {
        out.push(("elliptic-wp", String::new()));
    }
    out
}

fn single_source(cfg: &RunConfig) -> Result<(&'static str, String), CliError> {
    let sources = field_sources(cfg);
    match sources.len() {
        1 => Ok(sources.into_iter().next().expect("one source")),
        0 => Err(CliError::Config(
            "exactly one field source is required: --f, --rational, --psi, --phi or --elliptic-wp"
                .into(),
        )),
        _ => Err(CliError::Config(format!(
            "exactly one field source allowed, got {}",
            sources
                .iter()
                .map(|(k, _)| format!("--{k}"))
                .collect::<Vec<_>>()
                .join(" and ")
        ))),
    }
}

fn build_field(cfg: &RunConfig) -> Result<FieldSpec, CliError> {
    let (kind, text) = single_source(cfg)?;
    let lattice = Some(lattice_of(cfg)?);
    let parse = |s: &str| {
        parse_with_lattice(s, lattice.clone()).map_err(|e| CliError::Config(format!("--{kind}: {e}")))
    };
    let base = cfg
        .z0_base
        .as_deref()
        .map(parse_complex)
        .transpose()
        .map_err(config_err)?;
    match kind {
        "f" => FieldSpec::from_expr_with_base(parse(&text)?, base).map_err(math_err),
        "rational" => {
            let expr = parse(&text)?;
            let rational = expr_to_rational(&expr).ok_or_else(|| {
                CliError::Config(format!("--rational: `{text}` is not a rational function of z"))
            })?;
            FieldSpec::from_rational(rational, base).map_err(math_err)
        }
        "psi" => Ok(FieldSpec::from_psi(parse(&text)?)),
        "phi" => Ok(FieldSpec::from_phi(parse(&text)?)),
        "elliptic-wp" => {
            let lattice = lattice_of(cfg)?;
            Ok(FieldSpec::from_phi(Expr::Wp(Box::new(Expr::Z), lattice)))
        }
        _ => unreachable!(),
    }
}

/// The function rendered by `phase`: whatever single source was given,
/// interpreted directly as a function of z.
fn phase_function(cfg: &RunConfig) -> Result<Expr, CliError> {
    let (kind, text) = single_source(cfg)?;
    if kind == "elliptic-wp" {
        let lattice = lattice_of(cfg)?;
        return Ok(Expr::Wp(Box::new(Expr::Z), lattice));
    }
    let lattice = Some(lattice_of(cfg)?);
    parse_with_lattice(&text, lattice).map_err(|e| CliError::Config(format!("--{kind}: {e}")))
}

fn region_of(cfg: &RunConfig) -> Result<RasterRegion, CliError> {
    let [x_min, x_max, y_min, y_max] = cfg.region;
    RasterRegion::new(x_min, x_max, y_min, y_max, cfg.res[0], cfg.res[1]).map_err(config_err)
}

fn partition_of(cfg: &RunConfig) -> Result<StripPartition, CliError> {
    let colors = palette(&cfg.palette)
        .ok_or_else(|| CliError::Config(format!("unknown palette `{}`", cfg.palette)))?;
    StripPartition::cyclic(cfg.bins, colors).map_err(config_err)
}

fn required_z0(cfg: &RunConfig) -> Result<Complex64, CliError> {
    let text = cfg
        .z0
        .as_deref()
        .ok_or_else(|| CliError::Config("--z0 is required for this command".into()))?;
    parse_complex(text).map_err(config_err)
}

/// Writes through a temp file in the target directory, then renames, so an
/// interrupted run never leaves a half-written artifact.
fn write_artifact(
    cfg: &RunConfig,
    emit: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let path = cfg
        .output
        .as_deref()
        .ok_or_else(|| CliError::Config("--output is required".into()))?;
    let path = Path::new(path);
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("bad output path {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    let result = (|| -> std::io::Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        emit(&mut file)?;
        file.flush()?;
        drop(file);
        std::fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::Math(format!("writing {}: {e}", path.display()))
    })
}

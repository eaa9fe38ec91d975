//! Command-line front end for `geokernels`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use geokernels::io::{format_matrix_csv, parse_graph_edgelist, parse_off_mesh, parse_points_csv, parse_values_csv};
use geokernels::{
    default_feature_map, feature_matrix, pathwise_sample, posterior, sample_prior, Circle, DiscreteSpectrumSpace,
    GraphSpace, Hypersphere, Kernel, KernelParams, MaternGeometricKernel, MeshSpace, Noise, Point, ProductSpace,
    RegressionProblem, SampleSpec, Space, Su2,
};
use nalgebra::{DMatrix, DVector};

const CIRCLE_LEVELS: usize = 64;
const SPHERE_LEVELS: usize = 30;
const DISCRETE_LEVELS: usize = 500;
const PRODUCT_LEVELS: usize = 200;

#[derive(Debug, Parser)]
#[command(
    name = "geokernels",
    version,
    about = "Heat and Matérn kernels on discrete-spectrum spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalue and multiplicity of each retained level, as `lambda,d` rows.
    Eig {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Kernel matrix K(xs, ys), or K(xs, xs) without --y.
    Kernel {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        /// Second point set.
        #[arg(long, value_name = "FILE")]
        y: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Feature matrix with one row per point.
    Features {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Prior samples, one row per sample; posterior samples when --train is given.
    Sample {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 1)]
        num_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Posterior mean and covariance: row i is `mean_i,cov_i1,...,cov_iN`.
    Posterior {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceKind {
    Circle,
    Hypersphere,
    Su2,
    Graph,
    Mesh,
    Product,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    #[arg(long, value_enum)]
    space: SpaceKind,
    /// Sphere dimension n (S^n).
    #[arg(long)]
    dim: Option<usize>,
    /// Edge-list file.
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// OFF triangle mesh.
    #[arg(long, value_name = "FILE")]
    mesh: Option<PathBuf>,
    /// Product factor `kind[:arg][@levels]`, e.g. `hypersphere:2@10` or `graph:g.txt`; repeat per factor.
    #[arg(long, value_name = "SPEC")]
    factor: Vec<String>,
    /// Number of retained levels.
    #[arg(long)]
    levels: Option<usize>,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Smoothness; `inf` selects the heat kernel.
    #[arg(long, default_value = "2.5", value_parser = parse_nu, allow_negative_numbers = true)]
    nu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lengthscale: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    amplitude: f64,
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Points CSV; defaults to every node on graphs and meshes.
    #[arg(long, value_name = "FILE")]
    x: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Training points CSV.
    #[arg(long, value_name = "FILE")]
    train: Option<PathBuf>,
    /// Training targets, one value per line.
    #[arg(long, value_name = "FILE")]
    targets: Option<PathBuf>,
    /// Observation noise variance.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    noise: f64,
    /// Diagonal jitter added before factorization.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    jitter: f64,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output CSV; standard output when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_nu(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>()
        .map_err(|_| format!("expected a positive number or \"inf\", got {s:?}"))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn in_file(path: &Path, e: geokernels::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        if e.is_numerical() {
            CliError::Numerical(msg)
        } else {
            CliError::Data(msg)
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<geokernels::Error> for CliError {
    fn from(e: geokernels::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Eig { space, out } => {
            let space = build_space(&space)?;
            let levels = space.levels();
            let mut m = DMatrix::zeros(levels.len(), 2);
            for (i, l) in levels.iter().enumerate() {
                m[(i, 0)] = l.eigenvalue;
                m[(i, 1)] = l.dimension as f64;
            }
            emit(&out, format_matrix_csv(&m))
        }
        Command::Kernel {
            space,
            params,
            points,
            y,
            out,
        } => {
            let (kernel, params) = build_kernel(&space, &params)?;
            let xs = read_points_or_all(points.x.as_deref(), kernel.space())?;
            let k = match y {
                Some(path) => {
                    let ys = read_points(&path, kernel.space())?;
                    kernel.kernel_matrix(&params, &xs, &ys)?
                }
                None => kernel.gram_matrix(&params, &xs)?,
            };
            emit(&out, format_matrix_csv(&k))
        }
        Command::Features {
            space,
            params,
            points,
            out,
        } => {
            let (kernel, params) = build_kernel(&space, &params)?;
            let xs = read_points_or_all(points.x.as_deref(), kernel.space())?;
            let fm = default_feature_map(&kernel, &params)?;
            emit(&out, format_matrix_csv(&feature_matrix(&fm, &xs)?))
        }
        Command::Sample {
            space,
            params,
            points,
            data,
            num_samples,
            seed,
            out,
        } => {
            let (kernel, params) = build_kernel(&space, &params)?;
            let xs = read_points_or_all(points.x.as_deref(), kernel.space())?;
            let spec = SampleSpec::new(seed, num_samples)?;
            let fm = default_feature_map(&kernel, &params)?;
            let samples = match read_problem(&data, kernel.space(), false)? {
                Some(prob) => pathwise_sample(&fm, &kernel, &params, &prob, &xs, &spec)?,
                None => sample_prior(&fm, &xs, &spec)?,
            };
            emit(&out, format_matrix_csv(&samples))
        }
        Command::Posterior {
            space,
            params,
            points,
            data,
            out,
        } => {
            let (kernel, params) = build_kernel(&space, &params)?;
            let xs = read_points_or_all(points.x.as_deref(), kernel.space())?;
            let prob = read_problem(&data, kernel.space(), true)?.expect("required");
            let (mean, cov) = posterior(&kernel, &params, &prob, &xs)?;
            let mut m = DMatrix::zeros(xs.len(), xs.len() + 1);
            m.column_mut(0).copy_from(&mean);
            m.columns_mut(1, xs.len()).copy_from(&cov);
            emit(&out, format_matrix_csv(&m))
        }
    }
}

fn read_text(path: &Path, what: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {what} {}: {e}", path.display())))
}

fn read_points(path: &Path, space: &Space) -> CliResult<Vec<Point>> {
    parse_points_csv(&read_text(path, "points file")?, space).map_err(|e| CliError::in_file(path, e))
}

fn read_points_or_all(path: Option<&Path>, space: &Space) -> CliResult<Vec<Point>> {
    match (path, space) {
        (Some(p), _) => read_points(p, space),
        (None, Space::Graph(g)) => Ok((0..g.num_nodes()).map(Point::Index).collect()),
        (None, Space::Mesh(m)) => Ok((0..m.num_vertices()).map(Point::Index).collect()),
        (None, _) => Err(CliError::Usage(format!("--x is required for {} spaces", space.name()))),
    }
}

fn read_problem(data: &DataArgs, space: &Space, required: bool) -> CliResult<Option<RegressionProblem>> {
    let (train, targets) = match (&data.train, &data.targets) {
        (Some(t), Some(y)) => (t, y),
        (None, None) if !required => return Ok(None),
        _ => return Err(CliError::Usage("--train and --targets must be given together".into())),
    };
    let xs = read_points(train, space)?;
    let ys = parse_values_csv(&read_text(targets, "targets file")?).map_err(|e| CliError::in_file(targets, e))?;
    if xs.len() != ys.len() {
        return Err(CliError::Data(format!(
            "{} training points but {} targets",
            xs.len(),
            ys.len()
        )));
    }
    let prob =
        RegressionProblem::new(xs, DVector::from_vec(ys), Noise::Scalar(data.noise))?.with_jitter(data.jitter)?;
    Ok(Some(prob))
}

fn build_kernel(space: &SpaceArgs, p: &ParamArgs) -> CliResult<(MaternGeometricKernel, KernelParams)> {
    let params = KernelParams::new(p.nu, p.lengthscale, p.amplitude)?;
    Ok((MaternGeometricKernel::new(build_space(space)?), params))
}

fn require<'a, T>(value: &'a Option<T>, flag: &str, kind: &str) -> CliResult<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for --space {kind}")))
}

fn build_space(a: &SpaceArgs) -> CliResult<Space> {
    let unused = |flag: &str, given: bool| {
        if given {
            Err(CliError::Usage(
                format!("--{flag} does not apply to --space {:?}", a.space).to_lowercase(),
            ))
        } else {
            Ok(())
        }
    };
    unused("dim", a.dim.is_some() && a.space != SpaceKind::Hypersphere)?;
    unused("graph", a.graph.is_some() && a.space != SpaceKind::Graph)?;
    unused("mesh", a.mesh.is_some() && a.space != SpaceKind::Mesh)?;
    unused("factor", !a.factor.is_empty() && a.space != SpaceKind::Product)?;
    match a.space {
        SpaceKind::Product => {
            if a.factor.len() < 2 {
                return Err(CliError::Usage(
                    "--space product needs at least two --factor flags".into(),
                ));
            }
            let factors = a
                .factor
                .iter()
                .map(|f| factor_space(f))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(ProductSpace::new(factors, a.levels.unwrap_or(PRODUCT_LEVELS))?.into())
        }
        SpaceKind::Hypersphere => {
            let dim = *require(&a.dim, "dim", "hypersphere")?;
            simple_space(a.space, Some(dim.to_string()), a.levels)
        }
        SpaceKind::Graph => simple_space(a.space, Some(path_arg(require(&a.graph, "graph", "graph")?)), a.levels),
        SpaceKind::Mesh => simple_space(a.space, Some(path_arg(require(&a.mesh, "mesh", "mesh")?)), a.levels),
        SpaceKind::Circle | SpaceKind::Su2 => simple_space(a.space, None, a.levels),
    }
}

fn path_arg(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Parses `kind[:arg][@levels]`.
fn factor_space(spec: &str) -> CliResult<Space> {
    let bad = |why: &str| CliError::Usage(format!("invalid --factor {spec:?}: {why}"));
    let (head, levels) = match spec.rsplit_once('@') {
        Some((h, l)) => (
            h,
            Some(l.parse::<usize>().map_err(|_| bad("levels must be an integer"))?),
        ),
        None => (spec, None),
    };
    let (kind, arg) = match head.split_once(':') {
        Some((k, a)) => (k, Some(a.to_string())),
        None => (head, None),
    };
    let kind = SpaceKind::from_str(kind, true).map_err(|_| bad("unknown space kind"))?;
    let needs_arg = matches!(kind, SpaceKind::Hypersphere | SpaceKind::Graph | SpaceKind::Mesh);
    match (kind, needs_arg, arg.is_some()) {
        (SpaceKind::Product, ..) => Err(bad("nested products are not supported")),
        (_, true, false) => Err(bad("this kind needs an argument, e.g. hypersphere:2 or graph:FILE")),
        (_, false, true) => Err(bad("this kind takes no argument")),
        _ => simple_space(kind, arg, levels),
    }
}

fn simple_space(kind: SpaceKind, arg: Option<String>, levels: Option<usize>) -> CliResult<Space> {
    Ok(match kind {
        SpaceKind::Circle => Circle::new(levels.unwrap_or(CIRCLE_LEVELS))?.into(),
        SpaceKind::Su2 => Su2::new(levels.unwrap_or(SPHERE_LEVELS))?.into(),
        SpaceKind::Hypersphere => {
            let arg = arg.expect("checked by caller");
            let dim = arg
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("invalid sphere dimension {arg:?}")))?;
            Hypersphere::new(dim, levels.unwrap_or(SPHERE_LEVELS))?.into()
        }
        SpaceKind::Graph => {
            let path = PathBuf::from(arg.expect("checked by caller"));
            let g = parse_graph_edgelist(&read_text(&path, "graph file")?).map_err(|e| CliError::in_file(&path, e))?;
            let n = levels.unwrap_or(g.num_nodes().min(DISCRETE_LEVELS));
            GraphSpace::new(&g, Some(n))?.into()
        }
        SpaceKind::Mesh => {
            let path = PathBuf::from(arg.expect("checked by caller"));
            let m = parse_off_mesh(&read_text(&path, "mesh file")?).map_err(|e| CliError::in_file(&path, e))?;
            let n = levels.unwrap_or(m.num_vertices().min(DISCRETE_LEVELS));
            MeshSpace::new(&m, n).map_err(|e| CliError::in_file(&path, e))?.into()
        }
        SpaceKind::Product => unreachable!("handled by build_space"),
    })
}

/// Writes the whole output at once; a failed run leaves no file behind.
fn emit(out: &OutArgs, text: String) -> CliResult<()> {
    let Some(path) = &out.out else {
        print!("{text}");
        return Ok(());
    };
    let mut tmp = path.clone().into_os_string();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, text)
        .and_then(|()| std::fs::rename(&tmp, path))
        .map_err(|e| {
            let _ = std::fs::remove_file(&tmp);
            CliError::Data(format!("cannot write {}: {e}", path.display()))
        })
}

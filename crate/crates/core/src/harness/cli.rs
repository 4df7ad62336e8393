//! Command line front end.
//!
//! Every option can also be given in a configuration file (`--config`), either
//! at top level or in a section named after the subcommand; flags win over
//! the file and the section wins over top level. Exit codes: 0 success,
//! 2 usage error, 3 numerical failure, 4 I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use super::config::Config;
use super::convergence::{run_convergence, ConvergenceConfig};
use super::functions::TestFunction;
use super::report::{library_tolerances, write_report, ReportMeta};
use crate::density::{DensityField, DensityParams};
use crate::error::{Error, Result};
use crate::geometry::{generate_centers, Bounds, CenterGenerator, CenterSet, Domain, GeneratorKind};
use crate::interpolation::{fit, lagrange_basis};
use crate::io::{format_points, parse_points, read_points, write_text};
use crate::kernel::SplineOrder;
use crate::stability::{
    decay_csv, default_grid, fit_decay, refinement_sweep, stability_report, sweep_csv, StabilityOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SPLINESTAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "splinestab",
    version,
    about = "Surface spline stability and density experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a center set and write it as a point file.
    GenCenters(Common),
    /// Local density parameter at the centers and on a probe grid.
    Density(Common),
    /// Interpolate data or a test function and evaluate on the default grid.
    Interp(Common),
    /// Evaluate one Lagrange function on the default grid.
    Lagrange(Common),
    /// Classical and penalized Lebesgue functions and constants.
    Lebesgue(Common),
    /// Decay envelope fits of the Lagrange functions.
    Decay(Common),
    /// Refinement sweep over a family of center sets.
    Sweep(Common),
    /// Convergence study of a test function.
    Converge(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Configuration file (key = value, optional [sections]).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; the summary goes next to it as `<stem>.summary.txt`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Point file with the centers.
    #[arg(long)]
    centers: Option<String>,
    /// Domain: `box:lo1,lo2:hi1,hi2` or `ball:c1,c2:radius`.
    #[arg(long)]
    domain: Option<String>,
    /// Support margin of the domain.
    #[arg(long)]
    r0: Option<f64>,
    /// Dimension of the default unit box.
    #[arg(long)]
    dim: Option<usize>,
    /// Generator: uniform, halton, graded or clustered.
    #[arg(long)]
    generator: Option<String>,
    /// Number of points (points per axis for uniform grids).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated sizes for sweeps and convergence studies.
    #[arg(long)]
    sizes: Option<String>,
    /// Grading exponent.
    #[arg(long)]
    exponent: Option<f64>,
    /// Grading focus, comma-separated.
    #[arg(long)]
    focus: Option<String>,
    #[arg(long)]
    clusters: Option<usize>,
    /// Cluster radius.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Spline order m.
    #[arg(long)]
    m: Option<usize>,
    /// Polynomial degree of the local reproductions.
    #[arg(long)]
    degree: Option<usize>,
    /// Stability budget K of the local reproductions.
    #[arg(long)]
    stability: Option<f64>,
    /// Penalty exponent.
    #[arg(long)]
    sigma: Option<f64>,
    /// Slow-growth exponent for decay fits and sweeps.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Lagrange function index.
    #[arg(long)]
    index: Option<usize>,
    /// Probe grid points per axis.
    #[arg(long)]
    resolution: Option<usize>,
    /// File with one data value per center.
    #[arg(long)]
    data: Option<String>,
    /// Test function: bump, truncated_power or polynomial.
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    function_center: Option<String>,
    #[arg(long)]
    function_radius: Option<f64>,
    /// Exponent of the truncated power function.
    #[arg(long)]
    function_k: Option<u32>,
    /// Polynomial coefficients, comma-separated.
    #[arg(long)]
    coefficients: Option<String>,
    /// Probe points, `;`-separated, coordinates comma-separated.
    #[arg(long)]
    probes: Option<String>,
    /// Write the fitted interpolant to this file.
    #[arg(long)]
    save: Option<String>,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        fn s<T: ToString>(v: &Option<T>) -> Option<String> {
            v.as_ref().map(|x| x.to_string())
        }
        vec![
            ("centers", self.centers.clone()),
            ("domain", self.domain.clone()),
            ("r0", s(&self.r0)),
            ("dim", s(&self.dim)),
            ("generator", self.generator.clone()),
            ("n", s(&self.n)),
            ("sizes", self.sizes.clone()),
            ("exponent", s(&self.exponent)),
            ("focus", self.focus.clone()),
            ("clusters", s(&self.clusters)),
            ("radius", s(&self.radius)),
            ("seed", s(&self.seed)),
            ("m", s(&self.m)),
            ("degree", s(&self.degree)),
            ("stability", s(&self.stability)),
            ("sigma", s(&self.sigma)),
            ("epsilon", s(&self.epsilon)),
            ("index", s(&self.index)),
            ("resolution", s(&self.resolution)),
            ("data", self.data.clone()),
            ("function", self.function.clone()),
            ("function_center", self.function_center.clone()),
            ("function_radius", s(&self.function_radius)),
            ("function_k", s(&self.function_k)),
            ("coefficients", self.coefficients.clone()),
            ("probes", self.probes.clone()),
            ("save", self.save.clone()),
        ]
    }
}

/// Runs the command line with `argv` (including the program name) and
/// returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = apply_thread_limit() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn apply_thread_limit() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize =
        value.trim().parse().ok().filter(|t| *t > 0).ok_or_else(|| {
            Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {value:?}"))
        })?;
    #[cfg(feature = "parallel")]
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

struct Output {
    body: String,
    grid: Vec<String>,
    results: String,
}

fn dispatch(command: Command) -> Result<()> {
    type Action = fn(&Config) -> Result<Output>;
    let (name, common, action): (&str, Common, Action) = match command {
        Command::GenCenters(c) => ("gen-centers", c, cmd_gen_centers),
        Command::Density(c) => ("density", c, cmd_density),
        Command::Interp(c) => ("interp", c, cmd_interp),
        Command::Lagrange(c) => ("lagrange", c, cmd_lagrange),
        Command::Lebesgue(c) => ("lebesgue", c, cmd_lebesgue),
        Command::Decay(c) => ("decay", c, cmd_decay),
        Command::Sweep(c) => ("sweep", c, cmd_sweep),
        Command::Converge(c) => ("converge", c, cmd_converge),
    };
    let settings = effective_settings(name, &common)?;
    let output = action(&settings)?;
    let canonical = settings.canonical();
    let meta = ReportMeta {
        command: name.to_string(),
        config_hash: sha256_hex(canonical.as_bytes()),
        config: canonical,
        grid: output.grid,
        tolerances: library_tolerances(),
        results: output.results,
    };
    match &common.out {
        Some(path) => {
            let summary = write_report(path, &output.body, &meta)?;
            log::info!("wrote {} and {}", path.display(), summary.display());
        }
        None => print!("{}", output.body),
    }
    Ok(())
}

/// File settings (top level, then the subcommand's section) overridden by flags.
fn effective_settings(section: &str, common: &Common) -> Result<Config> {
    let mut out = Config::default();
    if let Some(path) = &common.config {
        let file = Config::load(path)?;
        for (k, v) in file.iter() {
            if !k.contains('.') {
                out.set(k, v);
            }
        }
        let prefix = format!("{section}.");
        for (k, v) in file.iter() {
            if let Some(rest) = k.strip_prefix(&prefix) {
                out.set(rest, v);
            }
        }
        // relative paths in a config file are resolved against its directory
        let base = path.parent().unwrap_or(Path::new(""));
        for key in ["centers", "data", "save"] {
            if let Some(v) = out.get(key).map(str::to_string) {
                if Path::new(&v).is_relative() {
                    out.set(key, base.join(&v).display().to_string());
                }
            }
        }
    }
    for (k, v) in common.pairs() {
        if let Some(v) = v {
            out.set(k, v);
        }
    }
    Ok(out)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn floats(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("invalid number {t:?} in {what}")))
        })
        .collect()
}

fn parse_domain(spec: &str, r0: Option<f64>) -> Result<Domain> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bounds = match parts.as_slice() {
        ["box", lo, hi] => Bounds::Box {
            lo: floats(lo, "domain")?,
            hi: floats(hi, "domain")?,
        },
        ["ball", c, r] => Bounds::Ball {
            center: floats(c, "domain")?,
            radius: r
                .trim()
                .parse()
                .map_err(|_| Error::InvalidDomain(format!("invalid radius {r:?}")))?,
        },
        _ => {
            return Err(Error::InvalidDomain(format!(
                "expected box:lo:hi or ball:center:radius, got {spec:?}"
            )))
        }
    };
    let probe = Domain::new(bounds.clone(), f64::MIN_POSITIVE)?;
    Domain::new(bounds, r0.unwrap_or(0.05 * probe.r1()))
}

fn domain_for_generator(s: &Config) -> Result<Domain> {
    let r0 = s.value::<f64>("r0")?;
    match s.get("domain") {
        Some(spec) => parse_domain(spec, r0),
        None => {
            let d = match (s.value::<usize>("dim")?, s.get("focus")) {
                (Some(d), _) => d,
                (None, Some(f)) => floats(f, "focus")?.len(),
                (None, None) => 1,
            };
            let unit = Domain::unit_box(d, 0.05)?;
            match r0 {
                Some(r0) => unit.with_r0(r0),
                None => Ok(unit),
            }
        }
    }
}

fn generator(s: &Config, domain: &Domain, n: usize) -> Result<CenterGenerator> {
    let kind = match s.get("generator").unwrap_or("uniform") {
        "uniform" => GeneratorKind::UniformGrid { per_axis: n },
        "halton" => GeneratorKind::LowDiscrepancy { n },
        "graded" => GeneratorKind::Graded {
            n,
            exponent: s.value_or("exponent", 2.0)?,
            focus: match s.get("focus") {
                Some(f) => floats(f, "focus")?,
                None => domain.centroid(),
            },
        },
        "clustered" => GeneratorKind::Clustered {
            n,
            clusters: s.value_or("clusters", 3)?,
            radius: s.value_or("radius", 0.05 * domain.r1())?,
        },
        other => return Err(Error::InvalidGenerator(format!("unknown generator {other:?}"))),
    };
    Ok(CenterGenerator::new(kind))
}

fn load_centers(s: &Config) -> Result<CenterSet> {
    if let Some(path) = s.get("centers") {
        let pts = read_points(Path::new(path))?;
        let domain = match s.get("domain") {
            Some(spec) => parse_domain(spec, s.value("r0")?)?,
            None => {
                let d = Domain::enclosing(&pts)?;
                match s.value::<f64>("r0")? {
                    Some(r0) => d.with_r0(r0)?,
                    None => d,
                }
            }
        };
        return CenterSet::new(domain, pts);
    }
    let domain = domain_for_generator(s)?;
    let n = s.value_or("n", 17)?;
    generate_centers(&domain, &generator(s, &domain, n)?, s.value_or("seed", 0)?)
}

fn spline_order(s: &Config, dim: usize) -> Result<SplineOrder> {
    SplineOrder::new(s.value_or("m", 2)?, dim)
}

fn density_params(s: &Config, order: SplineOrder) -> Result<DensityParams> {
    let degree = s.value_or("degree", order.m())?;
    Ok(match s.value::<f64>("stability")? {
        Some(k) => DensityParams::with_stability(degree, k),
        None => DensityParams::new(degree, order.dim()),
    })
}

fn test_function(s: &Config, domain: &Domain) -> Result<TestFunction> {
    let center = match s.get("function_center") {
        Some(c) => floats(c, "function_center")?,
        None => domain.centroid(),
    };
    let default_radius = || match domain.bounds() {
        Bounds::Box { lo, hi } => {
            center
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(c, (a, b))| (c - a).min(b - c))
                .fold(f64::INFINITY, f64::min)
                - domain.r0()
        }
        Bounds::Ball { center: bc, radius } => radius - crate::geometry::dist(&center, bc) - domain.r0(),
    };
    let radius = match s.value::<f64>("function_radius")? {
        Some(r) => r,
        None => default_radius(),
    };
    match s.get("function").unwrap_or("bump") {
        "bump" => TestFunction::bump(center, radius),
        "truncated_power" => TestFunction::truncated_power(center, radius, s.value_or("function_k", 3)?),
        "polynomial" => {
            let coefficients = floats(s.get("coefficients").unwrap_or("1"), "coefficients")?;
            let d = center.len();
            let degree = (0..)
                .find(|&k| crate::kernel::poly_dim(k, d) >= coefficients.len())
                .expect("finite");
            let mut c = coefficients;
            c.resize(crate::kernel::poly_dim(degree, d), 0.0);
            TestFunction::polynomial(center, degree, c)
        }
        other => Err(Error::InvalidArgument(format!("unknown function {other:?}"))),
    }
}

fn point_csv_header(d: usize, extra: &str) -> String {
    let names: Vec<String> = (0..d).map(|k| format!("x{k}")).collect();
    format!("{},{extra}\n", names.join(","))
}

fn fmt_row(x: &[f64], values: &[f64]) -> String {
    let mut cols: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
    cols.extend(values.iter().map(|v| format!("{v:.16e}")));
    cols.join(",") + "\n"
}

fn cmd_gen_centers(s: &Config) -> Result<Output> {
    let c = load_centers(s)?;
    Ok(Output {
        body: format_points(c.points()),
        grid: Vec::new(),
        results: format!("points = {}\n", c.len()),
    })
}

fn cmd_density(s: &Config) -> Result<Output> {
    let c = load_centers(s)?;
    let order = spline_order(s, c.dim())?;
    let params = density_params(s, order)?;
    let res = s.value_or("resolution", if c.dim() == 1 { 129 } else { 33 })?;
    let probes = c.domain().probe_grid(res);
    let field = DensityField::compute(&c, params, &probes)?;
    Ok(Output {
        body: field.to_csv(),
        grid: vec![format!(
            "probe grid {res} per axis, {} points in the domain",
            probes.len()
        )],
        results: field.diagnostics_text(Some(c.domain().r0())),
    })
}

fn cmd_interp(s: &Config) -> Result<Output> {
    let c = load_centers(s)?;
    let order = spline_order(s, c.dim())?;
    let data: Vec<f64> = match s.get("data") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_points(&text, path)?.as_flat().to_vec()
        }
        None => {
            let f = test_function(s, c.domain())?;
            c.points().iter().map(|x| f.eval(x)).collect()
        }
    };
    let interp = fit(&c, &data, order)?;
    if let Some(path) = s.get("save") {
        write_text(Path::new(path), &interp.to_text())?;
    }
    let (grid, spec) = default_grid(&c)?;
    let values = interp.evaluate_batch(&grid);
    let mut body = point_csv_header(c.dim(), "value");
    for (x, v) in grid.iter().zip(&values) {
        body.push_str(&fmt_row(x, &[*v]));
    }
    Ok(Output {
        body,
        grid: vec![spec.describe()],
        results: format!(
            "condition_estimate = {:.16e}\nside_condition_violation = {:.16e}\n",
            interp.condition_estimate(),
            interp.side_condition_violation()
        ),
    })
}

fn cmd_lagrange(s: &Config) -> Result<Output> {
    let c = load_centers(s)?;
    let order = spline_order(s, c.dim())?;
    let basis = lagrange_basis(&c, order)?;
    let index = match s.value::<usize>("index")? {
        Some(i) if i < c.len() => i,
        Some(i) => {
            return Err(Error::InvalidArgument(format!(
                "index {i} out of range (n = {})",
                c.len()
            )))
        }
        None => {
            let mid = c.domain().centroid();
            (0..c.len())
                .min_by(|&a, &b| {
                    crate::geometry::dist(c.points().point(a), &mid)
                        .total_cmp(&crate::geometry::dist(c.points().point(b), &mid))
                })
                .expect("nonempty")
        }
    };
    let (grid, spec) = default_grid(&c)?;
    let values = crate::par::map_indexed(grid.len(), |g| basis.value(index, grid.point(g)));
    let mut body = point_csv_header(c.dim(), "chi");
    for (x, v) in grid.iter().zip(&values) {
        body.push_str(&fmt_row(x, &[*v]));
    }
    Ok(Output {
        body,
        grid: vec![spec.describe()],
        results: format!(
            "index = {index}\ncondition_estimate = {:.16e}\n",
            basis.condition_estimate()
        ),
    })
}

fn cmd_lebesgue(s: &Config) -> Result<Output> {
    let c = load_centers(s)?;
    let order = spline_order(s, c.dim())?;
    let options = StabilityOptions {
        sigma: s.value_or("sigma", 0.0)?,
        params: density_params(s, order)?,
        epsilon: s.value("epsilon")?,
        fit_decay: false,
    };
    let report = stability_report(&c, order, &options)?;
    Ok(Output {
        body: report.grid_csv(),
        grid: vec![report.grid.describe()],
        results: report.summary(),
    })
}

fn cmd_decay(s: &Config) -> Result<Output> {
    let c = load_centers(s)?;
    let order = spline_order(s, c.dim())?;
    let params = density_params(s, order)?;
    let basis = lagrange_basis(&c, order)?;
    let (grid, spec) = default_grid(&c)?;
    let field = DensityField::compute(&c, params, &grid)?;
    let epsilon = match s.value::<f64>("epsilon")? {
        Some(e) => e,
        None => field
            .diagnostics()
            .epsilon
            .ok_or_else(|| Error::InvalidArgument("no slow-growth exponent was found; pass --epsilon".into()))?,
    };
    let restrict = c.support_indices();
    let fits = fit_decay(&basis, &field, epsilon, c.domain().r0(), &grid, Some(&restrict))?;
    let unresolved = fits.iter().filter(|f| f.no_decay_resolved).count();
    Ok(Output {
        body: decay_csv(&fits),
        grid: vec![spec.describe()],
        results: format!(
            "epsilon = {epsilon:.16e}\ns = {:.16e}\nr0 = {:.16e}\nfits = {}\nno_decay_resolved = {unresolved}\n",
            crate::stability::decay_exponent(order, epsilon),
            c.domain().r0(),
            fits.len()
        ),
    })
}

fn family(s: &Config, default_sizes: &[usize]) -> Result<(Domain, Vec<CenterGenerator>, u64)> {
    let domain = domain_for_generator(s)?;
    let sizes = s.list::<usize>("sizes")?.unwrap_or_else(|| default_sizes.to_vec());
    let gens = sizes
        .iter()
        .map(|&n| generator(s, &domain, n))
        .collect::<Result<Vec<_>>>()?;
    Ok((domain, gens, s.value_or("seed", 0)?))
}

fn cmd_sweep(s: &Config) -> Result<Output> {
    let (domain, gens, seed) = family(s, &[16, 32, 64, 128])?;
    let members = gens
        .iter()
        .map(|g| generate_centers(&domain, g, seed))
        .collect::<Result<Vec<_>>>()?;
    let order = spline_order(s, domain.dim())?;
    let rows = refinement_sweep(
        &members,
        order,
        s.value_or("sigma", 0.0)?,
        density_params(s, order)?,
        s.value("epsilon")?,
    )?;
    let results = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => format!("penalized_ratio_last_first = {:.16e}\n", b.penalized / a.penalized),
        _ => String::new(),
    };
    Ok(Output {
        body: sweep_csv(&rows),
        grid: vec!["default grid per member (min q / 4 in 1-D, min q / 3 in 2-D, plus centers)".into()],
        results,
    })
}

fn cmd_converge(s: &Config) -> Result<Output> {
    let (domain, levels, seed) = family(s, &[17, 33, 65, 129])?;
    let order = spline_order(s, domain.dim())?;
    let function = test_function(s, &domain)?;
    let probes = match s.get("probes") {
        Some(p) => p
            .split(';')
            .filter(|t| !t.trim().is_empty())
            .map(|t| floats(t, "probes"))
            .collect::<Result<Vec<_>>>()?,
        None => {
            let mut p = vec![domain.centroid()];
            if let Some(f) = s.get("focus") {
                let f = floats(f, "focus")?;
                if f != p[0] {
                    p.push(f);
                }
            }
            p
        }
    };
    let sup_resolution = s.value_or("resolution", if domain.dim() == 1 { 1001 } else { 101 })?;
    let config = ConvergenceConfig {
        domain,
        levels,
        seed,
        function,
        order,
        probes,
        density: density_params(s, order)?,
        sup_resolution,
    };
    let report = run_convergence(&config)?;
    Ok(Output {
        body: report.to_csv(),
        grid: vec![format!("sup grid {sup_resolution} per axis")],
        results: report.summary(),
    })
}

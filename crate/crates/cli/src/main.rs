//! `perforated` command-line driver.
//!
//! Every command writes its data files into `--out-dir` together with a
//! `<name>.sidecar.json` that records the command, its parameters, the seed
//! and the library version. `--replay <sidecar>` reruns a recorded command
//! and reproduces its outputs byte for byte.

// Range checks are written as `!(x > a)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod table;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use perforated::fp_dist::{self, TableRow};
use perforated::lattice::{self, LatticeConfig, DEFAULT_T_CAP};
use perforated::renewal::{self, InitialAgeLaw, MuOptions, RenewalKernel, DEFAULT_SCALE};
use perforated::transport::{self, Placement, ScatterKernel, SimulationConfig};
use perforated::verify::{self, Mode, VerifyOptions, CRITERIA};
use perforated::{spectral, Error};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use table::{read_csv, Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "perforated", version, about = "Mass decay in a perforated plane")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads, 0 for one per core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Rerun the command recorded in a sidecar file.
    #[arg(long, global = true, value_name = "SIDECAR")]
    replay: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
enum Command {
    /// Tabulate p, ṗ and Υ.
    Pdist(PdistArgs),
    /// Sample free paths in the lattice and tabulate the empirical tail.
    FplSample(FplSampleArgs),
    /// Solve the renewal equation for ψ and the mass.
    Renewal(RenewalArgs),
    /// Decay exponent ξ_σ and amplitude C_σ.
    Rate(RateArgs),
    /// Monte Carlo survival curves and age histograms.
    Simulate(SimulateArgs),
    /// Error metrics between a simulated and a renewal survival curve.
    Compare(CompareArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct PdistArgs {
    #[arg(long, default_value_t = fp_dist::DEFAULT_T_MAX)]
    tmax: f64,
    #[arg(long, default_value_t = fp_dist::DEFAULT_POINTS)]
    points: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct FplSampleArgs {
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Hole radius, ε² by default.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_T_CAP)]
    t_cap: f64,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    grid_max: f64,
    #[arg(long, default_value_t = 1001)]
    grid_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RenewalMethod {
    Volterra,
    Powers,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct RenewalArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 20.0)]
    horizon: f64,
    #[arg(long, value_enum, default_value_t = RenewalMethod::Volterra)]
    method: RenewalMethod,
    /// Number of convolution powers for `--method powers`.
    #[arg(long, default_value_t = 200)]
    terms: usize,
    /// Initial mass normalisation: M = scale·ψ/(2πσ).
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Also solve for the age density μ(t, s).
    #[arg(long)]
    mu: bool,
    #[arg(long, default_value_t = 10)]
    stride: usize,
    #[arg(long)]
    s_max: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct RateArgs {
    /// One or more σ values, comma separated.
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    /// Log-spaced sweep `lo:hi:n`.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum KernelChoice {
    Isotropic,
    PolynomialCosine,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Hole radius, ε² by default.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    #[arg(long, default_value_t = 200)]
    bins: usize,
    #[arg(long, value_enum, default_value_t = KernelChoice::Isotropic)]
    kernel: KernelChoice,
    /// `stationary`, `exponential:RATE`, `uniform:WIDTH` or `point`.
    #[arg(long, default_value = "stationary")]
    initial: String,
    /// `torus` or `box:HALF_WIDTH`.
    #[arg(long, default_value = "torus")]
    placement: String,
    /// Times at which to record age histograms, comma separated.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    age_bin_width: f64,
    /// Fit a decay rate on the window `a:b`.
    #[arg(long)]
    fit: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct CompareArgs {
    /// Survival CSV written by `simulate`.
    #[arg(long)]
    mc: PathBuf,
    /// Curve CSV written by `renewal`.
    #[arg(long)]
    renewal: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
struct VerifyArgs {
    /// Smaller sample sizes for a fast run.
    #[arg(long)]
    quick: bool,
    /// Criteria to run, comma separated; all by default.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
    /// Re-verify a table written by `pdist`. Runs no criteria unless
    /// `--criteria` is also given.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    version: String,
    seed: u64,
    format: Format,
    run: Command,
    outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    summary: Value,
}

/// Failure classes, mapped onto exit codes.
enum Failure {
    Verification,
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let numeric = e.chain().any(|c| {
            matches!(
                c.downcast_ref::<Error>(),
                Some(
                    Error::Quadrature { .. }
                        | Error::Bracket { .. }
                        | Error::Invariant(_)
                        | Error::Statistics(_)
                )
            )
        });
        if numeric {
            Failure::Numeric(e)
        } else {
            Failure::Usage(e)
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

struct Ctx {
    seed: u64,
    format: Format,
    out_dir: PathBuf,
}

impl Ctx {
    fn file(&self, stem: &str) -> String {
        match self.format {
            Format::Csv => format!("{stem}.csv"),
            Format::Json => format!("{stem}.json"),
        }
    }

    fn write_table(&self, stem: &str, table: &Table) -> anyhow::Result<String> {
        let name = self.file(stem);
        let path = self.out_dir.join(&name);
        let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        match self.format {
            Format::Csv => table.write_csv(&mut w)?,
            Format::Json => table.write_json(&mut w)?,
        }
        w.flush()?;
        Ok(name)
    }

    fn write_sidecar(&self, stem: &str, run: &Command, outputs: Vec<String>, summary: Value) -> anyhow::Result<()> {
        let sidecar = Sidecar {
            version: perforated::VERSION.to_string(),
            seed: self.seed,
            format: self.format,
            run: run.clone(),
            outputs,
            summary,
        };
        let path = self.out_dir.join(format!("{stem}.sidecar.json"));
        let mut text = serde_json::to_string_pretty(&sidecar)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numeric failure: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let (command, seed, format) = match (&cli.replay, cli.command) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let s: Sidecar = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            (s.run, s.seed, s.format)
        }
        (None, Some(c)) => (c, cli.seed, cli.format),
        (Some(_), Some(_)) => return Err(anyhow::anyhow!("--replay takes no subcommand").into()),
        (None, None) => return Err(anyhow::anyhow!("a subcommand or --replay is required").into()),
    };
    let ctx = Ctx {
        seed,
        format,
        out_dir: cli.out_dir,
    };
    if !matches!(command, Command::Verify(_)) {
        fs::create_dir_all(&ctx.out_dir).with_context(|| format!("creating {}", ctx.out_dir.display()))?;
    }
    match &command {
        Command::Pdist(a) => cmd_pdist(&ctx, &command, a),
        Command::FplSample(a) => cmd_fpl_sample(&ctx, &command, a),
        Command::Renewal(a) => cmd_renewal(&ctx, &command, a),
        Command::Rate(a) => cmd_rate(&ctx, &command, a),
        Command::Simulate(a) => cmd_simulate(&ctx, &command, a),
        Command::Compare(a) => cmd_compare(&ctx, &command, a),
        Command::Verify(a) => cmd_verify(&ctx, a),
    }
}

fn usage(msg: String) -> Failure {
    Failure::Usage(anyhow::anyhow!(msg))
}

fn cmd_pdist(ctx: &Ctx, run: &Command, a: &PdistArgs) -> Result<(), Failure> {
    if !(a.tmax.is_finite() && a.tmax > 0.0) || a.points < 2 {
        return Err(usage(format!(
            "need --tmax > 0 and --points >= 2, got {} and {}",
            a.tmax, a.points
        )));
    }
    let d = fp_dist::tabulate(a.tmax, a.points)?;
    d.check_invariants()?;
    let mut t = Table::new(&["t", "p", "pdot", "upsilon"]);
    for i in 0..d.grid().len() {
        t.push(vec![
            Cell::F(d.grid()[i]),
            Cell::F(d.p_values()[i]),
            Cell::F(d.pdot_values()[i]),
            Cell::F(d.upsilon_values()[i]),
        ]);
    }
    let out = ctx.write_table("pdist", &t)?;
    let summary = json!({
        "tabulation": d.params(),
        "tail_coefficient": d.tail_coefficient(),
        "continuation_coefficient": d.continuation_coefficient(),
    });
    ctx.write_sidecar("pdist", run, vec![out], summary)?;
    Ok(())
}

fn lattice_config(epsilon: f64, radius: Option<f64>, t_cap: f64) -> Result<LatticeConfig, Error> {
    let c = LatticeConfig::with_radius(epsilon, radius.unwrap_or(epsilon * epsilon), t_cap)?;
    c.check_sampling()?;
    Ok(c)
}

fn cmd_fpl_sample(ctx: &Ctx, run: &Command, a: &FplSampleArgs) -> Result<(), Failure> {
    if a.n == 0 || a.grid_points < 2 || !(a.grid_max > 0.0) {
        return Err(usage("need --n >= 1, --grid-points >= 2 and --grid-max > 0".into()));
    }
    let cfg = lattice_config(a.epsilon, a.radius, a.t_cap)?;
    let grid = lattice::uniform_grid(0.0, a.grid_max, a.grid_points);
    let tail = lattice::sample_empirical(&cfg, a.n, ctx.seed, &grid)?;
    let mut t = Table::new(&["t", "phi_hat", "n_samples", "epsilon", "seed"]);
    for (x, phi) in tail.grid.iter().zip(&tail.phi_hat) {
        t.push(vec![
            Cell::F(*x),
            Cell::F(*phi),
            Cell::U(tail.n_samples as u64),
            Cell::F(tail.epsilon),
            Cell::U(tail.seed),
        ]);
    }
    let out = ctx.write_table("fpl_sample", &t)?;
    let lo = 0.1f64.min(a.grid_max);
    let ks = lattice::ks_distance(&tail, fp_dist::default_distribution(), (lo, a.grid_max));
    let summary = json!({ "lattice": cfg, "sup_gap_to_p": ks, "sup_gap_range": [lo, a.grid_max] });
    ctx.write_sidecar("fpl_sample", run, vec![out], summary)?;
    Ok(())
}

fn kernel(sigma: f64) -> Result<RenewalKernel, Error> {
    RenewalKernel::with_default_distribution(sigma)
}

fn cmd_renewal(ctx: &Ctx, run: &Command, a: &RenewalArgs) -> Result<(), Failure> {
    let k = kernel(a.sigma)?;
    let curve = match a.method {
        RenewalMethod::Volterra => renewal::solve_volterra(&k, a.step, a.horizon)?,
        RenewalMethod::Powers => {
            if a.terms == 0 {
                return Err(usage("--terms must be at least 1".into()));
            }
            renewal::convolution_powers(&k, a.terms, a.step, a.horizon)?
        }
    }
    .with_scale(a.scale);
    let (mass, survival) = (curve.mass(), curve.survival());
    let mut t = Table::new(&["t", "psi", "survival", "mass"]);
    for (i, psi) in curve.psi.iter().enumerate() {
        t.push(vec![
            Cell::F(curve.time(i)),
            Cell::F(*psi),
            Cell::F(survival[i]),
            Cell::F(mass[i]),
        ]);
    }
    let mut outputs = vec![ctx.write_table("renewal", &t)?];
    let mut summary = json!({});
    if a.mu {
        if a.stride == 0 {
            return Err(usage("--stride must be at least 1".into()));
        }
        let opts = MuOptions {
            output_stride: a.stride,
            s_max: a.s_max,
            ..MuOptions::exponential(a.sigma)
        };
        let grid = renewal::mu_solver_with(&k, a.step, a.horizon, &opts)?;
        let mut m = Table::new(&["t", "s", "mu"]);
        for (i, tt) in grid.t_grid.iter().enumerate() {
            for (j, s) in grid.s_grid.iter().enumerate() {
                m.push(vec![Cell::F(*tt), Cell::F(*s), Cell::F(grid.value(i, j))]);
            }
        }
        outputs.push(ctx.write_table("age_density", &m)?);
        summary["age_density"] = grid.descriptor();
    }
    ctx.write_sidecar("renewal", run, outputs, summary)?;
    Ok(())
}

fn parse_sweep(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("--sweep expects lo:hi:n with 0 < lo <= hi, n >= 1, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

fn cmd_rate(ctx: &Ctx, run: &Command, a: &RateArgs) -> Result<(), Failure> {
    let mut sigmas = a.sigma.clone();
    if let Some(s) = &a.sweep {
        sigmas.extend(parse_sweep(s)?);
    }
    if sigmas.is_empty() {
        sigmas.push(1.0);
    }
    let mut t = Table::new(&["sigma", "xi", "lambda", "residual", "c_multiplier"]);
    for &sigma in &sigmas {
        let k = kernel(sigma)?;
        let r = spectral::find_xi(&k)?;
        t.push(vec![
            Cell::F(r.sigma),
            Cell::F(r.xi),
            Cell::F(r.lambda),
            Cell::F(r.residual),
            Cell::F(r.c_multiplier),
        ]);
    }
    let out = ctx.write_table("rates", &t)?;
    ctx.write_sidecar("rates", run, vec![out], Value::Null)?;
    Ok(())
}

fn parse_tagged(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    }
}

fn parse_initial(s: &str, sigma: f64) -> Result<InitialAgeLaw, Failure> {
    let bad = || usage(format!("cannot parse initial age law {s:?}"));
    let num = |v: Option<&str>| -> Result<f64, Failure> { v.ok_or_else(bad)?.parse().map_err(|_| bad()) };
    Ok(match parse_tagged(s) {
        ("stationary", None) if sigma > 0.0 => InitialAgeLaw::Exponential { rate: sigma },
        ("stationary", None) | ("point", None) => InitialAgeLaw::PointMass,
        ("exponential", v) => InitialAgeLaw::Exponential { rate: num(v)? },
        ("uniform", v) => InitialAgeLaw::Uniform { width: num(v)? },
        _ => return Err(bad()),
    })
}

fn parse_placement(s: &str) -> Result<Placement, Failure> {
    let bad = || usage(format!("cannot parse placement {s:?}"));
    Ok(match parse_tagged(s) {
        ("torus", None) => Placement::Torus,
        ("box", Some(w)) => Placement::Box {
            half_width: w.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    })
}

fn parse_window(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || usage(format!("--fit expects a:b with a < b, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if !(a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_simulate(ctx: &Ctx, run: &Command, a: &SimulateArgs) -> Result<(), Failure> {
    let lc = lattice_config(a.epsilon, a.radius, DEFAULT_T_CAP)?;
    let mut cfg = SimulationConfig::new(a.sigma, lc, a.n, a.horizon, ctx.seed);
    cfg.n_bins = a.bins;
    cfg.kernel = match a.kernel {
        KernelChoice::Isotropic => ScatterKernel::Isotropic,
        KernelChoice::PolynomialCosine => ScatterKernel::polynomial_cosine()?,
    };
    cfg.initial_age = parse_initial(&a.initial, a.sigma)?;
    cfg.placement = parse_placement(&a.placement)?;
    cfg.checkpoints = a.checkpoints.clone();
    cfg.age_bin_width = a.age_bin_width;
    let window = a.fit.as_deref().map(parse_window).transpose()?;

    let out = transport::simulate(&cfg)?;
    let c = &out.curve;
    let mut t = Table::new(&["t", "survival", "stderr"]);
    for i in 0..c.times.len() {
        t.push(vec![Cell::F(c.times[i]), Cell::F(c.survival[i]), Cell::F(c.stderr[i])]);
    }
    let mut outputs = vec![ctx.write_table("survival", &t)?];
    if !out.histograms.is_empty() {
        let mut h = Table::new(&["t_checkpoint", "s", "density"]);
        for hist in &out.histograms {
            for (s, d) in hist.s.iter().zip(&hist.density) {
                h.push(vec![Cell::F(hist.t_checkpoint), Cell::F(*s), Cell::F(*d)]);
            }
        }
        outputs.push(ctx.write_table("age_histograms", &h)?);
    }
    let mut summary = json!({
        "config": cfg,
        "survivors_at_horizon": c.survivors.last(),
        "histogram_overflow": out.histograms.iter().map(|h| h.overflow).collect::<Vec<_>>(),
    });
    if let Some(w) = window {
        summary["fit"] = match transport::fit_rate(c, w) {
            Ok(f) => json!(f),
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    ctx.write_sidecar("survival", run, outputs, summary)?;
    Ok(())
}

/// Linear interpolation of `(xs, ys)` at `x`, or `None` outside the range.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 {
        return Some(ys[0]);
    }
    if i == n {
        return Some(ys[n - 1]);
    }
    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    Some(ys[i - 1] * (1.0 - w) + ys[i] * w)
}

fn cmd_compare(ctx: &Ctx, run: &Command, a: &CompareArgs) -> Result<(), Failure> {
    let mc = read_csv(&a.mc)?;
    let rn = read_csv(&a.renewal)?;
    let (t_mc, s_mc, se) = (mc.column("t")?, mc.column("survival")?, mc.column("stderr")?);
    let (t_rn, s_rn) = (rn.column("t")?, rn.column("survival")?);

    let mut sim = Vec::new();
    let mut model = Vec::new();
    let mut sup: f64 = 0.0;
    let mut z_max: f64 = 0.0;
    for i in 0..t_mc.len() {
        let Some(m) = interpolate(&t_rn, &s_rn, t_mc[i]) else { continue };
        sim.push(s_mc[i]);
        model.push(m);
        let d = (s_mc[i] - m).abs();
        sup = sup.max(d);
        if se[i] > 0.0 {
            z_max = z_max.max(d / se[i]);
        }
    }
    if sim.is_empty() {
        return Err(usage("the two curves share no time points".into()));
    }
    let l1 = transport::relative_l1(&sim, &model);
    let mut t = Table::new(&["metric", "value"]);
    t.push_labelled("relative_l1", l1);
    t.push_labelled("sup_abs", sup);
    t.push_labelled("max_z", z_max);
    t.push_labelled("points", sim.len() as f64);
    let out = ctx.write_table("compare", &t)?;
    let summary = json!({ "relative_l1": l1, "sup_abs": sup, "max_z": z_max, "points": sim.len() });
    ctx.write_sidecar("compare", run, vec![out], summary)?;
    println!("relative L1 = {l1:.6e}, sup |ΔS| = {sup:.6e}, max |ΔS|/stderr = {z_max:.3}");
    Ok(())
}

fn table_rows(path: &Path) -> Result<Vec<TableRow>, Failure> {
    let t = read_csv(path)?;
    let (ts, p, pdot, ups) = (t.column("t")?, t.column("p")?, t.column("pdot")?, t.column("upsilon")?);
    Ok((0..ts.len())
        .map(|i| TableRow {
            t: ts[i],
            p: p[i],
            pdot: pdot[i],
            upsilon: ups[i],
        })
        .collect())
}

fn cmd_verify(ctx: &Ctx, a: &VerifyArgs) -> Result<(), Failure> {
    let opts = VerifyOptions {
        mode: if a.quick { Mode::Quick } else { Mode::Full },
        seed: ctx.seed,
    };
    let mut ok = true;
    if let Some(path) = &a.table {
        let failures = fp_dist::verify_table(&table_rows(path)?);
        let status = if failures.is_empty() { "PASS" } else { "FAIL" };
        println!("table [{status}] {}", path.display());
        for f in &failures {
            println!("  {f}");
        }
        ok &= failures.is_empty();
    }
    let ids: Vec<u8> = if !a.criteria.is_empty() {
        a.criteria.clone()
    } else if a.table.is_some() {
        Vec::new()
    } else {
        CRITERIA.iter().map(|c| c.0).collect()
    };
    for id in ids {
        if !CRITERIA.iter().any(|c| c.0 == id) {
            return Err(usage(format!("no criterion {id}; valid ids are 1 to {}", CRITERIA.len())));
        }
        match verify::run_criterion(id, &opts) {
            Ok(r) => {
                println!("{}", r.line());
                ok &= r.passed;
            }
            Err(e) => {
                println!("criterion {id:>2} [FAIL] error: {e}");
                ok = false;
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

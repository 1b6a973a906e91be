//! Command-line front end.
//!
//! Values are resolved in the order: built-in defaults, then the `--config`
//! TOML file, then command-line flags. The only environment variable read is
//! `HOTGATE_OUTPUT_DIR`, which overrides `output.dir`.

pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

pub use config::{OutputFormat, RunConfig};
pub use output::{fmt_float, parse_grid, parse_scan_csv};

use crate::analysis::{
    self, anharmonic_fidelity, anharmonic_fidelity_exact, evaluate_gate, FlipMode, SeparationCurve, VarianceState,
};
use crate::error::{Error, Result};
use crate::fock::FockDim;
use crate::gate::engine::MotionalState;
use crate::gate::conditions::condition_solver_with;
use crate::gate::ConditionThresholds;
use crate::trap::{
    self, anharmonic_expansion, default_truncation, mode_frequencies, relative_mode_occupation, AnharmonicExpansion,
    ModeBasis, TrapSpec,
};

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "HOTGATE_OUTPUT_DIR";

const FIDELITY_NOTE: &str =
    "Haar-averaged (4 F_e + 1)/5 from the Choi matrix; purity = mean Tr rho^2 over 36 six-state product inputs";

#[derive(Debug, Parser)]
#[command(name = "hotgate", version, about = "Two-ion interferometric gate simulator")]
pub struct Cli {
    /// TOML configuration file; every key is optional.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (overrides output.dir and HOTGATE_OUTPUT_DIR).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    /// Significant digits of floating output [default: 12].
    #[arg(long, global = true)]
    pub precision: Option<usize>,

    /// Record the wall-clock time in CSV headers.
    #[arg(long, global = true)]
    pub stamp: bool,

    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct PhysicsArgs {
    /// Effective Lamb-Dicke parameter [default: 7].
    #[arg(long)]
    pub eta: Option<f64>,
    /// Centre-of-mass mean phonon number [default: 0].
    #[arg(long)]
    pub n_bar_c: Option<f64>,
    /// Trap exponent p of V = K|x|^p [default: 5/3].
    #[arg(long)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium, mode frequencies and per-mode kick strengths.
    Modes {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Solve for the exponent giving this stretch/centre-of-mass ratio.
        #[arg(long)]
        solve_ratio: Option<f64>,
    },
    /// Branch separation of ion 1 over one period (CSV).
    Separation {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Number of sample times over [0, t_g] [default: 64].
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Addressing-laser parameters and condition checks (JSON).
    Conditions {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Number of full Rabi cycles N [default: 3].
        #[arg(long)]
        cycles: Option<u32>,
    },
    /// One full gate simulation (JSON).
    Gate {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Number of full Rabi cycles N [default: 3].
        #[arg(long)]
        cycles: Option<u32>,
        /// Apply σˣ exactly on the right-moving branch.
        #[arg(long, conflicts_with = "no_flip")]
        idealized_flip: bool,
        /// Skip the addressed pulse; the target becomes the identity.
        #[arg(long)]
        no_flip: bool,
        /// Evaluate the anharmonic correction (off unless given).
        #[arg(long)]
        anharmonic: bool,
        /// Repeat with doubled truncation and compare.
        #[arg(long)]
        check_convergence: bool,
        /// Truncation as `N_c,N_r`.
        #[arg(long)]
        dims: Option<String>,
    },
    /// Fidelity, purity and anharmonic correction over an (η, n̄_c) grid (CSV).
    Scan {
        /// Comma list or start:stop:count [default: 2,4,7].
        #[arg(long)]
        eta_grid: Option<String>,
        /// Comma list or start:stop:count [default: 0,0.5,1].
        #[arg(long)]
        n_bar_grid: Option<String>,
        /// Number of full Rabi cycles N [default: 3].
        #[arg(long)]
        cycles: Option<u32>,
        /// Worker threads [default: all cores].
        #[arg(long)]
        jobs: Option<usize>,
        /// Keep finished rows of an existing output file.
        #[arg(long)]
        skip_existing: bool,
        /// Output file; defaults to scan.csv in the output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Perturbative anharmonic fidelity against full propagation (JSON).
    Anharmonic {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Highest Taylor order, 0 disables [default: 4].
        #[arg(long)]
        order: Option<u32>,
        /// Factor applied to every anharmonic coefficient [default: 1].
        #[arg(long)]
        scale: Option<f64>,
        /// Take the variance over the kicked branches.
        #[arg(long)]
        kicked: bool,
        /// Simpson quadrature points [default: 256].
        #[arg(long)]
        points: Option<usize>,
        /// Truncation as `N_c,N_r`.
        #[arg(long)]
        dims: Option<String>,
    },
}

fn parse_dims(text: &str) -> Result<[usize; 2]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::Config(format!("--dims expects N_c,N_r, got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let c: usize = parts[0].parse().map_err(|_| bad())?;
    let r: usize = parts[1].parse().map_err(|_| bad())?;
    if c < 2 || r < 2 {
        return Err(bad());
    }
    Ok([c, r])
}

fn apply_physics(cfg: &mut RunConfig, p: &PhysicsArgs) {
    if let Some(e) = p.eta {
        cfg.gate.eta = Some(e);
        cfg.gate.eta_single = None;
        cfg.gate.n_pulses = 1;
    }
    if let Some(n) = p.n_bar_c {
        cfg.gate.n_bar_c = n;
    }
    if let Some(x) = p.exponent {
        cfg.trap.exponent = x;
    }
}

/// Where a command's output goes.
struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    fn write(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(p, text)?;
                log::info!("wrote {}", p.display());
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

struct Context {
    cfg: RunConfig,
    out_dir: Option<PathBuf>,
    stamp: bool,
}

impl Context {
    fn digits(&self) -> usize {
        self.cfg.output.precision
    }

    fn sink(&self, name: &str, ext: &str) -> Sink {
        Sink { path: self.out_dir.as_ref().map(|d| d.join(format!("{name}.{ext}"))) }
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| Error::Numeric(e.to_string()))?;
        let text = serde_json::to_string_pretty(&output::round_json(v, self.digits()))
            .map_err(|e| Error::Numeric(e.to_string()))?;
        self.sink(name, "json").write(&(text + "\n"))
    }

    fn ext(&self) -> &'static str {
        match self.cfg.output.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    /// A table as CSV with a `#` header block, or as a JSON object.
    fn table(&self, meta: &[(String, String)], columns: &[&str], rows: &[Vec<String>]) -> Result<String> {
        match self.cfg.output.format {
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                output::write_table(&mut buf, meta, columns, rows)?;
                String::from_utf8(buf).map_err(|e| Error::Numeric(e.to_string()))
            }
            OutputFormat::Json => {
                let cell = |s: &String| match s.parse::<f64>() {
                    Ok(x) => serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number),
                    Err(_) if s.is_empty() => serde_json::Value::Null,
                    Err(_) => serde_json::Value::String(s.clone()),
                };
                let doc = json!({
                    "meta": meta.iter().cloned().collect::<BTreeMap<_, _>>(),
                    "columns": columns,
                    "rows": rows.iter().map(|r| r.iter().map(cell).collect::<Vec<_>>()).collect::<Vec<_>>(),
                });
                let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Numeric(e.to_string()))?;
                Ok(text + "\n")
            }
        }
    }

    fn f(&self, x: f64) -> String {
        fmt_float(x, self.digits())
    }

    fn meta(&self, command: &str) -> Vec<(String, String)> {
        let mut m = vec![
            ("hotgate".to_string(), command.to_string()),
            ("config_hash".to_string(), self.cfg.hash()),
            ("exponent".to_string(), self.f(self.cfg.trap.exponent)),
        ];
        if self.stamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            m.push(("generated_unix".to_string(), secs.to_string()));
        }
        m
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = cli.precision {
        cfg.output.precision = p;
    }
    let out_dir = cli
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from));
    let stamp = cli.stamp;
    match cli.command {
        Command::Modes { physics, solve_ratio } => {
            apply_physics(&mut cfg, &physics);
            cfg.validate()?;
            cmd_modes(&Context { cfg, out_dir, stamp }, solve_ratio)
        }
        Command::Separation { physics, samples } => {
            apply_physics(&mut cfg, &physics);
            if let Some(s) = samples {
                cfg.separation.samples = s;
            }
            cfg.validate()?;
            cmd_separation(&Context { cfg, out_dir, stamp })
        }
        Command::Conditions { physics, cycles } => {
            apply_physics(&mut cfg, &physics);
            if let Some(n) = cycles {
                cfg.gate.n_cycles = n;
            }
            cfg.validate()?;
            cmd_conditions(&Context { cfg, out_dir, stamp })
        }
        Command::Gate { physics, cycles, idealized_flip, no_flip, anharmonic, check_convergence, dims } => {
            apply_physics(&mut cfg, &physics);
            if let Some(n) = cycles {
                cfg.gate.n_cycles = n;
            }
            if idealized_flip {
                cfg.gate.flip = FlipMode::Idealized;
            }
            if no_flip {
                cfg.gate.flip = FlipMode::Off;
            }
            if check_convergence {
                cfg.gate.check_convergence = true;
            }
            if let Some(d) = dims {
                cfg.gate.dims = Some(parse_dims(&d)?);
            }
            cfg.anharmonic.enabled = anharmonic;
            cfg.validate()?;
            cmd_gate(&Context { cfg, out_dir, stamp })
        }
        Command::Scan { eta_grid, n_bar_grid, cycles, jobs, skip_existing, output } => {
            if let Some(g) = eta_grid {
                cfg.scan.eta = parse_grid(&g)?;
            }
            if let Some(g) = n_bar_grid {
                cfg.scan.n_bar_c = parse_grid(&g)?;
            }
            if let Some(n) = cycles {
                cfg.gate.n_cycles = n;
            }
            cfg.validate()?;
            let ctx = Context { cfg, out_dir, stamp };
            let path = output.or_else(|| ctx.out_dir.as_ref().map(|d| d.join(format!("scan.{}", ctx.ext()))));
            cmd_scan(&ctx, path.as_deref(), jobs, skip_existing)
        }
        Command::Anharmonic { physics, order, scale, kicked, points, dims } => {
            apply_physics(&mut cfg, &physics);
            if let Some(o) = order {
                cfg.anharmonic.order = o;
            }
            if let Some(s) = scale {
                cfg.anharmonic.scale = s;
            }
            if kicked {
                cfg.anharmonic.variance_state = VarianceState::Kicked;
            }
            if let Some(p) = points {
                cfg.anharmonic.quadrature_points = p;
            }
            if let Some(d) = dims {
                cfg.gate.dims = Some(parse_dims(&d)?);
            }
            cfg.validate()?;
            cmd_anharmonic(&Context { cfg, out_dir, stamp })
        }
    }
}

fn basis_for(spec: &TrapSpec, cfg: &RunConfig) -> Result<ModeBasis> {
    let eta = cfg.eta_effective()?;
    match cfg.gate.dims {
        Some([c, r]) => ModeBasis::new(spec, eta, FockDim::new(c)?, FockDim::new(r)?),
        None => ModeBasis::with_default_truncation(spec, eta, cfg.gate.n_bar_c),
    }
}

#[derive(Serialize)]
struct ModesReport {
    exponent: f64,
    stiffness: f64,
    coulomb: f64,
    mass: f64,
    x_e: f64,
    nu_c: f64,
    nu_r: f64,
    ratio: f64,
    x0: f64,
    width_c: f64,
    width_r: f64,
    eta: f64,
    eta_c: f64,
    eta_r: f64,
}

fn cmd_modes(ctx: &Context, solve_ratio: Option<f64>) -> Result<()> {
    if let Some(r) = solve_ratio {
        let p = trap::solve_exponent_for_ratio(r)?;
        let spec = TrapSpec::with_unit_com_frequency(p, 1.0, 1.0, 0.0)?;
        let (nc, nr) = mode_frequencies(&spec)?;
        return ctx.json("modes", &json!({ "target_ratio": r, "exponent": p, "ratio": nr / nc }));
    }
    let spec = ctx.cfg.trap_spec()?;
    let b = ModeBasis::new(&spec, ctx.cfg.eta_effective()?, FockDim::new(2)?, FockDim::new(2)?)?;
    let report = ModesReport {
        exponent: spec.exponent,
        stiffness: spec.stiffness,
        coulomb: spec.coulomb,
        mass: spec.mass,
        x_e: b.x_e,
        nu_c: b.nu_c,
        nu_r: b.nu_r,
        ratio: b.nu_r / b.nu_c,
        x0: b.x0,
        width_c: b.width_c,
        width_r: b.width_r,
        eta: b.eta,
        eta_c: b.eta_c,
        eta_r: b.eta_r,
    };
    ctx.json("modes", &report)
}

fn cmd_separation(ctx: &Context) -> Result<()> {
    let spec = ctx.cfg.trap_spec()?;
    let basis = basis_for(&spec, &ctx.cfg)?;
    let s = &ctx.cfg.separation;
    let curve = SeparationCurve::compute(&basis, basis.eta, ctx.cfg.gate.n_bar_c, s.samples, s.tolerance)?;
    if !curve.converged {
        return Err(Error::Convergence(format!(
            "separation changed by {:.3e} when truncation was doubled",
            curve.doubling_change
        )));
    }
    let peak = curve.d_numeric.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut meta = ctx.meta("separation");
    meta.extend([
        ("eta".to_string(), ctx.f(basis.eta)),
        ("n_bar_c".to_string(), ctx.f(ctx.cfg.gate.n_bar_c)),
        ("x0".to_string(), ctx.f(basis.x0)),
        ("dims".to_string(), format!("{}x{}", basis.dim_c, basis.dim_r)),
        ("max_d_over_x0_eta".to_string(), ctx.f(peak / (basis.x0 * basis.eta))),
        ("columns".to_string(), "t, analytic separation, propagated centroid difference".to_string()),
    ]);
    let rows: Vec<Vec<String>> = (0..curve.times.len())
        .map(|i| vec![ctx.f(curve.times[i]), ctx.f(curve.d_analytic[i]), ctx.f(curve.d_numeric[i])])
        .collect();
    let text = ctx.table(&meta, &["t", "d_analytic", "d_numeric"], &rows)?;
    ctx.sink("separation", ctx.ext()).write(&text)
}

fn cmd_conditions(ctx: &Context) -> Result<()> {
    let spec = ctx.cfg.trap_spec()?;
    let basis = ModeBasis::new(&spec, ctx.cfg.eta_effective()?, FockDim::new(2)?, FockDim::new(2)?)?;
    let g = &ctx.cfg.gate;
    let thresholds = ConditionThresholds { margin: g.margin, ..ConditionThresholds::default() };
    let (pulse, report) =
        condition_solver_with(&basis, g.n_bar_c, g.n_cycles, g.t1_fraction * basis.gate_time(), thresholds)?;
    ctx.json(
        "conditions",
        &json!({
            "pulse": pulse,
            "omega0_t1": pulse.omega0 * pulse.duration,
            "report": report,
        }),
    )
}

fn cmd_gate(ctx: &Context) -> Result<()> {
    let spec = ctx.cfg.trap_spec()?;
    let settings = ctx.cfg.gate_settings()?;
    let report = evaluate_gate(&spec, &settings)?;
    ctx.json("gate", &json!({ "config_hash": ctx.cfg.hash(), "fidelity_convention": FIDELITY_NOTE, "report": report }))?;
    if report.truncation.converged == Some(false) {
        return Err(Error::Convergence(format!(
            "fidelity changed by {:.3e} when truncation was doubled",
            report.truncation.doubling_change.unwrap_or(f64::NAN)
        )));
    }
    if report.f_cor_converged == Some(false) {
        return Err(Error::Convergence("anharmonic quadrature did not converge".into()));
    }
    Ok(())
}

fn scan_row_fields(ctx: &Context, row: &analysis::ScanRow) -> Vec<String> {
    let (eta, nb) = (ctx.f(row.eta), ctx.f(row.n_bar_c));
    match &row.outcome {
        Ok(r) => vec![
            eta,
            nb,
            ctx.f(r.fidelity),
            ctx.f(r.purity),
            r.f_cor.map(|x| ctx.f(x)).unwrap_or_default(),
            r.truncation.dim_c.to_string(),
            r.truncation.dim_r.to_string(),
            "ok".to_string(),
        ],
        Err(e) => vec![
            eta,
            nb,
            "nan".into(),
            "nan".into(),
            String::new(),
            String::new(),
            String::new(),
            format!("error: {}", e.message),
        ],
    }
}

fn cmd_scan(ctx: &Context, path: Option<&Path>, jobs: Option<usize>, skip_existing: bool) -> Result<()> {
    let spec = ctx.cfg.trap_spec()?;
    let base = ctx.cfg.gate_settings()?;
    let grid = ctx.cfg.grid();
    if grid.is_empty() {
        return Err(Error::Config("scan grid is empty".into()));
    }
    let hash = ctx.cfg.hash();
    let mut existing: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    if skip_existing {
        if ctx.cfg.output.format != OutputFormat::Csv {
            return Err(Error::Config("--skip-existing needs CSV output".into()));
        }
        let p = path.ok_or_else(|| Error::Config("--skip-existing needs an output file".into()))?;
        if p.exists() {
            let table = parse_scan_csv(&std::fs::read_to_string(p)?)?;
            match table.meta.get("config_hash") {
                Some(h) if *h == hash => {}
                other => {
                    return Err(Error::Config(format!(
                        "{} was produced with config hash {:?}, current is {hash}",
                        p.display(),
                        other
                    )))
                }
            }
            for rec in table.records.into_iter().filter(|r| r.is_ok()) {
                existing.insert(rec.key(), rec.fields);
            }
        }
    }
    let todo: Vec<(f64, f64)> =
        grid.iter().copied().filter(|&(e, n)| !existing.contains_key(&(ctx.f(e), ctx.f(n)))).collect();
    log::info!("scan: {} points, {} already done", grid.len(), grid.len() - todo.len());
    let computed = if todo.is_empty() { Vec::new() } else { analysis::scan(&spec, &todo, &base, jobs)? };
    let failures = computed.iter().filter(|r| r.outcome.is_err()).count();
    for row in &computed {
        existing.insert((ctx.f(row.eta), ctx.f(row.n_bar_c)), scan_row_fields(ctx, row));
    }
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|&(e, n)| existing.get(&(ctx.f(e), ctx.f(n))).cloned().expect("every grid point evaluated"))
        .collect();
    let mut meta = ctx.meta("scan");
    meta.extend([
        ("n_cycles".to_string(), ctx.cfg.gate.n_cycles.to_string()),
        ("flip".to_string(), format!("{:?}", base.flip).to_lowercase()),
        ("fidelity".to_string(), FIDELITY_NOTE.to_string()),
        (
            "f_cor".to_string(),
            match &base.anharmonic {
                Some(a) => format!("order {}, variance over {:?} state", a.order, a.variance_state).to_lowercase(),
                None => "disabled".to_string(),
            },
        ),
    ]);
    let text = ctx.table(&meta, &output::SCAN_COLUMNS, &rows)?;
    Sink { path: path.map(Path::to_path_buf) }.write(&text)?;
    if !computed.is_empty() && failures == computed.len() {
        let code_err = computed[0].outcome.as_ref().expect_err("all rows failed");
        return Err(code_err.to_error());
    }
    Ok(())
}

fn cmd_anharmonic(ctx: &Context) -> Result<()> {
    let spec = ctx.cfg.trap_spec()?;
    let a = &ctx.cfg.anharmonic;
    let n_bar_c = ctx.cfg.gate.n_bar_c;
    let n_bar_r = relative_mode_occupation(n_bar_c);
    let eta = ctx.cfg.eta_effective()?;
    let basis = match ctx.cfg.gate.dims {
        Some([c, r]) => ModeBasis::new(&spec, eta, FockDim::new(c)?, FockDim::new(r)?)?,
        None => {
            // The literal reading needs no room for the kick.
            let probe = ModeBasis::new(&spec, eta, FockDim::new(2)?, FockDim::new(2)?)?;
            let (ec, er) = match a.variance_state {
                VarianceState::Initial => (0.0, 0.0),
                VarianceState::Kicked => (probe.eta_c, probe.eta_r),
            };
            probe.with_dims(
                FockDim::new(default_truncation(n_bar_c, ec))?,
                FockDim::new(default_truncation(n_bar_r, er))?,
            )
        }
    };
    let expansion = if a.order == 0 {
        AnharmonicExpansion::empty(0)
    } else {
        anharmonic_expansion(&spec, a.order)?.scaled(a.scale)
    };
    let motion = MotionalState::thermal(&basis, n_bar_c, n_bar_r)?.to_ensemble(ctx.cfg.gate.drop_tol)?;
    let state = analysis::anharmonic::variance_state(&basis, &motion, a.variance_state)?;
    let pert = anharmonic_fidelity(&basis, &expansion, &state, a.quadrature_points)?;
    let exact = anharmonic_fidelity_exact(&basis, &expansion, &state)?;
    ctx.json(
        "anharmonic",
        &json!({
            "config_hash": ctx.cfg.hash(),
            "order": a.order,
            "scale": a.scale,
            "variance_state": a.variance_state,
            "dims": [basis.dim_c.get(), basis.dim_r.get()],
            "coefficients": expansion.coefficients.iter().map(|(k, v)| json!({"a": k.0, "b": k.1, "c": v})).collect::<Vec<_>>(),
            "f_cor_perturbative": pert.f_cor,
            "f_cor_exact": exact,
            "delta": (pert.f_cor - exact).abs(),
            "quadrature_points": pert.points,
            "quadrature_converged": pert.converged,
        }),
    )?;
    if !pert.converged {
        return Err(Error::Convergence(format!(
            "quadrature changed F_cor by {:.3e} when points were doubled",
            pert.doubling_change
        )));
    }
    Ok(())
}

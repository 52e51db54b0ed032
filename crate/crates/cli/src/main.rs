//! `ncdf`: build Dirichlet forms from JSON specs, verify them and tabulate
//! their spectral data.
//!
//! Exit codes: 0 everything passed, 1 bad input or violated precondition,
//! 2 a mathematical check failed (witness on stderr), 3 a check breached its
//! tolerance by less than a factor 10 (numerically inconclusive).
//!
//! The input schema is documented in [`specs`].

mod specs;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncdf_core::forms::{CheckResult, CheckStatus, FormOperator, Suite, VerificationReport, VerifyConfig};
use ncdf_core::numeric::TolerancePolicy;
use ncdf_core::sampling::{gue, rng_for, stream_id};
use ncdf_core::spectral::{
    cheby_growth, cheby_heat_trace, chebyshev, gamma_identities, growth, growth_csv, heat_csv, levels_csv, spectrum,
    unitary_orbit_epsilon, HEAT_GRID,
};
use ncdf_core::spin::{beta_threshold, ergodicity_check, kms_state, park_quadrature_convergence, phi_norm};
use ncdf_core::Error;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Math { message: String, witness: Value },
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotMarkovian { reason, witness } => CliError::Math {
                message: reason,
                witness,
            },
            Error::NoConvergence(_) => CliError::Numerical(e.to_string()),
            Error::QuadratureTail { bound, suggested_t } => CliError::Input(format!(
                "quadrature tail bound {bound:e} exceeds tol_prop; rerun with quadrature.t_max >= {suggested_t}"
            )),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Math { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Input(m) => json!({"error": "input", "message": m}),
            CliError::Math { message, witness } => json!({"error": "math", "message": message, "witness": witness}),
            CliError::Numerical(m) => json!({"error": "numerical", "message": m}),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Full,
    Markov,
    Kms,
    Gamma,
}

#[derive(Parser, Debug)]
#[command(name = "ncdf", version, about = "Finite-dimensional noncommutative Dirichlet forms")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long = "tol-psd", global = true)]
    tol_psd: Option<f64>,
    #[arg(long = "tol-prop", global = true)]
    tol_prop: Option<f64>,
    /// Output directory; without it the main result goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table format (reports are always JSON).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a form from a spec; writes form.json and its spectrum.
    Build { spec: PathBuf },
    /// Run a verification suite on a form file (or a spec, built first).
    Verify {
        form: PathBuf,
        #[arg(long, value_enum, default_value_t = SuiteArg::Full)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Levels, growth counts and heat traces of a form, or the exact
    /// Chebyshev data with `--chebyshev N n_max`.
    Spectral {
        form: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["N", "N_MAX"])]
        chebyshev: Option<Vec<u64>>,
        /// Largest n for the growth counts of a form.
        #[arg(long, default_value_t = 50)]
        n_max: usize,
    },
    /// Build a smeared-modular form for a Heisenberg chain, with its KMS
    /// audit, quadrature and ergodicity reports.
    SpinBuild { spec: PathBuf },
    /// Track the coarse-correspondence state as t = 2^-k → 0.
    CoarseDemo {
        /// Form or spec; defaults to the σx, σy, σz commutator form on M₂.
        form: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        k_max: u32,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

struct Ctx {
    seed: u64,
    tol: TolerancePolicy,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Ctx {
    /// Write `name` atomically under the output directory.
    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let Some(dir) = &self.out else {
            return Ok(());
        };
        write_atomic(dir, name, contents)
    }

    fn emit(&self, name: &str, contents: &str) -> Result<(), CliError> {
        if self.out.is_some() {
            self.write(name, contents)
        } else {
            print!("{contents}");
            Ok(())
        }
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", dir.join(name).display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(dir.join(name)).map_err(|e| io(e.error))?;
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: invalid JSON: {e}", path.display())))
}

fn spectrum_table(ctx: &Ctx, form: &FormOperator) -> (String, String) {
    let rep = spectrum(form);
    match ctx.format.unwrap_or(Format::Json) {
        Format::Csv => ("spectrum.csv".into(), levels_csv(&rep.levels)),
        Format::Json => (
            "spectrum.json".into(),
            pretty(&serde_json::to_value(&rep).expect("json")),
        ),
    }
}

fn cmd_build(ctx: &Ctx, spec: &Path) -> Result<u8, CliError> {
    let v = read_json(spec)?;
    let (form, extra) = specs::build(&v, &ctx.tol)?;
    ctx.write("form.json", &pretty(&form.to_json()))?;
    let (name, table) = spectrum_table(ctx, &form);
    ctx.write(&name, &table)?;
    let levels = spectrum(&form).levels;
    let summary = json!({
        "builder": form.provenance().builder,
        "dimension": form.space().dim(),
        "levels": levels,
        "report": extra,
    });
    println!("{}", serde_json::to_string(&summary).expect("json"));
    Ok(0)
}

fn gamma_suite(form: &FormOperator, cfg: &VerifyConfig) -> Result<Vec<CheckResult>, CliError> {
    let alg = form.space().algebra();
    let mut rng = rng_for(cfg.seed, stream_id("gamma_epsilon"));
    let epsilon = unitary_orbit_epsilon(form, &mut rng, 1000);
    let mut rng = rng_for(cfg.seed, stream_id("gamma_y"));
    let tol = cfg.tol.tol_prop;
    let (mut split, mut contraction, mut chain) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.n_samples {
        let blocks = alg.block_dims().iter().map(|&n| gue(&mut rng, n)).collect();
        let y = ncdf_core::algebra::Element::new(alg, blocks)?;
        let y = y.scale(ncdf_core::numeric::cr(0.5 / y.norm()));
        let r = gamma_identities(form, &y, epsilon, tol)?;
        split = split.max(r.splitting_residual.max(r.unitary_residual));
        contraction = contraction.max((r.energy_root - r.energy_y).max(0.0) / form.scale());
        let bound = if epsilon > 0.0 { 8.0 / epsilon * r.energy_y } else { 0.0 };
        chain = chain.max((r.variance - bound).max(0.0));
    }
    let n = cfg.n_samples;
    let mut chain_check = CheckResult::new("poincare_chain", chain, tol, n).with_note(format!("epsilon = {epsilon}"));
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        chain_check = CheckResult::new("poincare_chain", f64::INFINITY, tol, n)
            .with_note("unitary orbit bound is zero: the form is not ergodic");
    }
    Ok(vec![
        CheckResult::new("unitary_splitting", split, 1e-10, n),
        CheckResult::new("markov_contraction", contraction, tol, n),
        chain_check,
    ])
}

fn cmd_verify(ctx: &Ctx, path: &Path, suite: SuiteArg, samples: usize) -> Result<u8, CliError> {
    let form = specs::load_form(&read_json(path)?, &ctx.tol)?;
    let cfg = VerifyConfig {
        tol: ctx.tol,
        seed: ctx.seed,
        n_samples: samples,
        ..VerifyConfig::default()
    };
    let report = match suite {
        SuiteArg::Full => form.verify(Suite::Full, &cfg)?,
        SuiteArg::Markov => form.verify(Suite::Markov, &cfg)?,
        SuiteArg::Kms => form.verify(Suite::Kms, &cfg)?,
        SuiteArg::Gamma => VerificationReport {
            subject: form.provenance().clone(),
            seed: ctx.seed,
            checks: gamma_suite(&form, &cfg)?,
        },
    };
    ctx.emit("report.json", &pretty(&serde_json::to_value(&report).expect("json")))?;
    let mut stderr = std::io::stderr().lock();
    for c in report
        .checks
        .iter()
        .filter(|c| matches!(c.status, CheckStatus::Fail | CheckStatus::Inconclusive))
    {
        let line = json!({"check": c.name, "status": c.status, "residual": c.worst_residual, "tolerance": c.tolerance, "witness": c.witness, "note": c.note});
        let _ = writeln!(stderr, "{line}");
    }
    if ctx.out.is_some() {
        for c in &report.checks {
            println!("{:24} {:?} {:e}", c.name, c.status, c.worst_residual);
        }
    }
    Ok(report.exit_code() as u8)
}

fn cmd_spectral(ctx: &Ctx, form: Option<&Path>, cheb: Option<&[u64]>, n_max: usize) -> Result<u8, CliError> {
    let format = ctx.format.unwrap_or(Format::Csv);
    if let Some(args) = cheb {
        let (n, kmax) = (args[0], args[1] as usize);
        let n = u32::try_from(n).map_err(|_| CliError::Input("N out of range".into()))?;
        let spec = chebyshev(n, kmax)?;
        let g = cheby_growth(n, kmax)?;
        let heat: Vec<Value> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&t| cheby_heat_trace(n, t, kmax.max(10)).map(|h| serde_json::to_value(h).expect("json")))
            .collect::<Result<_, _>>()?;
        match format {
            Format::Csv => {
                ctx.emit("chebyshev.csv", &spec.to_csv())?;
                ctx.write("growth.csv", &growth_csv(&g))?;
                ctx.write("heat.json", &pretty(&Value::Array(heat)))?;
            }
            Format::Json => {
                let all = json!({"levels": spec.to_json(), "growth": g, "heat_series": heat});
                ctx.emit("spectral.json", &pretty(&all))?;
            }
        }
        return Ok(0);
    }
    let path = form.ok_or_else(|| CliError::Input("give a form file or --chebyshev N n_max".into()))?;
    let form = specs::load_form(&read_json(path)?, &ctx.tol)?;
    let rep = spectrum(&form);
    let g = growth(&form, n_max);
    match format {
        Format::Csv => {
            ctx.emit("levels.csv", &levels_csv(&rep.levels))?;
            ctx.write("growth.csv", &growth_csv(&g))?;
            ctx.write("heat.csv", &heat_csv(&rep.heat_trace))?;
        }
        Format::Json => {
            let all = json!({"spectrum": rep, "growth": g, "heat_grid": HEAT_GRID});
            ctx.emit("spectral.json", &pretty(&all))?;
        }
    }
    Ok(0)
}

fn cmd_spin_build(ctx: &Ctx, path: &Path) -> Result<u8, CliError> {
    let spec = specs::SpinSpec::from_json(&read_json(path)?)?;
    let chain = spec.chain();
    let (_, audit) = kms_state(&chain, spec.beta(), ctx.seed, 20)?;
    let (form, quad) = spec.build(&ctx.tol)?;
    let conv = park_quadrature_convergence(&chain, spec.beta(), &spec.park(), 4)?;
    let erg = ergodicity_check(&form);
    let report = json!({
        "kms_audit": audit,
        "quadrature": quad,
        "quadrature_convergence": conv,
        "kernel_energy_at_xi_omega": form.evaluate(form.space().xi_omega()),
        "ergodicity": erg,
        "phi_norm": phi_norm(&chain, chain.decay),
        "beta_threshold": beta_threshold(&chain, chain.decay),
        "beta_below_threshold": spec.beta() < beta_threshold(&chain, chain.decay),
    });
    ctx.write("form.json", &pretty(&form.to_json()))?;
    ctx.emit("spin_report.json", &pretty(&report))?;
    if ctx.out.is_some() {
        println!(
            "{}",
            serde_json::to_string(&json!({"dimension": form.space().dim(), "kernel_dim": erg.kernel_dim}))
                .expect("json")
        );
    }
    Ok(0)
}

fn default_coarse_form() -> Result<FormOperator, CliError> {
    let v = json!({"builder": "elementary_trace", "pauli": ["x", "y", "z"]});
    Ok(specs::build(&v, &TolerancePolicy::default())?.0)
}

fn cmd_coarse_demo(ctx: &Ctx, form: Option<&Path>, k_max: u32, samples: usize) -> Result<u8, CliError> {
    let form = match form {
        Some(p) => specs::load_form(&read_json(p)?, &ctx.tol)?,
        None => default_coarse_form()?,
    };
    let ts: Vec<f64> = (0..=k_max).map(|k| 0.5f64.powi(k as i32)).collect();
    let conv = form.coarse_convergence(&ts, ctx.seed, samples)?;
    match ctx.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut s = String::from("t,gap\n");
            for (t, g) in conv.t.iter().zip(&conv.gap) {
                s.push_str(&format!("{t},{g}\n"));
            }
            ctx.emit("coarse.csv", &s)?;
        }
        Format::Json => {
            let v = json!({"convergence": conv, "final_gap": conv.final_gap()});
            ctx.emit("coarse.json", &pretty(&v))?;
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let tol = TolerancePolicy::default().with_overrides(cli.tol_psd, cli.tol_prop)?;
    let ctx = Ctx {
        seed: cli.seed,
        tol,
        out: cli.out,
        format: cli.format,
    };
    match cli.command {
        Command::Build { spec } => cmd_build(&ctx, &spec),
        Command::Verify { form, suite, samples } => cmd_verify(&ctx, &form, suite, samples),
        Command::Spectral { form, chebyshev, n_max } => {
            cmd_spectral(&ctx, form.as_deref(), chebyshev.as_deref(), n_max)
        }
        Command::SpinBuild { spec } => cmd_spin_build(&ctx, &spec),
        Command::CoarseDemo { form, k_max, samples } => cmd_coarse_demo(&ctx, form.as_deref(), k_max, samples),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code())
        }
    }
}

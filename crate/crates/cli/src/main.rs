use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use k3mahler::kronecker_sums::{self, k_of_t, m_lattice, split_measure, t_of_tau, KroneckerSumSpec};
use k3mahler::laurent::{build_p0, build_qk, LaurentPolynomial};
use k3mahler::lfunctions::{self, QuadraticCharacter};
use k3mahler::livne::{self, TestSetConfig};
use k3mahler::mahler::{mahler_jensen_square, mahler_monte_carlo};
use k3mahler::qseries::{self, QSeries};
use k3mahler::quadforms::{self, BinaryQuadraticForm};
use k3mahler::verify::{self, VerificationReport, VerifyConfig};
use k3mahler::par;

#[derive(Parser)]
#[command(name = "k3mahler", version, about = "Numerical verification of m(Q_-3) = (8/5) d_3")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Tolerance: replaces check tolerances in `verify`, series tolerance in `lseries`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Shell cutoff R for lattice sums.
    #[arg(long, global = true)]
    cutoff: Option<u64>,
    /// Seed for Monte Carlo.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// File of `key = value` lines overriding the verification defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification pipeline and print its report.
    Verify {
        #[arg(value_enum)]
        which: VerifyWhich,
    },
    /// Mahler measure of a Laurent polynomial.
    Mahler {
        /// Polynomial literal, a file containing one, or `q3` / `p0`.
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value = "jensen")]
        method: MahlerMethod,
        /// Outer grid points per variable.
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Coefficients of a q-expansion.
    Qexp {
        #[arg(long, value_enum)]
        form: QForm,
        #[arg(long, default_value_t = qseries::DEFAULT_ORDER)]
        order: usize,
    },
    /// Dirichlet series, Epstein sums and their identities.
    Lseries {
        #[arg(long, value_enum, allow_hyphen_values = true)]
        what: LWhat,
        /// Comma-separated arguments, e.g. `-15,2` for L or `1,1,4,2` for epstein.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        args: Vec<f64>,
    },
    /// Eisenstein–Kronecker lattice sums.
    Kronecker {
        #[arg(long, value_enum, conflicts_with = "tau")]
        tau_preset: Option<TauPreset>,
        /// `re,im` of tau (experimental away from the preset).
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', num_args = 2)]
        tau: Option<Vec<f64>>,
        /// Also compute the modular/Dirichlet split (preset only).
        #[arg(long)]
        split: bool,
    },
    /// Hecke eigenvalues A_p: closed form, q-expansion and A1 side.
    Ap {
        #[arg(long, default_value_t = 100)]
        max: u64,
    },
    /// Effective test set, trace table and parity checks.
    Livne {
        #[arg(long)]
        table: bool,
        #[arg(long)]
        coverage: bool,
        #[arg(long, value_name = "MAXP")]
        parity: Option<u64>,
        /// Bad primes S (default 3,5; coverage also reports 2,3,5).
        #[arg(long, value_delimiter = ',')]
        bad_primes: Option<Vec<u64>>,
        /// Test primes T (default: the fifteen standard primes).
        #[arg(long, value_delimiter = ',')]
        test_primes: Option<Vec<u64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhich {
    Theorem1,
    P0,
    Lemma34,
    Table,
    Testset,
}

#[derive(Clone, Copy, ValueEnum)]
enum MahlerMethod {
    Jensen,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum QForm {
    Eta,
    G,
    Theta1,
    Fplus,
    F1,
    F2,
    T,
}

#[derive(Clone, Copy, ValueEnum)]
enum LWhat {
    #[value(name = "L", alias = "l")]
    L,
    #[value(alias = "-zeta")]
    Zeta,
    Epstein,
    D3,
    Lemma34,
    Zr,
    Split,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauPreset {
    Q3,
}

/// What a subcommand produced: output text and whether it counts as a pass.
struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, pass: true }
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<String> {
    if json {
        Ok(serde_json::to_string_pretty(value)?)
    } else {
        Ok(text())
    }
}

fn verify_config(g: &Global) -> Result<VerifyConfig> {
    let mut cfg = VerifyConfig::default();
    if let Some(path) = &g.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_text(&text)?;
    }
    if let Some(r) = g.cutoff {
        cfg.set("cutoff", &r.to_string())?;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.tol {
        cfg.tol_override = Some(t);
    }
    Ok(cfg)
}

fn report_outcome(g: &Global, report: VerificationReport) -> Result<Outcome> {
    let text = emit(g.json, &report, || report.to_text())?;
    Ok(Outcome { text, pass: report.pass })
}

fn run_verify(g: &Global, which: VerifyWhich) -> Result<Outcome> {
    let cfg = verify_config(g)?;
    let report = match which {
        VerifyWhich::Theorem1 => verify::cmd_verify_theorem1(&cfg),
        VerifyWhich::P0 => verify::cmd_verify_p0(&cfg),
        VerifyWhich::Lemma34 => verify::cmd_verify_lemma34(&cfg),
        VerifyWhich::Table => verify::cmd_verify_table(&cfg),
        VerifyWhich::Testset => verify::cmd_verify_testset(&cfg),
    };
    report_outcome(g, report)
}

fn load_poly(spec: &str) -> Result<LaurentPolynomial> {
    match spec.to_ascii_lowercase().as_str() {
        "q3" => return Ok(build_qk(Rational64::from(-3))),
        "p0" => return Ok(build_p0()),
        _ => {}
    }
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?
    } else {
        spec.to_string()
    };
    Ok(text.trim().parse()?)
}

fn run_mahler(g: &Global, poly: &str, method: MahlerMethod, grid: usize, samples: u64) -> Result<Outcome> {
    let p = load_poly(poly)?;
    let m = match method {
        MahlerMethod::Jensen => mahler_jensen_square(&p, grid)?,
        MahlerMethod::Mc => mahler_monte_carlo(&p, samples, g.seed.unwrap_or(0))?,
    };
    let text = emit(g.json, &m, || {
        format!(
            "value       {:.15}\nerror_bound {:.3e}\nmethod      {}\nresolution  {}\n",
            m.value, m.error_bound, m.method, m.resolution
        )
    })?;
    Ok(Outcome::ok(text))
}

fn series_for(form: QForm, order: usize) -> Result<QSeries> {
    if order < 2 {
        bail!("order must be at least 2");
    }
    Ok(match form {
        QForm::Eta => qseries::eta_qexp(1, order),
        QForm::G => qseries::g_qexp(order),
        QForm::Theta1 => qseries::theta1_qexp(order),
        QForm::Fplus => qseries::fplus_qexp(order),
        QForm::F1 => qseries::f1_qexp(order).series,
        QForm::F2 => qseries::f2_qexp(order).series,
        QForm::T => qseries::t_qexp(order),
    })
}

fn run_qexp(g: &Global, form: QForm, order: usize) -> Result<Outcome> {
    let s = series_for(form, order)?;
    let pairs: Vec<(String, String)> = s.terms().map(|(e, c)| (e.to_string(), c.to_string())).collect();
    let text = emit(g.json, &pairs, || pairs.iter().map(|(e, c)| format!("{e}: {c}\n")).collect())?;
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct Checked {
    lhs: f64,
    rhs: f64,
    residual: f64,
}

fn need(args: &[f64], n: usize, usage: &str) -> Result<()> {
    if args.len() != n {
        bail!("expected --args {usage}");
    }
    Ok(())
}

fn as_int(x: f64) -> Result<i64> {
    if x.fract() != 0.0 {
        bail!("{x} is not an integer");
    }
    Ok(x as i64)
}

fn run_lseries(g: &Global, what: LWhat, args: &[f64]) -> Result<Outcome> {
    let l_tol = g.tol.unwrap_or(lfunctions::DEFAULT_L_TOL);
    let e_tol = g.tol.unwrap_or(lfunctions::DEFAULT_EPSTEIN_TOL);
    let lvalue_text = |v: &lfunctions::LValue| format!("value {:.15}\ntail_bound {:.3e}\n", v.value, v.tail_bound);
    let checked_text = |c: &Checked| format!("lhs {:.15}\nrhs {:.15}\nresidual {:.3e}\n", c.lhs, c.rhs, c.residual);
    let text = match what {
        LWhat::L => {
            need(args, 2, "D,s")?;
            let chi = QuadraticCharacter::new(as_int(args[0])?)?;
            let v = lfunctions::dirichlet_l_tol(&chi, args[1], l_tol)?;
            emit(g.json, &v, || lvalue_text(&v))?
        }
        LWhat::Zeta => {
            need(args, 1, "s")?;
            let v = lfunctions::zeta_tol(args[0], l_tol)?;
            emit(g.json, &v, || lvalue_text(&v))?
        }
        LWhat::Epstein => {
            need(args, 4, "a,b,c,s")?;
            let f = BinaryQuadraticForm::new(as_int(args[0])?, as_int(args[1])?, as_int(args[2])?);
            let v = lfunctions::epstein_q_tol(&f, args[3], e_tol)?;
            emit(g.json, &v, || lvalue_text(&v))?
        }
        LWhat::D3 => {
            need(args, 0, "(none)")?;
            let v = lfunctions::d3();
            emit(g.json, &v, || lvalue_text(&v))?
        }
        LWhat::Lemma34 => {
            need(args, 2, "item,s")?;
            let c = lfunctions::verify_epstein_identity_tol(as_int(args[0])? as u8, args[1], e_tol)?;
            let c = Checked { lhs: c.lhs, rhs: c.rhs, residual: c.residual };
            emit(g.json, &c, || checked_text(&c))?
        }
        LWhat::Zr => {
            need(args, 1, "s")?;
            let c = lfunctions::verify_zucker_robertson_tol(args[0], e_tol)?;
            let c = Checked { lhs: c.lhs, rhs: c.rhs, residual: c.residual };
            emit(g.json, &c, || checked_text(&c))?
        }
        LWhat::Split => {
            need(args, 1, "s")?;
            let c = lfunctions::verify_even_odd_split(args[0])?;
            emit(g.json, &c, || {
                format!(
                    "L_plus {:.15}\nL_minus {:.15}\nparity_residual {:.3e}\nlambert_residual {:.3e}\n",
                    c.l_plus, c.l_minus, c.parity_residual, c.lambert_residual
                )
            })?
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct KroneckerOut {
    tau: [f64; 2],
    cutoff: u64,
    m_lattice: kronecker_sums::LatticeValue,
    t: [f64; 2],
    k: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<kronecker_sums::MeasureSplit>,
}

fn run_kronecker(g: &Global, preset: Option<TauPreset>, tau: Option<Vec<f64>>, split: bool) -> Result<Outcome> {
    let tau = match (preset, tau) {
        (_, Some(v)) => Complex64::new(v[0], v[1]),
        _ => kronecker_sums::tau0(),
    };
    if split && tau != kronecker_sums::tau0() {
        bail!("--split is only defined at the q3 preset");
    }
    let cutoff = g.cutoff.unwrap_or(1000);
    let spec = KroneckerSumSpec::new(tau, kronecker_sums::Q3_TERMS.to_vec(), cutoff)?;
    let m = m_lattice(&spec);
    let t = t_of_tau(tau)?;
    let k = k_of_t(t)?;
    let out = KroneckerOut {
        tau: [tau.re, tau.im],
        cutoff,
        m_lattice: m,
        t: [t.re, t.im],
        k: [k.re, k.im],
        split: if split { Some(split_measure(cutoff)?) } else { None },
    };
    let text = emit(g.json, &out, || {
        let mut s = format!(
            "tau        {} + {}i\ncutoff     {}\nm_lattice  {:.15}\ntail_bound {:.3e}\nimaginary  {:.3e}\nk(t(tau))  {:.12} + {:.3e}i\n",
            tau.re, tau.im, cutoff, m.value, m.tail_bound, m.imaginary, k.re, k.im
        );
        if let Some(sp) = &out.split {
            s += &format!(
                "modular    {:.3e}\ndirichlet  {:.15}\ntotal      {:.15}\n",
                sp.modular_part, sp.dirichlet_part, sp.total
            );
        }
        s
    })?;
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct ApRow {
    closed_form: Option<i64>,
    qexp: Option<i64>,
    #[serde(rename = "A1")]
    a1: i64,
}

fn run_ap(g: &Global, max: u64) -> Result<Outcome> {
    if max < 2 {
        bail!("--max must be at least 2");
    }
    let fplus = qseries::fplus_qexp(max as usize + 1);
    let mut rows = BTreeMap::new();
    let mut pass = true;
    for p in quadforms::primes_up_to(max) {
        let closed = quadforms::ap_closed_form(p).ok();
        let q = fplus.coeff_q_i64(p as i64);
        if closed.is_some() && closed != q {
            pass = false;
        }
        rows.insert(p, ApRow { closed_form: closed, qexp: q, a1: quadforms::coeff_a1_int(p)? });
    }
    let text = emit(g.json, &rows, || {
        let opt = |x: Option<i64>| x.map_or("-".to_string(), |v| v.to_string());
        let mut s = format!("{:>5} {:>8} {:>8} {:>8}\n", "p", "closed", "qexp", "A1");
        for (p, r) in &rows {
            s += &format!("{p:>5} {:>8} {:>8} {:>8}\n", opt(r.closed_form), opt(r.qexp), r.a1);
        }
        s
    })?;
    Ok(Outcome { text, pass })
}

#[derive(Serialize, Default)]
struct LivneOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<livne::TraceRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage: Option<Vec<livne::CoverageReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parity: Option<livne::ParityReport>,
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join("")
}

fn run_livne(
    g: &Global,
    table: bool,
    coverage: bool,
    parity: Option<u64>,
    bad: Option<Vec<u64>>,
    test: Option<Vec<u64>>,
) -> Result<Outcome> {
    let custom_s = bad.is_some();
    let bad = bad.unwrap_or_else(|| vec![3, 5]);
    let test = test.unwrap_or_else(|| livne::STANDARD_T.to_vec());
    let config = TestSetConfig::new(&bad, &test)?;
    let (table, coverage) = if !table && !coverage && parity.is_none() { (true, true) } else { (table, coverage) };
    let mut out = LivneOut::default();
    let mut pass = true;
    if table {
        let rows = livne::trace_table(&config)?;
        pass &= rows.iter().all(|r| r.equal);
        out.table = Some(rows);
    }
    if coverage {
        let mut reports = vec![livne::verify_effective_test_set(&config)?];
        if !custom_s {
            let with_two = TestSetConfig::new(&[2, 3, 5], &test)?;
            reports.push(livne::verify_effective_test_set(&with_two)?);
        }
        out.coverage = Some(reports);
    }
    if let Some(max_p) = parity {
        let r = livne::parity_checks(max_p)?;
        pass &= r.pass;
        out.parity = Some(r);
    }
    let text = emit(g.json, &out, || {
        let mut s = String::new();
        if let Some(rows) = &out.table {
            s += &livne::format_trace_table(rows);
            s.push('\n');
        }
        for c in out.coverage.iter().flatten() {
            let sp: Vec<String> = c.sprime.iter().map(|x| x.to_string()).collect();
            s += &format!(
                "S' = {{{}}}: {}/{} nonzero vectors attained, effective = {}\n",
                sp.join(","),
                c.attained.len(),
                c.nonzero_total,
                c.effective
            );
            for (t, v) in &c.vectors {
                s += &format!("  f({t}) = {}\n", bits(v));
            }
            if !c.missing.is_empty() {
                let m: Vec<String> = c.missing.iter().map(|v| bits(v)).collect();
                s += &format!("  missing: {}\n", m.join(" "));
            }
        }
        if let Some(p) = &out.parity {
            s += &format!("parity to {}: {} primes, pass = {}\n", p.max_p, p.primes_checked, p.pass);
        }
        s
    })?;
    Ok(Outcome { text, pass })
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    match cli.command {
        Command::Verify { which } => run_verify(g, which),
        Command::Mahler { poly, method, grid, samples } => run_mahler(g, &poly, method, grid, samples),
        Command::Qexp { form, order } => run_qexp(g, form, order),
        Command::Lseries { what, args } => run_lseries(g, what, &args),
        Command::Kronecker { tau_preset, tau, split } => run_kronecker(g, tau_preset, tau, split),
        Command::Ap { max } => run_ap(g, max),
        Command::Livne { table, coverage, parity, bad_primes, test_primes } => {
            run_livne(g, table, coverage, parity, bad_primes, test_primes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.global.threads;
    match par::with_threads(threads, || run(cli)) {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

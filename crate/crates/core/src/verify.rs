//! Verification pipelines that assemble machine-readable reports.
//!
//! A report is a list of named checks, each comparing two numbers against a
//! tolerance. Sub-computations that fail with an error become failed
//! entries carrying the message, so a report is always produced. Reports
//! contain no timings or thread counts and are bit-identical for a fixed
//! config.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kronecker_sums::{k_of_t, m_lattice, split_measure, t_of_tau, tau0, KroneckerSumSpec};
use crate::laurent::{build_p0, build_qk};
use crate::lfunctions::{
    d3, verify_epstein_identity_tol, verify_even_odd_split, verify_zucker_robertson_tol,
};
use crate::livne::{
    parity_checks, trace_table, verify_effective_test_set, CoverageReport, TestSetConfig, TraceRow,
};
use crate::mahler::{mahler_jensen_square, mahler_monte_carlo};
use crate::qseries::fplus_qexp;
use crate::quadforms::{ap_closed_form, primes_up_to};

/// Version of the JSON layout produced by [`VerificationReport`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Shell cutoff for the weighted lattice sum.
    pub lattice_cutoff: u64,
    /// Shell cutoff for the modular/Dirichlet split.
    pub split_cutoff: u64,
    /// Outer grid per variable for `Q_-3`.
    pub jensen_grid: usize,
    /// Outer grid per variable for `P_0`.
    pub p0_grid: usize,
    pub mc_samples: u64,
    pub seed: u64,
    pub q_order: usize,
    pub epstein_tol: f64,
    /// Real `s` for the Epstein identities.
    pub s: f64,
    /// When set, replaces the tolerance of every non-exact check.
    pub tol_override: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            lattice_cutoff: 1000,
            split_cutoff: 1500,
            jensen_grid: 512,
            p0_grid: 256,
            mc_samples: 1_000_000,
            seed: 20240607,
            q_order: 256,
            epstein_tol: 1e-10,
            s: 2.0,
            tol_override: None,
        }
    }
}

impl VerifyConfig {
    /// Sets one field from its textual key. Keys match the field names;
    /// `cutoff` sets both lattice cutoffs and `tol` sets the override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::domain(format!("bad value {v:?} for {key}")))
        }
        match key {
            "lattice_cutoff" => self.lattice_cutoff = num(key, value)?,
            "split_cutoff" => self.split_cutoff = num(key, value)?,
            "cutoff" => {
                self.lattice_cutoff = num(key, value)?;
                self.split_cutoff = self.lattice_cutoff;
            }
            "jensen_grid" => self.jensen_grid = num(key, value)?,
            "p0_grid" => self.p0_grid = num(key, value)?,
            "mc_samples" => self.mc_samples = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "q_order" => self.q_order = num(key, value)?,
            "epstein_tol" => self.epstein_tol = num(key, value)?,
            "s" => self.s = num(key, value)?,
            "tol" => self.tol_override = Some(num(key, value)?),
            _ => return Err(Error::domain(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { pos: n + 1, msg: format!("expected key = value: {line:?}") })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol_override.unwrap_or(default)
    }

    fn provenance(&self, cutoffs: &[(&str, u64)], seed: Option<u64>) -> Provenance {
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            cutoffs: cutoffs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportEntry {
    /// Passes when `|lhs - rhs| <= tolerance` (exact checks use 0).
    pub fn compare(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let residual = (lhs - rhs).abs();
        Self {
            name: name.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            residual: Some(residual),
            tolerance,
            pass: residual <= tolerance,
            error: None,
        }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.into(),
            lhs: None,
            rhs: None,
            residual: None,
            tolerance,
            pass: false,
            error: Some(err.to_string()),
        }
    }

    fn from_result(name: &str, tolerance: f64, r: Result<(f64, f64)>) -> Self {
        match r {
            Ok((l, r)) => Self::compare(name, l, r, tolerance),
            Err(e) => Self::failed(name, tolerance, &e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub cutoffs: BTreeMap<String, u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub command: String,
    pub entries: Vec<ReportEntry>,
    pub pass: bool,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace_table: Vec<TraceRow>,
    /// Coverage reports; informational, they do not enter `pass`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coverage: Vec<CoverageReport>,
}

impl VerificationReport {
    fn new(command: &str, entries: Vec<ReportEntry>, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            pass: entries.iter().all(|e| e.pass),
            entries,
            provenance,
            trace_table: Vec::new(),
            coverage: Vec::new(),
        }
    }

    /// One line per entry: `PASS|FAIL name lhs rhs residual tol`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.12e}"));
            out.push_str(&format!(
                "{} {:<36} lhs={} rhs={} residual={} tol={:e}",
                if e.pass { "PASS" } else { "FAIL" },
                e.name,
                f(e.lhs),
                f(e.rhs),
                f(e.residual),
                e.tolerance
            ));
            if let Some(err) = &e.error {
                out.push_str(&format!(" error={err}"));
            }
            out.push('\n');
        }
        out.push_str(if self.pass { "overall: PASS\n" } else { "overall: FAIL\n" });
        out
    }
}

fn epstein_entries(cfg: &VerifyConfig) -> Vec<ReportEntry> {
    let tol = cfg.tol(1e-8);
    let mut entries: Vec<ReportEntry> = (1..=4)
        .map(|item| {
            let r = verify_epstein_identity_tol(item, cfg.s, cfg.epstein_tol).map(|c| (c.lhs, c.rhs));
            ReportEntry::from_result(&format!("epstein_identity_{item}"), tol, r)
        })
        .collect();
    let zr = verify_zucker_robertson_tol(cfg.s, cfg.epstein_tol).map(|c| (c.lhs, c.rhs));
    entries.push(ReportEntry::from_result("zucker_robertson", tol, zr));
    entries
}

fn table_entries(rows: &Result<Vec<TraceRow>>) -> Vec<ReportEntry> {
    match rows {
        Ok(rows) => rows
            .iter()
            .map(|r| ReportEntry::compare(format!("trace_p{}", r.p), r.a1 as f64, r.a2 as f64, 0.0))
            .collect(),
        Err(e) => vec![ReportEntry::failed("trace_table", 0.0, e)],
    }
}

/// `A_p` by the closed form against the `q^p` coefficient of `f^+`, for
/// every prime `p < q_order` other than 3 and 5.
fn closed_form_entry(cfg: &VerifyConfig) -> ReportEntry {
    let name = "ap_closed_form_vs_fplus";
    if cfg.q_order < 3 {
        return ReportEntry::failed(name, 0.0, &Error::domain("q_order must be at least 3"));
    }
    let fplus = fplus_qexp(cfg.q_order);
    let mut mismatches = 0;
    for p in primes_up_to(cfg.q_order as u64 - 1).into_iter().filter(|&p| p != 3 && p != 5) {
        match ap_closed_form(p) {
            Ok(a) if fplus.coeff_q_i64(p as i64) == Some(a) => {}
            Ok(_) => mismatches += 1,
            Err(e) => return ReportEntry::failed(name, 0.0, &e),
        }
    }
    ReportEntry::compare(name, mismatches as f64, 0.0, 0.0)
}

/// Target value `(8/5) d_3`.
pub fn target_q3() -> f64 {
    1.6 * d3().value
}

/// The full chain for `m(Q_-3) = (8/5) d_3`, in order: Epstein identities,
/// trace table, modular cancellation, Dirichlet part, lattice value, direct
/// Mahler measure, and the CM point.
pub fn cmd_verify_theorem1(cfg: &VerifyConfig) -> VerificationReport {
    let target = target_q3();
    let mut entries = epstein_entries(cfg);
    let rows = trace_table(&TestSetConfig::standard());
    entries.extend(table_entries(&rows));
    entries.push(closed_form_entry(cfg));

    let split = split_measure(cfg.split_cutoff);
    entries.push(ReportEntry::from_result(
        "modular_part_cancels",
        cfg.tol(1e-6),
        split.as_ref().map(|s| (s.modular_part, 0.0)).map_err(Clone::clone),
    ));
    entries.push(ReportEntry::from_result(
        "dirichlet_part_vs_8/5_d3",
        cfg.tol(1e-5),
        split.as_ref().map(|s| (s.dirichlet_part, target)).map_err(Clone::clone),
    ));

    let lattice = KroneckerSumSpec::at_tau0(cfg.lattice_cutoff).map(|s| (m_lattice(&s).value, target));
    entries.push(ReportEntry::from_result("lattice_sum_vs_8/5_d3", cfg.tol(1e-4), lattice));

    let q3 = build_qk(Rational64::from(-3));
    let jensen = mahler_jensen_square(&q3, cfg.jensen_grid).map(|m| (m.value, target));
    entries.push(ReportEntry::from_result("jensen_grid_vs_8/5_d3", cfg.tol(1e-3), jensen));

    let k = t_of_tau(tau0()).and_then(k_of_t).map(|k| (k.re, -3.0));
    entries.push(ReportEntry::from_result("k_at_tau0", cfg.tol(1e-8), k));

    let provenance = cfg.provenance(
        &[
            ("lattice_cutoff", cfg.lattice_cutoff),
            ("split_cutoff", cfg.split_cutoff),
            ("jensen_grid", cfg.jensen_grid as u64),
            ("q_order", cfg.q_order as u64),
        ],
        None,
    );
    let mut report = VerificationReport::new("verify theorem1", entries, provenance);
    report.trace_table = rows.unwrap_or_default();
    report
}

/// `m(P_0) = d_3` by the Jensen grid and by Monte Carlo (within three
/// standard errors).
pub fn cmd_verify_p0(cfg: &VerifyConfig) -> VerificationReport {
    let target = d3().value;
    let p0 = build_p0();
    let mut entries = Vec::new();
    let jensen = mahler_jensen_square(&p0, cfg.p0_grid).map(|m| (m.value, target));
    entries.push(ReportEntry::from_result("p0_jensen_grid_vs_d3", cfg.tol(1e-4), jensen));
    match mahler_monte_carlo(&p0, cfg.mc_samples, cfg.seed) {
        Ok(m) => entries.push(ReportEntry::compare("p0_monte_carlo_vs_d3", m.value, target, 3.0 * m.error_bound)),
        Err(e) => entries.push(ReportEntry::failed("p0_monte_carlo_vs_d3", 0.0, &e)),
    }
    let provenance = cfg.provenance(
        &[("p0_grid", cfg.p0_grid as u64), ("mc_samples", cfg.mc_samples)],
        Some(cfg.seed),
    );
    VerificationReport::new("verify p0", entries, provenance)
}

/// Epstein identities, the closed form for `Q(1,0,15)`, and the even/odd
/// decomposition of `L_-15` at `cfg.s`.
pub fn cmd_verify_lemma34(cfg: &VerifyConfig) -> VerificationReport {
    let mut entries = epstein_entries(cfg);
    match verify_even_odd_split(cfg.s) {
        Ok(c) => {
            entries.push(ReportEntry::compare("even_odd_parity", c.parity_residual, 0.0, cfg.tol(1e-10)));
            entries.push(ReportEntry::compare("a60_lambert_series", c.lambert_residual, 0.0, cfg.tol(1e-10)));
        }
        Err(e) => entries.push(ReportEntry::failed("even_odd_split", cfg.tol(1e-10), &e)),
    }
    let digits = cfg.epstein_tol.log10().round().abs() as u64;
    VerificationReport::new("verify lemma34", entries, cfg.provenance(&[("epstein_tol_digits", digits)], None))
}

/// `A_1(p) = A_2(p)` on the standard test primes.
pub fn cmd_verify_table(cfg: &VerifyConfig) -> VerificationReport {
    let rows = trace_table(&TestSetConfig::standard());
    let mut entries = table_entries(&rows);
    entries.push(closed_form_entry(cfg));
    let mut report = VerificationReport::new(
        "verify table",
        entries,
        cfg.provenance(&[("q_order", cfg.q_order as u64)], None),
    );
    report.trace_table = rows.unwrap_or_default();
    report
}

/// Coverage of `(Z/2)^3 \ {0}` by the standard test set, plus parity up to
/// 100. The `S = {2, 3, 5}` coverage is attached for information.
pub fn cmd_verify_testset(cfg: &VerifyConfig) -> VerificationReport {
    let mut entries = Vec::new();
    let mut coverage = Vec::new();
    match verify_effective_test_set(&TestSetConfig::standard()) {
        Ok(c) => {
            entries.push(ReportEntry::compare(
                "coverage_S_3_5",
                c.attained.len() as f64,
                c.nonzero_total as f64,
                0.0,
            ));
            coverage.push(c);
        }
        Err(e) => entries.push(ReportEntry::failed("coverage_S_3_5", 0.0, &e)),
    }
    if let Ok(c) = verify_effective_test_set(&TestSetConfig::standard_with_two()) {
        coverage.push(c);
    }
    match parity_checks(100) {
        Ok(p) => entries.push(ReportEntry::compare("parity_to_100", p.failures.len() as f64, 0.0, 0.0)),
        Err(e) => entries.push(ReportEntry::failed("parity_to_100", 0.0, &e)),
    }
    let mut report = VerificationReport::new("verify testset", entries, cfg.provenance(&[], None));
    report.coverage = coverage;
    report
}

//! Eisenstein–Kronecker lattice sums for `m(Q_k)` at a CM point, their
//! rearrangement into a modular and a Dirichlet part, and numeric eta
//! quotients.
//!
//! All lattice sums run over square shells `max(|m|, |k|) = r`, `1 <= r <= R`.
//! Shells are computed independently (in parallel when enabled) and folded
//! in increasing `r`, so results do not depend on the thread count.
//!
//! The summands decay like `r^-4`, so shell `r` contributes `O(r^-3)` and the
//! tail after `R` is about `C / (2 R^2)`. `C` is estimated from the last ten
//! shells and the reported bound carries a safety factor
//! [`TAIL_SAFETY`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::qseries::T_SPEC;
use crate::sum::{CompensatedSum, ComplexSum};

pub const TAIL_SAFETY: f64 = 4.0;

/// Eta product cutoff used by [`t_of_tau`].
pub const DEFAULT_ETA_TERMS: usize = 60;

/// Scales `j` and weights `c_j` of the lattice formula for `m(Q_k)`.
pub const Q3_TERMS: [(u32, i64); 4] = [(1, 2), (2, -32), (3, -18), (6, 288)];

/// The CM point `(-3 + sqrt(-15)) / 24`, where `k = -3`.
pub fn tau0() -> Complex64 {
    Complex64::new(-3.0 / 24.0, 15f64.sqrt() / 24.0)
}

fn require_upper(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("tau must lie in the upper half plane, got {tau}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerSumSpec {
    pub tau: Complex64,
    pub terms: Vec<(u32, i64)>,
    pub cutoff: u64,
}

impl KroneckerSumSpec {
    pub fn new(tau: Complex64, terms: Vec<(u32, i64)>, cutoff: u64) -> Result<Self> {
        require_upper(tau)?;
        if cutoff == 0 {
            return Err(Error::domain("shell cutoff must be at least 1"));
        }
        if terms.iter().any(|&(j, _)| j == 0) {
            return Err(Error::domain("scales must be positive"));
        }
        Ok(Self { tau, terms, cutoff })
    }

    /// `tau0` with the fixed weights `((1,2),(2,-32),(3,-18),(6,288))`.
    pub fn at_tau0(cutoff: u64) -> Result<Self> {
        Self::new(tau0(), Q3_TERMS.to_vec(), cutoff)
    }
}

/// A truncated lattice sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeValue {
    pub value: f64,
    /// Imaginary part of the accumulated complex sum (zero up to rounding).
    pub imaginary: f64,
    pub tail_bound: f64,
    pub cutoff: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSplit {
    pub modular_part: f64,
    pub dirichlet_part: f64,
    pub total: f64,
    pub modular_tail_bound: f64,
    pub dirichlet_tail_bound: f64,
    pub cutoff: u64,
}

/// Calls `f(m, k)` for the `8r` lattice points with `max(|m|, |k|) = r`.
#[inline]
fn for_shell(r: i64, mut f: impl FnMut(i64, i64)) {
    for k in -r..=r {
        f(r, k);
        f(-r, k);
    }
    for m in (-r + 1)..r {
        f(m, r);
        f(m, -r);
    }
}

/// `C / (2 R^2)` with `C = max |s_r| r^3` over the last ten shells, times
/// [`TAIL_SAFETY`].
pub fn shell_tail_bound(shells: &[f64]) -> f64 {
    let n = shells.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let c = (n.saturating_sub(10)..n)
        .map(|i| shells[i].abs() * ((i + 1) as f64).powi(3))
        .fold(0.0f64, f64::max);
    TAIL_SAFETY * c / (2.0 * (n as f64).powi(2))
}

/// The summand at `(m, k)` and scale `j`, as a complex number:
/// `1/(a^3 b) + 1/(a b^3) + 1/(a^2 b^2)` with `a = j m tau + k`,
/// `b = j m conj(tau) + k`. Its real part is the bracketed kernel
/// `2 Re(1/(a^3 b)) + 1/(a^2 b^2)`.
#[inline]
pub fn kernel_term(j: u32, tau: Complex64, m: i64, k: i64) -> Complex64 {
    let jm = (j as i64 * m) as f64;
    let ia = (tau * jm + k as f64).inv();
    let ib = (tau.conj() * jm + k as f64).inv();
    let ia2 = ia * ia;
    let ib2 = ib * ib;
    ia2 * ia * ib + ia * ib2 * ib + ia2 * ib2
}

fn weighted_shells(tau: Complex64, terms: &[(u32, i64)], cutoff: u64) -> Vec<ComplexSum> {
    par::map_indexed(cutoff as usize, |i| {
        let mut acc = ComplexSum::new();
        for_shell(i as i64 + 1, |m, k| {
            for &(j, c) in terms {
                if c != 0 {
                    acc.add(kernel_term(j, tau, m, k) * c as f64);
                }
            }
        });
        acc
    })
}

fn fold_shells(shells: &[ComplexSum], cutoff: u64) -> LatticeValue {
    let mut total = ComplexSum::new();
    for s in shells {
        total.merge(s);
    }
    let reals: Vec<f64> = shells.iter().map(|s| s.value().re).collect();
    let v = total.value();
    LatticeValue { value: v.re, imaginary: v.im, tail_bound: shell_tail_bound(&reals), cutoff }
}

/// `sum' kernel(j m tau + k)` over `max(|m|, |k|) <= R`.
pub fn kernel_k(j: u32, tau: Complex64, cutoff: u64) -> Result<LatticeValue> {
    KroneckerSumSpec::new(tau, vec![(j, 1)], cutoff)?;
    Ok(fold_shells(&weighted_shells(tau, &[(j, 1)], cutoff), cutoff))
}

/// `(Im tau / 8 pi^3) sum_j c_j K_j(tau)`.
pub fn m_lattice(spec: &KroneckerSumSpec) -> LatticeValue {
    let raw = fold_shells(&weighted_shells(spec.tau, &spec.terms, spec.cutoff), spec.cutoff);
    let pre = spec.tau.im / (8.0 * PI.powi(3));
    LatticeValue {
        value: raw.value * pre,
        imaginary: raw.imaginary * pre,
        tail_bound: raw.tail_bound * pre,
        cutoff: raw.cutoff,
    }
}

#[inline]
fn q(a: i64, b: i64, c: i64, m: i64, k: i64) -> f64 {
    (a * m * m + b * m * k + c * k * k) as f64
}

/// Summands of the modular and Dirichlet groups at `(m, k)`, before the
/// prefactors `3 sqrt15 / pi^3` and `6 sqrt15 / pi^3`.
#[inline]
pub fn split_terms(m: i64, k: i64) -> (f64, f64) {
    let q1 = q(1, 0, 15, m, k);
    let q2 = q(3, 0, 5, m, k);
    let q3 = q(1, 1, 4, m, k);
    let q4 = q(2, 1, 2, m, k);
    let (mf, kf) = (m as f64, k as f64);
    let modular = (15.0 * kf * kf - mf * mf) / (q1 * q1 * q1)
        + (3.0 * mf * mf - 5.0 * kf * kf) / (q2 * q2 * q2)
        + 0.5 * (2.0 * mf * mf + 2.0 * mf * kf - 7.0 * kf * kf) / (q3 * q3 * q3)
        + 0.5 * (mf * mf + 8.0 * mf * kf + kf * kf) / (q4 * q4 * q4);
    let dirichlet = 1.0 / (q1 * q1) - 1.0 / (q2 * q2) + 1.0 / (q4 * q4) - 1.0 / (q3 * q3);
    (modular, dirichlet)
}

/// The rearranged lattice sum at `tau0`, split into the modular group
/// (which cancels) and the Dirichlet group (which carries the value).
pub fn split_measure(cutoff: u64) -> Result<MeasureSplit> {
    if cutoff == 0 {
        return Err(Error::domain("shell cutoff must be at least 1"));
    }
    let shells = par::map_indexed(cutoff as usize, |i| {
        let (mut modular, mut dirichlet) = (CompensatedSum::new(), CompensatedSum::new());
        for_shell(i as i64 + 1, |m, k| {
            let (a, b) = split_terms(m, k);
            modular.add(a);
            dirichlet.add(b);
        });
        (modular, dirichlet)
    });
    let (mut modular, mut dirichlet) = (CompensatedSum::new(), CompensatedSum::new());
    for (a, b) in &shells {
        modular.merge(a);
        dirichlet.merge(b);
    }
    let pm = 3.0 * 15f64.sqrt() / PI.powi(3);
    let pd = 6.0 * 15f64.sqrt() / PI.powi(3);
    let mod_shells: Vec<f64> = shells.iter().map(|s| s.0.value()).collect();
    let dir_shells: Vec<f64> = shells.iter().map(|s| s.1.value()).collect();
    let modular_part = pm * modular.value();
    let dirichlet_part = pd * dirichlet.value();
    Ok(MeasureSplit {
        modular_part,
        dirichlet_part,
        total: modular_part + dirichlet_part,
        modular_tail_bound: pm * shell_tail_bound(&mod_shells),
        dirichlet_tail_bound: pd * shell_tail_bound(&dir_shells),
        cutoff,
    })
}

/// `D_{j tau0}(m, k) = |j m tau0 + k|^2` computed numerically.
pub fn d_numeric(j: u32, m: i64, k: i64) -> f64 {
    (tau0() * (j as i64 * m) as f64 + k as f64).norm_sqr()
}

/// `D_{j tau0}(m, k)` as the value of an integral binary quadratic form
/// after the change of variables, divided by its constant.
pub fn d_form(j: u32, m: i64, k: i64) -> Option<f64> {
    let v = match j {
        1 => q(1, 0, 15, m - 3 * k, k) / 24.0,
        2 => q(1, 1, 4, m - 2 * k, k) / 6.0,
        3 => q(3, 0, 5, m - k, k) / 8.0,
        6 => q(2, 1, 2, m, k - m) / 2.0,
        _ => return None,
    };
    Some(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DjCheck {
    pub pass: bool,
    pub trials: u64,
    /// Largest `|D_numeric - D_form| / (1 + |D|)` seen.
    pub worst_relative: f64,
}

/// Compares [`d_numeric`] and [`d_form`] at `trials` random nonzero points of
/// `[-50, 50]^2` for each scale 1, 2, 3, 6.
pub fn check_dj_identities(trials: u64, seed: u64) -> Result<DjCheck> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < trials {
        let m: i64 = rng.random_range(-50..=50);
        let k: i64 = rng.random_range(-50..=50);
        if m == 0 && k == 0 {
            continue;
        }
        for j in [1, 2, 3, 6] {
            let d = d_numeric(j, m, k);
            let f = d_form(j, m, k).expect("supported scale");
            worst = worst.max((d - f).abs() / (1.0 + d.abs()));
        }
        done += 1;
    }
    Ok(DjCheck { pass: worst < 1e-12, trials, worst_relative: worst })
}

/// `eta(tau) = e^(pi i tau / 12) prod_{n=1}^{terms} (1 - e^(2 pi i n tau))`.
pub fn eta_numeric(tau: Complex64, terms: usize) -> Result<Complex64> {
    require_upper(tau)?;
    let i = Complex64::i();
    let q = (2.0 * PI * i * tau).exp();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    for _ in 0..terms {
        qn *= q;
        prod *= Complex64::new(1.0, 0.0) - qn;
    }
    Ok((PI * i * tau / 12.0).exp() * prod)
}

/// The eta quotient `t(tau)` with products truncated at
/// [`DEFAULT_ETA_TERMS`].
pub fn t_of_tau(tau: Complex64) -> Result<Complex64> {
    t_of_tau_n(tau, DEFAULT_ETA_TERMS)
}

pub fn t_of_tau_n(tau: Complex64, terms: usize) -> Result<Complex64> {
    let mut t = Complex64::new(1.0, 0.0);
    for (scale, power) in T_SPEC {
        let e = eta_numeric(tau * scale as f64, terms)?;
        t *= e.powi(power as i32);
    }
    Ok(t)
}

/// `k = -(t + 1/t) - 2`.
pub fn k_of_t(t: Complex64) -> Result<Complex64> {
    if t.norm() == 0.0 {
        return Err(Error::domain("t = 0 has no k"));
    }
    Ok(-(t + t.inv()) - 2.0)
}

//! Quadratic characters, Dirichlet L-values, the Riemann zeta function,
//! Epstein sums of binary quadratic forms, and the identities linking them.
//!
//! Every Dirichlet series here has periodic coefficients. It is summed
//! directly over whole periods and the remainder is expressed through
//! Hurwitz zeta values `zeta(s, x)` at large `x`, which are evaluated by
//! Euler–Maclaurin. For `s > 1` the Euler–Maclaurin remainder is bounded by
//! the first omitted term, and that bound is what [`LValue::tail_bound`]
//! reports.
//!
//! Epstein sums `Q(a,b,c;s)` are summed over square shells
//! `max(|m|,|n|) = r`. The lattice points outside the square are replaced
//! by the integral of `Q^-s` over the complement of the square
//! `[-R-1/2, R+1/2]^2`, which leaves an `O(R^-2s)` error. The tail bound is
//! four times the change between cutoffs `R/2` and `R`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::qseries::a_minus60;
use crate::quadforms::{forms, BinaryQuadraticForm};
use crate::sum::CompensatedSum;

pub const DEFAULT_L_TOL: f64 = 1e-12;
pub const DEFAULT_EPSTEIN_TOL: f64 = 1e-10;

/// Largest shell cutoff tried by [`epstein_q_tol`].
pub const EPSTEIN_MAX_CUTOFF: u64 = 8192;

/// Kronecker symbol `(a / n)`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    result * jacobi(a.rem_euclid(n), n)
}

/// Jacobi symbol `(a / n)` for odd positive `n` and `0 <= a < n`.
fn jacobi(mut a: i64, mut n: i64) -> i8 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut result: i8 = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The quadratic character `n -> (d / n)` of a discriminant `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticCharacter {
    discriminant: i64,
}

impl QuadraticCharacter {
    /// Accepts any nonsquare discriminant (`d = 0, 1 mod 4`). Besides the
    /// fundamental ones this admits `-60 = 4 * (-15)`, whose character is
    /// `chi_-15` restricted to odd integers.
    pub fn new(discriminant: i64) -> Result<Self> {
        let ok_residue = matches!(discriminant.rem_euclid(4), 0 | 1);
        let is_square = discriminant >= 0 && {
            let r = (discriminant as f64).sqrt().round() as i64;
            r * r == discriminant
        };
        if discriminant == 0 || !ok_residue || is_square {
            return Err(Error::domain(format!("{discriminant} is not a nonsquare discriminant")));
        }
        Ok(Self { discriminant })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn period(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn value(&self, n: i64) -> i8 {
        kronecker(self.discriminant, n)
    }

    /// Values on `0..period`, indexed by residue.
    pub fn period_values(&self) -> Vec<f64> {
        (0..self.period() as i64).map(|n| self.value(n) as f64).collect()
    }
}

/// A Dirichlet-series value with an explicit remainder bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: u64,
}

impl LValue {
    fn scaled(self, c: f64) -> LValue {
        LValue { value: self.value * c, tail_bound: self.tail_bound * c.abs(), ..self }
    }
}

fn require_s(s: f64) -> Result<()> {
    if s.is_finite() && s > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("need real s > 1, got {s}")))
    }
}

/// `B_{2k} / (2k)!` for `k = 1..=10`.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

/// Euler–Maclaurin terms kept; the next one bounds the remainder.
const EM_TERMS: usize = 8;

/// Hurwitz zeta `zeta(s, x)` for large `x`, with a bound on the truncation
/// error.
fn hurwitz_asymptotic(s: f64, x: f64) -> (f64, f64) {
    let mut acc = CompensatedSum::new();
    acc.add(x.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * x.powf(-s));
    // rising factorial s (s+1) ... (s+2k-2), times x^(-s-2k+1)
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    let mut next = 0.0;
    for (k, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = b * rising * power;
        if k < EM_TERMS {
            acc.add(term);
        } else {
            next = term.abs();
            break;
        }
        let j = 2.0 * k as f64 + 1.0;
        rising *= (s + j) * (s + j + 1.0);
        power /= x * x;
    }
    (acc.value(), next)
}

/// `sum_{n>=1} a(n) n^-s` for coefficients periodic with the given period,
/// `period_values[r] = a(n)` for `n = r (mod q)`.
pub fn periodic_dirichlet_series(period_values: &[f64], s: f64, tol: f64) -> Result<LValue> {
    require_s(s)?;
    let q = period_values.len();
    if q == 0 {
        return Err(Error::domain("empty coefficient period"));
    }
    let qf = q as f64;
    let weight: f64 = period_values.iter().map(|a| a.abs()).sum();
    // Smallest number of whole periods M for which the Euler–Maclaurin
    // remainder of the tail is below tolerance.
    let mut periods = ((s + 8.0) / qf).ceil().max(1.0) as u64;
    let tail_estimate = |m: u64| -> (f64, f64) {
        let mut tail = CompensatedSum::new();
        let mut bound = 0.0;
        for r in 1..=q {
            let a = period_values[r % q];
            if a == 0.0 {
                continue;
            }
            let (h, e) = hurwitz_asymptotic(s, m as f64 + r as f64 / qf);
            tail.add(a * h);
            bound += a.abs() * e;
        }
        let scale = qf.powf(-s);
        (tail.value() * scale, bound * scale)
    };
    let (mut tail, mut bound) = tail_estimate(periods);
    while bound > tol && periods < (1 << 24) {
        periods *= 2;
        (tail, bound) = tail_estimate(periods);
    }
    let n_max = periods * q as u64;
    let chunk = q.max(4096);
    let partials = par::map_chunks(n_max as usize, chunk, |range| {
        let mut acc = CompensatedSum::new();
        for n in range {
            let n = n as u64 + 1;
            let a = period_values[(n % q as u64) as usize];
            if a != 0.0 {
                acc.add(a * (n as f64).powf(-s));
            }
        }
        acc
    });
    let mut total = CompensatedSum::new();
    for p in &partials {
        total.merge(p);
    }
    total.add(tail);
    // Rounding in the direct part is a few ulps per term.
    let rounding = f64::EPSILON * weight * 4.0;
    Ok(LValue { value: total.value(), tail_bound: bound + rounding, terms_used: n_max })
}

/// `L(chi, s)` with the default tolerance `1e-12`.
pub fn dirichlet_l(chi: &QuadraticCharacter, s: f64) -> Result<LValue> {
    dirichlet_l_tol(chi, s, DEFAULT_L_TOL)
}

pub fn dirichlet_l_tol(chi: &QuadraticCharacter, s: f64, tol: f64) -> Result<LValue> {
    periodic_dirichlet_series(&chi.period_values(), s, tol)
}

/// `L(chi_d, s)` for a discriminant given as an integer.
pub fn l_value(d: i64, s: f64) -> Result<LValue> {
    dirichlet_l(&QuadraticCharacter::new(d)?, s)
}

/// Riemann zeta for real `s > 1`.
pub fn zeta(s: f64) -> Result<LValue> {
    zeta_tol(s, DEFAULT_L_TOL)
}

pub fn zeta_tol(s: f64, tol: f64) -> Result<LValue> {
    periodic_dirichlet_series(&[1.0], s, tol)
}

/// Plain partial sum `sum_{n<=n_max} a(n) n^-s`, no tail correction.
pub fn partial_dirichlet_sum(a: impl Fn(u64) -> f64, n_max: u64, s: f64) -> f64 {
    (1..=n_max).map(|n| a(n) * (n as f64).powf(-s)).collect::<CompensatedSum>().value()
}

/// `d_3 = (3 sqrt 3 / 4 pi) L(chi_-3, 2)`.
pub fn d3() -> LValue {
    l_value(-3, 2.0).expect("valid character and s").scaled(d3_factor())
}

/// `3 sqrt(3) / (4 pi)`.
pub fn d3_factor() -> f64 {
    3.0 * 3f64.sqrt() / (4.0 * PI)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `int_{-1}^{1} f(u) du` by composite Gauss–Legendre.
fn integrate_unit(f: impl Fn(f64) -> f64) -> f64 {
    const PANELS: usize = 32;
    let rule = gauss_legendre(20);
    let h = 2.0 / PANELS as f64;
    let mut acc = CompensatedSum::new();
    for p in 0..PANELS {
        let mid = -1.0 + h * (p as f64 + 0.5);
        for &(x, w) in &rule {
            acc.add(w * 0.5 * h * f(mid + 0.5 * h * x));
        }
    }
    acc.value()
}

/// Integral of `Q(x, y)^-s` over the plane minus the square `[-a, a]^2`
/// equals `edge_constant * a^(2 - 2s)`.
fn epstein_edge_constant(form: &BinaryQuadraticForm, s: f64) -> f64 {
    let right = integrate_unit(|u| form.value_f64(1.0, u).powf(-s));
    let top = integrate_unit(|u| form.value_f64(u, 1.0).powf(-s));
    2.0 * (right + top) / (2.0 * s - 2.0)
}

/// Sum of `Q(m, k)^-s` over the square shell `max(|m|, |k|) = r`.
pub(crate) fn epstein_shell(form: &BinaryQuadraticForm, s: f64, r: i64) -> f64 {
    let mut acc = CompensatedSum::new();
    let f = |m: i64, k: i64| (form.value(m, k) as f64).powf(-s);
    for k in -r..=r {
        acc.add(f(r, k));
        acc.add(f(-r, k));
    }
    for m in (-r + 1)..r {
        acc.add(f(m, r));
        acc.add(f(m, -r));
    }
    acc.value()
}

/// Result of an Epstein sum at a fixed cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsteinValue {
    /// Shell sum plus the integral tail correction.
    pub value: f64,
    /// Shell sum alone.
    pub raw: f64,
    pub cutoff: u64,
}

/// Epstein sum at shell cutoff `cutoff`, without adaptive refinement.
pub fn epstein_q_at(form: &BinaryQuadraticForm, s: f64, cutoff: u64) -> Result<EpsteinValue> {
    form.require_positive_definite()?;
    require_s(s)?;
    let shells = par::map_indexed(cutoff as usize, |i| epstein_shell(form, s, i as i64 + 1));
    let raw = crate::sum::ordered_sum(&shells);
    let edge = epstein_edge_constant(form, s) * (cutoff as f64 + 0.5).powf(2.0 - 2.0 * s);
    Ok(EpsteinValue { value: raw + edge, raw, cutoff })
}

/// `Q(a, b, c; s) = sum' (a m^2 + b m n + c n^2)^-s` with the default
/// tolerance `1e-10`.
pub fn epstein_q(form: &BinaryQuadraticForm, s: f64) -> Result<LValue> {
    epstein_q_tol(form, s, DEFAULT_EPSTEIN_TOL)
}

/// Doubles the shell cutoff from 32 until the tail bound is below `tol` (or
/// [`EPSTEIN_MAX_CUTOFF`] is reached; the returned bound then exceeds
/// `tol`).
pub fn epstein_q_tol(form: &BinaryQuadraticForm, s: f64, tol: f64) -> Result<LValue> {
    form.require_positive_definite()?;
    require_s(s)?;
    let edge_constant = epstein_edge_constant(form, s);
    let corrected =
        |raw: f64, r: u64| raw + edge_constant * (r as f64 + 0.5).powf(2.0 - 2.0 * s);
    let mut shells: Vec<f64> = Vec::new();
    let extend_to = |shells: &mut Vec<f64>, r: u64| {
        let start = shells.len();
        let more = par::map_indexed(r as usize - start, |i| epstein_shell(form, s, (start + i + 1) as i64));
        shells.extend(more);
    };
    let mut cutoff = 32u64;
    extend_to(&mut shells, cutoff);
    loop {
        let half = crate::sum::ordered_sum(&shells[..(cutoff / 2) as usize]);
        let full = crate::sum::ordered_sum(&shells);
        let v_half = corrected(half, cutoff / 2);
        let v_full = corrected(full, cutoff);
        let bound = 4.0 * (v_full - v_half).abs() + 8.0 * f64::EPSILON * v_full.abs();
        if bound <= tol || cutoff >= EPSTEIN_MAX_CUTOFF {
            let points = (2 * cutoff + 1).pow(2) - 1;
            return Ok(LValue { value: v_full, tail_bound: bound, terms_used: points });
        }
        cutoff *= 2;
        extend_to(&mut shells, cutoff);
    }
}

/// Both sides of one of the four identities between Epstein sums of the
/// discriminant -15 forms and products of L-values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, residual: (lhs - rhs).abs() }
    }
}

/// Checks identity `item` (1 to 4) at `s`:
///
/// 1. `Q(2,1,2) + Q(1,1,4) = 2 zeta L_-15`
/// 2. `Q(3,0,5) + Q(1,0,15) = 2 (1 + 2^(1-2s) - 2^(1-s)) zeta L_-15`
/// 3. `Q(1,1,4) - Q(2,1,2) = 2 L_-3 L_5`
/// 4. `Q(1,0,15) - Q(3,0,5) = 2 (1 + 2^(1-2s) + 2^(1-s)) L_-3 L_5`
pub fn verify_epstein_identity(item: u8, s: f64) -> Result<IdentityCheck> {
    verify_epstein_identity_tol(item, s, DEFAULT_EPSTEIN_TOL)
}

pub fn verify_epstein_identity_tol(item: u8, s: f64, tol: f64) -> Result<IdentityCheck> {
    require_s(s)?;
    let eps = |f: &BinaryQuadraticForm| epstein_q_tol(f, s, tol).map(|v| v.value);
    let zeta_l15 = || -> Result<f64> { Ok(zeta(s)?.value * l_value(-15, s)?.value) };
    let l3_l5 = || -> Result<f64> { Ok(l_value(-3, s)?.value * l_value(5, s)?.value) };
    let two_s = 2f64.powf(1.0 - s);
    let two_2s = 2f64.powf(1.0 - 2.0 * s);
    let check = match item {
        1 => IdentityCheck::new(
            eps(&forms::NONPRINCIPAL_15)? + eps(&forms::PRINCIPAL_15)?,
            2.0 * zeta_l15()?,
        ),
        2 => IdentityCheck::new(
            eps(&forms::DIAG_3_5)? + eps(&forms::DIAG_1_15)?,
            2.0 * (1.0 + two_2s - two_s) * zeta_l15()?,
        ),
        3 => IdentityCheck::new(
            eps(&forms::PRINCIPAL_15)? - eps(&forms::NONPRINCIPAL_15)?,
            2.0 * l3_l5()?,
        ),
        4 => IdentityCheck::new(
            eps(&forms::DIAG_1_15)? - eps(&forms::DIAG_3_5)?,
            2.0 * (1.0 + two_2s + two_s) * l3_l5()?,
        ),
        _ => return Err(Error::domain(format!("identity item must be 1..=4, got {item}"))),
    };
    Ok(check)
}

/// `Q(1,0,15; s) = (1 - 2^(1-s) + 2^(1-2s)) zeta L_-15 + (1 + 2^(1-s) + 2^(1-2s)) L_-3 L_5`.
pub fn verify_zucker_robertson(s: f64) -> Result<IdentityCheck> {
    verify_zucker_robertson_tol(s, DEFAULT_EPSTEIN_TOL)
}

pub fn verify_zucker_robertson_tol(s: f64, tol: f64) -> Result<IdentityCheck> {
    require_s(s)?;
    let lhs = epstein_q_tol(&forms::DIAG_1_15, s, tol)?.value;
    let two_s = 2f64.powf(1.0 - s);
    let two_2s = 2f64.powf(1.0 - 2.0 * s);
    let rhs = (1.0 - two_s + two_2s) * zeta(s)?.value * l_value(-15, s)?.value
        + (1.0 + two_s + two_2s) * l_value(-3, s)?.value * l_value(5, s)?.value;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Residuals of the even/odd decomposition of `L_-15`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCheck {
    /// `L_+` (even `n`) and `L_-` (odd `n`) parts of `L_-15`.
    pub l_plus: f64,
    pub l_minus: f64,
    /// Largest of `|L_+ - 2^-s L_-15|`, `|L_-60 - L_-|` and
    /// `|L_-15 - L_- - 2^-s L_-15|`.
    pub parity_residual: f64,
    /// `(1/2) sum a_n(-60) n^-s`.
    pub half_a60_series: f64,
    /// `|(1/2) sum a_n(-60) n^-s - (1 + 2^(1-2s) - 2^(1-s)) L_-15|`.
    pub lambert_residual: f64,
}

pub fn verify_even_odd_split(s: f64) -> Result<SplitCheck> {
    require_s(s)?;
    let tol = DEFAULT_L_TOL;
    let chi15 = QuadraticCharacter::new(-15)?;
    let l15 = dirichlet_l(&chi15, s)?.value;
    let l60 = l_value(-60, s)?.value;
    // L_+ and L_- from the parity-restricted coefficients (period 30).
    let restricted = |keep_even: bool| -> Vec<f64> {
        (0..30)
            .map(|r| if (r % 2 == 0) == keep_even { chi15.value(r) as f64 } else { 0.0 })
            .collect()
    };
    let l_plus = periodic_dirichlet_series(&restricted(true), s, tol)?.value;
    let l_minus = periodic_dirichlet_series(&restricted(false), s, tol)?.value;
    let two = 2f64.powf(-s);
    let parity_residual = (l_plus - two * l15)
        .abs()
        .max((l60 - l_minus).abs())
        .max((l15 - l_minus - two * l15).abs());
    let half_a: Vec<f64> = (0..60).map(|r| 0.5 * a_minus60(r) as f64).collect();
    let half_a60_series = periodic_dirichlet_series(&half_a, s, tol)?.value;
    let closed = (1.0 + 2f64.powf(1.0 - 2.0 * s) - 2f64.powf(1.0 - s)) * l15;
    Ok(SplitCheck {
        l_plus,
        l_minus,
        parity_residual,
        half_a60_series,
        lambert_residual: (half_a60_series - closed).abs(),
    })
}

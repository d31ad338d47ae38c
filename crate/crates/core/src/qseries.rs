//! Truncated q-expansions with exact rational coefficients.
//!
//! A [`QSeries`] represents `q^(prefactor24/24) * sum_{j<N} a_j q^j`. The
//! fractional prefactor lets eta products such as `eta(tau) = q^(1/24) * ...`
//! be stored without approximation. Eta factors are expanded with exact
//! integer arithmetic and only wrapped into rationals at the end.

use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::par;
use crate::quadforms::BinaryQuadraticForm;

pub const DEFAULT_ORDER: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    prefactor24: i64,
    coeffs: Vec<BigRational>,
}

/// A q-series together with its modular weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedForm {
    pub series: QSeries,
    pub weight: Rational64,
}

impl WeightedForm {
    pub fn new(series: QSeries, weight: Rational64) -> Self {
        Self { series, weight }
    }

    /// Product of forms; weights add.
    pub fn mul(&self, other: &WeightedForm) -> WeightedForm {
        WeightedForm { series: self.series.mul(&other.series), weight: self.weight + other.weight }
    }
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio_to_big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl QSeries {
    pub fn new(prefactor24: i64, coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series needs at least one coefficient");
        Self { prefactor24, coeffs }
    }

    pub fn from_integers(prefactor24: i64, coeffs: &[i64]) -> Self {
        Self::new(prefactor24, coeffs.iter().map(|&c| big(c)).collect())
    }

    fn from_bigints(prefactor24: i64, coeffs: Vec<BigInt>) -> Self {
        Self::new(prefactor24, coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn one(n: usize) -> Self {
        let mut c = vec![BigRational::zero(); n.max(1)];
        c[0] = BigRational::one();
        Self::new(0, c)
    }

    pub fn zero(n: usize) -> Self {
        Self::new(0, vec![BigRational::zero(); n.max(1)])
    }

    /// Number of known coefficients `N`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn prefactor24(&self) -> i64 {
        self.prefactor24
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient `a_j` of `q^(prefactor24/24 + j)`.
    pub fn coeff(&self, j: usize) -> &BigRational {
        &self.coeffs[j]
    }

    /// Coefficient of `q^(e24/24)`, or `None` when the exponent lies beyond
    /// the truncation or is not of the form `prefactor24/24 + j`.
    pub fn coeff_at24(&self, e24: i64) -> Option<BigRational> {
        let diff = e24 - self.prefactor24;
        if diff.rem_euclid(24) != 0 {
            return None;
        }
        let j = diff.div_euclid(24);
        if j < 0 {
            return Some(BigRational::zero());
        }
        self.coeffs.get(j as usize).cloned()
    }

    /// Coefficient of `q^n` for an integral exponent.
    pub fn coeff_q(&self, n: i64) -> Option<BigRational> {
        self.coeff_at24(24 * n)
    }

    /// `coeff_q` as an integer; `None` if unknown or not integral.
    pub fn coeff_q_i64(&self, n: i64) -> Option<i64> {
        let c = self.coeff_q(n)?;
        if c.is_integer() {
            c.to_integer().to_i64()
        } else {
            None
        }
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational64, &BigRational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(j, c)| (Rational64::new(self.prefactor24 + 24 * j as i64, 24), c))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn truncate(&self, n: usize) -> Self {
        let n = n.clamp(1, self.coeffs.len());
        Self::new(self.prefactor24, self.coeffs[..n].to_vec())
    }

    /// Moves an integral positive prefactor into explicit leading zeros, so
    /// that `coeff(j)` is the coefficient of `q^j`.
    pub fn normalized(&self) -> Self {
        if self.prefactor24 <= 0 || self.prefactor24 % 24 != 0 {
            return self.clone();
        }
        let shift = (self.prefactor24 / 24) as usize;
        let mut coeffs = vec![BigRational::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(0, coeffs)
    }

    fn aligned_with(&self, other: &QSeries) -> Result<(i64, usize, usize, usize)> {
        let diff = self.prefactor24 - other.prefactor24;
        if diff % 24 != 0 {
            return Err(Error::domain(format!(
                "cannot align q-series with prefactors {}/24 and {}/24",
                self.prefactor24, other.prefactor24
            )));
        }
        let base = self.prefactor24.min(other.prefactor24);
        let sa = ((self.prefactor24 - base) / 24) as usize;
        let sb = ((other.prefactor24 - base) / 24) as usize;
        let reach = (sa + self.coeffs.len()).min(sb + other.coeffs.len());
        Ok((base, sa, sb, reach))
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        let (base, sa, sb, reach) = self.aligned_with(other)?;
        let mut out = vec![BigRational::zero(); reach];
        for (j, c) in self.coeffs.iter().enumerate().take(reach.saturating_sub(sa)) {
            out[j + sa] += c;
        }
        for (j, c) in other.coeffs.iter().enumerate().take(reach.saturating_sub(sb)) {
            out[j + sb] += c;
        }
        Ok(QSeries::new(base, out))
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QSeries {
        QSeries::new(self.prefactor24, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        QSeries::new(self.prefactor24, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Cauchy product; the result knows `min(N_a, N_b)` coefficients.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let prefactor24 = self.prefactor24 + other.prefactor24;
        if self.is_integral() && other.is_integral() {
            let a: Vec<BigInt> = self.coeffs[..n].iter().map(|c| c.to_integer()).collect();
            let b: Vec<BigInt> = other.coeffs[..n].iter().map(|c| c.to_integer()).collect();
            return QSeries::from_bigints(prefactor24, convolve_int(&a, &b, n));
        }
        let mut out = vec![BigRational::zero(); n];
        let nz: Vec<(usize, &BigRational)> =
            other.coeffs[..n].iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, b) in &nz {
                if i + j >= n {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        QSeries::new(prefactor24, out)
    }

    /// Multiplicative inverse; requires a nonzero leading coefficient.
    pub fn inverse(&self) -> Result<QSeries> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::domain("cannot invert a q-series with zero leading coefficient"));
        }
        let n = self.coeffs.len();
        let inv0 = a0.recip();
        let mut b: Vec<BigRational> = Vec::with_capacity(n);
        b.push(inv0.clone());
        for m in 1..n {
            let mut acc = BigRational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &b[m - k];
                }
            }
            b.push(-acc * &inv0);
        }
        Ok(QSeries::new(-self.prefactor24, b))
    }

    /// `q d/dq`: multiplies the coefficient of `q^e` by `e`, including the
    /// fractional part of the exponent.
    pub fn q_derivative(&self) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let e = BigRational::new(BigInt::from(self.prefactor24 + 24 * j as i64), BigInt::from(24));
                c * e
            })
            .collect();
        QSeries::new(self.prefactor24, coeffs)
    }
}

fn convolve_int(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let nz_b: Vec<(usize, &BigInt)> = b.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for &(j, y) in &nz_b {
            if i + j >= n {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Multiplies `c` in place by `(1 - q^m)^power`, truncating at `c.len()`.
fn apply_factor(c: &mut [BigInt], m: usize, power: i64) {
    let n = c.len();
    if m == 0 || m >= n {
        return;
    }
    if power >= 0 {
        for _ in 0..power {
            for i in (m..n).rev() {
                let prev = c[i - m].clone();
                c[i] -= prev;
            }
        }
    } else {
        // 1/(1 - q^m) = 1 + q^m + q^2m + ...
        for _ in 0..(-power) {
            for i in m..n {
                let prev = c[i - m].clone();
                c[i] += prev;
            }
        }
    }
}

/// q-expansion of `eta(j*tau)` in `q = e^(2 pi i tau)`: prefactor `q^(j/24)`
/// times `prod_{n>=1} (1 - q^(j n))`, expanded to `n` coefficients.
pub fn eta_qexp(scale: u32, n: usize) -> QSeries {
    eta_product(&[(scale, 1)], n)
}

/// `prod_j eta(j tau)^(e_j)` with negative exponents allowed.
pub fn eta_product(spec: &[(u32, i64)], n: usize) -> QSeries {
    assert!(n >= 1, "truncation must be positive");
    let mut c = vec![BigInt::zero(); n];
    c[0] = BigInt::one();
    let mut prefactor24 = 0i64;
    for &(scale, e) in spec {
        assert!(scale > 0, "eta scale must be positive");
        prefactor24 += scale as i64 * e;
        let step = scale as usize;
        let mut m = step;
        while m < n {
            apply_factor(&mut c, m, e);
            m += step;
        }
    }
    QSeries::from_bigints(prefactor24, c)
}

/// Scales and exponents of `g = eta(z) eta(3z) eta(5z) eta(15z)`.
pub const G_SPEC: [(u32, i64); 4] = [(1, 1), (3, 1), (5, 1), (15, 1)];

/// Scales and exponents of the Hauptmodul
/// `t = eta(3)^4 eta(12)^8 eta(2)^12 / (eta(1)^4 eta(4)^8 eta(6)^12)`.
pub const T_SPEC: [(u32, i64); 6] = [(3, 4), (12, 8), (2, 12), (1, -4), (4, -8), (6, -12)];

/// `theta_a = sum_{n in Z} q^(a n^2)`, weight 1/2.
pub fn theta_one_var(a: u64, n: usize) -> WeightedForm {
    assert!(a > 0 && n >= 1);
    let mut c = vec![0i64; n];
    let mut m: u64 = 0;
    while ((a * m * m) as usize) < n {
        c[(a * m * m) as usize] += if m == 0 { 1 } else { 2 };
        m += 1;
    }
    WeightedForm::new(QSeries::from_integers(0, &c), Rational64::new(1, 2))
}

/// Theta series `sum_{(m,k) in Z^2} q^(Q(m,k))` of a positive definite form;
/// the coefficient of `q^j` is the representation number `r_Q(j)`.
pub fn theta_bqf(form: &BinaryQuadraticForm, n: usize) -> Result<QSeries> {
    form.require_positive_definite()?;
    let counts = theta_counts(form, n);
    Ok(QSeries::from_integers(0, &counts))
}

/// Representation counts `r_Q(j)` for `j < n`, enumerated row by row over
/// the ellipse `Q(m,k) < n`.
pub(crate) fn theta_counts(form: &BinaryQuadraticForm, n: usize) -> Vec<i64> {
    let (a, b, c) = (form.a as f64, form.b as f64, form.c as f64);
    let disc = (form.b * form.b - 4 * form.a * form.c).abs() as f64;
    let limit = n as f64;
    // Q >= |D|/(4a) k^2, so rows beyond this are empty.
    let kmax = (4.0 * a * limit / disc).sqrt().ceil() as i64 + 1;
    let rows: Vec<Vec<usize>> = par::map_indexed((2 * kmax + 1) as usize, |idx| {
        let k = idx as i64 - kmax;
        let kf = k as f64;
        let d = b * b * kf * kf - 4.0 * a * (c * kf * kf - limit);
        if d < 0.0 {
            return Vec::new();
        }
        let lo = ((-b * kf - d.sqrt()) / (2.0 * a)).floor() as i64 - 1;
        let hi = ((-b * kf + d.sqrt()) / (2.0 * a)).ceil() as i64 + 1;
        (lo..=hi)
            .filter_map(|m| {
                let v = form.value(m, k);
                (v >= 0 && (v as usize) < n).then_some(v as usize)
            })
            .collect()
    });
    let mut counts = vec![0i64; n];
    for row in rows {
        for v in row {
            counts[v] += 1;
        }
    }
    counts
}

/// Rankin–Cohen bracket of weight `k` and `l` forms, with the orientation
/// `[g, h] = l g' h - k g h'` (prime is `q d/dq`). The result has weight
/// `k + l + 2`. With this orientation `[theta_5, theta_3]` and
/// `[theta_1, theta_15]` have the expansions
/// `(1/2) sum (5k^2 - 3r^2) q^(3r^2 + 5k^2)` and
/// `(1/2) sum (r^2 - 15k^2) q^(r^2 + 15k^2)` used in the trace comparison.
pub fn rankin_cohen(g: &WeightedForm, h: &WeightedForm) -> WeightedForm {
    let n = g.series.truncation().min(h.series.truncation());
    let gs = g.series.truncate(n);
    let hs = h.series.truncate(n);
    let k = ratio_to_big(g.weight);
    let l = ratio_to_big(h.weight);
    let left = gs.q_derivative().mul(&hs).scale(&l);
    let right = gs.mul(&hs.q_derivative()).scale(&k);
    let series = left.sub(&right).expect("products share a prefactor");
    WeightedForm::new(series, g.weight + h.weight + Rational64::from_integer(2))
}

/// `f_1 = [theta_5, theta_3]`, weight 3.
pub fn f1_qexp(n: usize) -> WeightedForm {
    rankin_cohen(&theta_one_var(5, n), &theta_one_var(3, n))
}

/// `f_2 = [theta_1, theta_15]`, weight 3.
pub fn f2_qexp(n: usize) -> WeightedForm {
    rankin_cohen(&theta_one_var(1, n), &theta_one_var(15, n))
}

/// `g = eta(z) eta(3z) eta(5z) eta(15z)`, as `q * (...)`.
pub fn g_qexp(n: usize) -> QSeries {
    eta_product(&G_SPEC, n)
}

/// `theta_1 = sum q^(m^2 + m n + 4 n^2)`.
pub fn theta1_qexp(n: usize) -> QSeries {
    theta_bqf(&BinaryQuadraticForm::new(1, 1, 4), n).expect("x^2+xy+4y^2 is positive definite")
}

/// `f^+ = g theta_1`, normalized so that `coeff(j)` is `b_j`; `n`
/// coefficients `b_0 .. b_{n-1}`.
pub fn fplus_qexp(n: usize) -> QSeries {
    assert!(n >= 2, "f+ starts at q^1");
    let g = g_qexp(n);
    let theta = theta1_qexp(n);
    g.mul(&theta).normalized().truncate(n)
}

/// `prod_{n>=1} (1 - q^(scale n))` to `n` coefficients, from Euler's
/// pentagonal series `sum_k (-1)^k q^(k(3k-1)/2)` (sparse).
fn pentagonal_sparse(scale: usize, n: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0, 1)];
    for k in 1i64.. {
        let lo = scale * (k * (3 * k - 1) / 2) as usize;
        if lo >= n {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out.push((lo, sign));
        let hi = scale * (k * (3 * k + 1) / 2) as usize;
        if hi < n {
            out.push((hi, sign));
        }
    }
    out.sort_unstable();
    out
}

/// Dense series times a sparse one, truncated at `n`.
fn mul_sparse_i64(dense: &[i64], sparse: &[(usize, i64)], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n];
    for &(j, c) in sparse {
        for i in 0..n.saturating_sub(j) {
            out[i + j] += c * dense[i];
        }
    }
    out
}

/// Coefficients `b_0 .. b_{n-1}` of `f^+` in machine integers.
///
/// This is a second, independent route to [`fplus_qexp`]: the eta factors
/// come from the pentagonal series instead of repeated `(1 - q^m)`
/// products, and the final product is a direct integer convolution with
/// the theta representation counts. It reaches orders near `10^5` in
/// seconds. Panics if a coefficient overflows `i64`.
pub fn fplus_coefficients(n: usize) -> Vec<i64> {
    assert!(n >= 2, "f+ starts at q^1");
    // g = q * prod over scales 1, 3, 5, 15
    let m = n - 1;
    let mut g = vec![0i64; m];
    g[0] = 1;
    for (scale, _) in G_SPEC {
        g = mul_sparse_i64(&g, &pentagonal_sparse(scale as usize, m), m);
    }
    let theta = theta_counts(&crate::quadforms::forms::PRINCIPAL_15, m);
    let theta_nz: Vec<(usize, i64)> =
        theta.iter().enumerate().filter(|(_, c)| **c != 0).map(|(j, c)| (j, *c)).collect();
    let chunks = par::map_chunks(m, 1024, |range| {
        range
            .map(|e| {
                let mut acc: i128 = 0;
                for &(j, c) in &theta_nz {
                    if j > e {
                        break;
                    }
                    acc += (g[e - j] as i128) * (c as i128);
                }
                i64::try_from(acc).expect("f+ coefficient overflows i64")
            })
            .collect::<Vec<i64>>()
    });
    let mut b = Vec::with_capacity(n);
    b.push(0);
    b.extend(chunks.into_iter().flatten());
    b
}

/// The eta quotient `t`, as `q * (...)`.
pub fn t_qexp(n: usize) -> QSeries {
    eta_product(&T_SPEC, n)
}

/// `sum_{m>=1} a(m) q^m / (1 - q^m)` to `n` coefficients (index 0 is zero).
pub fn lambert_expand<F>(a: F, n: usize) -> QSeries
where
    F: Fn(u64) -> BigRational,
{
    let mut c = vec![BigRational::zero(); n.max(1)];
    for m in 1..n {
        let am = a(m as u64);
        if am.is_zero() {
            continue;
        }
        for multiple in (m..n).step_by(m) {
            c[multiple] += &am;
        }
    }
    QSeries::new(0, c)
}

const A60_PLUS: [u8; 16] = [1, 4, 8, 14, 16, 17, 19, 22, 23, 26, 31, 32, 47, 49, 53, 58];
const A60_MINUS: [u8; 16] = [2, 7, 11, 13, 28, 29, 34, 37, 38, 41, 43, 44, 46, 52, 56, 59];

/// The coefficients `a_n(-60)` of the Lambert expansion of
/// `phi(q) phi(q^15) + phi(q^3) phi(q^5) - 2`: zero when `gcd(n, 15) > 1`,
/// otherwise `+2` or `-2` according to the residue of `n` mod 60.
pub fn a_minus60(n: u64) -> i64 {
    if n.gcd(&15) > 1 {
        return 0;
    }
    let r = (n % 60) as u8;
    if A60_PLUS.contains(&r) {
        2
    } else if A60_MINUS.contains(&r) {
        -2
    } else {
        unreachable!("every residue prime to 15 is listed")
    }
}

/// `phi(q) phi(q^15) + phi(q^3) phi(q^5) - 2` with `phi = theta_1`.
pub fn phi_pair_sum(n: usize) -> QSeries {
    let phi = |a| theta_one_var(a, n).series;
    let sum = phi(1).mul(&phi(15)).add(&phi(3).mul(&phi(5))).expect("same prefactor");
    let mut two = vec![0i64; n];
    two[0] = 2;
    sum.sub(&QSeries::from_integers(0, &two)).expect("same prefactor").truncate(n)
}

/// Indices `j` in `range` where two series differ (after alignment).
pub fn mismatches(a: &QSeries, b: &QSeries, range: Range<usize>) -> Vec<usize> {
    range.filter(|&j| a.coeffs.get(j) != b.coeffs.get(j)).collect()
}

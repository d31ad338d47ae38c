//! Logarithmic Mahler measure `m(P)`, the average of `log|P|` over the unit
//! torus, by Jensen-reduced quadrature or by Monte Carlo.
//!
//! The Jensen route integrates one variable exactly: for a one-variable
//! polynomial `p(z) = c_d z^d + ... + c_0`,
//! `(1/2pi) int log|p(e^it)| dt = log|c_d| + sum log max(1, |root|)`.
//! The remaining variables are integrated with the periodic trapezoid rule,
//! which is spectrally accurate once the logarithmic singularity in the
//! inner variable has been removed.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{rational_to_f64, LaurentPolynomial};
use crate::par;
use crate::sum::CompensatedSum;

/// Samples drawn per independent random stream.
pub const MC_BATCH: usize = 1 << 14;

/// Relative residual accepted for roots of higher-degree slices.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    JensenGrid,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::JensenGrid => "jensen_grid",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// Standard error for Monte Carlo, `|value(g) - value(g/2)|` for the grid.
    pub error_bound: f64,
    pub method: Method,
    pub resolution: String,
    /// Grid nodes whose inner slice vanished identically.
    pub skipped_nodes: u64,
    /// Monte Carlo samples redrawn because `P` was exactly zero there.
    pub rejected_samples: u64,
}

/// `P` as a list of `(coefficient, exponent vector)`, evaluated through
/// phases so that points on the torus are given by angles.
struct TorusPoly {
    terms: Vec<(f64, Vec<i32>)>,
}

impl TorusPoly {
    fn new(p: &LaurentPolynomial) -> Self {
        Self { terms: p.terms().map(|(e, c)| (rational_to_f64(c), e.clone())).collect() }
    }

    fn eval(&self, angles: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, e) in &self.terms {
            let phase: f64 = e.iter().zip(angles).map(|(&k, t)| k as f64 * t).sum();
            acc += Complex64::from_polar(*c, phase);
        }
        acc
    }

    /// Coefficients of the slice in variable `inner`, lowest exponent first.
    fn slice(&self, inner: usize, lo: i32, width: usize, outer: &[f64]) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); width];
        for (c, e) in &self.terms {
            let mut phase = 0.0;
            let mut slot = 0;
            for (var, &k) in e.iter().enumerate() {
                if var == inner {
                    continue;
                }
                phase += k as f64 * outer[slot];
                slot += 1;
            }
            coeffs[(e[inner] - lo) as usize] += Complex64::from_polar(*c, phase);
        }
        coeffs
    }

    fn norm1(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).sum()
    }
}

/// Mean of `log|P|` over `samples` uniform torus points.
///
/// Batches of [`MC_BATCH`] samples use independent ChaCha streams of the
/// same seed and are combined in batch order, so the result does not depend
/// on the number of threads.
pub fn mahler_monte_carlo(p: &LaurentPolynomial, samples: u64, seed: u64) -> Result<MeasureEstimate> {
    if samples < 2 {
        return Err(Error::domain("Monte Carlo needs at least 2 samples"));
    }
    if p.is_zero() {
        return Err(Error::domain("Mahler measure of the zero polynomial is undefined"));
    }
    let poly = TorusPoly::new(p);
    let n = p.dimension();
    let max_rejects = samples / 10;
    let batches = samples.div_ceil(MC_BATCH as u64) as usize;
    let stats = par::map_indexed(batches, |b| {
        let len = (samples - (b * MC_BATCH) as u64).min(MC_BATCH as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let mut angles = vec![0.0; n];
        let mut acc = Welford::default();
        let mut rejected = 0u64;
        while acc.count < len {
            for a in angles.iter_mut() {
                *a = TAU * rng.random::<f64>();
            }
            let v = poly.eval(&angles).norm();
            if v == 0.0 {
                rejected += 1;
                if rejected > max_rejects {
                    break;
                }
                continue;
            }
            acc.push(v.ln());
        }
        (acc, rejected)
    });
    let mut total = Welford::default();
    let mut rejected = 0;
    for (w, r) in &stats {
        total.merge(w);
        rejected += r;
    }
    if rejected > max_rejects {
        return Err(Error::NumericalDegeneracy(format!(
            "{rejected} samples landed on the zero set of P (limit {max_rejects})"
        )));
    }
    let sd = (total.m2 / (total.count - 1) as f64).sqrt();
    Ok(MeasureEstimate {
        value: total.mean,
        error_bound: sd / (total.count as f64).sqrt(),
        method: Method::MonteCarlo,
        resolution: format!("samples={samples} seed={seed}"),
        skipped_nodes: 0,
        rejected_samples: rejected,
    })
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Welford) {
        if o.count == 0 {
            return;
        }
        let n = self.count + o.count;
        let d = o.mean - self.mean;
        self.mean += d * o.count as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.count as f64 * o.count as f64 / n as f64);
        self.count = n;
    }
}

/// The variable integrated exactly: smallest positive exponent span, ties
/// to the last variable. A variable absent from `P` is never chosen unless
/// every variable is.
pub fn inner_variable(p: &LaurentPolynomial) -> usize {
    let spans: Vec<i32> =
        (0..p.dimension()).map(|v| p.exponent_range(v).map_or(0, |(lo, hi)| hi - lo)).collect();
    let candidates = spans.iter().enumerate().filter(|(_, &s)| s > 0);
    candidates
        .min_by_key(|&(v, &s)| (s, std::cmp::Reverse(v)))
        .map_or(p.dimension().saturating_sub(1), |(v, _)| v)
}

/// Jensen's formula for `sum_k coeffs[k] z^k`: the mean of `log|p|` on the
/// unit circle. `None` if `p` vanishes identically (relative to `scale`).
pub fn jensen_mean(coeffs: &[Complex64], scale: f64) -> Result<Option<f64>> {
    let cutoff = 1e-14 * scale;
    let Some(top) = coeffs.iter().rposition(|c| c.norm() > cutoff) else {
        return Ok(None);
    };
    let bottom = coeffs.iter().position(|c| c.norm() > cutoff).unwrap_or(0);
    // A factor z^bottom has modulus one on the circle.
    let p = &coeffs[bottom..=top];
    let lead = p[p.len() - 1];
    let roots = polynomial_roots(p)?;
    let outside: f64 = roots.iter().map(|r| r.norm().max(1.0).ln()).sum();
    Ok(Some(lead.norm().ln() + outside))
}

/// All complex roots of `sum_k coeffs[k] z^k`, `coeffs` lowest degree first
/// with a nonzero leading coefficient.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    match coeffs.len() {
        0 | 1 => Ok(vec![]),
        2 => Ok(vec![-coeffs[0] / coeffs[1]]),
        3 => Ok(quadratic_roots(coeffs[2], coeffs[1], coeffs[0]).to_vec()),
        _ => aberth_roots(coeffs),
    }
}

/// Roots of `a z^2 + b z + c` without cancellation in `-b + sqrt(disc)`.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let sq = (b * b - 4.0 * a * c).sqrt();
    // pick the sign making |b + sign*sq| largest
    let q = if (b.conj() * sq).re >= 0.0 { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Aberth–Ehrlich iteration, followed by a residual check.
fn aberth_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Fujiwara-style radius for the starting circle.
    let radius = (0..d)
        .map(|k| monic[k].norm().powf(1.0 / (d - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, TAU * (k as f64 + 0.25) / d as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 =
                (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    let norm: f64 = monic.iter().map(|c| c.norm()).sum();
    for r in &z {
        let residual = horner(&monic, *r).0.norm();
        let allowed = ROOT_RESIDUAL_TOL * norm * r.norm().max(1.0).powi(d as i32);
        if !residual.is_finite() || residual > allowed {
            return Err(Error::NumericalDegeneracy(format!(
                "root finder did not converge: residual {residual:e} at {r}"
            )));
        }
    }
    Ok(z)
}

/// Per-chunk partial sums over the full grid and over the half grid.
#[derive(Default)]
struct GridPartial {
    full: CompensatedSum,
    full_count: u64,
    coarse: CompensatedSum,
    coarse_count: u64,
    skipped: u64,
}

/// `m(P)` with the inner variable integrated exactly and the others by the
/// trapezoid rule on `grid[i]` equally spaced angles each.
///
/// `grid` lists counts for the outer variables in their original order. The
/// half-resolution value used for `error_bound` comes from the even-indexed
/// nodes (dimensions with an odd count keep all their nodes).
pub fn mahler_jensen_grid(p: &LaurentPolynomial, grid: &[usize]) -> Result<MeasureEstimate> {
    if p.is_zero() {
        return Err(Error::domain("Mahler measure of the zero polynomial is undefined"));
    }
    let n = p.dimension();
    if grid.len() + 1 != n {
        return Err(Error::domain(format!(
            "need {} outer grid sizes for {n} variables, got {}",
            n - 1,
            grid.len()
        )));
    }
    if grid.contains(&0) {
        return Err(Error::domain("grid sizes must be positive"));
    }
    let inner = inner_variable(p);
    let (lo, hi) = p.exponent_range(inner).unwrap_or((0, 0));
    let width = (hi - lo + 1) as usize;
    let poly = TorusPoly::new(p);
    let scale = poly.norm1();
    let total: usize = grid.iter().product();
    let chunk = grid.last().copied().unwrap_or(1).max(256);

    let partials = par::map_chunks(total, chunk, |range| {
        let mut part = GridPartial::default();
        let mut angles = vec![0.0; grid.len()];
        let mut index = vec![0usize; grid.len()];
        for flat in range {
            let mut rest = flat;
            for d in (0..grid.len()).rev() {
                index[d] = rest % grid[d];
                rest /= grid[d];
                angles[d] = TAU * index[d] as f64 / grid[d] as f64;
            }
            let coeffs = poly.slice(inner, lo, width, &angles);
            let on_coarse = index.iter().zip(grid).all(|(&i, &g)| g % 2 == 1 || i % 2 == 0);
            match jensen_mean(&coeffs, scale)? {
                Some(v) => {
                    part.full.add(v);
                    part.full_count += 1;
                    if on_coarse {
                        part.coarse.add(v);
                        part.coarse_count += 1;
                    }
                }
                None => part.skipped += 1,
            }
        }
        Ok::<_, Error>(part)
    });

    let mut agg = GridPartial::default();
    for part in partials {
        let part = part?;
        agg.full.merge(&part.full);
        agg.coarse.merge(&part.coarse);
        agg.full_count += part.full_count;
        agg.coarse_count += part.coarse_count;
        agg.skipped += part.skipped;
    }
    if agg.full_count == 0 {
        return Err(Error::NumericalDegeneracy("inner slice vanished at every grid node".into()));
    }
    let value = agg.full.value() / agg.full_count as f64;
    let coarse = if agg.coarse_count > 0 { agg.coarse.value() / agg.coarse_count as f64 } else { value };
    let dims: Vec<String> = grid.iter().map(|g| g.to_string()).collect();
    let grid_text = if dims.is_empty() { "1".to_string() } else { dims.join("x") };
    Ok(MeasureEstimate {
        value,
        error_bound: (value - coarse).abs(),
        method: Method::JensenGrid,
        resolution: format!("grid={grid_text} inner=x{inner}"),
        skipped_nodes: agg.skipped,
        rejected_samples: 0,
    })
}

/// Same grid size for every outer variable.
pub fn mahler_jensen_square(p: &LaurentPolynomial, per_variable: usize) -> Result<MeasureEstimate> {
    mahler_jensen_grid(p, &vec![per_variable; p.dimension().saturating_sub(1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{build_p0, build_qk};
    use crate::lfunctions::d3;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn poly(s: &str) -> LaurentPolynomial {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_cases() {
        let m = mahler_jensen_grid(&poly("X + 2"), &[]).unwrap();
        assert_eq!(m.value, 2f64.ln());
        let x = mahler_monte_carlo(&poly("X"), 1000, 1).unwrap();
        assert!(x.value.abs() < 1e-15 && x.error_bound < 1e-15);
        assert!(mahler_monte_carlo(&poly("X"), 1, 1).is_err());
        assert!(mahler_jensen_grid(&LaurentPolynomial::zero(2), &[4]).is_err());
        assert!(mahler_jensen_grid(&poly("X + Y"), &[4, 4]).is_err());
    }

    #[test]
    fn monte_carlo_linear() {
        let m = mahler_monte_carlo(&poly("2*X + 1"), 1_000_000, 7).unwrap();
        assert!((m.value - 2f64.ln()).abs() < 3.0 * m.error_bound, "{m:?}");
        assert_eq!(m.method, Method::MonteCarlo);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let p = build_p0();
        let a = mahler_monte_carlo(&p, 50_000, 42).unwrap();
        let b = mahler_monte_carlo(&p, 50_000, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let other = mahler_monte_carlo(&p, 50_000, 43).unwrap();
        assert_ne!(a.value, other.value);
        let single = par::with_threads(Some(1), || mahler_monte_carlo(&p, 50_000, 42).unwrap());
        assert_eq!(a.value.to_bits(), single.value.to_bits());
    }

    #[test]
    fn monte_carlo_rejects_zero_polynomial() {
        assert!(mahler_monte_carlo(&LaurentPolynomial::zero(2), 100, 1).is_err());
    }

    #[test]
    fn inner_variable_choice() {
        assert_eq!(inner_variable(&build_qk(Rational64::from(-3))), 2);
        assert_eq!(inner_variable(&poly("X^3 + Y^2 + Y^-1 + Z")), 2);
        assert_eq!(inner_variable(&poly("X^3 + Y + Z^2")), 1);
        assert_eq!(inner_variable(&LaurentPolynomial::parse_with_dimension("X + 3", 2).unwrap()), 0);
    }

    #[test]
    fn quadratic_roots_are_stable() {
        // z^2 - 1e8 z + 1: naive formula loses the small root entirely
        let r = quadratic_roots(c(1.0, 0.0), c(-1e8, 0.0), c(1.0, 0.0));
        let small = if r[0].norm() < r[1].norm() { r[0] } else { r[1] };
        assert!((small.re - 1e-8).abs() < 1e-20);
    }

    #[test]
    fn aberth_finds_roots_of_unity_shifted() {
        // (z - 2)(z - 0.5)(z + i)(z - 3i)
        let roots = [c(2.0, 0.0), c(0.5, 0.0), c(0.0, -1.0), c(0.0, 3.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        let found = polynomial_roots(&coeffs).unwrap();
        for r in roots {
            assert!(found.iter().any(|f| (f - r).norm() < 1e-10), "{r} not in {found:?}");
        }
    }

    /// Trapezoid quadrature of `log|p|` on the circle.
    fn trapezoid_mean(coeffs: &[Complex64], n: usize) -> f64 {
        (0..n)
            .map(|j| {
                let z = Complex64::from_polar(1.0, TAU * j as f64 / n as f64);
                coeffs.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * z + a).norm().ln()
            })
            .sum::<f64>()
            / n as f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn jensen_matches_trapezoid(
            raw in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..7)
        ) {
            let coeffs: Vec<Complex64> = raw.iter().map(|&(a, b)| c(a, b)).collect();
            prop_assume!(coeffs.last().unwrap().norm() > 0.1);
            let roots = polynomial_roots(&coeffs).unwrap();
            prop_assume!(roots.iter().all(|r| (r.norm() - 1.0).abs() > 1e-3));
            let exact = jensen_mean(&coeffs, 1.0).unwrap().unwrap();
            let quad = trapezoid_mean(&coeffs, 4096);
            // near-circle roots converge like exp(-4096 * dist)
            let near = roots.iter().map(|r| (r.norm() - 1.0).abs()).fold(1.0, f64::min);
            let tol = if near > 0.01 { 1e-6 } else { 1e-3 };
            prop_assert!((exact - quad).abs() < tol, "{} vs {}", exact, quad);
        }
    }

    #[test]
    fn jensen_on_well_separated_slices_to_1e6() {
        // fixed slices with all roots at least 1e-3 from the circle but
        // far enough that 4096 nodes resolve them
        let cases: [&[Complex64]; 3] = [
            &[c(1.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)],
            &[c(0.3, 0.1), c(-1.0, 2.0), c(0.0, 0.5), c(2.0, 0.0)],
            &[c(5.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        for coeffs in cases {
            let exact = jensen_mean(coeffs, 1.0).unwrap().unwrap();
            assert!((exact - trapezoid_mean(coeffs, 4096)).abs() < 1e-6);
        }
    }

    #[test]
    fn p0_grid_matches_d3() {
        let m = mahler_jensen_square(&build_p0(), 256).unwrap();
        assert!((m.value - d3().value).abs() < 1e-4, "{m:?}");
        assert_eq!(m.skipped_nodes, 0);
        assert!(m.error_bound < 1e-2);
    }

    #[test]
    fn additivity_and_scaling() {
        let p = poly("X + Y + 1");
        let q = poly("X - 3*Y + 1/2");
        let g = 128;
        let mp = mahler_jensen_square(&p, g).unwrap();
        let mq = mahler_jensen_square(&q, g).unwrap();
        let mpq = mahler_jensen_square(&(&p * &q), g).unwrap();
        let bound = mp.error_bound + mq.error_bound + mpq.error_bound + 1e-12;
        assert!((mpq.value - mp.value - mq.value).abs() <= bound.max(1e-3));
        let two_p = p.scale(Rational64::from(2));
        let m2 = mahler_jensen_square(&two_p, g).unwrap();
        assert!((m2.value - mp.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn smyth_value_of_one_plus_x_plus_y() {
        // m(1 + X + Y) = d_3
        let m = mahler_jensen_square(&poly("1 + X + Y"), 1024).unwrap();
        assert!((m.value - d3().value).abs() < 1e-4, "{m:?}");
    }

    #[test]
    fn refinement_shrinks_on_smooth_integrand() {
        let p = poly("X + 3 + Y");
        let deltas: Vec<f64> =
            [4, 8, 16].iter().map(|&g| mahler_jensen_square(&p, g).unwrap().error_bound).collect();
        assert!(deltas[0] > deltas[1] && deltas[1] >= deltas[2], "{deltas:?}");
    }

    #[test]
    fn skipped_nodes_are_counted() {
        // slice in Y is (X - 1)(Y + 2): zero when X = 1, which is grid node 0
        let p = poly("X*Y + 2*X - Y - 2");
        assert_eq!(inner_variable(&p), 1);
        let m = mahler_jensen_grid(&p, &[8]).unwrap();
        assert_eq!(m.skipped_nodes, 1);
        // prod_{j=1..7} |1 - w^j| = 8 for w an 8th root of unity
        assert!((m.value - 2f64.ln() - 8f64.ln() / 7.0).abs() < 1e-12);
    }

    #[test]
    fn grid_is_thread_count_independent() {
        let p = build_qk(Rational64::from(-3));
        let a = mahler_jensen_square(&p, 32).unwrap();
        let b = par::with_threads(Some(1), || mahler_jensen_square(&p, 32).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

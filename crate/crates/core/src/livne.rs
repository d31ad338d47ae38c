//! Effective test sets for comparing two 2-adic Galois representations
//! through finitely many traces, and the trace comparison itself.
//!
//! With `S' = {-1} ∪ S`, a prime `t` maps to the vector
//! `f(t)_s = (1 + (s/t)) / 2` over `Z/2`. A set `T` of primes is an
//! effective test set when `f(T)` covers every nonzero vector of
//! `(Z/2)^|S'|`. Traces are the coefficient sequences `A_1` (from the
//! diagonal-form theta combination) and `A_2` (the newform `f^+`).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunctions::kronecker;
use crate::qseries::fplus_qexp;
use crate::quadforms::{ap_closed_form, coeff_a1_int, is_prime, primes_up_to};

/// The test primes for the level 15 comparison.
pub const STANDARD_T: [u64; 15] = [7, 11, 13, 17, 19, 23, 29, 31, 41, 43, 53, 61, 71, 73, 83];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSetConfig {
    bad_primes: Vec<u64>,
    test_primes: Vec<u64>,
}

impl TestSetConfig {
    /// `S` and `T` must be sets of primes with `T` disjoint from `S ∪ {2}`.
    pub fn new(bad_primes: &[u64], test_primes: &[u64]) -> Result<Self> {
        let s: BTreeSet<u64> = bad_primes.iter().copied().collect();
        let t: BTreeSet<u64> = test_primes.iter().copied().collect();
        if let Some(p) = s.iter().chain(&t).find(|&&p| !is_prime(p)) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if t.contains(&2) {
            return Err(Error::domain("2 cannot be a test prime"));
        }
        if let Some(p) = t.intersection(&s).next() {
            return Err(Error::domain(format!("{p} is both a bad prime and a test prime")));
        }
        Ok(Self { bad_primes: s.into_iter().collect(), test_primes: t.into_iter().collect() })
    }

    /// `S = {3, 5}` with the fifteen standard test primes.
    pub fn standard() -> Self {
        Self::new(&[3, 5], &STANDARD_T).expect("valid fixed config")
    }

    /// `S = {2, 3, 5}` with the same test primes.
    pub fn standard_with_two() -> Self {
        Self::new(&[2, 3, 5], &STANDARD_T).expect("valid fixed config")
    }

    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    pub fn test_primes(&self) -> &[u64] {
        &self.test_primes
    }

    /// `S' = {-1} ∪ S`, with `-1` first.
    pub fn sprime(&self) -> Vec<i64> {
        std::iter::once(-1).chain(self.bad_primes.iter().map(|&p| p as i64)).collect()
    }
}

/// `f(t)` over `S'`, in the order of [`TestSetConfig::sprime`].
pub fn fs_vector(t: u64, config: &TestSetConfig) -> Result<Vec<u8>> {
    if t == 2 {
        return Err(Error::domain("t = 2 is excluded"));
    }
    if !is_prime(t) {
        return Err(Error::domain(format!("{t} is not prime")));
    }
    if config.bad_primes.contains(&t) {
        return Err(Error::domain(format!("{t} lies in S")));
    }
    Ok(config.sprime().iter().map(|&s| ((1 + kronecker(s, t as i64)) / 2) as u8).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub sprime: Vec<i64>,
    pub vectors: Vec<(u64, Vec<u8>)>,
    /// Distinct nonzero vectors attained, sorted.
    pub attained: Vec<Vec<u8>>,
    pub missing: Vec<Vec<u8>>,
    pub nonzero_total: usize,
    pub effective: bool,
}

/// Nonzero vectors of `(Z/2)^n` in lexicographic order.
fn nonzero_vectors(n: usize) -> Vec<Vec<u8>> {
    (1u32..1 << n).map(|bits| (0..n).rev().map(|i| ((bits >> i) & 1) as u8).collect()).collect()
}

pub fn verify_effective_test_set(config: &TestSetConfig) -> Result<CoverageReport> {
    let vectors: Vec<(u64, Vec<u8>)> = config
        .test_primes
        .iter()
        .map(|&t| fs_vector(t, config).map(|v| (t, v)))
        .collect::<Result<_>>()?;
    let seen: BTreeSet<&Vec<u8>> = vectors.iter().map(|(_, v)| v).collect();
    let all = nonzero_vectors(config.sprime().len());
    let (attained, missing): (Vec<_>, Vec<_>) = all.iter().cloned().partition(|v| seen.contains(v));
    Ok(CoverageReport {
        sprime: config.sprime(),
        vectors,
        nonzero_total: all.len(),
        effective: missing.is_empty(),
        attained,
        missing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub p: u64,
    pub a1: i64,
    pub a2: i64,
    pub equal: bool,
}

/// `A_1(p)` and `A_2(p)` for the test primes of `config`.
pub fn trace_table(config: &TestSetConfig) -> Result<Vec<TraceRow>> {
    trace_rows(&config.test_primes)
}

/// Rows for arbitrary primes other than 3 and 5. `A_2` comes from the
/// closed form and must match the `q^p` coefficient of `f^+`.
pub fn trace_rows(primes: &[u64]) -> Result<Vec<TraceRow>> {
    let order = primes.iter().max().map_or(2, |&p| p as usize + 1);
    let fplus = fplus_qexp(order);
    primes
        .iter()
        .map(|&p| {
            let a1 = coeff_a1_int(p)?;
            let a2 = ap_closed_form(p)?;
            let from_series = fplus.coeff_q_i64(p as i64);
            if from_series != Some(a2) {
                return Err(Error::InternalConsistency(format!(
                    "A_2({p}): closed form {a2}, q-expansion {from_series:?}"
                )));
            }
            Ok(TraceRow { p, a1, a2, equal: a1 == a2 })
        })
        .collect()
}

/// The table as three aligned text rows: `p`, `A1(p)`, `A2(p)`.
pub fn format_trace_table(rows: &[TraceRow]) -> String {
    let cells = |label: &str, f: &dyn Fn(&TraceRow) -> i64| {
        let mut line = format!("{label:<6}");
        for r in rows {
            let _ = write!(line, " {:>5}", f(r));
        }
        line
    };
    [cells("p", &|r| r.p as i64), cells("A1(p)", &|r| r.a1), cells("A2(p)", &|r| r.a2)].join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub max_p: u64,
    pub primes_checked: usize,
    /// Primes where some parity condition failed.
    pub failures: Vec<u64>,
    pub pass: bool,
}

/// For primes `7 <= p <= max_p`: `A_1(p)` and `A_2(p)` are even, and both
/// sides have the same determinant mod 2. Both determinants are
/// `chi_-15(p) p^2`, so the latter reduces to `p^2` odd and
/// `chi_-15(p) = ±1`.
pub fn parity_checks(max_p: u64) -> Result<ParityReport> {
    if max_p < 7 {
        return Err(Error::domain("parity checks need max_p >= 7"));
    }
    let primes: Vec<u64> = primes_up_to(max_p).into_iter().filter(|p| *p > 5).collect();
    let rows = trace_rows(&primes)?;
    let failures: Vec<u64> = rows
        .iter()
        .filter(|r| {
            let det_ok = (r.p * r.p) % 2 == 1 && kronecker(-15, r.p as i64).abs() == 1;
            r.a1 % 2 != 0 || r.a2 % 2 != 0 || !det_ok
        })
        .map(|r| r.p)
        .collect();
    Ok(ParityReport { max_p, primes_checked: rows.len(), pass: failures.is_empty(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXPECTED: [i64; 15] = [0, 0, 0, -14, -22, 34, 0, 2, 0, 0, -86, -118, 0, 0, 154];

    /// `(s/t)` from a table of squares mod `t`.
    fn legendre_brute(s: i64, t: u64) -> i8 {
        let r = s.rem_euclid(t as i64) as u64;
        if r == 0 {
            return 0;
        }
        if (1..t).any(|x| x * x % t == r) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn fs_examples() {
        let c = TestSetConfig::standard();
        assert_eq!(c.sprime(), vec![-1, 3, 5]);
        assert_eq!(fs_vector(7, &c).unwrap(), vec![0, 0, 0]);
        assert_eq!(fs_vector(19, &c).unwrap(), vec![0, 0, 1]);
        assert!(fs_vector(2, &c).is_err());
        assert!(fs_vector(1, &c).is_err());
        assert!(fs_vector(5, &c).is_err());
    }

    #[test]
    fn fs_matches_brute_force_residues() {
        let c = TestSetConfig::new(&[2, 3, 5, 7], &[]).unwrap();
        for t in primes_up_to(100).into_iter().filter(|&t| t > 7) {
            let expected: Vec<u8> =
                c.sprime().iter().map(|&s| ((1 + legendre_brute(s, t)) / 2) as u8).collect();
            assert_eq!(fs_vector(t, &c).unwrap(), expected, "t = {t}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(TestSetConfig::new(&[3, 5], &[2, 7]).is_err());
        assert!(TestSetConfig::new(&[3, 5], &[5, 7]).is_err());
        assert!(TestSetConfig::new(&[3, 4], &[7]).is_err());
        assert!(TestSetConfig::new(&[3, 5], &[9]).is_err());
        let c = TestSetConfig::new(&[5, 3, 3], &[7]).unwrap();
        assert_eq!(c.sprime().len(), c.bad_primes().len() + 1);
    }

    #[test]
    fn standard_set_is_effective() {
        let r = verify_effective_test_set(&TestSetConfig::standard()).unwrap();
        assert_eq!(r.nonzero_total, 7);
        assert!(r.effective, "{r:?}");
        assert_eq!(r.attained.len(), 7);
        assert_eq!(r.vectors.len(), 15);
    }

    #[test]
    fn coverage_with_two_is_reported() {
        let r = verify_effective_test_set(&TestSetConfig::standard_with_two()).unwrap();
        assert_eq!(r.nonzero_total, 15);
        assert_eq!(r.attained.len() + r.missing.len(), 15);
    }

    #[test]
    fn small_sets_are_not_effective() {
        let one = verify_effective_test_set(&TestSetConfig::new(&[3, 5], &[7]).unwrap()).unwrap();
        assert!(!one.effective && one.attained.len() <= 1);
        let none = verify_effective_test_set(&TestSetConfig::new(&[3, 5], &[]).unwrap()).unwrap();
        assert!(!none.effective);
        assert_eq!(none.missing.len(), 7);
    }

    #[test]
    fn trace_table_matches_printed_values() {
        let rows = trace_table(&TestSetConfig::standard()).unwrap();
        let a1: Vec<i64> = rows.iter().map(|r| r.a1).collect();
        let a2: Vec<i64> = rows.iter().map(|r| r.a2).collect();
        assert_eq!(a1, EXPECTED);
        assert_eq!(a2, EXPECTED);
        assert!(rows.iter().all(|r| r.equal));
        let text = format_trace_table(&rows);
        assert!(text.lines().nth(2).unwrap().ends_with("154"));
    }

    #[test]
    fn traces_agree_beyond_the_test_set() {
        let primes: Vec<u64> = primes_up_to(300).into_iter().filter(|&p| p > 5 || p == 2).collect();
        let rows = trace_rows(&primes).unwrap();
        // 2 is never a test prime: the diagonal-form side has no q^2 term
        assert_eq!(rows[0], TraceRow { p: 2, a1: 0, a2: 1, equal: false });
        for r in &rows[1..] {
            assert!(r.equal, "{r:?}");
        }
    }

    #[test]
    fn parity() {
        let r = parity_checks(100).unwrap();
        assert!(r.pass && r.primes_checked == 22, "{r:?}");
        assert!(parity_checks(5).is_err());
    }
}

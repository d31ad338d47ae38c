//! Binary quadratic forms `a m^2 + b m k + c k^2`, representation numbers,
//! and the two coefficient streams compared by the trace table:
//!
//! * `A_p` of the weight 3 newform of level 15, from solutions of
//!   `x^2 + xy + 4y^2 = p` or `2x^2 + xy + 2y^2 = p`;
//! * `A_1(n)`, the `q^n` coefficient of `f_1 + f_2`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunctions::kronecker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryQuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQuadraticForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub const fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub const fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() < 0
    }

    pub(crate) fn require_positive_definite(&self) -> Result<()> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "form ({}, {}, {}) is not positive definite",
                self.a, self.b, self.c
            )))
        }
    }

    #[inline]
    pub const fn value(&self, m: i64, k: i64) -> i64 {
        self.a * m * m + self.b * m * k + self.c * k * k
    }

    #[inline]
    pub fn value_f64(&self, m: f64, k: f64) -> f64 {
        self.a as f64 * m * m + self.b as f64 * m * k + self.c as f64 * k * k
    }

    /// Search radius for `Q(m, k) = n`: both `|m|` and `|k|` are at most
    /// `ceil(2 sqrt(n max(a, c) / |D|)) + 1`.
    fn search_bound(&self, n: u64) -> i64 {
        let d = self.discriminant().unsigned_abs() as f64;
        let big = self.a.max(self.c) as f64;
        (2.0 * (n as f64 * big / d).sqrt()).ceil() as i64 + 1
    }

    /// All integer solutions of `Q(x, y) = n`, ordered by `|y|` then `|x|`
    /// (then by sign, negative first).
    pub fn representations(&self, n: u64) -> Result<Vec<(i64, i64)>> {
        self.require_positive_definite()?;
        let bound = self.search_bound(n);
        let target = n as i64;
        let mut sols = Vec::new();
        for ay in 0..=bound {
            for ax in 0..=bound {
                for y in signed(ay) {
                    for x in signed(ax) {
                        if self.value(x, y) == target {
                            sols.push((x, y));
                        }
                    }
                }
            }
        }
        Ok(sols)
    }
}

fn signed(v: i64) -> impl Iterator<Item = i64> {
    let both = if v == 0 { vec![0] } else { vec![-v, v] };
    both.into_iter()
}

/// The four forms appearing in the lattice decomposition.
pub mod forms {
    use super::BinaryQuadraticForm;

    pub const PRINCIPAL_15: BinaryQuadraticForm = BinaryQuadraticForm::new(1, 1, 4);
    pub const NONPRINCIPAL_15: BinaryQuadraticForm = BinaryQuadraticForm::new(2, 1, 2);
    pub const DIAG_1_15: BinaryQuadraticForm = BinaryQuadraticForm::new(1, 0, 15);
    pub const DIAG_3_5: BinaryQuadraticForm = BinaryQuadraticForm::new(3, 0, 5);

    pub const ALL: [BinaryQuadraticForm; 4] = [PRINCIPAL_15, NONPRINCIPAL_15, DIAG_1_15, DIAG_3_5];
}

/// Number of integer pairs with `Q(m, k) = n` (brute force over the
/// bounding box of the ellipse).
pub fn rep_count(form: &BinaryQuadraticForm, n: u64) -> Result<u64> {
    form.require_positive_definite()?;
    let bound = form.search_bound(n);
    let target = n as i64;
    let mut count = 0;
    for m in -bound..=bound {
        for k in -bound..=bound {
            if form.value(m, k) == target {
                count += 1;
            }
        }
    }
    Ok(count)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(max: u64) -> Vec<u64> {
    (2..=max).filter(|&p| is_prime(p)).collect()
}

/// `A_p` of the weight 3 level 15 newform by the residue-class recipes:
///
/// * `p = 1, 4 (mod 15)`: solve `x^2 + xy + 4y^2 = p`, `A_p = 2x^2 - 7y^2 + 2xy`;
/// * `p = 2, 8 (mod 15)`: solve `2x^2 + xy + 2y^2 = p`, `A_p = x^2 + 8xy + y^2`;
/// * `(-15 / p) = -1`: `A_p = 0`.
///
/// Every solution found is evaluated and they must all agree.
pub fn ap_closed_form(p: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if p == 3 || p == 5 {
        return Err(Error::domain(format!("{p} divides the level 15")));
    }
    let (form, recipe): (BinaryQuadraticForm, fn(i64, i64) -> i64) = match p % 15 {
        1 | 4 => (forms::PRINCIPAL_15, |x, y| 2 * x * x - 7 * y * y + 2 * x * y),
        2 | 8 => (forms::NONPRINCIPAL_15, |x, y| x * x + 8 * x * y + y * y),
        _ => {
            debug_assert_eq!(kronecker(-15, p as i64), -1);
            return Ok(0);
        }
    };
    let sols = form.representations(p)?;
    let Some(&(x0, y0)) = sols.first() else {
        return Err(Error::InternalConsistency(format!(
            "no solution of {}x^2 + {}xy + {}y^2 = {p}",
            form.a, form.b, form.c
        )));
    };
    let value = recipe(x0, y0);
    if let Some(&(x, y)) = sols.iter().find(|&&(x, y)| recipe(x, y) != value) {
        return Err(Error::InternalConsistency(format!(
            "A_{p} is not well defined: ({x0},{y0}) gives {value}, ({x},{y}) gives {}",
            recipe(x, y)
        )));
    }
    Ok(value)
}

/// All values of the `A_p` recipe over every solution, for the
/// well-definedness check. Empty when the class has no recipe.
pub fn ap_all_solutions(p: u64) -> Result<Vec<i64>> {
    let (form, recipe): (BinaryQuadraticForm, fn(i64, i64) -> i64) = match p % 15 {
        1 | 4 => (forms::PRINCIPAL_15, |x, y| 2 * x * x - 7 * y * y + 2 * x * y),
        2 | 8 => (forms::NONPRINCIPAL_15, |x, y| x * x + 8 * x * y + y * y),
        _ => return Ok(Vec::new()),
    };
    Ok(form.representations(p)?.into_iter().map(|(x, y)| recipe(x, y)).collect())
}

/// `A_1(n)`: the `q^n` coefficient of `f_1 + f_2`,
/// `(1/2) [ sum_{3r^2+5k^2=n} (5k^2 - 3r^2) + sum_{r^2+15k^2=n} (r^2 - 15k^2) ]`.
pub fn coeff_a1(n: u64) -> Result<Rational64> {
    if n == 0 {
        return Err(Error::domain("A_1(n) is defined for n >= 1"));
    }
    let mut twice: i64 = 0;
    for (r, k) in forms::DIAG_3_5.representations(n)? {
        twice += 5 * k * k - 3 * r * r;
    }
    for (r, k) in forms::DIAG_1_15.representations(n)? {
        twice += r * r - 15 * k * k;
    }
    Ok(Rational64::new(twice, 2))
}

/// `coeff_a1` for callers that need an integer; errors if the value is not
/// integral.
pub fn coeff_a1_int(n: u64) -> Result<i64> {
    let v = coeff_a1(n)?;
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::InternalConsistency(format!("A_1({n}) = {v} is not an integer")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries;
    use forms::*;

    #[test]
    fn rep_count_examples() {
        assert_eq!(rep_count(&DIAG_1_15, 1).unwrap(), 2);
        assert_eq!(rep_count(&PRINCIPAL_15, 4).unwrap(), 6);
        assert_eq!(rep_count(&NONPRINCIPAL_15, 23).unwrap(), 4);
        assert_eq!(rep_count(&PRINCIPAL_15, 0).unwrap(), 1);
        assert!(NONPRINCIPAL_15.representations(23).unwrap().contains(&(1, 3)));
    }

    #[test]
    fn indefinite_rejected() {
        assert!(rep_count(&BinaryQuadraticForm::new(1, 0, -2), 7).is_err());
        assert!(rep_count(&BinaryQuadraticForm::new(-1, 0, -2), 7).is_err());
    }

    #[test]
    fn representations_ordered_by_abs_y() {
        let sols = PRINCIPAL_15.representations(31).unwrap();
        assert!(sols.contains(&(3, 2)));
        let ys: Vec<i64> = sols.iter().map(|s| s.1.abs()).collect();
        assert!(ys.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ap_examples() {
        assert_eq!(ap_closed_form(31).unwrap(), 2);
        assert_eq!(ap_closed_form(17).unwrap(), -14);
        assert_eq!(ap_closed_form(7).unwrap(), 0);
        assert_eq!(NONPRINCIPAL_15.value(1, -3), 17);
    }

    #[test]
    fn ap_domain_errors() {
        assert!(matches!(ap_closed_form(3), Err(Error::Domain(_))));
        assert!(matches!(ap_closed_form(5), Err(Error::Domain(_))));
        assert!(matches!(ap_closed_form(9), Err(Error::Domain(_))));
    }

    #[test]
    fn ap_well_defined_below_500() {
        for p in primes_up_to(500) {
            if p == 3 || p == 5 {
                continue;
            }
            let vals = ap_all_solutions(p).unwrap();
            if let Some(first) = vals.first() {
                assert!(vals.iter().all(|v| v == first), "p = {p}: {vals:?}");
            } else {
                assert_eq!(kronecker(-15, p as i64), -1, "p = {p} has no solutions");
            }
        }
    }

    #[test]
    fn a1_examples() {
        assert_eq!(coeff_a1_int(17).unwrap(), -14);
        assert_eq!(coeff_a1_int(83).unwrap(), 154);
        assert_eq!(coeff_a1_int(7).unwrap(), 0);
        assert!(coeff_a1(0).is_err());
    }

    #[test]
    fn a1_matches_bracket_expansion() {
        let n = 120;
        let f1 = qseries::f1_qexp(n).series;
        let f2 = qseries::f2_qexp(n).series;
        let sum = f1.add(&f2).unwrap();
        for m in 1..n as u64 {
            let a1 = coeff_a1(m).unwrap();
            let expected = sum.coeff_q(m as i64).unwrap();
            assert_eq!(
                num_rational::BigRational::new((*a1.numer()).into(), (*a1.denom()).into()),
                expected,
                "n = {m}"
            );
        }
    }

    #[test]
    fn a1_even_at_primes() {
        for p in primes_up_to(1000) {
            if p <= 5 {
                continue;
            }
            assert_eq!(coeff_a1_int(p).unwrap() % 2, 0, "p = {p}");
        }
    }

    #[test]
    fn rep_count_matches_theta_series() {
        for form in ALL {
            let theta = qseries::theta_bqf(&form, 200).unwrap();
            for n in 0..200u64 {
                assert_eq!(
                    Some(rep_count(&form, n).unwrap() as i64),
                    theta.coeff_q_i64(n as i64),
                    "form {form:?}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn primality() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(1));
        assert!(!is_prime(91));
    }
}

//! Sparse Laurent polynomials in `n` variables with exact rational
//! coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by dense exponent vectors, so
//! iteration is lexicographic and printing is canonical. Zero coefficients
//! are never stored.
//!
//! Text format (parsed by [`LaurentPolynomial::from_str`] and emitted by
//! `Display`): a signed sum of monomials such as `3/2*X^2*Y^-1 - Z + 3`.
//! Variables are `X, Y, Z, W` for the first four coordinates, or `x0, x1, ...`
//! for any coordinate.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const NAMED_VARS: [char; 4] = ['X', 'Y', 'Z', 'W'];

pub type Exponent = Vec<i32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    dimension: usize,
    terms: BTreeMap<Exponent, Rational64>,
}

/// The one-variable Laurent polynomial left after substituting values for
/// all but one variable: `sum_k coeffs[k] * z^(lowest_exponent + k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSlice {
    pub lowest_exponent: i32,
    pub coeffs: Vec<Complex64>,
}

impl UnivariateSlice {
    pub fn highest_exponent(&self) -> i32 {
        self.lowest_exponent + self.coeffs.len() as i32 - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner on the polynomial part, then the monomial shift.
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lowest_exponent)
    }
}

impl LaurentPolynomial {
    /// The zero polynomial in `dimension` variables.
    pub fn zero(dimension: usize) -> Self {
        assert!(dimension > 0, "Laurent polynomials need at least one variable");
        Self { dimension, terms: BTreeMap::new() }
    }

    pub fn constant(dimension: usize, c: Rational64) -> Self {
        Self::monomial(vec![0; dimension], c)
    }

    pub fn monomial(exponent: Exponent, c: Rational64) -> Self {
        let mut p = Self::zero(exponent.len());
        if !c.is_zero() {
            p.terms.insert(exponent, c);
        }
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging
    /// repeated exponents and dropping zero coefficients.
    pub fn from_terms<I>(dimension: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational64)>,
    {
        let mut p = Self::zero(dimension);
        for (e, c) in terms {
            if e.len() != dimension {
                return Err(Error::domain(format!(
                    "exponent vector of length {} in a {dimension}-variable polynomial",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: Rational64) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &[i32]) -> Rational64 {
        self.terms.get(exponent).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn constant_term(&self) -> Rational64 {
        self.coeff(&vec![0; self.dimension])
    }

    /// Smallest and largest exponent of variable `var` over all terms, or
    /// `None` for the zero polynomial.
    pub fn exponent_range(&self, var: usize) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|e| e[var]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }

    pub fn scale(&self, c: Rational64) -> Self {
        if c.is_zero() {
            return Self::zero(self.dimension);
        }
        Self {
            dimension: self.dimension,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// The polynomial `P(1/x_1, ..., 1/x_n)`.
    pub fn inverted(&self) -> Self {
        Self {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.iter().map(|x| -x).collect(), *v))
                .collect(),
        }
    }

    fn check_point(&self, point: &[Complex64]) -> Result<()> {
        if point.len() != self.dimension {
            return Err(Error::domain(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.dimension
            )));
        }
        if point.iter().any(|z| z.re == 0.0 && z.im == 0.0) {
            return Err(Error::domain("zero coordinate: negative powers are undefined"));
        }
        Ok(())
    }

    /// Evaluates the polynomial at a point with nonzero coordinates.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        self.check_point(point)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = Complex64::new(rational_to_f64(c), 0.0);
            for (z, &k) in point.iter().zip(e) {
                if k != 0 {
                    m *= z.powi(k);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Substitutes `fixed` for every variable except `which` and collects the
    /// remaining one-variable Laurent polynomial.
    ///
    /// `fixed` lists the values of the other variables in their original
    /// order. The exponent range of the slice is the exact range of `which`
    /// in `self`, even if some substituted coefficient happens to vanish.
    pub fn slice_univariate(&self, fixed: &[Complex64], which: usize) -> Result<UnivariateSlice> {
        if which >= self.dimension {
            return Err(Error::domain(format!(
                "variable index {which} out of range for {} variables",
                self.dimension
            )));
        }
        if fixed.len() + 1 != self.dimension {
            return Err(Error::domain(format!(
                "expected {} fixed values, got {}",
                self.dimension - 1,
                fixed.len()
            )));
        }
        if fixed.iter().any(|z| z.re == 0.0 && z.im == 0.0) {
            return Err(Error::domain("zero coordinate: negative powers are undefined"));
        }
        let Some((lo, hi)) = self.exponent_range(which) else {
            return Ok(UnivariateSlice { lowest_exponent: 0, coeffs: vec![] });
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            let mut m = Complex64::new(rational_to_f64(c), 0.0);
            let mut slot = 0;
            for (var, &k) in e.iter().enumerate() {
                if var == which {
                    continue;
                }
                if k != 0 {
                    m *= fixed[slot].powi(k);
                }
                slot += 1;
            }
            coeffs[(e[which] - lo) as usize] += m;
        }
        Ok(UnivariateSlice { lowest_exponent: lo, coeffs })
    }

    /// Parses with an explicit dimension (variables beyond those named in
    /// the text are allowed).
    pub fn parse_with_dimension(text: &str, dimension: usize) -> Result<Self> {
        let parsed = Parser::new(text).parse()?;
        let needed = parsed.iter().flat_map(|(e, _)| e.keys().copied()).max().map_or(1, |m| m + 1);
        if needed > dimension {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("uses {needed} variables but dimension is {dimension}"),
            });
        }
        Self::from_sparse(parsed, dimension)
    }

    fn from_sparse(parsed: Vec<(BTreeMap<usize, i32>, Rational64)>, dimension: usize) -> Result<Self> {
        Self::from_terms(
            dimension,
            parsed.into_iter().map(|(sparse, c)| {
                let mut e = vec![0; dimension];
                for (var, k) in sparse {
                    e[var] += k;
                }
                (e, c)
            }),
        )
    }
}

/// `Q_k = X + 1/X + Y + 1/Y + Z + 1/Z + XY + 1/(XY) + ZY + 1/(ZY) + XYZ + 1/(XYZ) - k`.
pub fn build_qk(k: Rational64) -> LaurentPolynomial {
    let one = Rational64::one();
    let monomials: [[i32; 3]; 6] =
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 1, 1]];
    let mut terms: Vec<(Exponent, Rational64)> = Vec::with_capacity(13);
    for m in monomials {
        terms.push((m.to_vec(), one));
        terms.push((m.iter().map(|x| -x).collect(), one));
    }
    terms.push((vec![0, 0, 0], -k));
    LaurentPolynomial::from_terms(3, terms).expect("fixed 3-variable exponents")
}

/// `P_0 = X + 1/X + Y + 1/Y + Z + 1/Z`.
pub fn build_p0() -> LaurentPolynomial {
    let one = Rational64::one();
    let mut terms = Vec::with_capacity(6);
    for var in 0..3 {
        for sign in [1, -1] {
            let mut e = vec![0; 3];
            e[var] = sign;
            terms.push((e, one));
        }
    }
    LaurentPolynomial::from_terms(3, terms).expect("fixed 3-variable exponents")
}

pub(crate) fn rational_to_f64(c: &Rational64) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn var_name(dimension: usize, var: usize) -> String {
    if dimension <= NAMED_VARS.len() {
        NAMED_VARS[var].to_string()
    } else {
        format!("x{var}")
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&k| k == 0);
            if !mag.is_one() || is_const {
                factors.push(mag.to_string());
            }
            for (var, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(var_name(self.dimension, var)),
                    _ => factors.push(format!("{}^{}", var_name(self.dimension, var), k)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl FromStr for LaurentPolynomial {
    type Err = Error;

    /// Parses the text format; the dimension is the highest variable index
    /// used plus one.
    fn from_str(s: &str) -> Result<Self> {
        let parsed = Parser::new(s).parse()?;
        let dimension =
            parsed.iter().flat_map(|(e, _)| e.keys().copied()).max().map_or(1, |m| m + 1);
        Self::from_sparse(parsed, dimension)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type SparseTerm = (BTreeMap<usize, i32>, Rational64);

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { src: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Vec<SparseTerm>> {
        let mut terms = Vec::new();
        let mut sign = Rational64::one();
        match self.peek() {
            Some(b'-') => {
                sign = -sign;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return self.err("empty polynomial"),
            _ => {}
        }
        loop {
            let (e, c) = self.term()?;
            terms.push((e, c * sign));
            match self.peek() {
                None => break,
                Some(b'+') => sign = Rational64::one(),
                Some(b'-') => sign = -Rational64::one(),
                Some(ch) => return self.err(format!("unexpected character '{}'", ch as char)),
            }
            self.pos += 1;
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<SparseTerm> {
        let mut exps = BTreeMap::new();
        let mut coeff = Rational64::one();
        loop {
            match self.peek() {
                Some(ch) if ch.is_ascii_digit() => coeff *= self.rational()?,
                Some(_) => {
                    let var = self.variable()?;
                    let k = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        1
                    };
                    *exps.entry(var).or_insert(0) += k;
                }
                None => return self.err("expected a factor"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        exps.retain(|_, k| *k != 0);
        Ok((exps, coeff))
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<i64>().or_else(|_| self.err("integer out of range"))
    }

    fn rational(&mut self) -> Result<Rational64> {
        let num = self.integer()?;
        self.skip_ws();
        // `3/2` is a coefficient, but `/` is never a division of monomials.
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let den = self.integer()?;
            if den == 0 {
                return self.err("zero denominator");
            }
            return Ok(Rational64::new(num, den));
        }
        Ok(Rational64::from_integer(num))
    }

    fn exponent(&mut self) -> Result<i32> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let k = self.integer()?;
        if paren {
            if self.peek() != Some(b')') {
                return self.err("expected ')'");
            }
            self.pos += 1;
        }
        let k = i32::try_from(k).or_else(|_| self.err("exponent out of range"))?;
        Ok(if negative { -k } else { k })
    }

    fn variable(&mut self) -> Result<usize> {
        let ch = self.peek().expect("caller checked");
        self.pos += 1;
        if let Some(i) = NAMED_VARS.iter().position(|&v| v as u8 == ch) {
            return Ok(i);
        }
        if ch == b'x' {
            let idx = self.integer()?;
            return usize::try_from(idx).or_else(|_| self.err("bad variable index"));
        }
        self.pos -= 1;
        self.err(format!("unknown variable '{}'", ch as char))
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        assert_eq!(self.dimension, rhs.dimension, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn neg(self) -> LaurentPolynomial {
        self.scale(-Rational64::one())
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        assert_eq!(self.dimension, rhs.dimension, "dimension mismatch");
        let mut out = LaurentPolynomial::zero(self.dimension);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, theta)
    }

    #[test]
    fn q_minus3_has_thirteen_terms() {
        let q = build_qk(Rational64::from_integer(-3));
        assert_eq!(q.len(), 13);
        assert_eq!(q.constant_term(), Rational64::from_integer(3));
    }

    #[test]
    fn q0_drops_constant() {
        let q = build_qk(Rational64::zero());
        assert_eq!(q.len(), 12);
        assert!(q.constant_term().is_zero());
    }

    #[test]
    fn q_minus3_at_ones() {
        let q = build_qk(Rational64::from_integer(-3));
        let v = q.eval(&[c(1.0, 0.0); 3]).unwrap();
        assert_eq!(v, c(15.0, 0.0));
    }

    #[test]
    fn p0_values() {
        let p = build_p0();
        assert_eq!(p.eval(&[c(1.0, 0.0); 3]).unwrap(), c(6.0, 0.0));
        assert_eq!(p.eval(&[c(-1.0, 0.0); 3]).unwrap(), c(-6.0, 0.0));
        let v = p.eval(&[c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((v - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn x_plus_inverse_on_circle() {
        let p: LaurentPolynomial = "X + X^-1".parse().unwrap();
        for k in 0..16 {
            let t = 2.0 * PI * k as f64 / 16.0 + 0.1;
            let v = p.eval(&[unit(t)]).unwrap();
            assert!((v - c(2.0 * t.cos(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn xyz_at_i() {
        let p: LaurentPolynomial = "X*Y*Z".parse().unwrap();
        let i = c(0.0, 1.0);
        assert!((p.eval(&[i, i, i]).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_coordinate_is_domain_error() {
        let p = build_p0();
        let err = p.eval(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(matches!(p.eval(&[c(1.0, 0.0); 2]), Err(Error::Domain(_))));
    }

    #[test]
    fn slice_q_minus3_in_z() {
        let q = build_qk(Rational64::from_integer(-3));
        let s = q.slice_univariate(&[c(1.0, 0.0), c(1.0, 0.0)], 2).unwrap();
        assert_eq!(s.lowest_exponent, -1);
        assert_eq!(s.coeffs, vec![c(3.0, 0.0), c(9.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn slice_p0_in_z() {
        let p = build_p0();
        let (x, y) = (unit(0.3), unit(-1.1));
        let s = p.slice_univariate(&[x, y], 2).unwrap();
        assert_eq!(s.lowest_exponent, -1);
        let mid = x + x.inv() + y + y.inv();
        assert!((s.coeffs[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.coeffs[1] - mid).norm() < 1e-15);
        assert!((s.coeffs[2] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn slice_single_variable() {
        let p: LaurentPolynomial = "X".parse().unwrap();
        let s = p.slice_univariate(&[], 0).unwrap();
        assert_eq!(s.lowest_exponent, 1);
        assert_eq!(s.coeffs, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn qk_inversion_symmetric() {
        for k in [-3, 0, 5] {
            let q = build_qk(Rational64::from_integer(k));
            assert_eq!(q.inverted(), q);
        }
    }

    #[test]
    fn parse_and_print_roundtrip() {
        let q = build_qk(Rational64::from_integer(-3));
        let text = q.to_string();
        let back: LaurentPolynomial = text.parse().unwrap();
        assert_eq!(back, q);
        let p: LaurentPolynomial = "-3/2*X^2*Y^(-1) + 2 - x2".parse().unwrap();
        assert_eq!(p.dimension(), 3);
        assert_eq!(p.coeff(&[2, -1, 0]), Rational64::new(-3, 2));
        assert_eq!(p.coeff(&[0, 0, 1]), Rational64::from_integer(-1));
        assert_eq!(p.to_string(), "2 - Z - 3/2*X^2*Y^-1");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("".parse::<LaurentPolynomial>(), Err(Error::Parse { .. })));
        assert!(matches!("X + Q".parse::<LaurentPolynomial>(), Err(Error::Parse { .. })));
        assert!(matches!("X^".parse::<LaurentPolynomial>(), Err(Error::Parse { .. })));
        assert!(matches!("1/0".parse::<LaurentPolynomial>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn cancellation_removes_terms() {
        let p: LaurentPolynomial = "X + Y - X".parse().unwrap();
        assert_eq!(p.len(), 1);
        let z = &p - &p;
        assert!(z.is_zero());
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPolynomial> {
        prop::collection::vec(
            (prop::collection::vec(-3i32..=3, 3), -5i64..=5),
            0..6,
        )
        .prop_map(|ts| {
            LaurentPolynomial::from_terms(
                3,
                ts.into_iter().map(|(e, c)| (e, Rational64::from_integer(c))),
            )
            .unwrap()
        })
    }

    fn arb_torus() -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec(0.0..(2.0 * PI), 3)
            .prop_map(|ts| ts.into_iter().map(unit).collect())
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c3 in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c3, &a + &(&b + &c3));
            prop_assert_eq!(&(&a * &b) * &c3, &a * &(&b * &c3));
            prop_assert!((&a * &b).terms().all(|(_, v)| !v.is_zero()));
        }

        #[test]
        fn eval_is_multiplicative(a in arb_poly(), b in arb_poly(), x in arb_torus()) {
            let lhs = (&a * &b).eval(&x).unwrap();
            let rhs = a.eval(&x).unwrap() * b.eval(&x).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + rhs.norm()));
        }

        #[test]
        fn slice_agrees_with_eval(a in arb_poly(), x in arb_torus(), which in 0usize..3) {
            let fixed: Vec<Complex64> = x.iter().enumerate()
                .filter(|(i, _)| *i != which).map(|(_, z)| *z).collect();
            let s = a.slice_univariate(&fixed, which).unwrap();
            let direct = a.eval(&x).unwrap();
            let via = if s.coeffs.is_empty() { Complex64::new(0.0, 0.0) } else { s.eval(x[which]) };
            prop_assert!((direct - via).norm() <= 1e-12 * (1.0 + direct.norm()));
        }

        #[test]
        fn display_parse_roundtrip(a in arb_poly()) {
            let back = LaurentPolynomial::parse_with_dimension(&a.to_string(), 3).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}

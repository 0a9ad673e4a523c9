//! Integer Laurent polynomials in the variable `q`.
//!
//! `LaurentPoly` is the carrier of every graded multiplicity in this crate.
//! Values are kept in canonical form (no zero coefficients stored), and the
//! textual form produced by `Display` is the bit-exact interchange format
//! used by the CLI: terms in ascending exponent order, exponent 1 printed
//! `q`, exponent 0 omitting `q`, other exponents printed `q^k`, unit
//! coefficients elided, terms joined with `+`/`-`.  Examples: `1+q^2`,
//! `q^-1-q`, `3`, `-2q^3`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// An element of `Z[q, q^-1]` with arbitrary-precision integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentPoly {
    /// exponent -> nonzero coefficient, ascending exponent order.
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, 1)
    }

    /// The variable `q`.
    pub fn q() -> Self {
        LaurentPoly::monomial(1, 1)
    }

    /// `q^-1`.
    pub fn q_inv() -> Self {
        LaurentPoly::monomial(-1, 1)
    }

    /// `c * q^k`.
    pub fn monomial(exponent: i64, coefficient: impl Into<BigInt>) -> Self {
        let c: BigInt = coefficient.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        LaurentPoly { terms }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        LaurentPoly::monomial(0, c)
    }

    pub fn from_terms<I, C>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero();
        for (k, c) in iter {
            p.add_term(k, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    /// Coefficient of `q^k` (zero when absent).
    pub fn coeff(&self, k: i64) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, exponent: i64, coefficient: BigInt) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert_with(BigInt::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    /// Multiply by `c * q^k`.
    pub fn scale_shift(&self, coefficient: &BigInt, exponent: i64) -> Self {
        if coefficient.is_zero() {
            return LaurentPoly::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k + exponent, c * coefficient))
            .collect();
        LaurentPoly { terms }
    }

    /// The bar involution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        let terms = self.terms.iter().map(|(&k, c)| (-k, c.clone())).collect();
        LaurentPoly { terms }
    }

    /// The Koszul sign twist `q -> -q^-1`.
    pub fn koszul_twist(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (-k, if k % 2 != 0 { -c } else { c.clone() }))
            .collect();
        LaurentPoly { terms }
    }

    /// Specialization at `q = 1`, i.e. the sum of all coefficients.
    pub fn eval_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Substitution `q -> -q` (used by the Lemma A.4 (f) check).
    pub fn subst_neg_q(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k, if k % 2 != 0 { -c } else { c.clone() }))
            .collect();
        LaurentPoly { terms }
    }

    /// True when the polynomial lies in `q Z[q]` (only exponents >= 1).
    pub fn in_q_zq(&self) -> bool {
        self.min_exponent().map_or(true, |m| m >= 1)
    }

    /// True when the polynomial lies in `N[q]` (exponents >= 0, coefficients >= 0).
    pub fn in_nq(&self) -> bool {
        self.min_exponent().map_or(true, |m| m >= 0) && !self.has_negative_coeff()
    }

    /// True when the polynomial lies in `q N[q]`.
    pub fn in_q_nq(&self) -> bool {
        self.in_q_zq() && !self.has_negative_coeff()
    }

    pub fn has_negative_coeff(&self) -> bool {
        self.terms.values().any(|c| c.is_negative())
    }

    /// True when `bar(p) == p`.
    pub fn is_bar_symmetric(&self) -> bool {
        self.terms.iter().all(|(&k, c)| self.coeff(-k) == *c)
    }

    /// The unique bar-symmetric polynomial congruent to `self` modulo `q Z[q]`.
    ///
    /// Returns `c_0 + sum_{k>0} c_{-k} (q^k + q^-k)` built from the
    /// coefficients of `self` at exponents <= 0.  Subtracting it from a
    /// bar-symmetric polynomial leaves an element of `q Z[q]`; this is the
    /// elementary step of canonicalization against a Kazhdan-Lusztig-type
    /// basis.
    pub fn bar_symmetric_part(&self) -> Self {
        let mut out = LaurentPoly::zero();
        for (&k, c) in self.terms.range(..=0) {
            out.add_term(k, c.clone());
            if k < 0 {
                out.add_term(-k, c.clone());
            }
        }
        out
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&k, c) in &rhs.terms {
            self.add_term(k, c.clone());
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (&k, c) in &rhs.terms {
            self.add_term(k, -c.clone());
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let terms = self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect();
        LaurentPoly { terms }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&k1, c1) in &self.terms {
            for (&k2, c2) in &rhs.terms {
                out.add_term(k1 + k2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let mag = c.abs();
            if k == 0 {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}", mag)?;
                }
                if k == 1 {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let err = |detail: &str| Error::Parse {
            what: format!("polynomial '{}'", s),
            detail: detail.to_string(),
        };
        let s = s.trim();
        if s.is_empty() {
            return Err(err("empty string"));
        }
        if s == "0" {
            return Ok(LaurentPoly::zero());
        }
        let mut out = LaurentPoly::zero();
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        while pos < bytes.len() {
            // sign
            let mut neg = false;
            if bytes[pos] == b'+' {
                pos += 1;
            } else if bytes[pos] == b'-' {
                neg = true;
                pos += 1;
            }
            if pos >= bytes.len() {
                return Err(err("dangling sign"));
            }
            // coefficient digits
            let dstart = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let mut coeff = if pos > dstart {
                BigInt::from_str(&s[dstart..pos]).map_err(|_| err("bad coefficient"))?
            } else {
                BigInt::one()
            };
            if neg {
                coeff = -coeff;
            }
            // optional q part
            let mut exp: i64 = 0;
            if pos < bytes.len() && bytes[pos] == b'q' {
                pos += 1;
                exp = 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let estart = pos;
                    if pos < bytes.len() && bytes[pos] == b'-' {
                        pos += 1;
                    }
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == estart || &s[estart..pos] == "-" {
                        return Err(err("bad exponent"));
                    }
                    exp = s[estart..pos].parse().map_err(|_| err("bad exponent"))?;
                }
            } else if pos == dstart {
                return Err(err("expected coefficient or q"));
            }
            out.add_term(exp, coeff);
        }
        Ok(out)
    }
}

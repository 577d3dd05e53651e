use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::phase::Phase;
use super::rational::{to_f64, Rational};
use super::{ScalarError, ZERO_CERTIFICATE};

/// A finite sum `Σ c_r e^{iπ r}` with rational coefficients.
///
/// Keys are phase exponents in `[0, 2)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<Rational, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar::term(Phase::one(), c)
    }

    pub fn from_phase(p: Phase) -> Self {
        Scalar::term(p, Rational::one())
    }

    /// `c · p`.
    pub fn term(p: Phase, c: Rational) -> Self {
        let mut s = Scalar::zero();
        s.push(p.exponent().clone(), c);
        s
    }

    fn push(&mut self, exponent: Rational, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
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

    pub fn terms(&self) -> impl Iterator<Item = (Phase, &Rational)> {
        self.terms.iter().map(|(e, c)| (Phase::new(e.clone()), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no terms are stored. Use [`Scalar::is_zero`] for the
    /// value-level test.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul_phase(&self, p: &Phase) -> Self {
        let mut out = Scalar::zero();
        for (e, c) in &self.terms {
            out.push(Phase::new(e + p.exponent()).exponent().clone(), c.clone());
        }
        out
    }

    /// Folds every exponent into `[0, 1)` using `e^{iπ(r+1)} = -e^{iπ r}`.
    pub fn normalized(&self) -> Self {
        let mut out = Scalar::zero();
        for (e, c) in &self.terms {
            if *e >= Rational::one() {
                out.push(e - Rational::one(), -c.clone());
            } else {
                out.push(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn to_complex(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| Phase::new(e.clone()).to_complex() * to_f64(c))
            .sum()
    }

    /// Decides whether the value is zero.
    ///
    /// After the symbolic merge, a remaining sum whose numeric magnitude is
    /// below [`ZERO_CERTIFICATE`] is a genuine cyclotomic cancellation the
    /// merge cannot see; that case is reported rather than guessed.
    pub fn is_zero(&self) -> Result<bool, ScalarError> {
        let n = self.normalized();
        if n.terms.is_empty() {
            return Ok(true);
        }
        let magnitude = n.to_complex().norm();
        if magnitude < ZERO_CERTIFICATE {
            return Err(ScalarError::InconclusiveCancellation {
                terms: n.terms.len(),
                magnitude,
            });
        }
        Ok(false)
    }

    /// `Some(p)` when the value is exactly a single unit phase.
    pub fn as_phase(&self) -> Option<Phase> {
        let n = self.normalized();
        if n.terms.len() != 1 {
            return None;
        }
        let (e, c) = n.terms.iter().next()?;
        if c.is_one() {
            Some(Phase::new(e.clone()))
        } else if *c == -Rational::one() {
            Some(Phase::new(e + Rational::one()))
        } else {
            None
        }
    }

    /// Exact quotient when both sides are rational multiples of one phase.
    pub fn ratio(&self, other: &Scalar) -> Option<(Phase, Rational)> {
        let a = self.normalized();
        let b = other.normalized();
        if a.terms.len() != 1 || b.terms.len() != 1 {
            return None;
        }
        let (ea, ca) = a.terms.iter().next()?;
        let (eb, cb) = b.terms.iter().next()?;
        Some((Phase::new(ea - eb), ca / cb))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.push(e.clone(), c.clone());
        }
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(&-Rational::one())
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.push(Phase::new(ea + eb).exponent().clone(), ca * cb);
            }
        }
        out
    }
}

impl From<Phase> for Scalar {
    fn from(p: Phase) -> Self {
        Scalar::from_phase(p)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                if e.is_zero() {
                    format!("{c}")
                } else {
                    format!("{c}·e^(iπ·{e})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

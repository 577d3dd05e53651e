use std::fmt;
use std::ops::{Div, Mul, MulAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, parse_rational, rem_euclid, to_f64, Rational};

/// The root of unity `e^{iπ·exponent}`, exponent kept in `[0, 2)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase {
    exponent: Rational,
}

fn two() -> Rational {
    Rational::from_integer(2.into())
}

impl Phase {
    pub fn new(exponent: Rational) -> Self {
        Phase {
            exponent: rem_euclid(&exponent, &two()),
        }
    }

    pub fn one() -> Self {
        Phase {
            exponent: Rational::zero(),
        }
    }

    pub fn minus_one() -> Self {
        Phase {
            exponent: Rational::one(),
        }
    }

    /// `(-1)^n`.
    pub fn sign(odd: bool) -> Self {
        if odd {
            Phase::minus_one()
        } else {
            Phase::one()
        }
    }

    /// `e^{2πi x}`.
    pub fn turns(x: &Rational) -> Self {
        Phase::new(x * two())
    }

    pub fn exponent(&self) -> &Rational {
        &self.exponent
    }

    pub fn is_one(&self) -> bool {
        self.exponent.is_zero()
    }

    pub fn inv(&self) -> Self {
        Phase::new(-self.exponent.clone())
    }

    pub fn pow(&self, k: i64) -> Self {
        Phase::new(&self.exponent * Rational::from_integer(k.into()))
    }

    pub fn to_complex(&self) -> Complex64 {
        // Exact values on the real and imaginary axes avoid 1e-16 residue.
        let e = &self.exponent;
        let half = Rational::new(1.into(), 2.into());
        if e.is_zero() {
            Complex64::new(1.0, 0.0)
        } else if e.is_one() {
            Complex64::new(-1.0, 0.0)
        } else if *e == half {
            Complex64::new(0.0, 1.0)
        } else if *e == Rational::new(3.into(), 2.into()) {
            Complex64::new(0.0, -1.0)
        } else {
            let angle = std::f64::consts::PI * to_f64(e);
            Complex64::new(angle.cos(), angle.sin())
        }
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::one()
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::new(self.exponent + rhs.exponent)
    }
}

impl<'a> Mul<&'a Phase> for &'a Phase {
    type Output = Phase;
    fn mul(self, rhs: &Phase) -> Phase {
        Phase::new(&self.exponent + &rhs.exponent)
    }
}

impl Mul<&Phase> for Phase {
    type Output = Phase;
    fn mul(self, rhs: &Phase) -> Phase {
        Phase::new(self.exponent + &rhs.exponent)
    }
}

impl Mul<Phase> for &Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::new(&self.exponent + rhs.exponent)
    }
}

impl Div<&Phase> for Phase {
    type Output = Phase;
    fn div(self, rhs: &Phase) -> Phase {
        Phase::new(self.exponent - &rhs.exponent)
    }
}

impl MulAssign for Phase {
    fn mul_assign(&mut self, rhs: Phase) {
        *self = Phase::new(&self.exponent + rhs.exponent);
    }
}

impl Div for Phase {
    type Output = Phase;
    fn div(self, rhs: Phase) -> Phase {
        Phase::new(self.exponent - rhs.exponent)
    }
}

impl<'a> Div<&'a Phase> for &'a Phase {
    type Output = Phase;
    fn div(self, rhs: &Phase) -> Phase {
        Phase::new(&self.exponent - &rhs.exponent)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({})", self.exponent)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^(iπ·{})", self.exponent)
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Phase", 1)?;
        st.serialize_field("exp", &format_rational(&self.exponent))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            exp: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let r = parse_rational(&raw.exp).map_err(serde::de::Error::custom)?;
        Ok(Phase::new(r))
    }
}

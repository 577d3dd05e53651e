use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::rational::{format_rational, lcm_u64, Rational};
use super::ScalarError;

/// Truncated series `Σ_k c_k q^{offset + k/den} + O(q^order)`.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    offset: Rational,
    den: u64,
    order: Rational,
    coeffs: BTreeMap<i64, Rational>,
}

fn ratio_of(n: i64, d: u64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl QSeries {
    /// The zero series on the lattice `offset + (1/den)ℤ`, known up to `order`.
    pub fn zero(offset: Rational, den: u64, order: Rational) -> Self {
        assert!(den > 0, "step denominator must be positive");
        QSeries {
            offset,
            den,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(order: Rational) -> Self {
        let mut s = QSeries::zero(Rational::zero(), 1, order);
        s.add_at(0, Rational::one());
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs.
    ///
    /// Every exponent must lie on `offset + (1/den)ℤ`; terms at or above
    /// `order` are dropped.
    pub fn from_terms<I>(
        offset: Rational,
        den: u64,
        order: Rational,
        terms: I,
    ) -> Result<Self, ScalarError>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut s = QSeries::zero(offset, den, order);
        for (e, c) in terms {
            let k = s.step_of(&e).ok_or_else(|| ScalarError::OffsetMismatch {
                left: format_rational(&s.offset),
                right: format_rational(&e),
            })?;
            if e < s.order {
                s.add_at(k, c);
            }
        }
        Ok(s)
    }

    fn step_of(&self, exponent: &Rational) -> Option<i64> {
        let k = (exponent - &self.offset) * Rational::from_integer(self.den.into());
        if k.is_integer() {
            k.to_integer().to_i64()
        } else {
            None
        }
    }

    fn add_at(&mut self, k: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(k) {
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

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn step_denominator(&self) -> u64 {
        self.den
    }

    pub fn order(&self) -> &Rational {
        &self.order
    }

    pub fn exponent(&self, step: i64) -> Rational {
        &self.offset + ratio_of(step, self.den)
    }

    /// `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, &Rational)> + '_ {
        self.coeffs.iter().map(move |(k, c)| (self.exponent(*k), c))
    }

    pub fn steps(&self) -> &BTreeMap<i64, Rational> {
        &self.coeffs
    }

    pub fn coefficient(&self, exponent: &Rational) -> Rational {
        self.step_of(exponent)
            .and_then(|k| self.coeffs.get(&k).cloned())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent that can carry a nonzero coefficient.
    pub fn valuation(&self) -> Rational {
        match self.coeffs.keys().next() {
            Some(k) => self.exponent(*k),
            None => self.order.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = QSeries::zero(self.offset.clone(), self.den, self.order.clone());
        for (k, v) in &self.coeffs {
            out.add_at(*k, v * c);
        }
        out
    }

    pub fn truncate(&self, order: &Rational) -> Self {
        let order = order.min(&self.order).clone();
        let mut out = QSeries::zero(self.offset.clone(), self.den, order);
        for (k, v) in &self.coeffs {
            if self.exponent(*k) < out.order {
                out.add_at(*k, v.clone());
            }
        }
        out
    }

    fn rebased(&self, den: u64) -> Self {
        let factor = (den / self.den) as i64;
        let mut out = QSeries::zero(self.offset.clone(), den, self.order.clone());
        for (k, v) in &self.coeffs {
            out.add_at(k * factor, v.clone());
        }
        out
    }

    /// Sum of two series on the same exponent lattice.
    pub fn add(&self, other: &QSeries) -> Result<QSeries, ScalarError> {
        let den = lcm_u64(self.den, other.den);
        let order = self.order.clone().min(other.order.clone());
        let a = self.rebased(den);
        let b = other.rebased(den);
        let mut out = QSeries::zero(a.offset.clone(), den, order);
        let shift = out
            .step_of(&b.offset)
            .ok_or_else(|| ScalarError::OffsetMismatch {
                left: format_rational(&a.offset),
                right: format_rational(&b.offset),
            })?;
        for (k, v) in &a.coeffs {
            if out.exponent(*k) < out.order {
                out.add_at(*k, v.clone());
            }
        }
        for (k, v) in &b.coeffs {
            if out.exponent(k + shift) < out.order {
                out.add_at(k + shift, v.clone());
            }
        }
        Ok(out)
    }

    /// Cauchy product; the result is known up to
    /// `min(order_a + val_b, order_b + val_a)`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let den = lcm_u64(self.den, other.den);
        let a = self.rebased(den);
        let b = other.rebased(den);
        let order = (&a.order + b.valuation()).min(&b.order + a.valuation());
        let mut out = QSeries::zero(&a.offset + &b.offset, den, order);
        for (ka, va) in &a.coeffs {
            for (kb, vb) in &b.coeffs {
                let k = ka + kb;
                if out.exponent(k) < out.order {
                    out.add_at(k, va * vb);
                }
            }
        }
        out
    }

    /// Moves the offset to the lowest stored exponent (or keeps it when the
    /// series is zero). Purely presentational.
    pub fn normalize_offset(&self) -> QSeries {
        let Some(first) = self.coeffs.keys().next().copied() else {
            return self.clone();
        };
        let mut out = QSeries::zero(self.exponent(first), self.den, self.order.clone());
        for (k, v) in &self.coeffs {
            out.add_at(k - first, v.clone());
        }
        out
    }
}

/// `q^{-n/24} Σ_d p_n(d) q^d`, with `p_n(d)` the number of `n`-coloured
/// partitions of `d`, truncated below `order`. `n = 0` gives the constant 1.
pub fn eta_inverse_series(n: u32, order: &Rational) -> QSeries {
    if n == 0 {
        return QSeries::one(order.clone());
    }
    let offset = Rational::new(BigInt::from(-(n as i64)), BigInt::from(24));
    let span = order - &offset;
    if !span.is_positive() {
        return QSeries::zero(offset, 1, order.clone());
    }
    // Largest d with offset + d < order.
    let max_d = {
        let c: BigInt = span.ceil().to_integer() - 1;
        c.to_usize().unwrap_or(0)
    };
    let counts = colored_partition_counts(n, max_d);
    let mut s = QSeries::zero(offset, 1, order.clone());
    for (d, c) in counts.into_iter().enumerate() {
        s.add_at(d as i64, Rational::from_integer(c));
    }
    s
}

/// Coefficients of `∏_{k≥1} (1 - q^k)^{-n}` up to `q^max_d`.
pub(crate) fn colored_partition_counts(n: u32, max_d: usize) -> Vec<BigInt> {
    let mut a = vec![BigInt::zero(); max_d + 1];
    a[0] = BigInt::one();
    for k in 1..=max_d {
        for _ in 0..n {
            for i in k..=max_d {
                let prev = a[i - k].clone();
                a[i] += prev;
            }
        }
    }
    a
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs: BTreeMap<String, String> = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.to_string(), format_rational(v)))
            .collect();
        let mut st = serializer.serialize_struct("QSeries", 4)?;
        st.serialize_field("offset", &format_rational(&self.offset))?;
        st.serialize_field("step", &format_rational(&ratio_of(1, self.den)))?;
        st.serialize_field("order", &format_rational(&self.order))?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "q^({e})")?;
            } else {
                write!(f, "{mag}·q^({e})")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^({}))", self.order)
    }
}

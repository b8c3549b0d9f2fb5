//! Shared numeric primitives: the complex value type, complex powers of
//! integers, and the Neumaier compensated accumulator.

use crate::error::{Error, Result};

/// All function values, series sums and exponents live in double-precision
/// complex arithmetic. Stored results are guaranteed finite; operations that
/// would produce NaN/Inf return errors instead.
pub type ComplexValue = num_complex::Complex64;

pub(crate) const ONE: ComplexValue = ComplexValue::new(1.0, 0.0);
pub(crate) const ZERO: ComplexValue = ComplexValue::new(0.0, 0.0);

#[inline]
pub(crate) fn is_finite(v: ComplexValue) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

#[inline]
pub(crate) fn ensure_finite(v: ComplexValue, what: &str) -> Result<ComplexValue> {
    if is_finite(v) {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} produced a non-finite value")))
    }
}

/// n^(-s) for real n > 0, computed as exp(-s ln n).
///
/// The rotation angle Im(s)·ln n is reduced in double precision, which loses
/// about log2(|angle|) bits; for n <= 1e8 and |Im s| <= 1e3 that is under 15
/// bits and stays far inside every accuracy target in this crate.
#[inline]
pub fn recip_pow(n: f64, s: ComplexValue) -> ComplexValue {
    debug_assert!(n > 0.0);
    let ln = n.ln();
    let mag = (-s.re * ln).exp();
    let angle = -s.im * ln;
    ComplexValue::new(mag * angle.cos(), mag * angle.sin())
}

/// p^(-k s) for a prime power, using k·ln p directly.
#[inline]
pub fn recip_pow_k(p: u64, k: u32, s: ComplexValue) -> ComplexValue {
    debug_assert!(p >= 2 && k >= 1);
    let ln = (k as f64) * (p as f64).ln();
    let mag = (-s.re * ln).exp();
    let angle = -s.im * ln;
    ComplexValue::new(mag * angle.cos(), mag * angle.sin())
}

/// Neumaier's variant of Kahan summation: the running error term also
/// captures the case where the incoming term dominates the sum, so the final
/// `value()` is accurate to O(1) ulp plus the conditioning of the sum itself,
/// independent of the number of terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Distance in units in the last place between two doubles; testing aid for
/// the bit-level and "within 4 ulps" contracts.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if !a.is_finite() || !b.is_finite() {
        return u64::MAX;
    }
    let to_ordered = |x: f64| {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN.wrapping_sub(bits)
        } else {
            bits
        }
    };
    to_ordered(a).abs_diff(to_ordered(b))
}

pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Serde helper: complex values serialize as `{"re": .., "im": ..}` so the
/// JSON report schemas stay explicit and stable.
pub mod complex_fields {
    use super::ComplexValue;
    use serde::ser::SerializeStruct;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &ComplexValue, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ComplexValue", 2)?;
        st.serialize_field("re", &v.re)?;
        st.serialize_field("im", &v.im)?;
        st.end()
    }
}

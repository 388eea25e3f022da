//! Exact rational results with a floating-point shadow.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// A real-valued result. `exact` is present whenever the value was computed
/// in exact arithmetic; `value` is always populated.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactValue {
    pub exact: Option<BigRational>,
    pub value: f64,
}

impl ExactValue {
    pub fn exact(r: BigRational) -> Self {
        let value = to_f64(&r);
        ExactValue {
            exact: Some(r),
            value,
        }
    }

    pub fn approximate(value: f64) -> Self {
        ExactValue { exact: None, value }
    }

    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::exact(BigRational::new(num.into(), den.into()))
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.exact {
            Some(r) => {
                let mut map = serializer.serialize_map(Some(3))?;
                map.serialize_entry("num", &r.numer().to_string())?;
                map.serialize_entry("den", &r.denom().to_string())?;
                map.serialize_entry("float", &self.value)?;
                map.end()
            }
            None => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("float", &self.value)?;
                map.serialize_entry("approximate", &true)?;
                map.end()
            }
        }
    }
}

/// Correctly scaled conversion that survives numerators and denominators far
/// beyond the f64 range.
pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let num = r.numer().abs();
    let den = r.denom().abs();
    let shift = num.bits() as i64 - den.bits() as i64;
    // Bring the quotient into [2^52, 2^54) before dividing in integers.
    let scale = 53 - shift;
    let q = if scale >= 0 {
        (num << scale as usize) / den
    } else {
        num / (den << (-scale) as usize)
    };
    let mag = q.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-scale as i32);
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

pub fn pow2(exp: usize) -> BigUint {
    BigUint::one() << exp
}

/// Binomial coefficient in arbitrary precision.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

pub fn uint_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 3), BigUint::from(84u32));
        assert_eq!(binomial(10, 0), BigUint::one());
        assert_eq!(binomial(3, 4), BigUint::zero());
        let sum: BigUint = (4..=10).map(|k| binomial(10, k)).sum();
        assert_eq!(sum, BigUint::from(848u32));
    }

    #[test]
    fn huge_ratio_converts() {
        let r = uint_ratio(&binomial(20000, 10000), &pow2(20000));
        let v = to_f64(&r);
        // C(2m,m)/4^m ~ 1/sqrt(pi m)
        let approx = 1.0 / (std::f64::consts::PI * 10000.0).sqrt();
        assert!((v / approx - 1.0).abs() < 1e-4, "{v} vs {approx}");
    }

    #[test]
    fn serializes_as_num_den_float() {
        let v = ExactValue::ratio(1, 3);
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.starts_with(r#"{"num":"1","den":"3","float":0.333"#), "{s}");
        let a = serde_json::to_string(&ExactValue::approximate(0.5)).unwrap();
        assert_eq!(a, r#"{"float":0.5,"approximate":true}"#);
    }
}

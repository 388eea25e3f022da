//! Vote vectors on `{-1,1}^n` and the p-biased product measure.
//!
//! Index convention: voter 1 is the least significant bit and a `+1` vote
//! sets its bit, so `idx(x) = sum_i 2^(i-1) * (1 + x_i) / 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{out_of_range, Error, Result};
use crate::exact::to_f64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VoteVector(Vec<i8>);

impl VoteVector {
    pub fn new(votes: Vec<i8>) -> Result<Self> {
        if votes.is_empty() {
            return Err(Error::EmptyElectorate);
        }
        if let Some((position, &v)) = votes.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(Error::InvalidVote {
                position,
                value: v as i64,
            });
        }
        Ok(VoteVector(votes))
    }

    /// Decodes an index in `[0, 2^n)`. Requires `n <= 64`.
    pub fn from_index(n: usize, idx: u64) -> Self {
        assert!((1..=64).contains(&n), "from_index supports 1 <= n <= 64");
        VoteVector((0..n).map(|i| if idx >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn index(&self) -> Result<u64> {
        if self.0.len() > 64 {
            return Err(Error::TooLarge {
                n: self.0.len(),
                limit: 64,
            });
        }
        Ok(index_of(&self.0))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().map(|&v| v as i64).sum()
    }

    pub fn plus_count(&self) -> usize {
        self.0.iter().filter(|&&v| v == 1).count()
    }
}

pub(crate) fn index_of(votes: &[i8]) -> u64 {
    votes
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &v)| if v == 1 { acc | 1 << i } else { acc })
}

/// Independent votes equal to `+1` with probability `p`.
///
/// `p` is held as an exact rational. Measures parsed from decimal or fraction
/// strings are exact; measures built from an `f64` carry the float's binary
/// value and are flagged approximate.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasedMeasure {
    p: BigRational,
    exact_input: bool,
}

impl Default for BiasedMeasure {
    fn default() -> Self {
        Self::uniform()
    }
}

impl BiasedMeasure {
    pub fn uniform() -> Self {
        BiasedMeasure {
            p: BigRational::new(BigInt::one(), BigInt::from(2)),
            exact_input: true,
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(out_of_range("p", f64::NAN, "0 < p < 1"));
        }
        Self::from_rational(BigRational::new(num.into(), den.into()), true)
    }

    pub fn from_f64(p: f64) -> Result<Self> {
        let r = BigRational::from_float(p).ok_or_else(|| out_of_range("p", p, "0 < p < 1"))?;
        Self::from_rational(r, p == 0.5)
    }

    /// Accepts `0.3`, `3e-1`, `1/3` and similar; the result is exact.
    pub fn parse(s: &str) -> Result<Self> {
        Self::from_rational(parse_rational(s)?, true)
    }

    fn from_rational(p: BigRational, exact_input: bool) -> Result<Self> {
        if !(p.is_positive() && p < BigRational::one()) {
            return Err(out_of_range("p", to_f64(&p), "0 < p < 1"));
        }
        Ok(BiasedMeasure { p, exact_input })
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn p_f64(&self) -> f64 {
        to_f64(&self.p)
    }

    pub fn is_uniform(&self) -> bool {
        self.p == BigRational::new(BigInt::one(), BigInt::from(2))
    }

    /// True when `p` is the rational the caller intended (not a float image).
    pub fn is_exact(&self) -> bool {
        self.exact_input
    }

    /// `p^plus * (1-p)^(total-plus)` for `plus = 0..=total`.
    pub fn weight_table(&self, total: usize) -> Vec<BigRational> {
        let q = BigRational::one() - &self.p;
        let mut p_pows = Vec::with_capacity(total + 1);
        let mut q_pows = Vec::with_capacity(total + 1);
        let (mut a, mut b) = (BigRational::one(), BigRational::one());
        for _ in 0..=total {
            p_pows.push(a.clone());
            q_pows.push(b.clone());
            a *= &self.p;
            b *= &q;
        }
        (0..=total)
            .map(|w| &p_pows[w] * &q_pows[total - w])
            .collect()
    }

    /// Floating-point version of [`weight_table`](Self::weight_table).
    pub fn weight_table_f64(&self, total: usize) -> Vec<f64> {
        let p = self.p_f64();
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        (0..=total)
            .map(|w| (w as f64 * lp + (total - w) as f64 * lq).exp())
            .collect()
    }
}

/// Parses a decimal (optionally with exponent) or a `num/den` fraction.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = |offset: usize, message: &str| Error::Parse {
        offset,
        message: format!("{message} in {s:?}"),
    };
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| err(0, "bad numerator"))?;
        let den: BigInt = b
            .trim()
            .parse()
            .map_err(|_| err(a.len() + 1, "bad denominator"))?;
        if den.is_zero() {
            return Err(err(a.len() + 1, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..]
                .parse()
                .map_err(|_| err(pos + 1, "bad exponent"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(err(0, "empty number"));
    }
    let num: BigInt = digits.parse().map_err(|_| err(0, "bad digits"))?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs().to_usize().unwrap_or(0));
    Ok(if scale >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    })
}

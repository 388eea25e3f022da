//! Pivotal counts, influences and Banzhaf power indices.
//!
//! `b_i` counts the configurations of the other `n - 1` voters for which
//! voter `i` decides the outcome. Influence follows the full-configuration
//! definition, `Inf_i = #{x : f(x) != f(x ^ e_i)} / 2^n = b_i / 2^(n-1)`.
//! The `b_i / 2^n` normalization differs only by the constant 2, which
//! cancels in Banzhaf indices.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::cube::BiasedMeasure;
use crate::error::{Error, Result};
use crate::exact::{binomial, pow2, uint_ratio, ExactValue};
use crate::exec::{self, Exec};
use crate::function::BooleanFunction;
use crate::method::{Method, N_DENSE};

fn check_voter(n: usize, i: usize) -> Result<usize> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(i - 1)
}

/// `b_i` for voter `i` (1-based).
pub fn pivotal_count(f: &BooleanFunction, i: usize) -> Result<u64> {
    let i = check_voter(f.n(), i)?;
    Ok(f.table().flip_difference_count(i))
}

pub fn pivotal_counts(f: &BooleanFunction) -> Vec<u64> {
    pivotal_counts_with(f, Exec::default())
}

pub fn pivotal_counts_with(f: &BooleanFunction, exec: Exec) -> Vec<u64> {
    exec::map_ranges(exec, f.n(), 1, |r| f.table().flip_difference_count(r.start))
}

/// Probability, over the other voters' draws from `measure`, that voter `i`
/// is pivotal. At `p = 1/2` this is `b_i / 2^(n-1)`.
pub fn influence(f: &BooleanFunction, i: usize, measure: &BiasedMeasure) -> Result<ExactValue> {
    let i0 = check_voter(f.n(), i)?;
    Ok(influence_from_histogram(
        &f.table().flip_difference_histogram(i0),
        f.n(),
        measure,
    ))
}

/// `hist[w]`: pivotal configurations of the other voters with `w` plus votes.
fn influence_from_histogram(hist: &[u64], n: usize, measure: &BiasedMeasure) -> ExactValue {
    if measure.is_uniform() {
        let b: u64 = hist.iter().sum();
        return ExactValue::exact(uint_ratio(&BigUint::from(b), &pow2(n - 1)));
    }
    let weights = measure.weight_table(n - 1);
    let acc: BigRational = hist
        .iter()
        .zip(&weights)
        .filter(|(h, _)| **h > 0)
        .map(|(h, w)| w * BigRational::from_integer(BigInt::from(*h)))
        .sum();
    ExactValue::exact(acc)
}

/// `b_i / sum_j b_j` for every voter.
pub fn banzhaf_indices(f: &BooleanFunction) -> Result<Vec<ExactValue>> {
    let counts: Vec<BigUint> = pivotal_counts(f).into_iter().map(BigUint::from).collect();
    banzhaf_from_counts(&counts)
}

pub fn banzhaf_from_counts(counts: &[BigUint]) -> Result<Vec<ExactValue>> {
    let total: BigUint = counts.iter().sum();
    if total.is_zero() {
        return Err(Error::ConstantFunction);
    }
    Ok(counts.iter().map(|b| ExactValue::exact(uint_ratio(b, &total))).collect())
}

/// Influence of any voter in majority on odd `n` voters,
/// `C(n-1, (n-1)/2) / 2^(n-1)`. Exact for `n <= 64`.
pub fn majority_influence_exact(n: u64) -> Result<ExactValue> {
    if n == 0 || n % 2 == 0 {
        return Err(crate::error::out_of_range("n", n as f64, "odd n >= 1"));
    }
    let m = (n - 1) / 2;
    if n <= 64 {
        return Ok(ExactValue::exact(uint_ratio(
            &binomial(n - 1, m),
            &pow2((n - 1) as usize),
        )));
    }
    Ok(ExactValue::approximate(central_binomial_fraction(m)))
}

/// `C(2m, m) / 4^m` in floating point with relative error below 1e-13.
pub fn central_binomial_fraction(m: u64) -> f64 {
    if m < 200 {
        return (1..=m).fold(1.0, |acc, j| acc * (2 * j - 1) as f64 / (2 * j) as f64);
    }
    // Asymptotic expansion of Gamma(m + 1/2) / (sqrt(pi) Gamma(m + 1)).
    const COEFFS: [f64; 7] = [
        1.0,
        -1.0 / 8.0,
        1.0 / 128.0,
        5.0 / 1024.0,
        -21.0 / 32768.0,
        -399.0 / 262144.0,
        869.0 / 4194304.0,
    ];
    let x = 1.0 / m as f64;
    let series = COEFFS.iter().rev().fold(0.0, |acc, c| acc * x + c);
    series / (std::f64::consts::PI * m as f64).sqrt()
}

fn serialize_decimal<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct PivotalReport {
    pub n: usize,
    /// Probability of a `+1` vote, as an exact fraction.
    pub p: String,
    /// `b_i`, as decimal strings.
    #[serde(serialize_with = "serialize_decimal")]
    pub pivotal: Vec<BigUint>,
    /// Probability that voter `i` is pivotal.
    pub influence: Vec<ExactValue>,
    /// `None` for constant methods, where every `b_i` is zero.
    pub banzhaf: Option<Vec<ExactValue>>,
    pub influence_convention: &'static str,
}

const CONVENTION: &str = "influence_i = b_i / 2^(n-1) at p = 1/2";

pub fn pivotal_report(f: &BooleanFunction, measure: &BiasedMeasure) -> PivotalReport {
    pivotal_report_with(f, measure, Exec::default())
}

pub fn pivotal_report_with(f: &BooleanFunction, measure: &BiasedMeasure, exec: Exec) -> PivotalReport {
    let n = f.n();
    let hists: Vec<Vec<u64>> =
        exec::map_ranges(exec, n, 1, |r| f.table().flip_difference_histogram(r.start));
    let pivotal: Vec<BigUint> = hists
        .iter()
        .map(|h| BigUint::from(h.iter().sum::<u64>()))
        .collect();
    let influence = hists
        .iter()
        .map(|h| influence_from_histogram(h, n, measure))
        .collect();
    PivotalReport {
        n,
        p: measure.p().to_string(),
        banzhaf: banzhaf_from_counts(&pivotal).ok(),
        pivotal,
        influence,
        influence_convention: CONVENTION,
    }
}

/// Report for a structured method: dense when `n <= N_DENSE`, closed form for
/// threshold and dictator methods beyond that.
pub fn method_report(method: &Method, measure: &BiasedMeasure) -> Result<PivotalReport> {
    let n = method.n();
    if n <= N_DENSE {
        return Ok(pivotal_report(&method.to_dense()?, measure));
    }
    let (pivotal, influence): (Vec<BigUint>, Vec<ExactValue>) =
        if let Some(t) = method.threshold_value() {
            let (b, inf) = threshold_pivotal(n, t, measure);
            (vec![b; n], vec![inf; n])
        } else if let Some(d) = method.dictator_index() {
            (0..n)
                .map(|i| {
                    if i == d {
                        (pow2(n - 1), ExactValue::exact(BigRational::one()))
                    } else {
                        (BigUint::zero(), ExactValue::exact(BigRational::zero()))
                    }
                })
                .unzip()
        } else {
            return Err(Error::NoClosedForm(format!(
                "pivotal counts of {:?} with n = {n}",
                method.spec()
            )));
        };
    Ok(PivotalReport {
        n,
        p: measure.p().to_string(),
        banzhaf: banzhaf_from_counts(&pivotal).ok(),
        pivotal,
        influence,
        influence_convention: CONVENTION,
    })
}

/// A voter is pivotal for `sign(sum - t)` iff the others' sum `s` satisfies
/// `t - 1 <= s < t + 1`.
fn threshold_pivotal(n: usize, t: f64, measure: &BiasedMeasure) -> (BigUint, ExactValue) {
    let others = n - 1;
    let window: Vec<usize> = (0..=others)
        .filter(|&w| {
            let s = (2 * w as i64 - others as i64) as f64;
            t - 1.0 <= s && s < t + 1.0
        })
        .collect();
    let b: BigUint = window
        .iter()
        .map(|&w| binomial(others as u64, w as u64))
        .sum();
    let inf = if measure.is_uniform() {
        ExactValue::exact(uint_ratio(&b, &pow2(others)))
    } else {
        let p = measure.p();
        let q = BigRational::one() - p;
        let acc: BigRational = window
            .iter()
            .map(|&w| {
                num_traits::pow(p.clone(), w)
                    * num_traits::pow(q.clone(), others - w)
                    * BigRational::from_integer(binomial(others as u64, w as u64).into())
            })
            .sum();
        ExactValue::exact(acc)
    };
    (b, inf)
}

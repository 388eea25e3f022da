//! Structured voting methods.
//!
//! A [`MethodSpec`] is the serializable description; a [`Method`] is a spec
//! validated against a voter count and ready to evaluate at any `n`, without
//! materializing `2^n` entries. Every `sign(.)` in these definitions uses
//! `sign(0) = +1`; [`TieStatus`] records whether that rule is ever exercised.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cube::{BiasedMeasure, VoteVector};
use crate::error::{Error, Result};
use crate::exact::{binomial, pow2, ExactValue};
use crate::exec::Exec;
use crate::function::BooleanFunction;

/// Largest `n` for which dense truth tables are built (2 MiB bit-packed).
pub const N_DENSE: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnEra {
    #[serde(rename = "pre1965")]
    Pre1965,
    #[serde(rename = "post1965")]
    Post1965,
}

impl UnEra {
    pub const PERMANENT: usize = 5;

    pub fn nonpermanent(self) -> usize {
        match self {
            UnEra::Pre1965 => 6,
            UnEra::Post1965 => 10,
        }
    }

    /// Nonpermanent yes votes needed, given all permanent members vote yes.
    pub fn required_nonpermanent(self) -> usize {
        match self {
            UnEra::Pre1965 => 2,
            UnEra::Post1965 => 4,
        }
    }

    pub fn voters(self) -> usize {
        Self::PERMANENT + self.nonpermanent()
    }
}

/// Assignment of voters (1-based) to the states of a two-tier method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    /// Consecutive blocks of the given sizes.
    Sizes(Vec<usize>),
    /// Explicit voter lists.
    Groups(Vec<Vec<usize>>),
}

impl Partition {
    fn resolve(&self, n: usize) -> Result<Vec<Vec<usize>>> {
        let groups: Vec<Vec<usize>> = match self {
            Partition::Sizes(sizes) => {
                let mut next = 0;
                sizes
                    .iter()
                    .map(|&s| {
                        let g: Vec<usize> = (next..next + s).collect();
                        next += s;
                        g
                    })
                    .collect()
            }
            Partition::Groups(groups) => {
                let mut out = Vec::with_capacity(groups.len());
                for g in groups {
                    let mut v = Vec::with_capacity(g.len());
                    for &i in g {
                        if i == 0 || i > n {
                            return Err(Error::IndexOutOfRange { index: i, n });
                        }
                        v.push(i - 1);
                    }
                    out.push(v);
                }
                out
            }
        };
        if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidMethod("two-tier states must be nonempty".into()));
        }
        let mut seen = vec![false; n];
        let mut covered = 0;
        for &i in groups.iter().flatten() {
            if i >= n {
                return Err(Error::InvalidMethod(format!(
                    "partition covers more than n = {n} voters"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidMethod(format!(
                    "voter {} appears in two states",
                    i + 1
                )));
            }
            covered += 1;
        }
        if covered != n {
            return Err(Error::InvalidMethod(format!(
                "partition covers {covered} of {n} voters"
            )));
        }
        Ok(groups)
    }

    fn total(&self) -> usize {
        match self {
            Partition::Sizes(s) => s.iter().sum(),
            Partition::Groups(g) => g.iter().map(Vec::len).sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodSpec {
    /// `f(x) = x_index`, 1-based.
    Dictator { index: usize },
    /// `sign(x_1 + ... + x_n)`.
    Majority,
    /// `sign(x_1 + ... + x_n - threshold)`.
    ThresholdMajority { threshold: f64 },
    /// `sign(w_1 x_1 + ... + w_n x_n - threshold)`.
    WeightedMajority { weights: Vec<f64>, threshold: f64 },
    /// `outer(inner(state_1), ..., inner(state_m))`.
    TwoTier {
        partition: Partition,
        inner: Box<MethodSpec>,
        outer: Box<MethodSpec>,
    },
    /// UN Security Council: all five permanent members (voters 1..=5) and
    /// enough nonpermanent members must vote yes.
    UnCouncil { era: UnEra },
}

impl MethodSpec {
    /// Voter count fixed by the spec itself, if any.
    pub fn implied_voters(&self) -> Option<usize> {
        match self {
            MethodSpec::WeightedMajority { weights, .. } => Some(weights.len()),
            MethodSpec::TwoTier { partition, .. } => Some(partition.total()),
            MethodSpec::UnCouncil { era } => Some(era.voters()),
            _ => None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("method specs always serialize")
    }
}

/// Whether `sign(0)` can occur for some input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieStatus {
    Unreachable,
    Reachable,
    Unknown,
}

impl TieStatus {
    fn or(self, other: TieStatus) -> TieStatus {
        use TieStatus::*;
        match (self, other) {
            (Reachable, _) | (_, Reachable) => Reachable,
            (Unknown, _) | (_, Unknown) => Unknown,
            _ => Unreachable,
        }
    }
}

#[derive(Clone, Debug)]
enum Kernel {
    Dictator(usize),
    Threshold(f64),
    Weighted {
        weights: Vec<f64>,
        threshold: f64,
    },
    TwoTier {
        groups: Vec<Vec<usize>>,
        inner: Vec<Method>,
        outer: Box<Method>,
    },
    Un(UnEra),
}

/// A validated voting method on a fixed number of voters.
#[derive(Clone, Debug)]
pub struct Method {
    spec: MethodSpec,
    n: usize,
    ties: TieStatus,
    kernel: Kernel,
}

impl Method {
    pub fn new(spec: MethodSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyElectorate);
        }
        if let Some(fixed) = spec.implied_voters() {
            if fixed != n {
                return Err(Error::InvalidMethod(format!(
                    "spec fixes {fixed} voters but n = {n}"
                )));
            }
        }
        let (kernel, ties) = match &spec {
            MethodSpec::Dictator { index } => {
                if *index == 0 || *index > n {
                    return Err(Error::IndexOutOfRange { index: *index, n });
                }
                (Kernel::Dictator(index - 1), TieStatus::Unreachable)
            }
            MethodSpec::Majority => (Kernel::Threshold(0.0), threshold_ties(n, 0.0)),
            MethodSpec::ThresholdMajority { threshold } => {
                if !threshold.is_finite() {
                    return Err(Error::InvalidMethod("threshold must be finite".into()));
                }
                (Kernel::Threshold(*threshold), threshold_ties(n, *threshold))
            }
            MethodSpec::WeightedMajority { weights, threshold } => {
                if weights.iter().chain([threshold]).any(|w| !w.is_finite()) {
                    return Err(Error::InvalidMethod("weights must be finite".into()));
                }
                let ties = weighted_ties(weights, *threshold);
                (
                    Kernel::Weighted {
                        weights: weights.clone(),
                        threshold: *threshold,
                    },
                    ties,
                )
            }
            MethodSpec::TwoTier {
                partition,
                inner,
                outer,
            } => {
                let groups = partition.resolve(n)?;
                let mut ties = TieStatus::Unreachable;
                let mut inner_methods: Vec<Method> = Vec::with_capacity(groups.len());
                for g in &groups {
                    let reuse = inner_methods.iter().find(|m| m.n == g.len()).cloned();
                    let m = match reuse {
                        Some(m) => m,
                        None => Method::new((**inner).clone(), g.len())?,
                    };
                    ties = ties.or(m.ties);
                    inner_methods.push(m);
                }
                let outer = Method::new((**outer).clone(), groups.len())?;
                ties = ties.or(outer.ties);
                (
                    Kernel::TwoTier {
                        groups,
                        inner: inner_methods,
                        outer: Box::new(outer),
                    },
                    ties,
                )
            }
            MethodSpec::UnCouncil { era } => (Kernel::Un(*era), TieStatus::Unreachable),
        };
        if ties == TieStatus::Reachable {
            log::warn!("{spec:?} on {n} voters can tie; sign(0) resolves to +1");
        }
        Ok(Method {
            spec,
            n,
            ties,
            kernel,
        })
    }

    /// Builds from a spec, taking `n` from the spec when it fixes one.
    pub fn from_spec(spec: MethodSpec, n: Option<usize>) -> Result<Self> {
        match (spec.implied_voters(), n) {
            (_, Some(n)) => Method::new(spec, n),
            (Some(n), None) => Method::new(spec, n),
            (None, None) => Err(Error::InvalidMethod(
                "this method needs an explicit voter count".into(),
            )),
        }
    }

    pub fn majority(n: usize) -> Result<Self> {
        Method::new(MethodSpec::Majority, n)
    }

    pub fn threshold(n: usize, threshold: f64) -> Result<Self> {
        Method::new(MethodSpec::ThresholdMajority { threshold }, n)
    }

    pub fn dictator(n: usize, index: usize) -> Result<Self> {
        Method::new(MethodSpec::Dictator { index }, n)
    }

    pub fn weighted(weights: Vec<f64>, threshold: f64) -> Result<Self> {
        let n = weights.len();
        Method::new(MethodSpec::WeightedMajority { weights, threshold }, n)
    }

    pub fn un_council(era: UnEra) -> Self {
        Method::new(MethodSpec::UnCouncil { era }, era.voters()).expect("fixed size")
    }

    /// Majority of state majorities over consecutive states of the given
    /// sizes, with the outer vote weighted by `electors` (equal if `None`).
    pub fn two_tier(sizes: Vec<usize>, electors: Option<Vec<f64>>) -> Result<Self> {
        let n = sizes.iter().sum();
        let outer = match electors {
            Some(weights) => MethodSpec::WeightedMajority {
                weights,
                threshold: 0.0,
            },
            None => MethodSpec::Majority,
        };
        Method::new(
            MethodSpec::TwoTier {
                partition: Partition::Sizes(sizes),
                inner: Box::new(MethodSpec::Majority),
                outer: Box::new(outer),
            },
            n,
        )
    }

    pub fn spec(&self) -> &MethodSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ties(&self) -> TieStatus {
        self.ties
    }

    pub fn evaluate(&self, x: &VoteVector) -> Result<i8> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.eval(x.as_slice()))
    }

    /// Evaluates on a slice of `±1` votes of length `n`.
    pub fn eval(&self, x: &[i8]) -> i8 {
        debug_assert_eq!(x.len(), self.n);
        match &self.kernel {
            Kernel::Dictator(i) => x[*i],
            Kernel::Threshold(t) => {
                let s: i64 = x.iter().map(|&v| v as i64).sum();
                sign(s as f64 - t)
            }
            Kernel::Weighted { weights, threshold } => {
                let s: f64 = weights.iter().zip(x).map(|(w, &v)| w * v as f64).sum();
                sign(s - threshold)
            }
            Kernel::TwoTier {
                groups,
                inner,
                outer,
            } => {
                let mut buf = Vec::new();
                let states: Vec<i8> = groups
                    .iter()
                    .zip(inner)
                    .map(|(g, m)| {
                        buf.clear();
                        buf.extend(g.iter().map(|&i| x[i]));
                        m.eval(&buf)
                    })
                    .collect();
                outer.eval(&states)
            }
            Kernel::Un(era) => {
                let permanent = x[..UnEra::PERMANENT].iter().all(|&v| v == 1);
                let yes = x[UnEra::PERMANENT..].iter().filter(|&&v| v == 1).count();
                if permanent && yes >= era.required_nonpermanent() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Evaluates directly on a packed index (`n <= 64`).
    pub fn eval_index(&self, idx: u64) -> i8 {
        debug_assert!(self.n <= 64);
        match &self.kernel {
            Kernel::Dictator(i) => bit_vote(idx, *i),
            Kernel::Threshold(t) => {
                let s = 2 * idx.count_ones() as i64 - self.n as i64;
                sign(s as f64 - t)
            }
            Kernel::Weighted { weights, threshold } => {
                let s: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * bit_vote(idx, i) as f64)
                    .sum();
                sign(s - threshold)
            }
            Kernel::TwoTier {
                groups,
                inner,
                outer,
            } => {
                let mut outer_idx = 0u64;
                for (s, (g, m)) in groups.iter().zip(inner).enumerate() {
                    let sub = g
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &i)| acc | (idx >> i & 1) << k);
                    if m.eval_index(sub) == 1 {
                        outer_idx |= 1 << s;
                    }
                }
                outer.eval_index(outer_idx)
            }
            Kernel::Un(era) => {
                let all_permanent = idx & 0b11111 == 0b11111;
                let yes = (idx >> UnEra::PERMANENT).count_ones() as usize;
                if all_permanent && yes >= era.required_nonpermanent() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Dense truth table; requires `n <= N_DENSE`.
    pub fn to_dense(&self) -> Result<BooleanFunction> {
        self.to_dense_with(Exec::default())
    }

    pub fn to_dense_with(&self, exec: Exec) -> Result<BooleanFunction> {
        if self.n > N_DENSE {
            return Err(Error::TooLarge {
                n: self.n,
                limit: N_DENSE,
            });
        }
        Ok(BooleanFunction::from_fn(self.n, exec, |idx| {
            self.eval_index(idx) == 1
        }))
    }

    /// Block sizes when the method depends only on the number of `+1` votes
    /// inside each block; `None` otherwise.
    pub fn block_sizes(&self) -> Option<Vec<u64>> {
        match &self.kernel {
            Kernel::Dictator(_) if self.n == 1 => Some(vec![1]),
            Kernel::Dictator(_) => Some(vec![1, self.n as u64 - 1]),
            Kernel::Threshold(_) => Some(vec![self.n as u64]),
            Kernel::Weighted { .. } => None,
            Kernel::TwoTier { inner, .. } => {
                let mut out = Vec::new();
                for m in inner {
                    out.extend(m.block_sizes()?);
                }
                Some(out)
            }
            Kernel::Un(era) => Some(vec![UnEra::PERMANENT as u64, era.nonpermanent() as u64]),
        }
    }

    /// Evaluates from per-block `+1` counts laid out as in
    /// [`block_sizes`](Self::block_sizes).
    pub fn eval_counts(&self, plus: &[u64]) -> i8 {
        match &self.kernel {
            Kernel::Dictator(_) => {
                if plus[0] == 1 {
                    1
                } else {
                    -1
                }
            }
            Kernel::Threshold(t) => sign((2 * plus[0] as i64 - self.n as i64) as f64 - t),
            Kernel::Weighted { .. } => unreachable!("weighted majority has no block form"),
            Kernel::TwoTier { inner, outer, .. } => {
                let mut states = Vec::with_capacity(inner.len());
                let mut at = 0;
                for m in inner {
                    let k = m.block_count();
                    states.push(m.eval_counts(&plus[at..at + k]));
                    at += k;
                }
                outer.eval(&states)
            }
            Kernel::Un(era) => {
                if plus[0] == UnEra::PERMANENT as u64
                    && plus[1] >= era.required_nonpermanent() as u64
                {
                    1
                } else {
                    -1
                }
            }
        }
    }

    fn block_count(&self) -> usize {
        match &self.kernel {
            Kernel::Dictator(_) if self.n == 1 => 1,
            Kernel::Dictator(_) | Kernel::Un(_) => 2,
            Kernel::Threshold(_) => 1,
            Kernel::Weighted { .. } => 0,
            Kernel::TwoTier { inner, .. } => inner.iter().map(Method::block_count).sum(),
        }
    }

    /// `E f(X)` under the p-biased measure: via the dense table when
    /// `n <= N_DENSE`, via closed forms otherwise.
    pub fn expectation(&self, measure: &BiasedMeasure) -> Result<ExactValue> {
        if self.n <= N_DENSE {
            return Ok(self.to_dense()?.expectation(measure));
        }
        match &self.kernel {
            Kernel::Dictator(_) => {
                let two = BigRational::from_integer(BigInt::from(2));
                Ok(ExactValue::exact(two * measure.p() - BigRational::one()))
            }
            Kernel::Threshold(t) => Ok(threshold_expectation(self.n, *t, measure)),
            _ => Err(Error::NoClosedForm(format!(
                "expectation of {:?} with n = {}",
                self.spec, self.n
            ))),
        }
    }

    pub(crate) fn threshold_value(&self) -> Option<f64> {
        match self.kernel {
            Kernel::Threshold(t) => Some(t),
            _ => None,
        }
    }

    pub(crate) fn dictator_index(&self) -> Option<usize> {
        match self.kernel {
            Kernel::Dictator(i) => Some(i),
            _ => None,
        }
    }
}

#[inline]
fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

#[inline]
fn bit_vote(idx: u64, i: usize) -> i8 {
    if idx >> i & 1 == 1 {
        1
    } else {
        -1
    }
}

fn threshold_ties(n: usize, t: f64) -> TieStatus {
    let reachable = t.fract() == 0.0 && t.abs() <= n as f64 && (t as i64 - n as i64) % 2 == 0;
    if reachable {
        TieStatus::Reachable
    } else {
        TieStatus::Unreachable
    }
}

/// `sum w_i x_i = t` iff some subset `P` has `sum_P w = (t + sum w) / 2`.
fn weighted_ties(weights: &[f64], t: f64) -> TieStatus {
    const DP_LIMIT: f64 = 1e7;
    let integral = weights.iter().chain([&t]).all(|w| w.fract() == 0.0);
    if integral {
        let neg: f64 = weights.iter().filter(|w| **w < 0.0).sum();
        let pos: f64 = weights.iter().filter(|w| **w > 0.0).sum();
        let total: f64 = weights.iter().sum();
        let doubled = t + total;
        if doubled.rem_euclid(2.0) != 0.0 {
            return TieStatus::Unreachable;
        }
        let target = doubled / 2.0;
        if target < neg || target > pos {
            return TieStatus::Unreachable;
        }
        if pos - neg <= DP_LIMIT {
            let offset = (-neg) as usize;
            let mut reach = vec![false; (pos - neg) as usize + 1];
            reach[offset] = true;
            for &w in weights {
                let w = w as i64;
                if w > 0 {
                    for s in (0..reach.len()).rev() {
                        if reach[s] && s + (w as usize) < reach.len() {
                            reach[s + w as usize] = true;
                        }
                    }
                } else if w < 0 {
                    let w = (-w) as usize;
                    for s in 0..reach.len() {
                        if reach[s] && s >= w {
                            reach[s - w] = true;
                        }
                    }
                }
            }
            return if reach[(target - neg) as usize] {
                TieStatus::Reachable
            } else {
                TieStatus::Unreachable
            };
        }
    }
    if weights.len() <= 20 {
        let n = weights.len();
        let hit = (0..1u64 << n).any(|idx| {
            let s: f64 = weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * bit_vote(idx, i) as f64)
                .sum();
            s - t == 0.0
        });
        return if hit {
            TieStatus::Reachable
        } else {
            TieStatus::Unreachable
        };
    }
    TieStatus::Unknown
}

/// `E sign(sum x - t)` by summing binomial weights over plus counts.
pub(crate) fn threshold_expectation(n: usize, t: f64, measure: &BiasedMeasure) -> ExactValue {
    let wins = |w: usize| (2 * w as i64 - n as i64) as f64 >= t;
    if measure.is_uniform() {
        let mut signed = BigInt::zero();
        for w in 0..=n {
            let c = BigInt::from(binomial(n as u64, w as u64));
            if wins(w) {
                signed += c;
            } else {
                signed -= c;
            }
        }
        return ExactValue::exact(BigRational::new(signed, BigInt::from(pow2(n))));
    }
    let weights = measure.weight_table(n);
    let mut acc = BigRational::zero();
    for (w, weight) in weights.iter().enumerate() {
        let term = weight * BigRational::from_integer(binomial(n as u64, w as u64).into());
        if wins(w) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    ExactValue::exact(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i8]) -> VoteVector {
        VoteVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn named_examples() {
        let maj3 = Method::majority(3).unwrap();
        assert_eq!(maj3.evaluate(&v(&[1, 1, -1])).unwrap(), 1);
        assert_eq!(maj3.evaluate(&v(&[-1, -1, 1])).unwrap(), -1);
        let d = Method::dictator(5, 1).unwrap();
        assert_eq!(d.evaluate(&v(&[-1, 1, 1, 1, 1])).unwrap(), -1);
        let w = Method::weighted(vec![2.0, 1.0, 1.0], 0.0).unwrap();
        assert_eq!(w.evaluate(&v(&[1, -1, -1])).unwrap(), 1);
        assert_eq!(w.ties(), TieStatus::Reachable);
    }

    #[test]
    fn un_post1965_rule() {
        let un = Method::un_council(UnEra::Post1965);
        let mut x = vec![1i8; 5];
        x.extend([1, 1, 1, 1, -1, -1, -1, -1, -1, -1]);
        assert_eq!(un.evaluate(&v(&x)).unwrap(), 1);
        x[8] = -1;
        assert_eq!(un.evaluate(&v(&x)).unwrap(), -1);
    }

    #[test]
    fn two_tier_hand_evaluation() {
        let m = Method::two_tier(vec![3, 3, 3], None).unwrap();
        let x = [1, 1, -1, -1, -1, 1, 1, -1, 1];
        assert_eq!(m.evaluate(&v(&x)).unwrap(), 1);
        let weighted = Method::two_tier(vec![3, 3, 3], Some(vec![3.0, 1.0, 1.0])).unwrap();
        let y = [-1, -1, 1, 1, 1, -1, 1, 1, -1];
        assert_eq!(weighted.evaluate(&v(&y)).unwrap(), -1);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(Method::majority(0), Err(Error::EmptyElectorate)));
        assert!(matches!(
            Method::dictator(3, 4),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
        assert!(Method::new(MethodSpec::UnCouncil { era: UnEra::Pre1965 }, 15).is_err());
        let overlapping = MethodSpec::TwoTier {
            partition: Partition::Groups(vec![vec![1, 2], vec![2, 3]]),
            inner: Box::new(MethodSpec::Majority),
            outer: Box::new(MethodSpec::Majority),
        };
        assert!(Method::new(overlapping, 3).is_err());
        let short = MethodSpec::TwoTier {
            partition: Partition::Groups(vec![vec![1], vec![3]]),
            inner: Box::new(MethodSpec::Majority),
            outer: Box::new(MethodSpec::Majority),
        };
        assert!(Method::new(short, 3).is_err());
        assert!(Method::from_spec(MethodSpec::Majority, None).is_err());
        assert_eq!(
            Method::from_spec(MethodSpec::UnCouncil { era: UnEra::Pre1965 }, None)
                .unwrap()
                .n(),
            11
        );
    }

    #[test]
    fn tie_detection() {
        assert_eq!(Method::majority(3).unwrap().ties(), TieStatus::Unreachable);
        assert_eq!(Method::majority(4).unwrap().ties(), TieStatus::Reachable);
        assert_eq!(Method::threshold(3, 1.0).unwrap().ties(), TieStatus::Reachable);
        assert_eq!(Method::threshold(3, 2.0).unwrap().ties(), TieStatus::Unreachable);
        assert_eq!(
            Method::weighted(vec![2.0, 1.0, 1.0], 1.0).unwrap().ties(),
            TieStatus::Unreachable
        );
        assert_eq!(
            Method::weighted(vec![0.5, 0.25, 0.3], 0.0).unwrap().ties(),
            TieStatus::Unreachable
        );
        assert_eq!(
            Method::two_tier(vec![3, 3], None).unwrap().ties(),
            TieStatus::Reachable
        );
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = MethodSpec::TwoTier {
            partition: Partition::Sizes(vec![3, 3, 3]),
            inner: Box::new(MethodSpec::Majority),
            outer: Box::new(MethodSpec::WeightedMajority {
                weights: vec![3.0, 1.0, 1.0],
                threshold: 0.0,
            }),
        };
        let back = MethodSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        let un: MethodSpec =
            serde_json::from_str(r#"{"kind":"un_council","era":"pre1965"}"#).unwrap();
        assert_eq!(un, MethodSpec::UnCouncil { era: UnEra::Pre1965 });
    }

    #[test]
    fn block_form_matches_slice_evaluation() {
        let methods = [
            Method::majority(5).unwrap(),
            Method::threshold(5, 2.0).unwrap(),
            Method::dictator(4, 2).unwrap(),
            Method::un_council(UnEra::Pre1965),
            Method::two_tier(vec![3, 1, 3], Some(vec![2.0, 1.0, 2.0])).unwrap(),
        ];
        for m in &methods {
            let sizes = m.block_sizes().unwrap();
            assert_eq!(sizes.iter().sum::<u64>(), m.n() as u64);
            for idx in 0..1u64 << m.n() {
                let x = VoteVector::from_index(m.n(), idx);
                let counts = block_counts(m, x.as_slice());
                assert_eq!(m.eval_counts(&counts), m.eval(x.as_slice()), "{:?}", m.spec());
            }
        }
    }

    // Voter-to-block layout for the methods above.
    fn block_counts(m: &Method, x: &[i8]) -> Vec<u64> {
        let plus = |s: &[i8]| s.iter().filter(|&&v| v == 1).count() as u64;
        match &m.kernel {
            Kernel::Dictator(i) => {
                let others: Vec<i8> = x
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j != i)
                    .map(|(_, &v)| v)
                    .collect();
                vec![plus(&x[*i..*i + 1]), plus(&others)]
            }
            Kernel::Threshold(_) => vec![plus(x)],
            Kernel::Un(_) => vec![plus(&x[..5]), plus(&x[5..])],
            Kernel::TwoTier { groups, .. } => groups
                .iter()
                .map(|g| g.iter().filter(|&&i| x[i] == 1).count() as u64)
                .collect(),
            Kernel::Weighted { .. } => unreachable!(),
        }
    }

    #[test]
    fn large_n_expectation_closed_forms() {
        let m = Method::majority(10001).unwrap();
        let e = m.expectation(&BiasedMeasure::uniform()).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.is_exact());
        let d = Method::dictator(100, 3).unwrap();
        let e = d.expectation(&BiasedMeasure::parse("0.3").unwrap()).unwrap();
        assert_eq!(e.exact.unwrap(), BigRational::new((-2).into(), 5.into()));
        assert!(Method::weighted(vec![1.0; 30], 0.5)
            .unwrap()
            .expectation(&BiasedMeasure::uniform())
            .is_err());
    }
}

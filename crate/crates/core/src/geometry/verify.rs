//! Exhaustive and sampled checks of adversarial optimality, and a randomized
//! audit of the vertex-isoperimetric inequality.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::bits::BitTable;
use crate::error::{out_of_range, Error, Result};
use crate::exact::binomial;
use crate::exec::{self, Exec};
use crate::function::BooleanFunction;
use crate::method::Method;
use crate::rng;

use super::{check_harper, half_ball, vulnerable_count_with, SubsetMask, N_GEOM};

/// Competitor enumeration is capped at this many functions.
const EXHAUSTIVE_LIMIT: u64 = 2_000_000;
const TAG_COMPETITORS: u64 = 0xC0;
const TAG_HARPER: u64 = 0x4A;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    /// Every function with the reference's balance.
    Exhaustive,
    /// Uniformly random functions with the reference's balance.
    Sampled { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub n: usize,
    pub k: usize,
    pub threshold: f64,
    pub exhaustive: bool,
    /// Whether the optimality statement covers this threshold.
    pub optimality_claimed: bool,
    pub reference_count: u64,
    pub competitors: u64,
    pub min_count: u64,
    pub max_count: u64,
    /// Competitor vulnerable counts and their multiplicities.
    pub distribution: BTreeMap<u64, u64>,
    /// Competitors attaining the overall minimum (reference included if it
    /// attains it).
    pub co_minimizers: u64,
    /// Hex truth tables of the co-minimizers, exhaustive searches only.
    pub co_minimizer_tables: Vec<String>,
    /// Competitors strictly less vulnerable than the reference.
    pub violations: u64,
    pub holds: bool,
}

/// Checks that majority on odd `n` has the fewest adversarially flippable
/// configurations among balanced methods.
pub fn verify_majority_optimal(n: usize, k: usize, search: Search) -> Result<OptimalityReport> {
    verify_threshold_optimal(n, 0, k, search, false)
}

/// Checks that `Maj_{n,t}` (odd `n`, even `t`) is no more vulnerable than any
/// method with the same balance. Odd `t` is only examined when
/// `allow_odd_t` is set, and then no optimality is claimed.
pub fn verify_threshold_optimal(
    n: usize,
    t: i64,
    k: usize,
    search: Search,
    allow_odd_t: bool,
) -> Result<OptimalityReport> {
    if n % 2 == 0 || n > N_GEOM {
        return Err(out_of_range("n", n as f64, "odd n <= N_GEOM"));
    }
    if k == 0 || k > n {
        return Err(out_of_range("k", k as f64, "1 <= k <= n"));
    }
    let odd_t = t.rem_euclid(2) == 1;
    if odd_t && !allow_odd_t {
        return Err(Error::InvalidMethod(format!(
            "threshold {t} is odd; optimality is only stated for even thresholds"
        )));
    }
    let reference = Method::threshold(n, t as f64)?.to_dense()?;
    let reference_count = vulnerable_count_with(&reference, k, Exec::Sequential)?.vulnerable_count;
    let ones = reference.count_plus();
    let exec = Exec::default();

    let (counts, tables): (Vec<u64>, Option<Vec<BooleanFunction>>) = match search {
        Search::Exhaustive => {
            let fns = enumerate_balanced(n, ones)?;
            let counts = exec::map_ranges(exec, fns.len(), 256, |r| {
                r.map(|i| vulnerable(&fns[i], k)).collect::<Vec<u64>>()
            })
            .concat();
            (counts, Some(fns))
        }
        Search::Sampled { trials, seed } => {
            let counts = exec::map_ranges(exec, trials as usize, 256, |r| {
                r.map(|i| {
                    let mut rng = rng::tagged_stream(seed, TAG_COMPETITORS, i as u64);
                    vulnerable(&BooleanFunction::random_with_ones(n, ones, &mut rng), k)
                })
                .collect::<Vec<u64>>()
            })
            .concat();
            (counts, None)
        }
    };

    let mut distribution = BTreeMap::new();
    for &c in &counts {
        *distribution.entry(c).or_insert(0u64) += 1;
    }
    let min_count = counts.iter().copied().min().unwrap_or(reference_count);
    let max_count = counts.iter().copied().max().unwrap_or(reference_count);
    let violations = counts.iter().filter(|&&c| c < reference_count).count() as u64;
    let overall_min = min_count.min(reference_count);
    let co_minimizers = counts.iter().filter(|&&c| c == overall_min).count() as u64;
    let co_minimizer_tables = tables
        .map(|fns| {
            fns.iter()
                .zip(&counts)
                .filter(|(_, &c)| c == overall_min)
                .take(256)
                .map(|(f, _)| f.to_hex())
                .collect()
        })
        .unwrap_or_default();
    Ok(OptimalityReport {
        n,
        k,
        threshold: t as f64,
        exhaustive: matches!(search, Search::Exhaustive),
        optimality_claimed: !odd_t,
        reference_count,
        competitors: counts.len() as u64,
        min_count,
        max_count,
        distribution,
        co_minimizers,
        co_minimizer_tables,
        violations,
        holds: violations == 0,
    })
}

fn vulnerable(f: &BooleanFunction, k: usize) -> u64 {
    vulnerable_count_with(f, k, Exec::Sequential)
        .expect("validated dimensions")
        .vulnerable_count
}

/// All functions on `n <= 6` voters with exactly `ones` winning inputs, in
/// increasing order of their packed tables.
fn enumerate_balanced(n: usize, ones: u64) -> Result<Vec<BooleanFunction>> {
    if n > 6 {
        return Err(Error::TooLarge { n, limit: 6 });
    }
    let len = 1u64 << n;
    let total = binomial(len, ones);
    if total > EXHAUSTIVE_LIMIT.into() {
        return Err(Error::InvalidMethod(format!(
            "{total} competitors exceed the exhaustive limit {EXHAUSTIVE_LIMIT}; use sampling"
        )));
    }
    let mut out = Vec::new();
    if ones == 0 {
        out.push(BooleanFunction::constant(n, -1));
        return Ok(out);
    }
    let limit = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    let mut mask = if ones == 64 { u64::MAX } else { (1u64 << ones) - 1 };
    loop {
        let table = BitTable::from_words(n, vec![mask]).expect("fits in one word");
        out.push(BooleanFunction::from_table(table)?);
        // Gosper's hack: next mask with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask.wrapping_add(c);
        if r == 0 {
            break;
        }
        let next = (((r ^ mask) >> 2) / c) | r;
        if next > limit || next < mask {
            break;
        }
        mask = next;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HarperAudit {
    pub n: usize,
    pub instances: u64,
    pub failures: u64,
}

/// Draws `trials` random pairs `(S, k)` with `|S| >= |B_k|` and checks the
/// vertex-isoperimetric inequality on each.
pub fn harper_audit(n: usize, trials: u64, seed: u64) -> Result<HarperAudit> {
    if n == 0 || n > N_GEOM {
        return Err(out_of_range("n", n as f64, "1 <= n <= N_GEOM"));
    }
    let balls: Vec<u64> = (0..=n)
        .map(|k| half_ball(n, k).map(|b| b.size()))
        .collect::<Result<_>>()?;
    let len = 1u64 << n;
    let failures: u64 = exec::map_ranges(Exec::default(), trials as usize, 64, |r| {
        r.filter(|&i| {
            let mut rng = rng::tagged_stream(seed, TAG_HARPER + n as u64, i as u64);
            let k = rng.random_range(0..=n);
            let size = rng.random_range(balls[k]..=len);
            let f = BooleanFunction::random_with_ones(n, size, &mut rng);
            let s = SubsetMask::winners(&f).expect("valid dimension");
            !check_harper(&s, k).expect("precondition holds by construction").holds
        })
        .count() as u64
    })
    .into_iter()
    .sum();
    Ok(HarperAudit {
        n,
        instances: trials,
        failures,
    })
}

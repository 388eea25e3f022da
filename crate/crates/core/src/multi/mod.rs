//! k-candidate voting: plurality, agreement stability under vote resampling,
//! and ranked-ballot tournaments.

mod condorcet;

pub use condorcet::{
    condorcet_analysis, pairwise_tournament, CondorcetReport, RankedProfile, Tournament,
};

use rand::Rng;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::exec::{self, Exec};
use crate::function::BooleanFunction;
use crate::rng::{self, StreamRng};
use crate::stability::{McConfig, StabilityEstimate};

/// Dense k-candidate tables are capped at this many entries.
pub const N_MULTI: u64 = 16_000_000;
const CHUNK: usize = 1 << 14;
const TAG_TIE: u64 = 0x7E;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiVoteVector {
    k: u8,
    votes: Vec<u8>,
}

impl MultiVoteVector {
    pub fn new(votes: Vec<u8>, k: usize) -> Result<Self> {
        check_k(k)?;
        if votes.is_empty() {
            return Err(Error::EmptyElectorate);
        }
        if let Some(pos) = votes.iter().position(|&v| v as usize >= k) {
            return Err(Error::InvalidVote {
                position: pos + 1,
                value: votes[pos] as i64,
            });
        }
        Ok(MultiVoteVector { k: k as u8, votes })
    }

    /// The configuration at base-`k` `index`, voter 1 least significant.
    pub fn from_index(n: usize, k: usize, mut index: u64) -> Result<Self> {
        check_k(k)?;
        let mut votes = Vec::with_capacity(n);
        for _ in 0..n {
            votes.push((index % k as u64) as u8);
            index /= k as u64;
        }
        Self::new(votes, k)
    }

    pub fn index(&self) -> u64 {
        index_of(&self.votes, self.k as usize)
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.votes
    }

    pub fn counts(&self) -> Vec<u64> {
        tally(&self.votes, self.k as usize)
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(2..=255).contains(&k) {
        return Err(out_of_range("k", k as f64, "2 <= k <= 255"));
    }
    Ok(())
}

fn index_of(votes: &[u8], k: usize) -> u64 {
    votes.iter().rev().fold(0u64, |acc, &v| acc * k as u64 + v as u64)
}

fn tally(votes: &[u8], k: usize) -> Vec<u64> {
    let mut counts = vec![0u64; k];
    for &v in votes {
        counts[v as usize] += 1;
    }
    counts
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TieRule {
    #[default]
    LowestId,
    /// Uniform among the tied candidates, derived from the seed and the vote
    /// counts so that equal tallies always resolve the same way.
    SeededRandom { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PluralityOutcome {
    pub winner: usize,
    pub tie: bool,
}

pub fn plurality(votes: &MultiVoteVector, tie_rule: TieRule) -> PluralityOutcome {
    plurality_counts(&votes.counts(), tie_rule)
}

/// Plurality winner from per-candidate vote counts.
pub fn plurality_counts(counts: &[u64], tie_rule: TieRule) -> PluralityOutcome {
    let best = counts.iter().copied().max().unwrap_or(0);
    let mut tied = counts.iter().enumerate().filter(|(_, &c)| c == best).map(|(i, _)| i);
    let first = tied.next().unwrap_or(0);
    let rest: Vec<usize> = tied.collect();
    if rest.is_empty() {
        return PluralityOutcome {
            winner: first,
            tie: false,
        };
    }
    let winner = match tie_rule {
        TieRule::LowestId => first,
        TieRule::SeededRandom { seed } => {
            let key = counts.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &c| {
                (h ^ c).wrapping_mul(0x0000_0100_0000_01b3)
            });
            let pick = rng::tagged_stream(seed, TAG_TIE, key).random_range(0..=rest.len());
            if pick == 0 {
                first
            } else {
                rest[pick - 1]
            }
        }
    };
    PluralityOutcome { winner, tie: true }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Dense(Vec<u8>),
    Plurality(TieRule),
}

/// A voting method `{0..k-1}^n -> {0..k-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiFunction {
    n: usize,
    k: usize,
    repr: Repr,
}

impl MultiFunction {
    /// Dense table indexed base `k`, voter 1 least significant.
    pub fn from_table(n: usize, k: usize, table: Vec<u8>) -> Result<Self> {
        check_k(k)?;
        let len = table_len(n, k)?;
        if table.len() as u64 != len {
            return Err(Error::LengthMismatch {
                expected: len as usize,
                got: table.len(),
            });
        }
        if let Some(pos) = table.iter().position(|&c| c as usize >= k) {
            return Err(Error::InvalidVote {
                position: pos,
                value: table[pos] as i64,
            });
        }
        Ok(MultiFunction {
            n,
            k,
            repr: Repr::Dense(table),
        })
    }

    pub fn from_fn<F>(n: usize, k: usize, exec: Exec, f: F) -> Result<Self>
    where
        F: Fn(&[u8]) -> usize + Sync + Send,
    {
        check_k(k)?;
        let len = table_len(n, k)? as usize;
        let mut table = vec![0u8; len];
        exec::for_each_chunk_mut(exec, &mut table, CHUNK, |c, chunk| {
            let mut votes = vec![0u8; n];
            for (j, slot) in chunk.iter_mut().enumerate() {
                let mut idx = (c * CHUNK + j) as u64;
                for v in votes.iter_mut() {
                    *v = (idx % k as u64) as u8;
                    idx /= k as u64;
                }
                *slot = f(&votes) as u8;
            }
        });
        Self::from_table(n, k, table)
    }

    /// Plurality on `n` voters, evaluated lazily.
    pub fn plurality(n: usize, k: usize, tie_rule: TieRule) -> Result<Self> {
        check_k(k)?;
        if n == 0 {
            return Err(Error::EmptyElectorate);
        }
        Ok(MultiFunction {
            n,
            k,
            repr: Repr::Plurality(tie_rule),
        })
    }

    /// The `k = 2` relabeling of a `±1` function: candidate 0 is `+1`.
    pub fn from_boolean(f: &BooleanFunction) -> Result<Self> {
        let n = f.n();
        let mask = (1u64 << n) - 1;
        let table = (0..1u64 << n)
            .map(|m| if f.value(!m & mask) > 0 { 0 } else { 1 })
            .collect();
        Self::from_table(n, 2, table)
    }

    pub fn to_boolean(&self) -> Result<BooleanFunction> {
        if self.k != 2 {
            return Err(out_of_range("k", self.k as f64, "k = 2"));
        }
        let dense = self.to_dense()?;
        let mask = (1u64 << self.n) - 1;
        Ok(BooleanFunction::from_fn(self.n, Exec::Sequential, |b| {
            dense.table()[(!b & mask) as usize] == 0
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// The dense table; panics on a lazy representation.
    pub fn table(&self) -> &[u8] {
        match &self.repr {
            Repr::Dense(t) => t,
            Repr::Plurality(_) => panic!("table() on a lazy plurality function"),
        }
    }

    pub fn to_dense(&self) -> Result<MultiFunction> {
        match self.repr {
            Repr::Dense(_) => Ok(self.clone()),
            Repr::Plurality(rule) => {
                let k = self.k;
                Self::from_fn(self.n, k, Exec::default(), move |v| {
                    plurality_counts(&tally(v, k), rule).winner
                })
            }
        }
    }

    pub fn eval(&self, votes: &[u8]) -> Result<usize> {
        if votes.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: votes.len(),
            });
        }
        if let Some(pos) = votes.iter().position(|&v| v as usize >= self.k) {
            return Err(Error::InvalidVote {
                position: pos + 1,
                value: votes[pos] as i64,
            });
        }
        Ok(self.eval_unchecked(votes))
    }

    fn eval_unchecked(&self, votes: &[u8]) -> usize {
        match &self.repr {
            Repr::Dense(t) => t[index_of(votes, self.k) as usize] as usize,
            Repr::Plurality(rule) => plurality_counts(&tally(votes, self.k), *rule).winner,
        }
    }

    /// Number of inputs won by each candidate (dense only).
    pub fn win_counts(&self) -> Result<Vec<u64>> {
        let dense = self.to_dense()?;
        Ok(tally(dense.table(), self.k))
    }
}

fn table_len(n: usize, k: usize) -> Result<u64> {
    (k as u64)
        .checked_pow(n as u32)
        .filter(|&l| l <= N_MULTI)
        .ok_or(Error::TooLarge {
            n,
            limit: (N_MULTI as f64).ln().div_euclid((k as f64).ln()) as usize,
        })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Engine {
    Exact,
    MonteCarlo(McConfig),
}

/// `P[f(X) = f(Y)]` for uniform `X` and `Y` keeping each vote with
/// probability `rho`, otherwise redrawing it uniformly.
pub fn stability_k(f: &MultiFunction, rho: f64, engine: Engine) -> Result<StabilityEstimate> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(out_of_range("rho", rho, "[0, 1]"));
    }
    match engine {
        Engine::Exact => stability_k_exact(f, rho, Exec::default()).map(StabilityEstimate::exact),
        Engine::MonteCarlo(cfg) => stability_k_mc(f, rho, &cfg),
    }
}

/// Exact agreement probability by averaging each candidate's indicator
/// table one coordinate at a time.
pub fn stability_k_exact(f: &MultiFunction, rho: f64, exec: Exec) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(out_of_range("rho", rho, "[0, 1]"));
    }
    let dense = f.to_dense()?;
    let table = dense.table();
    let (n, k) = (f.n, f.k);
    let len = table.len();
    let mut total = 0.0;
    for c in 0..k as u8 {
        let mut g: Vec<f64> = table.iter().map(|&v| (v == c) as u8 as f64).collect();
        let mut stride = 1usize;
        for _ in 0..n {
            let block = stride * k;
            let chunk = block * (CHUNK / block).max(1);
            exec::for_each_chunk_mut(exec, &mut g, chunk, |_, part| {
                for b in part.chunks_mut(block) {
                    for lo in 0..stride {
                        let mean = (0..k).map(|j| b[lo + j * stride]).sum::<f64>() / k as f64;
                        for j in 0..k {
                            let v = &mut b[lo + j * stride];
                            *v = rho * *v + (1.0 - rho) * mean;
                        }
                    }
                }
            });
            stride = block;
        }
        total += exec::map_ranges(exec, len, CHUNK, |r| {
            r.filter(|&i| table[i] == c).map(|i| g[i]).sum::<f64>()
        })
        .into_iter()
        .sum::<f64>();
    }
    Ok(total / len as f64)
}

/// Draws one `(X, Y)` pair into the buffers.
pub fn sample_pair(rng: &mut StreamRng, k: usize, rho: f64, x: &mut [u8], y: &mut [u8]) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        *a = rng.random_range(0..k as u8);
        *b = if rng.random::<f64>() < rho {
            *a
        } else {
            rng.random_range(0..k as u8)
        };
    }
}

pub fn stability_k_mc(f: &MultiFunction, rho: f64, cfg: &McConfig) -> Result<StabilityEstimate> {
    if cfg.samples == 0 {
        return Err(out_of_range("samples", 0.0, "samples >= 1"));
    }
    let (n, k) = (f.n, f.k);
    let agree = crate::stability::mc::count_successes(cfg.samples, cfg.seed, cfg.exec, |rng| {
        let mut x = vec![0u8; n];
        let mut y = vec![0u8; n];
        sample_pair(rng, k, rho, &mut x, &mut y);
        f.eval_unchecked(&x) == f.eval_unchecked(&y)
    });
    let m = cfg.samples as f64;
    let p = agree as f64 / m;
    let stderr = if cfg.samples > 1 {
        (p * (1.0 - p) / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(StabilityEstimate {
        value: p,
        stderr,
        samples: cfg.samples,
        seed: Some(cfg.seed),
        exact: false,
    })
}

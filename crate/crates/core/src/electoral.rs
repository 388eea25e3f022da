//! State-structured two-tier elections and the corruption-flip comparison
//! between an electoral college and a national majority.

use std::path::Path;

use log::warn;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::cube::VoteVector;
use crate::error::{out_of_range, Error, Result};
use crate::exec::Exec;
use crate::stability::{asymptotic_flip_ratio, mc::count_successes};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpec {
    pub name: String,
    /// Always odd.
    pub voters: u64,
    pub electors: u64,
}

impl StateSpec {
    /// Even voter counts are rounded up to the next odd number.
    pub fn new(name: impl Into<String>, voters: u64, electors: u64) -> Result<Self> {
        let name = name.into();
        if voters == 0 {
            return Err(out_of_range("voters", 0.0, "voters >= 1"));
        }
        if electors == 0 {
            return Err(out_of_range("electors", 0.0, "electors >= 1"));
        }
        let voters = if voters % 2 == 0 {
            warn!("state {name:?}: even voter count {voters} rounded up to {}", voters + 1);
            voters + 1
        } else {
            voters
        };
        Ok(StateSpec {
            name,
            voters,
            electors,
        })
    }
}

/// `m` identical states.
pub fn equal_states(m: usize, voters: u64, electors: u64) -> Result<Vec<StateSpec>> {
    (1..=m)
        .map(|i| StateSpec::new(format!("S{i}"), voters, electors))
        .collect()
}

/// Multiplies every state's voter count by `factor`, keeping counts odd.
pub fn scale_voters(states: &[StateSpec], factor: u64) -> Result<Vec<StateSpec>> {
    if factor == 0 {
        return Err(out_of_range("factor", 0.0, "factor >= 1"));
    }
    states
        .iter()
        .map(|s| {
            let v = s.voters.checked_mul(factor).ok_or(Error::TooLarge {
                n: usize::MAX,
                limit: u64::MAX as usize,
            })?;
            Ok(StateSpec {
                name: s.name.clone(),
                voters: v | 1,
                electors: s.electors,
            })
        })
        .collect()
}

/// Sum over states of the probability that the state is pivotal in the
/// weighted second tier when state outcomes are uniform. As `eps -> 0` with
/// large states this is the EC/majority flip ratio for any elector weights.
pub fn small_noise_ratio(states: &[StateSpec]) -> f64 {
    let total: u64 = states.iter().map(|s| s.electors).sum();
    let width = 2 * total as usize + 1;
    states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            // Distribution of the other states' signed elector margin.
            let mut dist = vec![0.0f64; width];
            dist[total as usize] = 1.0;
            for (j, o) in states.iter().enumerate() {
                if j == i {
                    continue;
                }
                let e = o.electors as usize;
                let mut next = vec![0.0f64; width];
                for (k, &p) in dist.iter().enumerate().filter(|(_, &p)| p > 0.0) {
                    next[k + e] += 0.5 * p;
                    next[k - e] += 0.5 * p;
                }
                dist = next;
            }
            let e = s.electors as i64;
            dist.iter()
                .enumerate()
                .filter(|&(k, _)| {
                    let m = k as i64 - total as i64;
                    (m + e >= 0) != (m - e >= 0)
                })
                .map(|(_, &p)| p)
                .sum::<f64>()
        })
        .sum()
}

/// Reads a CSV with header `name,voters,electors`; `#` starts a comment line.
pub fn load_states(path: impl AsRef<Path>) -> Result<Vec<StateSpec>> {
    parse_states(&std::fs::read_to_string(path)?)
}

pub fn parse_states(text: &str) -> Result<Vec<StateSpec>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Csv {
        line: e.position().map_or(1, |p| p.line()),
        message: e.to_string(),
    })?;
    let expected = ["name", "voters", "electors"];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Csv {
            line: header.position().map_or(1, |p| p.line()),
            message: format!("header must be name,voters,electors, found {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut states = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Csv { line, message };
        let field = |i: usize, what: &str| -> Result<u64> {
            let raw = rec.get(i).unwrap_or("");
            raw.parse::<u64>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| bad(format!("{what} must be a positive integer, found {raw:?}")))
        };
        let name = rec.get(0).unwrap_or("");
        if name.is_empty() {
            return Err(bad("empty state name".into()));
        }
        states.push(StateSpec::new(name, field(1, "voters")?, field(2, "electors")?)?);
    }
    if states.is_empty() {
        return Err(Error::EmptyElectorate);
    }
    Ok(states)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EcOutcome {
    pub winner: i8,
    /// The elector totals were equal and the zero rule decided.
    pub tie: bool,
}

/// Weighted majority of state majorities.
pub fn ec_outcome(votes: &[VoteVector], states: &[StateSpec]) -> Result<EcOutcome> {
    if votes.len() != states.len() {
        return Err(Error::LengthMismatch {
            expected: states.len(),
            got: votes.len(),
        });
    }
    let mut plus = Vec::with_capacity(states.len());
    for (v, s) in votes.iter().zip(states) {
        if v.len() as u64 != s.voters {
            return Err(Error::LengthMismatch {
                expected: s.voters as usize,
                got: v.len(),
            });
        }
        plus.push(v.plus_count() as u64);
    }
    Ok(ec_from_counts(&plus, states))
}

/// Electoral outcome from per-state `+1` counts.
pub fn ec_from_counts(plus: &[u64], states: &[StateSpec]) -> EcOutcome {
    let margin: i64 = plus
        .iter()
        .zip(states)
        .map(|(&a, s)| {
            let e = s.electors as i64;
            if 2 * a >= s.voters {
                e
            } else {
                -e
            }
        })
        .sum();
    EcOutcome {
        winner: if margin >= 0 { 1 } else { -1 },
        tie: margin == 0,
    }
}

fn national_from_counts(plus: &[u64], total: u64) -> i8 {
    if 2 * plus.iter().sum::<u64>() >= total {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EcScenario {
    pub states: Vec<StateSpec>,
    pub epsilon: f64,
    pub samples: u64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl EcScenario {
    pub fn new(states: Vec<StateSpec>, epsilon: f64, samples: u64, seed: u64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyElectorate);
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(out_of_range("epsilon", epsilon, "0 < epsilon < 1/2"));
        }
        if samples == 0 {
            return Err(out_of_range("samples", 0.0, "samples >= 1"));
        }
        Ok(EcScenario {
            states,
            epsilon,
            samples,
            seed,
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn total_voters(&self) -> u64 {
        self.states.iter().map(|s| s.voters).sum()
    }

    pub fn rho(&self) -> f64 {
        1.0 - 2.0 * self.epsilon
    }

    /// Number of states when all states share voters and electors.
    fn equal_states(&self) -> Option<u32> {
        let first = &self.states[0];
        self.states
            .iter()
            .all(|s| s.voters == first.voters && s.electors == first.electors)
            .then_some(self.states.len() as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    NationalMajority,
    ElectoralCollege,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipEstimate {
    pub probability: f64,
    pub stderr: f64,
    pub flips: u64,
    pub samples: u64,
    pub seed: u64,
}

impl FlipEstimate {
    fn new(flips: u64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let p = flips as f64 / n;
        let stderr = if samples > 1 {
            (p * (1.0 - p) / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        FlipEstimate {
            probability: p,
            stderr,
            flips,
            samples,
            seed,
        }
    }
}

/// Per-state samplers. Each voter flips independently of its vote, so a
/// state is drawn as `F ~ Bin(n, eps)` flipped voters, of whom
/// `Bin(F, 1/2)` voted `+1`, and `Bin(n - F, 1/2)` `+1` votes among the
/// rest. Distributions for the likely values of `F` are built once.
struct StateSampler {
    voters: u64,
    flipped: Binomial,
    flipped_plus: Vec<Binomial>,
    kept_plus: Vec<Binomial>,
}

impl StateSampler {
    fn new(voters: u64, eps: f64) -> Self {
        let mean = voters as f64 * eps;
        let cap = (mean + 8.0 * mean.sqrt() + 16.0).ceil().min(voters as f64) as u64;
        StateSampler {
            voters,
            flipped: Binomial::new(voters, eps).expect("valid"),
            flipped_plus: (0..=cap).map(|f| Binomial::new(f, 0.5).expect("valid")).collect(),
            kept_plus: (0..=cap)
                .map(|f| Binomial::new(voters - f, 0.5).expect("valid"))
                .collect(),
        }
    }

    /// `+1` counts before and after corruption.
    fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        let f = self.flipped.sample(rng);
        let (lost, kept) = match (self.flipped_plus.get(f as usize), self.kept_plus.get(f as usize)) {
            (Some(a), Some(b)) => (a.sample(rng), b.sample(rng)),
            _ => (
                Binomial::new(f, 0.5).expect("valid").sample(rng),
                Binomial::new(self.voters - f, 0.5).expect("valid").sample(rng),
            ),
        };
        (kept + lost, kept + (f - lost))
    }
}

fn samplers(scenario: &EcScenario) -> Vec<StateSampler> {
    scenario
        .states
        .iter()
        .map(|s| StateSampler::new(s.voters, scenario.epsilon))
        .collect()
}

/// Per-sample flip indicators for both tiers.
#[derive(Clone, Copy, Default)]
struct Flips {
    ec: bool,
    national: bool,
    ec_tie: bool,
}

fn draw_flips<R: rand::Rng + ?Sized>(
    states: &[StateSpec],
    samplers: &[StateSampler],
    total: u64,
    rng: &mut R,
    xs: &mut Vec<u64>,
    ys: &mut Vec<u64>,
) -> Flips {
    xs.clear();
    ys.clear();
    for s in samplers {
        let (x, y) = s.draw(rng);
        xs.push(x);
        ys.push(y);
    }
    let (ex, ey) = (ec_from_counts(xs, states), ec_from_counts(ys, states));
    Flips {
        ec: ex.winner != ey.winner,
        national: national_from_counts(xs, total) != national_from_counts(ys, total),
        ec_tie: ex.tie || ey.tie,
    }
}

fn simulate<F>(scenario: &EcScenario, pick: F) -> u64
where
    F: Fn(Flips) -> bool + Sync + Send,
{
    let states = &scenario.states;
    let samplers = samplers(scenario);
    let total = scenario.total_voters();
    count_successes(scenario.samples, scenario.seed, scenario.exec, |rng| {
        let mut xs = Vec::with_capacity(states.len());
        let mut ys = Vec::with_capacity(states.len());
        pick(draw_flips(states, &samplers, total, rng, &mut xs, &mut ys))
    })
}

/// Seeded estimate of `P[outcome(X) != outcome(Y)]`.
pub fn flip_prob_mc(tier: Tier, scenario: &EcScenario) -> FlipEstimate {
    let flips = simulate(scenario, |f| match tier {
        Tier::NationalMajority => f.national,
        Tier::ElectoralCollege => f.ec,
    });
    FlipEstimate::new(flips, scenario.samples, scenario.seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EcComparison {
    pub states: usize,
    pub total_voters: u64,
    pub total_electors: u64,
    pub epsilon: f64,
    pub samples: u64,
    pub seed: u64,
    pub electoral_college: FlipEstimate,
    pub national_majority: FlipEstimate,
    /// Samples where both methods flipped.
    pub joint_flips: u64,
    /// Samples where an elector tie was broken by the zero rule.
    pub ec_ties: u64,
    pub ratio: Option<f64>,
    pub ratio_stderr: Option<f64>,
    /// Small-noise ratio for equal states, `2 (2/pi)^(3/2) sqrt(m) / (4/pi)`.
    pub asymptotic_ratio: Option<f64>,
    /// Small-noise ratio for the actual elector weights; see
    /// [`small_noise_ratio`].
    pub weighted_ratio: f64,
}

/// Both flip probabilities from the same simulated elections, so their ratio
/// is estimated with correlated errors.
pub fn compare_ec_vs_majority(scenario: &EcScenario) -> EcComparison {
    let states = &scenario.states;
    let samplers = samplers(scenario);
    let total = scenario.total_voters();
    let eps = scenario.epsilon;
    const CHUNK: usize = 1 << 12;
    let tallies = crate::exec::map_ranges(scenario.exec, scenario.samples as usize, CHUNK, |r| {
        let mut xs = Vec::with_capacity(states.len());
        let mut ys = Vec::with_capacity(states.len());
        let mut t = [0u64; 4];
        for i in r {
            let mut rng = crate::rng::stream(scenario.seed, i as u64);
            let f = draw_flips(states, &samplers, total, &mut rng, &mut xs, &mut ys);
            t[0] += f.ec as u64;
            t[1] += f.national as u64;
            t[2] += (f.ec && f.national) as u64;
            t[3] += f.ec_tie as u64;
        }
        t
    });
    let t = tallies.into_iter().fold([0u64; 4], |mut acc, t| {
        for (a, b) in acc.iter_mut().zip(t) {
            *a += b;
        }
        acc
    });
    let n = scenario.samples as f64;
    let ec = FlipEstimate::new(t[0], scenario.samples, scenario.seed);
    let nat = FlipEstimate::new(t[1], scenario.samples, scenario.seed);
    let (ratio, ratio_stderr) = if t[1] > 0 && t[0] > 0 {
        let (pe, pm, pj) = (ec.probability, nat.probability, t[2] as f64 / n);
        let r = pe / pm;
        let rel_var = (pe * (1.0 - pe)) / (pe * pe) + (pm * (1.0 - pm)) / (pm * pm)
            - 2.0 * (pj - pe * pm) / (pe * pm);
        (Some(r), Some(r * (rel_var.max(0.0) / n).sqrt()))
    } else {
        (None, None)
    };
    EcComparison {
        states: states.len(),
        total_voters: total,
        total_electors: states.iter().map(|s| s.electors).sum(),
        epsilon: eps,
        samples: scenario.samples,
        seed: scenario.seed,
        electoral_college: ec,
        national_majority: nat,
        joint_flips: t[2],
        ec_ties: t[3],
        ratio,
        ratio_stderr,
        asymptotic_ratio: scenario.equal_states().and_then(|m| asymptotic_flip_ratio(m).ok()),
        weighted_ratio: small_noise_ratio(states),
    }
}

/// Runs the comparison at each `epsilon` with the scenario's other settings.
pub fn epsilon_sweep(scenario: &EcScenario, epsilons: &[f64]) -> Result<Vec<EcComparison>> {
    epsilons
        .iter()
        .map(|&eps| {
            let s = EcScenario::new(scenario.states.clone(), eps, scenario.samples, scenario.seed)?
                .with_exec(scenario.exec);
            Ok(compare_ec_vs_majority(&s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn votes(x: &[i8]) -> VoteVector {
        VoteVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn outcomes() {
        let three = equal_states(3, 3, 1).unwrap();
        let all = vec![votes(&[1, 1, 1]); 3];
        assert_eq!(ec_outcome(&all, &three).unwrap().winner, 1);
        let split = [votes(&[1, 1, -1]), votes(&[1, -1, 1]), votes(&[-1, -1, 1])];
        assert_eq!(ec_outcome(&split, &three).unwrap(), EcOutcome { winner: 1, tie: false });
        let weighted = vec![
            StateSpec::new("A", 3, 3).unwrap(),
            StateSpec::new("B", 3, 1).unwrap(),
            StateSpec::new("C", 3, 1).unwrap(),
        ];
        let v = [votes(&[-1, -1, 1]), votes(&[1, 1, 1]), votes(&[1, 1, -1])];
        assert_eq!(ec_outcome(&v, &weighted).unwrap().winner, -1);
        let tied = equal_states(2, 1, 1).unwrap();
        assert_eq!(
            ec_outcome(&[votes(&[1]), votes(&[-1])], &tied).unwrap(),
            EcOutcome { winner: 1, tie: true }
        );
        assert!(ec_outcome(&[votes(&[1])], &tied).is_err());
        assert!(ec_outcome(&[votes(&[1, 1]), votes(&[1])], &tied).is_err());
    }

    #[test]
    fn loading() {
        let s = parse_states("name,voters,electors\nA,10000,3\n# note\nB, 5 ,1\n").unwrap();
        assert_eq!(s[0].voters, 10001);
        assert_eq!(s[1], StateSpec::new("B", 5, 1).unwrap());
        match parse_states("name,voters,electors\nA,3,1\nB,x,1\n") {
            Err(Error::Csv { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("voters"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_states("name,voters,electors\nA,3,0\n").is_err());
        assert!(parse_states("state,voters,electors\nA,3,1\n").is_err());
        assert!(parse_states("name,voters,electors\n").is_err());
        let census = parse_states(include_str!("../data/census2010_synthetic.csv")).unwrap();
        assert_eq!(census.len(), 51);
        assert_eq!(census.iter().map(|s| s.electors).sum::<u64>(), 538);
    }

    #[test]
    fn pivotal_ratio() {
        // Three equal states: each pivotal with probability 1/2.
        assert!((small_noise_ratio(&equal_states(3, 1, 1).unwrap()) - 1.5).abs() < 1e-15);
        // One dominant state decides alone.
        let w = vec![
            StateSpec::new("A", 1, 5).unwrap(),
            StateSpec::new("B", 1, 1).unwrap(),
            StateSpec::new("C", 1, 1).unwrap(),
        ];
        assert!((small_noise_ratio(&w) - 1.0).abs() < 1e-15);
        let scaled = scale_voters(&w, 10).unwrap();
        assert_eq!(scaled[0].voters, 11);
    }

    #[test]
    fn single_state_is_majority() {
        let s = EcScenario::new(equal_states(1, 1001, 3).unwrap(), 0.01, 20_000, 5).unwrap();
        let r = compare_ec_vs_majority(&s);
        assert_eq!(r.electoral_college.flips, r.national_majority.flips);
        assert_eq!(r.ratio, Some(1.0));
        assert_eq!(r.ratio_stderr, Some(0.0));
    }

    #[test]
    fn tiny_noise_never_flips() {
        let s = EcScenario::new(equal_states(51, 10001, 1).unwrap(), 1e-9, 10_000, 1).unwrap();
        let r = compare_ec_vs_majority(&s);
        assert_eq!(r.electoral_college.flips, 0);
        assert_eq!(r.national_majority.flips, 0);
        assert_eq!(r.ratio, None);
        assert!((r.asymptotic_ratio.unwrap() - 5.698035).abs() < 1e-6);
    }

    #[test]
    fn comparison_matches_single_tier_estimates() {
        let s = EcScenario::new(equal_states(5, 101, 1).unwrap(), 0.01, 20_000, 11).unwrap();
        let r = compare_ec_vs_majority(&s);
        assert_eq!(flip_prob_mc(Tier::ElectoralCollege, &s), r.electoral_college);
        assert_eq!(flip_prob_mc(Tier::NationalMajority, &s), r.national_majority);
        assert!(r.electoral_college.probability > r.national_majority.probability);
    }

    #[test]
    fn thread_invariant() {
        let s = EcScenario::new(equal_states(7, 201, 2).unwrap(), 0.02, 30_000, 4).unwrap();
        let a = compare_ec_vs_majority(&s.clone().with_exec(Exec::Sequential));
        let b = compare_ec_vs_majority(&s.with_exec(Exec::Parallel));
        assert_eq!(a, b);
    }
}

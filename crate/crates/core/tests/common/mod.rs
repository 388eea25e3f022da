//! Brute-force oracles and shared invariant checks. Everything here is
//! deliberately naive: direct enumeration over points or pairs of points,
//! with no use of the library's kernels beyond evaluation.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabvote_core::geometry::{self, SubsetMask};
use stabvote_core::multi::{self, MultiFunction, RankedProfile, TieRule};
use stabvote_core::stability::{self, CorruptionModel};
use stabvote_core::{power, BiasedMeasure, BooleanFunction, Exec, Method, MethodSpec, Partition, UnEra};

pub type Check = Result<(), String>;

pub fn config(cases: u32) -> proptest::prelude::ProptestConfig {
    proptest::prelude::ProptestConfig {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vote of voter `i` (0-based) at `idx`.
pub fn vote(idx: u64, i: usize) -> i8 {
    if idx >> i & 1 == 1 {
        1
    } else {
        -1
    }
}

pub fn votes(idx: u64, n: usize) -> Vec<i8> {
    (0..n).map(|i| vote(idx, i)).collect()
}

pub fn values(f: &BooleanFunction) -> Vec<i8> {
    (0..1u64 << f.n()).map(|x| f.value(x)).collect()
}

/// `sum_x sum_y mu(x) P(y | x) f(x) f(y)`, with each coordinate kept with
/// probability `rho` and otherwise redrawn from the `p`-biased marginal.
pub fn pair_stability(f: &[i8], n: usize, rho: f64, p: f64) -> f64 {
    let len = 1u64 << n;
    let marginal = |v: i8| if v > 0 { p } else { 1.0 - p };
    let mut total = 0.0;
    for x in 0..len {
        let mu: f64 = (0..n).map(|i| marginal(vote(x, i))).product();
        for y in 0..len {
            let mut t = 1.0;
            for i in 0..n {
                let (a, b) = (vote(x, i), vote(y, i));
                t *= if a == b { rho } else { 0.0 } + (1.0 - rho) * marginal(b);
            }
            total += mu * t * (f[x as usize] as f64) * (f[y as usize] as f64);
        }
    }
    total
}

/// Number of `x` with `x_i = +1` at which flipping voter `i` changes `f`.
pub fn naive_pivotal(f: &[i8], n: usize, i: usize) -> u64 {
    (0..1u64 << n)
        .filter(|&x| vote(x, i) == 1 && f[x as usize] != f[(x ^ 1 << i) as usize])
        .count() as u64
}

/// Direct reading of the Security Council rule.
pub fn un_rule(x: &[i8], era: UnEra) -> i8 {
    let permanent_yes = x[..5].iter().all(|&v| v == 1);
    let elected_yes = x[5..].iter().filter(|&&v| v == 1).count();
    if permanent_yes && elected_yes >= era.required_nonpermanent() {
        1
    } else {
        -1
    }
}

/// All points within Hamming distance `k` of some member.
pub fn naive_neighborhood(set: &[bool], n: usize, k: usize) -> Vec<bool> {
    let len = 1usize << n;
    (0..len)
        .map(|y| (0..len).any(|x| set[x] && ((x ^ y) as u64).count_ones() as usize <= k))
        .collect()
}

/// Points whose outcome some change of at most `k` votes reverses.
pub fn naive_vulnerable(f: &[i8], n: usize, k: usize) -> u64 {
    let len = 1usize << n;
    (0..len)
        .filter(|&x| (0..len).any(|y| ((x ^ y) as u64).count_ones() as usize <= k && f[x] != f[y]))
        .count() as u64
}

/// `sum_x sum_y k^-n P(y | x) [f(x) = f(y)]` over base-`k` indices.
pub fn pair_agreement(table: &[u8], n: usize, k: usize, rho: f64) -> f64 {
    let len = table.len();
    let digits = |mut idx: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let d = idx % k;
                idx /= k;
                d
            })
            .collect()
    };
    let all: Vec<Vec<usize>> = (0..len).map(digits).collect();
    let stay = rho + (1.0 - rho) / k as f64;
    let move_ = (1.0 - rho) / k as f64;
    let mut total = 0.0;
    for x in 0..len {
        for y in 0..len {
            if table[x] != table[y] {
                continue;
            }
            let p: f64 = (0..n)
                .map(|i| if all[x][i] == all[y][i] { stay } else { move_ })
                .product();
            total += p;
        }
    }
    total / len as f64
}

/// `C(n - 1, (n - 1) / 2)` for odd `n`, by exact integer arithmetic.
pub fn majority_pivotal_count(n: u64) -> u128 {
    let m = n - 1;
    let mut c: u128 = 1;
    for j in 0..m / 2 {
        c = c * (m - j) as u128 / (j + 1) as u128;
    }
    c
}

/// Random structured specs on at most `max_n` voters.
pub fn random_spec<R: Rng>(rng: &mut R, max_n: usize) -> (MethodSpec, usize) {
    let n = rng.random_range(1..=max_n);
    match rng.random_range(0..5) {
        0 => (
            MethodSpec::Dictator {
                index: rng.random_range(1..=n),
            },
            n,
        ),
        1 => (MethodSpec::Majority, n),
        2 => (
            MethodSpec::ThresholdMajority {
                threshold: rng.random_range(-(n as i64) - 1..=n as i64 + 1) as f64,
            },
            n,
        ),
        3 => {
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0..5) as f64 * 0.5).collect();
            let threshold = rng.random_range(-4..=4) as f64 * 0.5;
            (MethodSpec::WeightedMajority { weights, threshold }, n)
        }
        _ => {
            let mut sizes = Vec::new();
            let mut left = n;
            while left > 0 {
                let s = rng.random_range(1..=left);
                sizes.push(s);
                left -= s;
            }
            (
                MethodSpec::TwoTier {
                    partition: Partition::Sizes(sizes),
                    inner: Box::new(MethodSpec::Majority),
                    outer: Box::new(MethodSpec::Majority),
                },
                n,
            )
        }
    }
}

/// The structured methods used by the exhaustive suites, all with `n <= max_n`.
pub fn structured_methods(max_n: usize) -> Vec<(String, Method)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push((format!("maj{n}"), Method::majority(n).unwrap()));
        out.push((format!("dict{n}"), Method::dictator(n, n).unwrap()));
        out.push((format!("tmaj{n},2"), Method::threshold(n, 2.0).unwrap()));
        out.push((format!("tmaj{n},-1"), Method::threshold(n, -1.0).unwrap()));
    }
    let extra: Vec<(&str, Method)> = vec![
        ("wmaj(3,1,1)", Method::weighted(vec![3.0, 1.0, 1.0], 0.0).unwrap()),
        ("wmaj(2,2,1,1,1)", Method::weighted(vec![2.0, 2.0, 1.0, 1.0, 1.0], 0.0).unwrap()),
        ("two-tier(3,3)", Method::two_tier(vec![3, 3], None).unwrap()),
        ("two-tier(3,3,1)", Method::two_tier(vec![3, 3, 1], None).unwrap()),
        ("two-tier(3,3,3)", Method::two_tier(vec![3, 3, 3], None).unwrap()),
        ("two-tier(3,1,1;3,1,1)", Method::two_tier(vec![3, 1, 1], Some(vec![3.0, 1.0, 1.0])).unwrap()),
        ("two-tier(5,5)", Method::two_tier(vec![5, 5], None).unwrap()),
        ("un-pre1965", Method::un_council(UnEra::Pre1965)),
    ];
    out.extend(
        extra
            .into_iter()
            .filter(|(_, m)| m.n() <= max_n)
            .map(|(s, m)| (s.to_string(), m)),
    );
    out
}

/// Random balanced function with every influence at most `cap`: a random
/// self-dual weighted majority, perturbed by swapping antipodal pairs.
pub fn low_influence_balanced<R: Rng>(rng: &mut R, n: usize, cap: f64) -> BooleanFunction {
    loop {
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let mut vals: Vec<bool> = (0..1u64 << n)
            .map(|x| (0..n).map(|i| weights[i] * vote(x, i) as f64).sum::<f64>() > 0.0)
            .collect();
        let mask = (1usize << n) - 1;
        for _ in 0..rng.random_range(0..8) {
            let x = rng.random_range(0..1usize << n);
            vals[x] = !vals[x];
            vals[!x & mask] = !vals[!x & mask];
        }
        let f = BooleanFunction::from_fn(n, Exec::Sequential, |x| vals[x as usize]);
        let limit = cap * (1u64 << (n - 1)) as f64;
        if f.is_balanced() && power::pivotal_counts(&f).iter().all(|&b| b as f64 <= limit) {
            return f;
        }
    }
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn rho_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// S_rho nondecreasing on a 101-point grid for structured methods with
/// `n <= 12` and `random` random functions with `n <= 10`.
pub fn check_stability_monotone(random: usize, seed: u64) -> Check {
    let grid = rho_grid(101);
    let mut fs: Vec<(String, BooleanFunction)> = structured_methods(12)
        .into_iter()
        .map(|(s, m)| (s, m.to_dense().unwrap()))
        .collect();
    let mut r = rng(seed);
    for j in 0..random {
        let n = r.random_range(1..=10);
        fs.push((format!("random#{j} n={n}"), BooleanFunction::random(n, &mut r)));
    }
    for (name, f) in &fs {
        let mut prev = f64::NEG_INFINITY;
        for &rho in &grid {
            let s = stability::stability_exact(f, &CorruptionModel::uniform(rho).unwrap())
                .unwrap()
                .value;
            ensure(s >= prev - 1e-12, || format!("{name}: S drops at rho={rho}: {prev} -> {s}"))?;
            prev = s;
        }
    }
    Ok(())
}

/// S_1 = 1 and S_0 = (E f)^2 exactly.
pub fn check_stability_endpoints(random: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut fs: Vec<BooleanFunction> = structured_methods(12)
        .into_iter()
        .map(|(_, m)| m.to_dense().unwrap())
        .collect();
    fs.extend((0..random).map(|_| {
        let n = r.random_range(1..=12);
        BooleanFunction::random(n, &mut r)
    }));
    for f in &fs {
        let s1 = stability::stability_exact(f, &CorruptionModel::uniform(1.0).unwrap()).unwrap();
        let s0 = stability::stability_exact(f, &CorruptionModel::uniform(0.0).unwrap()).unwrap();
        let mean = f.expectation(&BiasedMeasure::uniform()).value;
        ensure(s1.value == 1.0, || format!("S_1 = {} on {}", s1.value, f.to_hex()))?;
        ensure(s0.value == mean * mean, || {
            format!("S_0 = {} but (Ef)^2 = {} (n={})", s0.value, mean * mean, f.n())
        })?;
    }
    Ok(())
}

/// Exact stability against the pair oracle for `n <= 8`.
pub fn check_stability_oracle(random: usize, seed: u64, rhos: &[f64]) -> Check {
    let mut r = rng(seed);
    let mut fs: Vec<(String, BooleanFunction)> = structured_methods(8)
        .into_iter()
        .map(|(s, m)| (s, m.to_dense().unwrap()))
        .collect();
    for j in 0..random {
        let n = r.random_range(1..=8);
        fs.push((format!("random#{j}"), BooleanFunction::random(n, &mut r)));
    }
    for (name, f) in &fs {
        let vals = values(f);
        for &rho in rhos {
            let got = stability::stability_exact(f, &CorruptionModel::uniform(rho).unwrap())
                .unwrap()
                .value;
            let want = pair_stability(&vals, f.n(), rho, 0.5);
            ensure((got - want).abs() <= 1e-12, || {
                format!("{name} rho={rho}: engine {got} oracle {want}")
            })?;
        }
    }
    Ok(())
}

fn random_mask<R: Rng>(r: &mut R, n: usize, density: f64) -> SubsetMask {
    let pts: Vec<u64> = (0..1u64 << n).filter(|_| r.random_bool(density)).collect();
    SubsetMask::from_indices(n, pts).unwrap()
}

/// Monotonicity, extensivity, growth and composition of Γ on random sets
/// with `n <= 12`.
pub fn check_gamma_laws(trials: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for _ in 0..trials {
        let n = r.random_range(1..=12);
        let density = r.random_range(0.0..0.2);
        let s = random_mask(&mut r, n, density);
        let extra = random_mask(&mut r, n, 0.05);
        let t = SubsetMask::from_fn(n, |x| s.contains(x) || extra.contains(x)).unwrap();
        let j = r.random_range(0..=n);
        let k = r.random_range(0..=n - j);
        let gs = geometry::neighborhood(&s, k).unwrap();
        let gt = geometry::neighborhood(&t, k).unwrap();
        ensure(gs.is_subset_of(&gt), || format!("Γ_{k} not monotone (n={n})"))?;
        ensure(s.is_subset_of(&gs), || format!("Γ_{k}(S) misses S (n={n})"))?;
        if k < n {
            let next = geometry::neighborhood(&s, k + 1).unwrap();
            ensure(next.size() >= gs.size(), || format!("|Γ_{}| < |Γ_{k}| (n={n})", k + 1))?;
        }
        let composed = geometry::neighborhood(&gs, j).unwrap();
        let direct = geometry::neighborhood(&s, j + k).unwrap();
        ensure(composed == direct, || format!("Γ_{j}∘Γ_{k} != Γ_{} (n={n})", j + k))?;
    }
    Ok(())
}

/// half_ball(n, k) = Γ_k(half_ball(n, 0)) for all n <= 12, k <= n.
pub fn check_half_balls() -> Check {
    for n in 1..=12 {
        let b0 = geometry::half_ball(n, 0).unwrap();
        for k in 0..=n {
            let direct = geometry::half_ball(n, k).unwrap();
            let grown = geometry::neighborhood(&b0, k).unwrap();
            ensure(direct == grown, || format!("B_{k} != Γ_{k}(B_0) at n={n}"))?;
        }
    }
    Ok(())
}

/// Stability of k-candidate plurality nondecreasing in rho (k = 3, n <= 5).
pub fn check_k_monotone() -> Check {
    let grid = rho_grid(101);
    for n in 1..=5 {
        let f = MultiFunction::plurality(n, 3, TieRule::LowestId)
            .unwrap()
            .to_dense()
            .unwrap();
        let mut prev = f64::NEG_INFINITY;
        for &rho in &grid {
            let s = multi::stability_k_exact(&f, rho, Exec::Sequential).unwrap();
            ensure(s >= prev - 1e-12, || format!("plurality n={n}: drops at rho={rho}"))?;
            prev = s;
        }
    }
    Ok(())
}

/// For k = 2, agreement = (1 + S_rho) / 2, random functions with n <= 10.
pub fn check_k2_reduction(trials: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for _ in 0..trials {
        let n = r.random_range(1..=10);
        let f = BooleanFunction::random(n, &mut r);
        let m = MultiFunction::from_boolean(&f).unwrap();
        for rho in [0.0, 0.3, 0.5, 0.8, 1.0] {
            let agree = multi::stability_k_exact(&m, rho, Exec::Sequential).unwrap();
            let s = stability::stability_exact(&f, &CorruptionModel::uniform(rho).unwrap())
                .unwrap()
                .value;
            ensure((agree - (1.0 + s) / 2.0).abs() <= 1e-12, || {
                format!("k=2 n={n} rho={rho}: {agree} vs {}", (1.0 + s) / 2.0)
            })?;
        }
    }
    Ok(())
}

/// Exact results and Monte Carlo estimates are identical under sequential
/// and parallel execution and across pool sizes.
pub fn check_thread_invariance() -> Check {
    use stabvote_core::electoral::{compare_ec_vs_majority, equal_states, EcScenario};
    use stabvote_core::stability::McConfig;

    let f = Method::two_tier(vec![5, 5, 5], None).unwrap().to_dense().unwrap();
    let model = CorruptionModel::uniform(0.7).unwrap();
    let maj = Method::majority(1001).unwrap();
    let scenario = EcScenario::new(equal_states(9, 101, 1).unwrap(), 0.01, 20_000, 3).unwrap();
    let plur = MultiFunction::plurality(7, 3, TieRule::LowestId).unwrap();
    let run = |exec: Exec| {
        let cfg = McConfig::new(50_000, 11).with_exec(exec);
        (
            stability::stability_exact_with(&f, &model, exec).unwrap(),
            stability::stability_mc(&maj, &model, &cfg).unwrap(),
            stability::stability_mc_table(&f, &model, &cfg).unwrap(),
            compare_ec_vs_majority(&scenario.clone().with_exec(exec)),
            multi::stability_k_mc(&plur, 0.6, &cfg).unwrap(),
            power::pivotal_counts_with(&f, exec),
            geometry::vulnerable_count_with(&f, 2, exec).unwrap(),
        )
    };
    let reference = run(Exec::Sequential);
    for threads in [1, 2, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let got = pool.install(|| run(Exec::Parallel));
        ensure(format!("{got:?}") == format!("{reference:?}"), || {
            format!("results differ with {threads} threads")
        })?;
    }
    Ok(())
}

pub fn table1() -> RankedProfile {
    RankedProfile::parse_csv("a,b,c\nb,c,a\nc,a,b\n").unwrap()
}

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::cube::VoteVector;
use crate::error::{out_of_range, Result};
use crate::exec::{self, Exec};
use crate::function::BooleanFunction;
use crate::method::Method;
use crate::rng::{self, StreamRng};

use super::{CorruptionModel, StabilityEstimate};

const SAMPLE_CHUNK: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub exec: Exec,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            exec: Exec::default(),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

/// Draws `Y` from `x`: each coordinate is kept with probability `rho` and
/// otherwise redrawn from the model's measure.
pub fn sample_corrupted<R: Rng + ?Sized>(
    x: &VoteVector,
    model: &CorruptionModel,
    rng: &mut R,
) -> VoteVector {
    let mut y = x.as_slice().to_vec();
    corrupt_in_place(&mut y, model.rho(), model.measure().p_f64(), rng);
    VoteVector::new(y).expect("corruption preserves +-1 entries")
}

fn corrupt_in_place<R: Rng + ?Sized>(y: &mut [i8], rho: f64, p: f64, rng: &mut R) {
    for v in y.iter_mut() {
        if rng.random::<f64>() >= rho {
            *v = if rng.random::<f64>() < p { 1 } else { -1 };
        }
    }
}

fn draw_votes<R: Rng + ?Sized>(out: &mut [i8], p: f64, rng: &mut R) {
    if p == 0.5 {
        for chunk in out.chunks_mut(64) {
            let bits: u64 = rng.random();
            for (i, v) in chunk.iter_mut().enumerate() {
                *v = if bits >> i & 1 == 1 { 1 } else { -1 };
            }
        }
    } else {
        for v in out.iter_mut() {
            *v = if rng.random::<f64>() < p { 1 } else { -1 };
        }
    }
}

/// Counts samples `i` in `0..samples` for which `trial(rng_i)` holds, where
/// `rng_i` is the stream for sample `i`. The count does not depend on how the
/// samples are split across workers.
pub(crate) fn count_successes<F>(samples: u64, seed: u64, exec: Exec, trial: F) -> u64
where
    F: Fn(&mut StreamRng) -> bool + Sync + Send,
{
    exec::map_ranges(exec, samples as usize, SAMPLE_CHUNK, |r| {
        r.filter(|&i| trial(&mut rng::stream(seed, i as u64))).count() as u64
    })
    .into_iter()
    .sum()
}

/// Mean and standard error of a `±1` statistic from its agreement count.
pub(crate) fn signed_estimate(agree: u64, cfg: &McConfig) -> StabilityEstimate {
    let n = cfg.samples as f64;
    let value = (2.0 * agree as f64 - n) / n;
    let stderr = if cfg.samples > 1 {
        ((1.0 - value * value).max(0.0) * n / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    StabilityEstimate {
        value,
        stderr,
        samples: cfg.samples,
        seed: Some(cfg.seed),
        exact: false,
    }
}

fn check(cfg: &McConfig) -> Result<()> {
    if cfg.samples == 0 {
        return Err(out_of_range("samples", 0.0, "samples >= 1"));
    }
    Ok(())
}

/// Monte Carlo `S_rho` of a structured method at any size.
///
/// Methods that depend only on per-block `+1` counts are simulated on the
/// counts: `X` counts are binomial and the corrupted counts follow from two
/// binomial transition draws per block. Other methods are simulated voter by
/// voter.
pub fn stability_mc(
    method: &Method,
    model: &CorruptionModel,
    cfg: &McConfig,
) -> Result<StabilityEstimate> {
    check(cfg)?;
    let p = model.measure().p_f64();
    let agree = match method.block_sizes() {
        Some(sizes) => {
            let draws: Vec<Binomial> = sizes
                .iter()
                .map(|&s| Binomial::new(s, p).expect("0 < p < 1"))
                .collect();
            let (down, up) = (model.plus_to_minus(), model.minus_to_plus());
            count_successes(cfg.samples, cfg.seed, cfg.exec, |rng| {
                let mut xs = Vec::with_capacity(sizes.len());
                let mut ys = Vec::with_capacity(sizes.len());
                for (&s, d) in sizes.iter().zip(&draws) {
                    let a = d.sample(rng);
                    let lost = Binomial::new(a, down).expect("valid").sample(rng);
                    let gained = Binomial::new(s - a, up).expect("valid").sample(rng);
                    xs.push(a);
                    ys.push(a - lost + gained);
                }
                method.eval_counts(&xs) == method.eval_counts(&ys)
            })
        }
        None => {
            let n = method.n();
            let rho = model.rho();
            count_successes(cfg.samples, cfg.seed, cfg.exec, |rng| {
                let mut x = vec![0i8; n];
                draw_votes(&mut x, p, rng);
                let fx = method.eval(&x);
                corrupt_in_place(&mut x, rho, p, rng);
                fx == method.eval(&x)
            })
        }
    };
    Ok(signed_estimate(agree, cfg))
}

/// Monte Carlo `S_rho` of a dense table, sampled voter by voter.
pub fn stability_mc_table(
    f: &BooleanFunction,
    model: &CorruptionModel,
    cfg: &McConfig,
) -> Result<StabilityEstimate> {
    check(cfg)?;
    let n = f.n();
    let p = model.measure().p_f64();
    let rho = model.rho();
    let agree = count_successes(cfg.samples, cfg.seed, cfg.exec, |rng| {
        let mut x = [0i8; crate::method::N_DENSE];
        let x = &mut x[..n];
        draw_votes(x, p, rng);
        let fx = f.value(crate::cube::index_of(x));
        corrupt_in_place(x, rho, p, rng);
        fx == f.value(crate::cube::index_of(x))
    });
    Ok(signed_estimate(agree, cfg))
}

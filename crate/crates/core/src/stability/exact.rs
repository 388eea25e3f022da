use crate::error::Result;
use crate::exec::{self, Exec};
use crate::function::BooleanFunction;

use super::{CorruptionModel, StabilityEstimate};

const CHUNK: usize = 1 << 14;

/// `g(x) = E[f(Y) | X = x]`, built by averaging one coordinate at a time.
pub fn noise_operator(f: &BooleanFunction, model: &CorruptionModel) -> Vec<f64> {
    noise_operator_with(f, model, Exec::default())
}

pub fn noise_operator_with(f: &BooleanFunction, model: &CorruptionModel, exec: Exec) -> Vec<f64> {
    let n = f.n();
    let len = 1usize << n;
    let mut g = vec![0.0f64; len];
    exec::for_each_chunk_mut(exec, &mut g, CHUNK, |c, chunk| {
        let base = (c * CHUNK) as u64;
        for (k, v) in chunk.iter_mut().enumerate() {
            *v = f.value(base + k as u64) as f64;
        }
    });
    let rho = model.rho();
    let p = model.measure().p_f64();
    let q = 1.0 - p;
    let keep = rho;
    let average = move |lo: &mut [f64], hi: &mut [f64]| {
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let m = q * *a + p * *b;
            *a = m + keep * (*a - m);
            *b = m + keep * (*b - m);
        }
    };
    for i in 0..n {
        let half = 1usize << i;
        let block = half << 1;
        if block <= CHUNK {
            exec::for_each_chunk_mut(exec, &mut g, CHUNK, |_, chunk| {
                for b in chunk.chunks_mut(block) {
                    let (lo, hi) = b.split_at_mut(half);
                    average(lo, hi);
                }
            });
        } else {
            for b in g.chunks_mut(block) {
                let (lo, hi) = b.split_at_mut(half);
                exec::for_each_chunk_pair_mut(exec, lo, hi, CHUNK, average);
            }
        }
    }
    g
}

/// Exact `S_rho(f) = E f(X) g(X)` from the noise operator table.
pub fn stability_exact(f: &BooleanFunction, model: &CorruptionModel) -> Result<StabilityEstimate> {
    stability_exact_with(f, model, Exec::default())
}

pub fn stability_exact_with(
    f: &BooleanFunction,
    model: &CorruptionModel,
    exec: Exec,
) -> Result<StabilityEstimate> {
    let g = noise_operator_with(f, model, exec);
    let n = f.n();
    let weights: Vec<f64> = if model.measure().is_uniform() {
        vec![1.0 / (1u64 << n) as f64; n + 1]
    } else {
        model.measure().weight_table_f64(n)
    };
    let partials = exec::map_ranges(exec, g.len(), CHUNK, |r| {
        r.map(|x| {
            let w = weights[(x as u64).count_ones() as usize];
            w * f.value(x as u64) as f64 * g[x]
        })
        .sum::<f64>()
    });
    let value = partials.into_iter().sum::<f64>().clamp(-1.0, 1.0);
    Ok(StabilityEstimate::exact(value))
}

/// Squared Walsh coefficients summed by level: entry `k` is
/// `sum_{|S| = k} (sum_x f(x) chi_S(x))^2`, an exact integer.
pub fn fourier_level_weights(f: &BooleanFunction) -> Vec<u128> {
    let n = f.n();
    let len = 1usize << n;
    let mut w: Vec<i64> = (0..len as u64).map(|x| f.value(x) as i64).collect();
    let mut half = 1;
    while half < len {
        for block in w.chunks_mut(half << 1) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        half <<= 1;
    }
    let mut levels = vec![0u128; n + 1];
    for (s, c) in w.iter().enumerate() {
        levels[s.count_ones() as usize] += (c.unsigned_abs() as u128).pow(2);
    }
    levels
}

/// `S_rho(f) = sum_S rho^|S| fhat(S)^2` for uniform votes.
pub fn stability_fourier(f: &BooleanFunction, rho: f64) -> f64 {
    let n = f.n();
    let norm = 4f64.powi(n as i32);
    fourier_level_weights(f)
        .iter()
        .enumerate()
        .map(|(k, &w)| rho.powi(k as i32) * w as f64 / norm)
        .sum()
}

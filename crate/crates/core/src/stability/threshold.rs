use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::cube::BiasedMeasure;
use crate::error::{out_of_range, Result};

/// Threshold `t` whose `Maj_{n,t}` expectation is closest to a target mean.
///
/// `E Maj_{n,t}` is constant for `t` in each interval `(s - 2, s]` between
/// consecutive achievable sums `s`. The returned `t` is the midpoint `s - 1`
/// of the optimal interval (`-n - 1` and `n + 1` for the two unbounded ones).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdMatch {
    pub t: f64,
    /// Exclusive lower end of the optimal interval; `None` for `-inf`.
    pub lower: Option<f64>,
    /// Inclusive upper end; `None` for `+inf`.
    pub upper: Option<f64>,
    pub expectation: f64,
    pub gap: f64,
}

const TIE_TOLERANCE: f64 = 1e-12;

pub fn find_matching_threshold(n: usize, mu: f64, measure: &BiasedMeasure) -> Result<ThresholdMatch> {
    if !(-1.0..=1.0).contains(&mu) {
        return Err(out_of_range("mu", mu, "-1 <= mu <= 1"));
    }
    if n == 0 {
        return Err(crate::error::Error::EmptyElectorate);
    }
    let tails = upper_tails(n, measure.p_f64());
    let mut best: Option<(usize, f64)> = None;
    for (j, tail) in tails.iter().enumerate() {
        let e = 2.0 * tail - 1.0;
        let gap = (e - mu).abs();
        let t = representative(n, j);
        let better = match best {
            None => true,
            Some((bj, bgap)) => {
                let bt = representative(n, bj);
                gap < bgap - TIE_TOLERANCE
                    || (gap <= bgap + TIE_TOLERANCE && t.abs() < bt.abs())
            }
        };
        if better {
            best = Some((j, gap));
        }
    }
    let (j, gap) = best.expect("n + 2 candidate intervals");
    let upper = (j <= n).then(|| -(n as f64) + 2.0 * j as f64);
    let lower = (j >= 1).then(|| -(n as f64) + 2.0 * j as f64 - 2.0);
    Ok(ThresholdMatch {
        t: representative(n, j),
        lower,
        upper,
        expectation: 2.0 * tails[j] - 1.0,
        gap,
    })
}

fn representative(n: usize, j: usize) -> f64 {
    -(n as f64) + 2.0 * j as f64 - 1.0
}

/// `tails[j] = P(W >= j)` for `W ~ Bin(n, p)`, `j = 0..=n+1`.
fn upper_tails(n: usize, p: f64) -> Vec<f64> {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let ln_n = ln_gamma(n as f64 + 1.0);
    let pmf: Vec<f64> = (0..=n)
        .map(|w| {
            let lc = ln_n - ln_gamma(w as f64 + 1.0) - ln_gamma((n - w) as f64 + 1.0);
            (lc + w as f64 * lp + (n - w) as f64 * lq).exp()
        })
        .collect();
    let mut tails = vec![0.0; n + 2];
    for w in (0..=n).rev() {
        tails[w] = tails[w + 1] + pmf[w];
    }
    tails[0] = 1.0;
    tails
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_target_gives_zero_for_odd_n() {
        for n in [1, 3, 9, 101] {
            let m = find_matching_threshold(n, 0.0, &BiasedMeasure::uniform()).unwrap();
            assert_eq!(m.t, 0.0, "n={n}");
            assert!(m.gap < 1e-12);
        }
    }

    #[test]
    fn constant_target() {
        let m = find_matching_threshold(3, 1.0, &BiasedMeasure::uniform()).unwrap();
        assert_eq!(m.t, -4.0);
        assert_eq!(m.lower, None);
        assert_eq!(m.upper, Some(-3.0));
        assert_eq!(m.expectation, 1.0);
    }

    #[test]
    fn scan_over_jump_set() {
        // E Maj_{3,t} over t in {-4,-2,0,2,4}: 1, 3/4, 0, -3/4, -1.
        let m = find_matching_threshold(3, -0.5, &BiasedMeasure::uniform()).unwrap();
        assert_eq!(m.t, 2.0);
        assert!((m.expectation + 0.75).abs() < 1e-12);
        assert_eq!((m.lower, m.upper), (Some(1.0), Some(3.0)));
    }

    #[test]
    fn ties_prefer_small_threshold() {
        // n=1: E values 1, 0, -1 at t = -2, 0, 2; mu=1/2 is equidistant.
        let m = find_matching_threshold(1, 0.5, &BiasedMeasure::uniform()).unwrap();
        assert_eq!(m.t, 0.0);
    }

    #[test]
    fn rejects_bad_target() {
        assert!(find_matching_threshold(3, 1.5, &BiasedMeasure::uniform()).is_err());
    }
}

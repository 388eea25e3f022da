//! Hamming-neighbourhood geometry on `{-1,1}^n` and adversarial vote changes.
//!
//! `Γ_k(S)` is the set of points within Hamming distance `k` of `S`; it is
//! computed as `k` rounds of single-flip dilation on bit-packed masks.
//! `B_k = Γ_k({x : Σx_i >= 0})` is the extremal family of the vertex
//! isoperimetric inequality.

mod verify;

use serde::Serialize;

use crate::bits::BitTable;
use crate::cube::VoteVector;
use crate::error::{out_of_range, Error, Result};
use crate::exec::Exec;
use crate::function::BooleanFunction;

pub use verify::{
    harper_audit, verify_majority_optimal, verify_threshold_optimal, HarperAudit,
    OptimalityReport, Search,
};

/// Largest dimension for geometry operations.
pub const N_GEOM: usize = 20;

/// A subset of `{-1,1}^n` as a bit-packed characteristic vector, laid out
/// like a truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    table: BitTable,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyElectorate);
    }
    if n > N_GEOM {
        return Err(Error::TooLarge { n, limit: N_GEOM });
    }
    Ok(())
}

impl SubsetMask {
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SubsetMask {
            table: BitTable::zeros(n),
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SubsetMask {
            table: BitTable::ones(n),
        })
    }

    pub fn from_table(table: BitTable) -> Result<Self> {
        check_n(table.n())?;
        Ok(SubsetMask { table })
    }

    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        check_n(n)?;
        Ok(SubsetMask {
            table: BitTable::from_fn(n, Exec::default(), f),
        })
    }

    pub fn from_indices(n: usize, points: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for p in points {
            if p >> n != 0 {
                return Err(out_of_range("point index", p as f64, "idx < 2^n"));
            }
            s.table.set(p, true);
        }
        Ok(s)
    }

    /// `{x : f(x) = +1}`.
    pub fn winners(f: &BooleanFunction) -> Result<Self> {
        Self::from_table(f.table().clone())
    }

    /// `{x : f(x) = -1}`.
    pub fn losers(f: &BooleanFunction) -> Result<Self> {
        Self::from_table(f.table().complement())
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    /// Number of points in the set.
    pub fn size(&self) -> u64 {
        self.table.count_ones()
    }

    pub fn contains(&self, idx: u64) -> bool {
        self.table.get(idx)
    }

    pub fn table(&self) -> &BitTable {
        &self.table
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.n() == other.n() && self.table.is_subset_of(&other.table)
    }

    /// Same file format as truth tables.
    pub fn to_table_string(&self) -> String {
        format!("n={}\n{}\n", self.n(), self.table.to_hex())
    }

    pub fn parse_table(text: &str) -> Result<Self> {
        let f = BooleanFunction::parse_table(text)?;
        Self::from_table(f.into_table())
    }
}

pub fn l0_distance(x: &VoteVector, y: &VoteVector) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.as_slice()
        .iter()
        .zip(y.as_slice())
        .filter(|(a, b)| a != b)
        .count())
}

/// `Γ_k(S)`, all points reachable from `S` by changing at most `k` votes.
pub fn neighborhood(s: &SubsetMask, k: usize) -> Result<SubsetMask> {
    neighborhood_with(s, k, Exec::default())
}

pub fn neighborhood_with(s: &SubsetMask, k: usize, exec: Exec) -> Result<SubsetMask> {
    if k > s.n() {
        return Err(out_of_range("k", k as f64, "0 <= k <= n"));
    }
    let mut table = s.table.clone();
    for _ in 0..k {
        let next = table.dilate(exec);
        if next == table {
            break;
        }
        table = next;
    }
    Ok(SubsetMask { table })
}

/// `B_k = {x : Σx_i >= -2k}`.
pub fn half_ball(n: usize, k: usize) -> Result<SubsetMask> {
    check_n(n)?;
    if k > n {
        return Err(out_of_range("k", k as f64, "0 <= k <= n"));
    }
    let (n_i, k_i) = (n as i64, k as i64);
    SubsetMask::from_fn(n, move |x| 2 * x.count_ones() as i64 - n_i >= -2 * k_i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PerSide {
    /// Configurations won by `+1` that the adversary can flip.
    pub plus: u64,
    /// Configurations won by `-1` that the adversary can flip.
    pub minus: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VulnerabilityReport {
    pub n: usize,
    pub k: usize,
    pub vulnerable_count: u64,
    pub per_side: PerSide,
}

/// Number of configurations whose outcome changes under some set of at most
/// `k` vote changes: `(|Γ_k(S+)| - |S+|) + (|Γ_k(S-)| - |S-|)`.
pub fn vulnerable_count(f: &BooleanFunction, k: usize) -> Result<VulnerabilityReport> {
    vulnerable_count_with(f, k, Exec::default())
}

pub fn vulnerable_count_with(f: &BooleanFunction, k: usize, exec: Exec) -> Result<VulnerabilityReport> {
    let plus = SubsetMask::winners(f)?;
    let minus = SubsetMask::losers(f)?;
    if k == 0 || k > f.n() {
        return Err(out_of_range("k", k as f64, "1 <= k <= n"));
    }
    // Points of S- reachable from S+ are the -1 configurations an adversary
    // can turn into +1 wins, and vice versa.
    let minus_flippable = neighborhood_with(&plus, k, exec)?.size() - plus.size();
    let plus_flippable = neighborhood_with(&minus, k, exec)?.size() - minus.size();
    Ok(VulnerabilityReport {
        n: f.n(),
        k,
        vulnerable_count: plus_flippable + minus_flippable,
        per_side: PerSide {
            plus: plus_flippable,
            minus: minus_flippable,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HarperCheck {
    pub holds: bool,
    pub set_size: u64,
    pub ball_size: u64,
    pub set_boundary: u64,
    pub ball_boundary: u64,
}

/// Checks `|Γ_1(S)| >= |Γ_1(B_k)|` for `|S| >= |B_k|`. The inequality is a
/// theorem, so a failing check means a bug in the geometry kernels.
pub fn check_harper(s: &SubsetMask, k: usize) -> Result<HarperCheck> {
    let ball = half_ball(s.n(), k)?;
    if s.size() < ball.size() {
        return Err(Error::HarperPrecondition {
            size: s.size(),
            required: ball.size(),
        });
    }
    let set_boundary = neighborhood(s, 1)?.size();
    let ball_boundary = neighborhood(&ball, 1)?.size();
    let holds = set_boundary >= ball_boundary;
    if !holds {
        log::error!(
            "vertex-isoperimetric check failed: |Γ1(S)| = {set_boundary} < |Γ1(B_{k})| = {ball_boundary}"
        );
    }
    Ok(HarperCheck {
        holds,
        set_size: s.size(),
        ball_size: ball.size(),
        set_boundary,
        ball_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::method::Method;

    fn v(x: &[i8]) -> VoteVector {
        VoteVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn distances() {
        assert_eq!(l0_distance(&v(&[1, -1]), &v(&[1, -1])).unwrap(), 0);
        assert_eq!(l0_distance(&v(&[1, 1, 1]), &v(&[-1, -1, -1])).unwrap(), 3);
        assert_eq!(l0_distance(&v(&[1, -1, 1, -1]), &v(&[1, 1, 1, 1])).unwrap(), 2);
        assert!(l0_distance(&v(&[1]), &v(&[1, 1])).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let empty = SubsetMask::empty(5).unwrap();
        assert_eq!(neighborhood(&empty, 3).unwrap().size(), 0);
        let single = SubsetMask::from_indices(5, [7]).unwrap();
        assert_eq!(neighborhood(&single, 5).unwrap().size(), 32);
        assert_eq!(neighborhood(&single, 0).unwrap(), single);
        let upper = SubsetMask::from_fn(3, |x| x.count_ones() >= 2).unwrap();
        assert_eq!(upper.size(), 4);
        assert_eq!(neighborhood(&upper, 1).unwrap().size(), 7);
        assert!(neighborhood(&upper, 4).is_err());
    }

    #[test]
    fn half_ball_sizes() {
        let sizes: Vec<u64> = (0..=3).map(|k| half_ball(3, k).unwrap().size()).collect();
        assert_eq!(sizes, vec![4, 7, 8, 8]);
        for n in [1, 5, 9] {
            assert_eq!(half_ball(n, 0).unwrap().size(), 1 << (n - 1));
            assert_eq!(half_ball(n, n).unwrap().size(), 1 << n);
        }
    }

    #[test]
    fn vulnerability_examples() {
        let d = Method::dictator(3, 1).unwrap().to_dense().unwrap();
        assert_eq!(vulnerable_count(&d, 1).unwrap().vulnerable_count, 8);
        let m = Method::majority(3).unwrap().to_dense().unwrap();
        let r = vulnerable_count(&m, 1).unwrap();
        assert_eq!(r.vulnerable_count, 6);
        assert_eq!(r.per_side, PerSide { plus: 3, minus: 3 });
        let u = Method::un_council(crate::UnEra::Pre1965).to_dense().unwrap();
        assert_eq!(vulnerable_count(&u, 11).unwrap().vulnerable_count, 1 << 11);
        assert!(vulnerable_count(&m, 0).is_err());
    }

    #[test]
    fn harper_examples() {
        for k in 0..=4 {
            let ball = half_ball(4, k).unwrap();
            let c = check_harper(&ball, k).unwrap();
            assert!(c.holds);
            assert_eq!(c.set_boundary, c.ball_boundary);
        }
        assert!(check_harper(&SubsetMask::full(6).unwrap(), 2).unwrap().holds);
        assert!(matches!(
            check_harper(&SubsetMask::from_indices(4, [0]).unwrap(), 1),
            Err(Error::HarperPrecondition { size: 1, .. })
        ));
    }

    #[test]
    fn mask_file_format() {
        let s = half_ball(4, 1).unwrap();
        assert_eq!(SubsetMask::parse_table(&s.to_table_string()).unwrap(), s);
    }
}

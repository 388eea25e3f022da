use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Ranked ballots over `m` labeled candidates, most preferred first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedProfile {
    labels: Vec<String>,
    ballots: Vec<Vec<usize>>,
}

impl RankedProfile {
    pub fn new(labels: Vec<String>, ballots: Vec<Vec<usize>>) -> Result<Self> {
        let m = labels.len();
        if m == 0 || ballots.is_empty() {
            return Err(Error::EmptyElectorate);
        }
        for (i, b) in ballots.iter().enumerate() {
            let mut seen = vec![false; m];
            let ok = b.len() == m && b.iter().all(|&c| c < m && !std::mem::replace(&mut seen[c], true));
            if !ok {
                return Err(Error::InvalidMethod(format!(
                    "ballot {} is not a permutation of the {m} candidates",
                    i + 1
                )));
            }
        }
        Ok(RankedProfile { labels, ballots })
    }

    /// Ballots given as label sequences. Candidates are ordered by label,
    /// numerically when every label is an integer.
    pub fn from_labeled<S: AsRef<str>>(ballots: &[Vec<S>]) -> Result<Self> {
        let first = ballots.first().ok_or(Error::EmptyElectorate)?;
        let labels = sorted_labels(first.iter().map(|s| s.as_ref().to_string()).collect());
        let ids = ballots
            .iter()
            .enumerate()
            .map(|(i, b)| {
                b.iter()
                    .map(|s| {
                        labels.iter().position(|l| l == s.as_ref()).ok_or_else(|| {
                            Error::InvalidMethod(format!(
                                "ballot {} names unknown candidate {:?}",
                                i + 1,
                                s.as_ref()
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels, ids)
    }

    /// CSV with one ballot per row and no header.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows: Vec<(u64, Vec<String>)> = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Csv {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let row: Vec<String> = rec.iter().filter(|s| !s.is_empty()).map(str::to_string).collect();
            if !row.is_empty() {
                rows.push((line, row));
            }
        }
        let Some((_, first)) = rows.first() else {
            return Err(Error::EmptyElectorate);
        };
        let labels = sorted_labels(first.clone());
        let mut ballots = Vec::with_capacity(rows.len());
        for (line, row) in &rows {
            let mut seen = vec![false; labels.len()];
            let mut ballot = Vec::with_capacity(row.len());
            for s in row {
                let c = labels.iter().position(|l| l == s).ok_or_else(|| Error::Csv {
                    line: *line,
                    message: format!("unknown candidate {s:?}"),
                })?;
                if std::mem::replace(&mut seen[c], true) {
                    return Err(Error::Csv {
                        line: *line,
                        message: format!("candidate {s:?} ranked twice"),
                    });
                }
                ballot.push(c);
            }
            if ballot.len() != labels.len() {
                return Err(Error::Csv {
                    line: *line,
                    message: format!("ballot ranks {} of {} candidates", ballot.len(), labels.len()),
                });
            }
            ballots.push(ballot);
        }
        Self::new(labels, ballots)
    }

    pub fn candidates(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ballots(&self) -> &[Vec<usize>] {
        &self.ballots
    }
}

fn sorted_labels(mut labels: Vec<String>) -> Vec<String> {
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<i64>().unwrap());
    } else {
        labels.sort();
    }
    labels.dedup();
    labels
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tournament {
    pub candidates: Vec<String>,
    pub ballots: u64,
    /// `counts[a][b]`: ballots ranking `a` above `b`.
    pub counts: Vec<Vec<u64>>,
}

impl Tournament {
    /// `a` is preferred to `b` by a strict majority.
    pub fn beats(&self, a: usize, b: usize) -> bool {
        2 * self.counts[a][b] > self.ballots
    }

    pub fn tied(&self, a: usize, b: usize) -> bool {
        a != b && !self.beats(a, b) && !self.beats(b, a)
    }

    pub fn size(&self) -> usize {
        self.candidates.len()
    }
}

pub fn pairwise_tournament(profile: &RankedProfile) -> Tournament {
    let m = profile.candidates();
    let mut counts = vec![vec![0u64; m]; m];
    let mut rank = vec![0usize; m];
    for b in &profile.ballots {
        for (r, &c) in b.iter().enumerate() {
            rank[c] = r;
        }
        for a in 0..m {
            for c in 0..m {
                if rank[a] < rank[c] {
                    counts[a][c] += 1;
                }
            }
        }
    }
    Tournament {
        candidates: profile.labels.clone(),
        ballots: profile.ballots.len() as u64,
        counts,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CondorcetReport {
    pub winner: Option<String>,
    /// `a ≻ b ≻ c ≻ a`, starting from the lowest-ordered candidate.
    pub cycle: Option<[String; 3]>,
    /// Strict majority preferences as `[winner, loser]` pairs.
    pub relation: Vec<[String; 2]>,
    pub ties: Vec<[String; 2]>,
    pub tournament: Tournament,
}

pub fn condorcet_analysis(profile: &RankedProfile) -> CondorcetReport {
    let t = pairwise_tournament(profile);
    let m = t.size();
    let label = |i: usize| t.candidates[i].clone();
    let winner = (0..m).find(|&a| (0..m).all(|b| a == b || t.beats(a, b)));
    let cycle = if winner.is_some() {
        None
    } else {
        find_cycle(&t)
    };
    let mut relation = Vec::new();
    let mut ties = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if t.beats(a, b) {
                relation.push([label(a), label(b)]);
            } else if a < b && t.tied(a, b) {
                ties.push([label(a), label(b)]);
            }
        }
    }
    CondorcetReport {
        winner: winner.map(label),
        cycle: cycle.map(|[a, b, c]| [label(a), label(b), label(c)]),
        relation,
        ties,
        tournament: t,
    }
}

fn find_cycle(t: &Tournament) -> Option<[usize; 3]> {
    let m = t.size();
    for a in 0..m {
        for b in a + 1..m {
            for c in a + 1..m {
                if b != c && t.beats(a, b) && t.beats(b, c) && t.beats(c, a) {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}

//! Bit-packed tables indexed by points of `{-1,1}^n`.
//!
//! Bit `idx` of the table lives in word `idx / 64` at position `idx % 64`.
//! The low six index bits (voters 1..=6) therefore address bits within a
//! word, and voters 7.. address whole words.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};

const WORD_CHUNK: usize = 1 << 10;

/// Word masks selecting positions whose index bit `i` is clear, `i < 6`.
pub(crate) const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Word masks selecting positions `b` with `popcount(b) == r`, `r = 0..=6`.
const WEIGHT_MASKS: [u64; 7] = weight_masks();

const fn weight_masks() -> [u64; 7] {
    let mut out = [0u64; 7];
    let mut b = 0;
    while b < 64 {
        out[(b as u64).count_ones() as usize] |= 1 << b;
        b += 1;
    }
    out
}

/// Moves every bit to the position with index bit `i` toggled, `i < 6`.
#[inline]
pub(crate) fn flip_within_word(w: u64, i: usize) -> u64 {
    let s = 1u32 << i;
    let m = LOW_MASKS[i];
    ((w & m) << s) | ((w >> s) & m)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitTable {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitTable(n={}, ones={})", self.n, self.count_ones())
    }
}

impl BitTable {
    pub fn zeros(n: usize) -> Self {
        BitTable {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut t = BitTable {
            n,
            words: vec![u64::MAX; word_count(n)],
        };
        t.clear_padding();
        t
    }

    /// Builds the table from a predicate on indices, one word per call batch.
    pub fn from_fn<F>(n: usize, exec: Exec, f: F) -> Self
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        let bits = 1u64 << n;
        let per_word = bits.min(64);
        let mut words = vec![0u64; word_count(n)];
        exec::for_each_chunk_mut(exec, &mut words, WORD_CHUNK, |c, chunk| {
            for (k, w) in chunk.iter_mut().enumerate() {
                let base = ((c * WORD_CHUNK + k) as u64) << 6;
                let mut acc = 0u64;
                for b in 0..per_word {
                    if f(base + b) {
                        acc |= 1 << b;
                    }
                }
                *w = acc;
            }
        });
        BitTable { n, words }
    }

    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        if words.len() != word_count(n) {
            return Err(Error::LengthMismatch {
                expected: word_count(n),
                got: words.len(),
            });
        }
        let mut t = BitTable { n, words };
        let before = t.words[0];
        t.clear_padding();
        if before != t.words[0] {
            return Err(Error::Parse {
                offset: 0,
                message: format!("bits set beyond 2^{} entries", n),
            });
        }
        Ok(t)
    }

    fn clear_padding(&mut self) {
        if self.n < 6 {
            self.words[0] &= (1u64 << (1 << self.n)) - 1;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> u64 {
        1u64 << self.n
    }

    pub fn is_empty(&self) -> bool {
        self.count_ones() == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, idx: u64) -> bool {
        self.words[(idx >> 6) as usize] >> (idx & 63) & 1 == 1
    }

    pub fn set(&mut self, idx: u64, value: bool) {
        let w = &mut self.words[(idx >> 6) as usize];
        if value {
            *w |= 1 << (idx & 63);
        } else {
            *w &= !(1 << (idx & 63));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn complement(&self) -> Self {
        let mut t = BitTable {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        t.clear_padding();
        t
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        BitTable {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(j, &w)| {
            let base = (j as u64) << 6;
            BitIter(w).map(move |b| base + b as u64)
        })
    }

    /// `hist[w]` = number of set indices with exactly `w` one-bits.
    pub fn weight_histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.n + 1];
        for (j, &w) in self.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let base = (j as u64).count_ones() as usize;
            for (r, m) in WEIGHT_MASKS.iter().enumerate() {
                let c = (w & m).count_ones();
                if c > 0 {
                    hist[base + r] += c as u64;
                }
            }
        }
        hist
    }

    /// Histogram, by weight of the representative with bit `i` clear, of the
    /// index pairs `{x, x ^ e_i}` on which the table differs.
    pub fn flip_difference_histogram(&self, i: usize) -> Vec<u64> {
        assert!(i < self.n);
        let mut hist = vec![0u64; self.n + 1];
        let mut add = |j: usize, d: u64| {
            if d == 0 {
                return;
            }
            let base = (j as u64).count_ones() as usize;
            for (r, m) in WEIGHT_MASKS.iter().enumerate() {
                let c = (d & m).count_ones();
                if c > 0 {
                    hist[base + r] += c as u64;
                }
            }
        };
        if i < 6 {
            for (j, &w) in self.words.iter().enumerate() {
                add(j, (w ^ flip_within_word(w, i)) & LOW_MASKS[i]);
            }
        } else {
            let stride = 1usize << (i - 6);
            for j in 0..self.words.len() {
                if j & stride == 0 {
                    add(j, self.words[j] ^ self.words[j | stride]);
                }
            }
        }
        hist
    }

    /// Number of pairs `{x, x ^ e_i}` on which the table differs.
    pub fn flip_difference_count(&self, i: usize) -> u64 {
        assert!(i < self.n);
        if i < 6 {
            self.words
                .iter()
                .map(|&w| ((w ^ flip_within_word(w, i)) & LOW_MASKS[i]).count_ones() as u64)
                .sum()
        } else {
            let stride = 1usize << (i - 6);
            (0..self.words.len())
                .filter(|j| j & stride == 0)
                .map(|j| (self.words[j] ^ self.words[j | stride]).count_ones() as u64)
                .sum()
        }
    }

    /// One round of single-flip dilation: the set of points within Hamming
    /// distance one of some set point.
    pub fn dilate(&self, exec: Exec) -> Self {
        let n = self.n;
        let src = &self.words;
        let mut out = vec![0u64; src.len()];
        exec::for_each_chunk_mut(exec, &mut out, WORD_CHUNK, |c, chunk| {
            for (k, o) in chunk.iter_mut().enumerate() {
                let j = c * WORD_CHUNK + k;
                let w = src[j];
                let mut acc = w;
                for i in 0..n.min(6) {
                    acc |= flip_within_word(w, i);
                }
                for i in 6..n {
                    acc |= src[j ^ (1 << (i - 6))];
                }
                *o = acc;
            }
        });
        BitTable { n, words: out }
    }

    /// Hex rendering, most significant digit first, `ceil(2^n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = hex_digits(self.n);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nib = (self.words[d / 16] >> (4 * (d % 16))) & 0xF;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    /// Parses [`to_hex`](Self::to_hex) output. `base_offset` is added to
    /// byte offsets in error messages.
    pub fn from_hex(n: usize, hex: &str, base_offset: usize) -> Result<Self> {
        let digits = hex_digits(n);
        if hex.len() != digits {
            return Err(Error::Parse {
                offset: base_offset + hex.len().min(digits),
                message: format!("expected {digits} hex digits for n={n}, found {}", hex.len()),
            });
        }
        let mut words = vec![0u64; word_count(n)];
        for (pos, ch) in hex.bytes().enumerate() {
            let nib = (ch as char).to_digit(16).ok_or_else(|| Error::Parse {
                offset: base_offset + pos,
                message: format!("invalid hex digit {:?}", ch as char),
            })? as u64;
            let d = digits - 1 - pos;
            words[d / 16] |= nib << (4 * (d % 16));
        }
        BitTable::from_words(n, words).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                offset: base_offset,
                message,
            },
            other => other,
        })
    }
}

pub(crate) fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

pub(crate) fn hex_digits(n: usize) -> usize {
    (1usize << n).div_ceil(4)
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

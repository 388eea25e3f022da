//! Dense voting methods as bit-packed truth tables.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::bits::BitTable;
use crate::cube::{BiasedMeasure, VoteVector};
use crate::error::{Error, Result};
use crate::exact::{binomial, pow2, ExactValue};
use crate::exec::Exec;
use crate::method::N_DENSE;

/// A voting method on `n <= N_DENSE` voters stored as its truth table. Bit
/// `idx(x)` holds `(1 + f(x)) / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    table: BitTable,
}

impl BooleanFunction {
    pub fn from_fn<F>(n: usize, exec: Exec, f: F) -> Self
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        assert!((1..=N_DENSE).contains(&n), "dense tables need 1 <= n <= {N_DENSE}");
        BooleanFunction {
            table: BitTable::from_fn(n, exec, f),
        }
    }

    pub fn from_table(table: BitTable) -> Result<Self> {
        check_dims(table.n())?;
        Ok(BooleanFunction { table })
    }

    pub fn constant(n: usize, value: i8) -> Self {
        check_dims(n).expect("valid dimension");
        let table = if value == 1 {
            BitTable::ones(n)
        } else {
            BitTable::zeros(n)
        };
        BooleanFunction { table }
    }

    /// Uniformly random function.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        check_dims(n).expect("valid dimension");
        let mut words: Vec<u64> = (0..crate::bits::word_count(n)).map(|_| rng.random()).collect();
        if n < 6 {
            words[0] &= (1u64 << (1 << n)) - 1;
        }
        BooleanFunction {
            table: BitTable::from_words(n, words).expect("padding cleared"),
        }
    }

    /// Uniformly random function with exactly `ones` winning inputs.
    pub fn random_with_ones<R: Rng + ?Sized>(n: usize, ones: u64, rng: &mut R) -> Self {
        check_dims(n).expect("valid dimension");
        let len = 1u64 << n;
        assert!(ones <= len);
        // Partial Fisher-Yates over the index set.
        let mut idx: Vec<u64> = (0..len).collect();
        let mut table = BitTable::zeros(n);
        for k in 0..ones as usize {
            let j = rng.random_range(k..len as usize);
            idx.swap(k, j);
            table.set(idx[k], true);
        }
        BooleanFunction { table }
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn table(&self) -> &BitTable {
        &self.table
    }

    pub fn into_table(self) -> BitTable {
        self.table
    }

    #[inline]
    pub fn value(&self, idx: u64) -> i8 {
        if self.table.get(idx) {
            1
        } else {
            -1
        }
    }

    pub fn evaluate(&self, x: &VoteVector) -> Result<i8> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(self.value(x.index()?))
    }

    /// Number of inputs on which candidate `+1` wins.
    pub fn count_plus(&self) -> u64 {
        self.table.count_ones()
    }

    pub fn is_balanced(&self) -> bool {
        2 * self.count_plus() == self.table.len()
    }

    pub fn negate(&self) -> Self {
        BooleanFunction {
            table: self.table.complement(),
        }
    }

    /// Exact `E f(X)` under the p-biased measure.
    pub fn expectation(&self, measure: &BiasedMeasure) -> ExactValue {
        let n = self.n();
        if measure.is_uniform() {
            let signed = 2 * self.count_plus() as i128 - self.table.len() as i128;
            return ExactValue::exact(BigRational::new(
                BigInt::from(signed),
                BigInt::from(pow2(n)),
            ));
        }
        let plus = self.table.weight_histogram();
        let weights = measure.weight_table(n);
        let mut acc = BigRational::zero();
        for (w, weight) in weights.iter().enumerate() {
            let total = BigInt::from(binomial(n as u64, w as u64));
            let signed = BigInt::from(2 * plus[w]) - total;
            acc += weight * BigRational::from_integer(signed);
        }
        ExactValue::exact(acc)
    }

    /// Same number of inputs won by `+1`.
    pub fn same_balance(&self, other: &BooleanFunction) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(self.count_plus() == other.count_plus())
    }

    pub fn to_hex(&self) -> String {
        self.table.to_hex()
    }

    /// Truth-table file: `n=<int>` then the hex table, one per line.
    pub fn to_table_string(&self) -> String {
        format!("n={}\n{}\n", self.n(), self.to_hex())
    }

    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_table_string().as_bytes())?;
        Ok(())
    }

    pub fn parse_table(text: &str) -> Result<Self> {
        let (header, rest) = text.split_once('\n').ok_or_else(|| Error::Parse {
            offset: text.len(),
            message: "missing newline after header".into(),
        })?;
        let header_trimmed = header.trim_end_matches('\r');
        let n_str = header_trimmed.strip_prefix("n=").ok_or_else(|| Error::Parse {
            offset: 0,
            message: "header must be `n=<int>`".into(),
        })?;
        let n: usize = n_str.parse().map_err(|_| Error::Parse {
            offset: 2,
            message: format!("invalid voter count {n_str:?}"),
        })?;
        if !(1..=N_DENSE).contains(&n) {
            return Err(Error::Parse {
                offset: 2,
                message: format!("n = {n} outside 1..={N_DENSE}"),
            });
        }
        let body_offset = header.len() + 1;
        let hex = rest.trim_end_matches(['\n', '\r']);
        if hex.contains('\n') {
            let extra = hex.find('\n').unwrap();
            return Err(Error::Parse {
                offset: body_offset + extra,
                message: "trailing content after hex table".into(),
            });
        }
        let table = BitTable::from_hex(n, hex, body_offset)?;
        Ok(BooleanFunction { table })
    }

    pub fn read_table<R: BufRead>(mut r: R) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::parse_table(&s)
    }
}

fn check_dims(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyElectorate);
    }
    if n > N_DENSE {
        return Err(Error::TooLarge { n, limit: N_DENSE });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::method::Method;

    fn maj(n: usize) -> BooleanFunction {
        Method::majority(n).unwrap().to_dense().unwrap()
    }

    #[test]
    fn expectations() {
        let u = BiasedMeasure::uniform();
        assert_eq!(maj(3).expectation(&u).value, 0.0);
        assert_eq!(BooleanFunction::constant(3, 1).expectation(&u).value, 1.0);
        // Only (1,1,1) clears threshold 2.
        let t2 = Method::threshold(3, 2.0).unwrap().to_dense().unwrap();
        assert_eq!(
            t2.expectation(&u).exact.unwrap(),
            BigRational::new((-3).into(), 4.into())
        );
        // p = 1/3 biased majority on 3 voters: P(+) = 3 p^2 q + p^3 = 7/27.
        let p = BiasedMeasure::parse("1/3").unwrap();
        assert_eq!(
            maj(3).expectation(&p).exact.unwrap(),
            BigRational::new((-13).into(), 27.into())
        );
    }

    #[test]
    fn balance_comparisons() {
        let d = Method::dictator(3, 1).unwrap().to_dense().unwrap();
        assert!(maj(3).same_balance(&d).unwrap());
        assert!(!maj(3).same_balance(&BooleanFunction::constant(3, 1)).unwrap());
        let t2 = Method::threshold(3, 2.0).unwrap().to_dense().unwrap();
        assert!(!maj(3).same_balance(&t2).unwrap());
        assert!(maj(3).same_balance(&maj(5)).is_err());
    }

    #[test]
    fn table_file_roundtrip_and_errors() {
        let f = maj(5);
        let text = f.to_table_string();
        assert!(text.starts_with("n=5\n"));
        assert_eq!(BooleanFunction::parse_table(&text).unwrap(), f);
        assert!(matches!(
            BooleanFunction::parse_table("n=3\nabc\n"),
            Err(Error::Parse { offset: 6, .. })
        ));
        assert!(BooleanFunction::parse_table("m=3\n81\n").is_err());
        assert!(BooleanFunction::parse_table("n=3\n8z\n").is_err());
        assert_eq!(maj(3).to_hex(), "e8");
    }

    #[test]
    fn random_with_ones_has_requested_balance() {
        let mut rng = crate::rng::stream(1, 0);
        for ones in [0, 1, 100, 256] {
            let f = BooleanFunction::random_with_ones(8, ones, &mut rng);
            assert_eq!(f.count_plus(), ones);
        }
    }
}

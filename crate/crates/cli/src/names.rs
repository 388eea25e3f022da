//! Method arguments: spec JSON files, truth-table files, or built-in names.

use std::path::Path;

use anyhow::{bail, Context, Result};
use stabvote_core::{BooleanFunction, Method, MethodSpec, UnEra};

pub const NAME_HELP: &str = "\
Methods are given as one of:
  <file>.json           a method spec, e.g. {\"kind\":\"majority\"}
  <file>                a truth table: `n=<int>` then one hex line,
                        bit idx(x) = sum of 2^(i-1) over voters i voting +1
  maj                   majority (needs --n)
  dict:<i>              dictator on voter i, 1-based (needs --n)
  tmaj:<t>              +1 iff sum of votes >= t (needs --n)
  wmaj:<w1,...,wn;t>    +1 iff sum w_i x_i >= t
  two-tier:<s1,...>[;<e1,...>]
                        majority of state majorities with state sizes s_j and
                        optional elector weights e_j
  un-pre1965            UN Security Council, 5 permanent + 6 elected, 7 votes
  un-post1965           UN Security Council, 5 permanent + 10 elected, 9 votes
  plurality:<k>         plurality over k candidates (stability-k only)";

/// A method as loaded from the command line.
pub enum Loaded {
    Method(Method),
    Table(BooleanFunction),
}

impl Loaded {
    pub fn n(&self) -> usize {
        match self {
            Loaded::Method(m) => m.n(),
            Loaded::Table(f) => f.n(),
        }
    }

    pub fn to_dense(&self) -> Result<BooleanFunction> {
        match self {
            Loaded::Method(m) => Ok(m.to_dense()?),
            Loaded::Table(f) => Ok(f.clone()),
        }
    }
}

pub fn load(name: &str, n: Option<usize>) -> Result<Loaded> {
    let path = Path::new(name);
    if name.ends_with(".json") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        let spec = MethodSpec::from_json(&text).with_context(|| format!("parsing {name}"))?;
        return Ok(Loaded::Method(Method::from_spec(spec, n)?));
    }
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        let f = BooleanFunction::parse_table(&text).with_context(|| format!("parsing {name}"))?;
        if let Some(n) = n {
            if n != f.n() {
                bail!("--n {n} disagrees with the table's n={}", f.n());
            }
        }
        return Ok(Loaded::Table(f));
    }
    builtin(name, n).map(Loaded::Method)
}

fn need_n(n: Option<usize>, name: &str) -> Result<usize> {
    n.with_context(|| format!("method {name:?} needs --n"))
}

fn numbers<T: std::str::FromStr>(list: &str, what: &str) -> Result<Vec<T>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("bad {what} {s:?}"))
        })
        .collect()
}

fn builtin(name: &str, n: Option<usize>) -> Result<Method> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let method = match (head, arg) {
        ("maj", None) => Method::majority(need_n(n, name)?)?,
        ("dict", Some(i)) => Method::dictator(need_n(n, name)?, i.parse().context("dictator index")?)?,
        ("tmaj", Some(t)) => Method::threshold(need_n(n, name)?, t.parse().context("threshold")?)?,
        ("wmaj", Some(arg)) => {
            let (w, t) = arg.split_once(';').context("wmaj needs weights;threshold")?;
            Method::weighted(numbers(w, "weight")?, t.trim().parse().context("threshold")?)?
        }
        ("two-tier", Some(arg)) => {
            let (sizes, electors) = match arg.split_once(';') {
                Some((s, e)) => (s, Some(numbers(e, "elector weight")?)),
                None => (arg, None),
            };
            Method::two_tier(numbers(sizes, "state size")?, electors)?
        }
        ("un-pre1965", None) => Method::un_council(UnEra::Pre1965),
        ("un-post1965", None) => Method::un_council(UnEra::Post1965),
        ("plurality", Some(_)) => bail!("{name} is a k-candidate method; use `stabvote stability-k`"),
        _ => bail!("unknown method {name:?}\n\n{NAME_HELP}"),
    };
    if let Some(n) = n {
        if n != method.n() {
            bail!("--n {n} disagrees with method {name:?} on {} voters", method.n());
        }
    }
    Ok(method)
}

/// `k` from a `plurality:<k>` name.
pub fn plurality_k(name: &str) -> Result<usize> {
    match name.split_once(':') {
        Some(("plurality", k)) => k.parse().context("candidate count"),
        _ => bail!("expected plurality:<k>, got {name:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        assert_eq!(builtin("maj", Some(5)).unwrap().n(), 5);
        assert!(builtin("maj", None).is_err());
        assert_eq!(builtin("dict:2", Some(3)).unwrap().n(), 3);
        assert_eq!(builtin("wmaj:3,1,1;0", None).unwrap().n(), 3);
        assert_eq!(builtin("two-tier:3,3,3", None).unwrap().n(), 9);
        assert_eq!(builtin("two-tier:3,1,1;3,1,1", None).unwrap().n(), 5);
        assert_eq!(builtin("un-pre1965", None).unwrap().n(), 11);
        assert!(builtin("un-pre1965", Some(12)).is_err());
        assert!(builtin("plurality:3", None).is_err());
        assert!(builtin("nope", None).is_err());
        assert_eq!(plurality_k("plurality:4").unwrap(), 4);
    }
}

//! Instance files: UTF-8 JSON with integers or `"p/q"` strings for rationals.

use std::collections::BTreeMap;

use mmp_core::toric::pair::Base;
use mmp_core::{parse_rat, Error, Fan, LatticeMap, Pair, Rat, Result, TDivisor};
use serde::{Deserialize, Serialize};

pub const FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatText {
    Int(i64),
    Text(String),
}

impl RatText {
    pub fn value(&self) -> Result<Rat> {
        match self {
            RatText::Int(n) => Ok(Rat::from_integer((*n).into())),
            RatText::Text(s) => parse_rat(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    /// Rows of the lattice map `N -> N_Z`.
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub r: Option<RatText>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Names of the divisors spanning the chamber cone.
    #[serde(default)]
    pub chambers: Option<Vec<String>>,
    /// Patches of the base cover, each a list of base cones.
    #[serde(default)]
    pub cover: Option<Vec<Vec<Vec<usize>>>>,
    /// Scales for the glue report.
    #[serde(default)]
    pub scales: Option<Vec<RatText>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: u32,
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default)]
    pub base: Option<BaseSpec>,
    #[serde(default)]
    pub divisors: BTreeMap<String, Vec<RatText>>,
    #[serde(default)]
    pub params: Params,
}

/// A parsed and validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub pair: Pair,
    pub divisors: BTreeMap<String, TDivisor>,
}

impl Instance {
    pub fn divisor(&self, name: &str) -> Result<TDivisor> {
        self.divisors
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("divisor `{name}` is not defined")))
    }

    pub fn scaling(&self) -> Result<TDivisor> {
        self.divisor("A")
    }
}

fn anchored(text: &str, key: &str) -> String {
    match text.lines().position(|l| l.contains(&format!("\"{key}\""))) {
        Some(i) => format!("line {}", i + 1),
        None => "instance".to_string(),
    }
}

/// Parses and validates; semantic errors are anchored to the line of the offending key.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    build(file).map_err(|e| match e {
        Error::Parse(m) => {
            let key = m.split('`').nth(1).unwrap_or("rays").to_string();
            Error::Parse(format!("{}: {m}", anchored(text, &key)))
        }
        other => other,
    })
}

fn build(file: InstanceFile) -> Result<Instance> {
    if file.format != FORMAT {
        return Err(Error::Parse(format!("`format` must be {FORMAT}, found {}", file.format)));
    }
    if let Some(bad) = file.rays.iter().find(|r| r.len() != file.rank) {
        return Err(Error::Parse(format!("`rays`: {bad:?} does not have length {}", file.rank)));
    }
    if file.rays.iter().any(|r| r.iter().all(|&x| x == 0)) {
        return Err(Error::Parse("`rays`: zero ray".into()));
    }
    let fan = Fan::new(file.rank, file.rays.clone(), file.cones.clone())
        .map_err(|e| Error::Parse(format!("`cones`: {e}")))?;
    let report = mmp_core::toric::fan::validate_fan(&fan);
    if !report.is_valid() {
        return Err(Error::Parse(format!("`cones`: {}", report.errors.join("; "))));
    }
    let n = fan.n_rays();
    let mut divisors = BTreeMap::new();
    for (name, coeffs) in &file.divisors {
        if coeffs.len() != n {
            return Err(Error::Parse(format!("`{name}` has {} coefficients, expected {n}", coeffs.len())));
        }
        let values = coeffs
            .iter()
            .map(|c| c.value().map_err(|e| Error::Parse(format!("`{name}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        divisors.insert(name.clone(), TDivisor::new(values));
    }
    let delta = divisors.get("Delta").cloned().unwrap_or_else(|| TDivisor::zero(n));
    divisors.insert("Delta".to_string(), delta.clone());
    let base = match &file.base {
        None => None,
        Some(b) => {
            let rank = b.rays.first().map_or(b.matrix.len(), |r| r.len());
            let bfan = Fan::new(rank, b.rays.clone(), b.cones.clone()).map_err(|e| Error::Parse(format!("`base`: {e}")))?;
            if b.matrix.len() != rank || b.matrix.iter().any(|row| row.len() != file.rank) {
                return Err(Error::Parse(format!("`matrix` must be {rank} rows of length {}", file.rank)));
            }
            let map = LatticeMap::new(file.rank, b.matrix.clone()).map_err(|e| Error::Parse(format!("`matrix`: {e}")))?;
            Some(Base { fan: bfan, map })
        }
    };
    let pair = Pair::relative(fan, delta, base)?;
    Ok(Instance { file, pair, divisors })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F1: &str = r#"{
  "format": 1,
  "rank": 2,
  "rays": [[1, 0], [1, 1], [0, 1], [-1, -1]],
  "cones": [[0, 1], [1, 2], [2, 3], [0, 3]],
  "divisors": {"A": [0, 0, 1, "3"], "half": ["1/2", 0, 0, 0]}
}"#;

    #[test]
    fn parses_rationals() {
        let inst = parse_instance(F1).unwrap();
        assert_eq!(inst.scaling().unwrap(), TDivisor::from_ints(&[0, 0, 1, 3]));
        assert_eq!(inst.divisor("half").unwrap().coeffs[0], Rat::new(1.into(), 2.into()));
        assert!(inst.divisor("Delta").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_lines() {
        let bad = F1.replace("[-1, -1]]", "[-1]]");
        let e = parse_instance(&bad).unwrap_err();
        assert!(matches!(&e, Error::Parse(m) if m.starts_with("line 4")), "{e}");
        let broken = F1.replace("\"rank\": 2,", "\"rank\": 2");
        assert!(matches!(parse_instance(&broken), Err(Error::Parse(m)) if m.contains("line 4")));
    }
}

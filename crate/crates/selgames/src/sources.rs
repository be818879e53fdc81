//! Text sources for rational sequences and counterexample functionals.
//!
//! Sequence specs name a built-in (`alternating`, `const:N/D`,
//! `i-over-i+1`) or point at a file of "numerator denominator" lines, which
//! cycle when exhausted. Counterexample specs are `const:<n>` or
//! `read-b:<index>:<cap>` — probe the subsequence at one index and cap the
//! result, which keeps the functional continuous.

use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bw::PsiFn;
use crate::error::Error;
use crate::realizers::RationalSequence;

/// Parses one "numerator denominator" line per rational; blank lines are
/// skipped, values must lie in `[0, 1]`, and the list cycles forever.
pub fn parse_sequence_file(text: &str) -> Result<RationalSequence, Error> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (n, d) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(d), None) => (n, d),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected \"numerator denominator\", got {line:?}",
                    i + 1
                )))
            }
        };
        values.push(parse_ratio(n, d).map_err(|e| {
            Error::InvalidInput(format!("line {}: {e}", i + 1))
        })?);
    }
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "sequence file holds no values".into(),
        ));
    }
    RationalSequence::from_cycle(values)
}

fn parse_ratio(n: &str, d: &str) -> Result<BigRational, String> {
    let numerator: BigInt = n.parse().map_err(|_| format!("bad numerator {n:?}"))?;
    let denominator: BigInt = d.parse().map_err(|_| format!("bad denominator {d:?}"))?;
    if denominator <= BigInt::zero() {
        return Err(format!("denominator {d} must be positive"));
    }
    let value = BigRational::new(numerator, denominator);
    if value < BigRational::zero() || value > BigRational::from_integer(BigInt::from(1)) {
        return Err(format!("value {value} outside [0, 1]"));
    }
    Ok(value)
}

/// Where a rational sequence comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceSpec {
    Alternating,
    Constant(BigRational),
    IOverSuccI,
    File(PathBuf),
}

impl SequenceSpec {
    /// Parses a spec string without touching the filesystem; anything that
    /// is not a recognized built-in is taken as a file path.
    pub fn parse(spec: &str) -> Result<SequenceSpec, Error> {
        match spec {
            "alternating" => return Ok(SequenceSpec::Alternating),
            "i-over-i+1" => return Ok(SequenceSpec::IOverSuccI),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("const:") {
            let (n, d) = match rest.split_once('/') {
                Some((n, d)) => (n, d),
                None => (rest, "1"),
            };
            let value = parse_ratio(n, d)
                .map_err(|e| Error::InvalidInput(format!("sequence spec {spec:?}: {e}")))?;
            return Ok(SequenceSpec::Constant(value));
        }
        if spec.is_empty() {
            return Err(Error::InvalidInput("empty sequence spec".into()));
        }
        Ok(SequenceSpec::File(PathBuf::from(spec)))
    }

    /// Materializes the sequence, reading the file variant from disk.
    pub fn load(&self) -> Result<RationalSequence, Error> {
        match self {
            SequenceSpec::Alternating => Ok(RationalSequence::alternating()),
            SequenceSpec::Constant(value) => RationalSequence::constant(value.clone()),
            SequenceSpec::IOverSuccI => Ok(RationalSequence::i_over_succ_i()),
            SequenceSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidInput(format!("reading {}: {e}", path.display()))
                })?;
                parse_sequence_file(&text)
            }
        }
    }
}

/// Where a counterexample functional comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiSpec {
    Const(u64),
    /// Probe the subsequence at `index` and cap the answer at `cap`.
    ReadB { index: u64, cap: u64 },
}

impl PsiSpec {
    pub fn parse(spec: &str) -> Result<PsiSpec, Error> {
        if let Some(rest) = spec.strip_prefix("const:") {
            let value = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("psi spec {spec:?}: bad constant")))?;
            return Ok(PsiSpec::Const(value));
        }
        if let Some(rest) = spec.strip_prefix("read-b:") {
            if let Some((index, cap)) = rest.split_once(':') {
                let index = index.parse().map_err(|_| {
                    Error::InvalidInput(format!("psi spec {spec:?}: bad index"))
                })?;
                let cap = cap.parse().map_err(|_| {
                    Error::InvalidInput(format!("psi spec {spec:?}: bad cap"))
                })?;
                return Ok(PsiSpec::ReadB { index, cap });
            }
            return Err(Error::InvalidInput(format!(
                "psi spec {spec:?}: expected read-b:<index>:<cap>"
            )));
        }
        Err(Error::InvalidInput(format!(
            "psi spec {spec:?}: expected const:<n> or read-b:<index>:<cap>"
        )))
    }

    pub fn build(&self) -> PsiFn {
        match self {
            PsiSpec::Const(value) => {
                let value = *value;
                Arc::new(move |_, _| value)
            }
            PsiSpec::ReadB { index, cap } => {
                let (index, cap) = (*index, *cap);
                Arc::new(move |_, b| b(index).min(cap))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn file_values_cycle() {
        let x = parse_sequence_file("1 2\n\n 1 4 \n").unwrap();
        assert_eq!(x.at(0), rat(1, 2));
        assert_eq!(x.at(1), rat(1, 4));
        assert_eq!(x.at(2), rat(1, 2));
        assert_eq!(x.at(5), rat(1, 4));
    }

    #[test]
    fn file_rejects_bad_lines() {
        assert!(parse_sequence_file("").is_err());
        assert!(parse_sequence_file("1").is_err());
        assert!(parse_sequence_file("1 2 3").is_err());
        assert!(parse_sequence_file("x y").is_err());
        assert!(parse_sequence_file("1 0").is_err());
        assert!(parse_sequence_file("3 2").is_err());
        assert!(parse_sequence_file("-1 2").is_err());
    }

    #[test]
    fn sequence_specs_parse() {
        assert_eq!(
            SequenceSpec::parse("alternating").unwrap(),
            SequenceSpec::Alternating
        );
        assert_eq!(
            SequenceSpec::parse("i-over-i+1").unwrap(),
            SequenceSpec::IOverSuccI
        );
        assert_eq!(
            SequenceSpec::parse("const:1/3").unwrap(),
            SequenceSpec::Constant(rat(1, 3))
        );
        assert_eq!(
            SequenceSpec::parse("const:1").unwrap(),
            SequenceSpec::Constant(rat(1, 1))
        );
        assert_eq!(
            SequenceSpec::parse("data/x.seq").unwrap(),
            SequenceSpec::File(PathBuf::from("data/x.seq"))
        );
        assert!(SequenceSpec::parse("const:5/3").is_err());
        assert!(SequenceSpec::parse("").is_err());
    }

    #[test]
    fn builtin_specs_load() {
        let alt = SequenceSpec::parse("alternating").unwrap().load().unwrap();
        assert_eq!(alt.at(3), rat(1, 1));
        let frac = SequenceSpec::parse("i-over-i+1").unwrap().load().unwrap();
        assert_eq!(frac.at(3), rat(3, 4));
    }

    #[test]
    fn psi_specs_parse_and_build() {
        let constant = PsiSpec::parse("const:2").unwrap();
        assert_eq!(constant, PsiSpec::Const(2));
        let psi = constant.build();
        assert_eq!(psi(&crate::eps::PaddedSequence::zeros(), &mut |_| 9), 2);

        let reader = PsiSpec::parse("read-b:1:4").unwrap();
        assert_eq!(reader, PsiSpec::ReadB { index: 1, cap: 4 });
        let psi = reader.build();
        assert_eq!(psi(&crate::eps::PaddedSequence::zeros(), &mut |i| i + 8), 4);

        assert!(PsiSpec::parse("const:x").is_err());
        assert!(PsiSpec::parse("read-b:1").is_err());
        assert!(PsiSpec::parse("whatever").is_err());
    }
}

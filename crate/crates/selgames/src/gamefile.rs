//! JSON-defined finite games and solved-game trace documents.
//!
//! A game file fixes a finite integer move domain, a constant control value,
//! and an outcome expression over prefix reads. Restricting the outcome to a
//! total expression language with a finite read set keeps every file-defined
//! game continuous by construction, so the product always terminates on it.

use serde::{Deserialize, Serialize};

use crate::eps::{
    check_equilibrium, check_prefix_consistency, EpsConfig, GameFunctionals, PaddedSequence,
    Position, SelectionFamily,
};
use crate::error::Error;
use crate::games::{optimal_strategy, play_trace, verify_optimality, RoundRecord, SequentialGame};
use crate::selection::{hilbert_epsilon_by, FiniteDomain};

/// Outcome expression over a play of integers. Arithmetic wraps; comparisons
/// and logic return `1`/`0`, and any nonzero value counts as true.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expr {
    /// The play's move at a fixed round.
    Read(u64),
    Const(i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Ne(Box<Expr>, Box<Expr>),
    Lt(Box<Expr>, Box<Expr>),
    Le(Box<Expr>, Box<Expr>),
    Gt(Box<Expr>, Box<Expr>),
    Ge(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

fn truthy(v: i64) -> bool {
    v != 0
}

fn from_bool(b: bool) -> i64 {
    i64::from(b)
}

impl Expr {
    pub fn eval(&self, play: &PaddedSequence<i64>) -> i64 {
        match self {
            Expr::Read(i) => play.get(*i),
            Expr::Const(c) => *c,
            Expr::Add(a, b) => a.eval(play).wrapping_add(b.eval(play)),
            Expr::Sub(a, b) => a.eval(play).wrapping_sub(b.eval(play)),
            Expr::Mul(a, b) => a.eval(play).wrapping_mul(b.eval(play)),
            Expr::Min(a, b) => a.eval(play).min(b.eval(play)),
            Expr::Max(a, b) => a.eval(play).max(b.eval(play)),
            Expr::Eq(a, b) => from_bool(a.eval(play) == b.eval(play)),
            Expr::Ne(a, b) => from_bool(a.eval(play) != b.eval(play)),
            Expr::Lt(a, b) => from_bool(a.eval(play) < b.eval(play)),
            Expr::Le(a, b) => from_bool(a.eval(play) <= b.eval(play)),
            Expr::Gt(a, b) => from_bool(a.eval(play) > b.eval(play)),
            Expr::Ge(a, b) => from_bool(a.eval(play) >= b.eval(play)),
            Expr::And(a, b) => from_bool(truthy(a.eval(play)) && truthy(b.eval(play))),
            Expr::Or(a, b) => from_bool(truthy(a.eval(play)) || truthy(b.eval(play))),
            Expr::Not(a) => from_bool(!truthy(a.eval(play))),
        }
    }

    /// The deepest round the expression reads, if it reads at all.
    pub fn max_read(&self) -> Option<u64> {
        match self {
            Expr::Read(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Min(a, b)
            | Expr::Max(a, b)
            | Expr::Eq(a, b)
            | Expr::Ne(a, b)
            | Expr::Lt(a, b)
            | Expr::Le(a, b)
            | Expr::Gt(a, b)
            | Expr::Ge(a, b)
            | Expr::And(a, b)
            | Expr::Or(a, b) => a.max_read().max(b.max_read()),
            Expr::Not(a) => a.max_read(),
        }
    }
}

/// A strategy edit: at this exact position, play this move instead.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyOverride {
    pub position: Vec<i64>,
    pub play: i64,
}

/// A file-defined finite game. The control value is a constant, so rounds
/// `0..=omega` are the relevant ones; the outcome expression may read only
/// those rounds. An optional list of overrides layers edits over the
/// solver's own strategy, for exercising the verifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub move_domain: Vec<i64>,
    pub default_move: i64,
    pub omega: u64,
    pub outcome: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Vec<StrategyOverride>>,
}

impl GameFile {
    pub fn validate(&self) -> Result<(), Error> {
        if self.move_domain.is_empty() {
            return Err(Error::InvalidInput("move_domain must be nonempty".into()));
        }
        if !self.move_domain.contains(&self.default_move) {
            return Err(Error::InvalidInput(format!(
                "default_move {} is not in move_domain",
                self.default_move
            )));
        }
        if let Some(deepest) = self.outcome.max_read() {
            if deepest > self.omega {
                return Err(Error::InvalidInput(format!(
                    "outcome reads round {deepest} but only rounds 0..={} are played",
                    self.omega
                )));
            }
        }
        for edit in self.strategy.iter().flatten() {
            for m in edit.position.iter().chain([&edit.play]) {
                if !self.move_domain.contains(m) {
                    return Err(Error::InvalidInput(format!(
                        "strategy override uses move {m} outside move_domain"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The sequential game this file describes: truthiness-driven first-fit
    /// selections over the domain, the expression as outcome, and the
    /// constant control.
    pub fn to_game(&self) -> Result<SequentialGame<i64, i64>, Error> {
        self.validate()?;
        let universe = FiniteDomain::new(self.move_domain.clone(), self.default_move)?;
        let outcome = self.outcome.clone();
        let omega = self.omega;
        Ok(SequentialGame {
            selections: SelectionFamily::uniform(hilbert_epsilon_by(&universe, |r| truthy(*r))),
            functionals: GameFunctionals::new(move |play| outcome.eval(play), move |_| omega),
            universe,
        })
    }

    /// The solver's strategy with this file's overrides applied.
    pub fn resolved_strategy(&self, cfg: &EpsConfig) -> Result<crate::games::Strategy<i64>, Error> {
        let game = self.to_game()?;
        let base = optimal_strategy(&game, cfg);
        match &self.strategy {
            None => Ok(base),
            Some(edits) => Ok(base.with_overrides(
                edits
                    .iter()
                    .map(|e| (Position::new(e.position.clone()), e.play))
                    .collect(),
            )),
        }
    }
}

pub fn parse_game_file(text: &str) -> Result<GameFile, Error> {
    let file: GameFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("game file: {e}")))?;
    file.validate()?;
    Ok(file)
}

/// One named check and whether it passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
}

/// A solved game with its verification verdicts, as emitted and re-read by
/// the command-line front end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub play: Vec<i64>,
    pub outcome: i64,
    pub relevant_length: u64,
    pub rounds: Vec<RoundRecord<i64, i64>>,
    pub verdicts: Vec<Verdict>,
}

impl TraceDocument {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace documents always serialize")
    }
}

pub fn parse_trace_document(text: &str) -> Result<TraceDocument, Error> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("trace document: {e}")))
}

/// Solves a file-defined game and runs the three verifiers against it: the
/// play's prefix consistency, its equilibrium equations, and the optimality
/// of the file's strategy (the solver's own unless overridden).
pub fn analyze_game_file(file: &GameFile, cfg: &EpsConfig) -> Result<TraceDocument, Error> {
    let game = file.to_game()?;
    let trace = play_trace(&game, cfg)?;
    let prefix = check_prefix_consistency(
        &Position::empty(),
        &game.selections,
        &game.functionals,
        trace.relevant_length,
        cfg,
    )?;
    let equilibrium = check_equilibrium(&game.selections, &game.functionals, cfg)?;
    let strategy = file.resolved_strategy(cfg)?;
    let optimal = verify_optimality(&game, &strategy, file.omega)?;
    Ok(TraceDocument {
        play: trace.play,
        outcome: trace.outcome,
        relevant_length: trace.relevant_length,
        rounds: trace.rounds,
        verdicts: vec![
            Verdict {
                check: "prefix-consistency".into(),
                pass: prefix,
            },
            Verdict {
                check: "equilibrium".into(),
                pass: equilibrium,
            },
            Verdict {
                check: "optimality".into(),
                pass: optimal,
            },
        ],
    })
}

//! Plays, positions, and the explicitly controlled unbounded product of
//! selection functions.
//!
//! A play is an infinite sequence of moves with finite support, represented
//! by [`PaddedSequence`]. A game is a family of selection functions indexed
//! by position together with an outcome function `q` and a control function
//! `omega` ([`GameFunctionals`]). The product [`eps`] unfolds the game from a
//! position: it stops with the all-zero play as soon as the control function
//! bars the current position (`omega(s^) < |s|`), and otherwise asks the
//! position's selection function to choose the next move against the outcome
//! each candidate would lead to under optimal continuation.
//!
//! The evaluation is eager and would diverge on games whose control function
//! never bars the play, so every entry point carries an expansion budget and
//! fails with [`Error::BudgetExhausted`] when it is spent.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::Error;
use crate::selection::SelectionFunction;

/// The canonical zero `0_X` of a move type, used to pad finite plays.
pub trait CanonicalZero {
    fn canonical_zero() -> Self;
}

impl CanonicalZero for bool {
    fn canonical_zero() -> bool {
        false
    }
}

impl CanonicalZero for u64 {
    fn canonical_zero() -> u64 {
        0
    }
}

impl CanonicalZero for i64 {
    fn canonical_zero() -> i64 {
        0
    }
}

/// Bounds required of move values throughout the library.
pub trait MoveValue:
    CanonicalZero + Clone + Eq + Hash + fmt::Debug + Send + Sync + 'static
{
}
impl<T: CanonicalZero + Clone + Eq + Hash + fmt::Debug + Send + Sync + 'static> MoveValue for T {}

/// Bounds required of outcome values throughout the library.
pub trait OutcomeValue: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {}
impl<T: Clone + PartialEq + fmt::Debug + Send + Sync + 'static> OutcomeValue for T {}

/// An infinite sequence of moves with finite support: a finite prefix
/// followed by the canonical zero forever.
///
/// Equality is extensional, so trailing zeros are trimmed on construction
/// and two sequences are equal exactly when they agree at every index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PaddedSequence<X: MoveValue> {
    prefix: Vec<X>,
}

impl<X: MoveValue> PaddedSequence<X> {
    /// The all-zero sequence.
    pub fn zeros() -> Self {
        PaddedSequence { prefix: Vec::new() }
    }

    pub fn from_prefix(mut prefix: Vec<X>) -> Self {
        let zero = X::canonical_zero();
        while prefix.last() == Some(&zero) {
            prefix.pop();
        }
        PaddedSequence { prefix }
    }

    /// The value at index `n`; zero beyond the stored prefix.
    pub fn get(&self, n: u64) -> X {
        self.prefix
            .get(n as usize)
            .cloned()
            .unwrap_or_else(X::canonical_zero)
    }

    /// The stored (normalized) prefix: no trailing zeros.
    pub fn prefix(&self) -> &[X] {
        &self.prefix
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    /// The first `n` values as an owned vector (padding with zeros).
    pub fn take_prefix(&self, n: u64) -> Vec<X> {
        (0..n).map(|i| self.get(i)).collect()
    }

    /// The sequence `x * self`.
    pub fn prepend(&self, x: X) -> Self {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(x);
        prefix.extend(self.prefix.iter().cloned());
        PaddedSequence::from_prefix(prefix)
    }

    /// The sequence `front * self`.
    pub fn concat_front(&self, front: &[X]) -> Self {
        let mut prefix = Vec::with_capacity(front.len() + self.prefix.len());
        prefix.extend(front.iter().cloned());
        prefix.extend(self.prefix.iter().cloned());
        PaddedSequence::from_prefix(prefix)
    }
}

impl<X: MoveValue> fmt::Debug for PaddedSequence<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}*0..", self.prefix)
    }
}

/// A finite position: the moves already played, oldest first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Position<X> {
    moves: Vec<X>,
}

impl<X: MoveValue> Position<X> {
    pub fn empty() -> Self {
        Position { moves: Vec::new() }
    }

    pub fn new(moves: Vec<X>) -> Self {
        Position { moves }
    }

    pub fn len(&self) -> u64 {
        self.moves.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn moves(&self) -> &[X] {
        &self.moves
    }

    /// The position after playing `x` here.
    pub fn child(&self, x: X) -> Self {
        let mut moves = self.moves.clone();
        moves.push(x);
        Position { moves }
    }

    pub fn is_prefix_of(&self, other: &Position<X>) -> bool {
        other.moves.len() >= self.moves.len() && other.moves[..self.moves.len()] == self.moves[..]
    }

    /// The play that continues this position with zeros forever.
    pub fn canonical_extension(&self) -> PaddedSequence<X> {
        PaddedSequence::from_prefix(self.moves.clone())
    }
}

/// The play `s * 0 * 0 * ...` for a position `s`.
pub fn canonical_extension<X: MoveValue>(s: &Position<X>) -> PaddedSequence<X> {
    s.canonical_extension()
}

/// Outcome function on plays.
pub type OutcomeFn<X, R> = Arc<dyn Fn(&PaddedSequence<X>) -> Result<R, Error> + Send + Sync>;

/// Control function on plays: how many rounds are still relevant.
pub type ControlFn<X> = Arc<dyn Fn(&PaddedSequence<X>) -> Result<u64, Error> + Send + Sync>;

/// The outcome and control functions of a game.
#[derive(Clone)]
pub struct GameFunctionals<X: MoveValue, R> {
    outcome: OutcomeFn<X, R>,
    control: ControlFn<X>,
}

impl<X: MoveValue, R: 'static> GameFunctionals<X, R> {
    /// Build from infallible closures.
    pub fn new(
        outcome: impl Fn(&PaddedSequence<X>) -> R + Send + Sync + 'static,
        control: impl Fn(&PaddedSequence<X>) -> u64 + Send + Sync + 'static,
    ) -> Self {
        GameFunctionals {
            outcome: Arc::new(move |play| Ok(outcome(play))),
            control: Arc::new(move |play| Ok(control(play))),
        }
    }

    /// Build from closures that may themselves fail (e.g. nested searches).
    pub fn fallible(outcome: OutcomeFn<X, R>, control: ControlFn<X>) -> Self {
        GameFunctionals { outcome, control }
    }

    pub fn outcome(&self, play: &PaddedSequence<X>) -> Result<R, Error> {
        (self.outcome)(play)
    }

    pub fn control(&self, play: &PaddedSequence<X>) -> Result<u64, Error> {
        (self.control)(play)
    }

    pub fn outcome_fn(&self) -> OutcomeFn<X, R> {
        Arc::clone(&self.outcome)
    }

    pub fn control_fn(&self) -> ControlFn<X> {
        Arc::clone(&self.control)
    }

    /// The same game with the outcome function shifted by an already-played
    /// prefix: the new outcome of a play `alpha` is the old outcome of
    /// `prefix * alpha`. The control function is untouched; it always
    /// observes absolute plays.
    pub fn shift_outcome_by(&self, prefix: &[X]) -> Self {
        GameFunctionals {
            outcome: shift_outcome_by(&self.outcome, prefix),
            control: Arc::clone(&self.control),
        }
    }
}

/// `q` shifted by one move: `alpha -> q(a * alpha)`.
pub fn shift_outcome<X: MoveValue, R: 'static>(q: &OutcomeFn<X, R>, a: X) -> OutcomeFn<X, R> {
    let q = Arc::clone(q);
    Arc::new(move |alpha| q(&alpha.prepend(a.clone())))
}

/// `q` shifted by a finite prefix: `alpha -> q(prefix * alpha)`.
pub fn shift_outcome_by<X: MoveValue, R: 'static>(
    q: &OutcomeFn<X, R>,
    prefix: &[X],
) -> OutcomeFn<X, R> {
    let q = Arc::clone(q);
    let prefix = prefix.to_vec();
    Arc::new(move |alpha| q(&alpha.concat_front(&prefix)))
}

/// A family of selection functions indexed by position.
#[derive(Clone)]
pub struct SelectionFamily<X, R> {
    at: Arc<dyn Fn(&Position<X>) -> SelectionFunction<X, R> + Send + Sync>,
}

impl<X: MoveValue, R> SelectionFamily<X, R> {
    pub fn new(at: impl Fn(&Position<X>) -> SelectionFunction<X, R> + Send + Sync + 'static) -> Self {
        SelectionFamily { at: Arc::new(at) }
    }

    /// The same selection function at every position.
    pub fn uniform(sel: SelectionFunction<X, R>) -> Self
    where
        X: 'static,
        R: 'static,
    {
        SelectionFamily::new(move |_| sel.clone())
    }

    /// A family that depends only on the round number `|s|`.
    pub fn by_round(f: impl Fn(u64) -> SelectionFunction<X, R> + Send + Sync + 'static) -> Self {
        SelectionFamily::new(move |s| f(s.len()))
    }

    pub fn at(&self, s: &Position<X>) -> SelectionFunction<X, R> {
        (self.at)(s)
    }
}

/// Evaluation limits for the controlled product.
#[derive(Clone, Debug)]
pub struct EpsConfig {
    /// Maximum number of position expansions before giving up.
    pub max_expansions: u64,
    /// Stack reserved for the evaluation; the recursion can reach a depth of
    /// one frame per expansion in the worst case.
    pub stack_bytes: usize,
}

impl Default for EpsConfig {
    fn default() -> Self {
        EpsConfig {
            max_expansions: 100_000,
            stack_bytes: 512 << 20,
        }
    }
}

impl EpsConfig {
    pub fn with_budget(max_expansions: u64) -> Self {
        EpsConfig {
            max_expansions,
            ..EpsConfig::default()
        }
    }
}

/// Run `f` on a worker thread with a dedicated stack. Evaluations can recurse
/// once per budgeted expansion, far deeper than default thread stacks allow.
pub(crate) fn with_stack<T: Send>(bytes: usize, f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|scope| {
        let handle = std::thread::Builder::new()
            .name("selgames-eval".into())
            .stack_size(bytes)
            .spawn_scoped(scope, f)
            .expect("failed to spawn evaluation thread");
        match handle.join() {
            Ok(value) => value,
            Err(payload) => std::panic::resume_unwind(payload),
        }
    })
}

/// One evaluation of the controlled product, rooted at a fixed position.
///
/// The root outcome function applies to continuations after the root, while
/// the control function and the selection family observe absolute positions.
/// Finished continuations are cached per absolute position; the budget counts
/// cache-missing expansions only.
pub(crate) struct EpsRun<'g, X: MoveValue, R> {
    family: &'g SelectionFamily<X, R>,
    control: ControlFn<X>,
    root_q: OutcomeFn<X, R>,
    root_len: usize,
    remaining: Cell<u64>,
    limit: u64,
    memo: RefCell<HashMap<Vec<X>, PaddedSequence<X>>>,
}

impl<'g, X: MoveValue, R: OutcomeValue> EpsRun<'g, X, R> {
    pub(crate) fn new(
        root: &Position<X>,
        family: &'g SelectionFamily<X, R>,
        functionals: &GameFunctionals<X, R>,
        cfg: &EpsConfig,
    ) -> Self {
        EpsRun {
            family,
            control: functionals.control_fn(),
            root_q: functionals.outcome_fn(),
            root_len: root.moves().len(),
            remaining: Cell::new(cfg.max_expansions),
            limit: cfg.max_expansions,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn spend(&self) -> Result<(), Error> {
        let left = self.remaining.get();
        if left == 0 {
            return Err(Error::BudgetExhausted { limit: self.limit });
        }
        self.remaining.set(left - 1);
        Ok(())
    }

    /// Outcome of playing `x` at absolute position `t` and then continuing
    /// optimally, as seen by the root outcome function.
    pub(crate) fn probe(&self, t: &[X], x: &X) -> Result<R, Error> {
        let mut tx: Vec<X> = t.to_vec();
        tx.push(x.clone());
        let continuation = self.eval(&tx)?;
        let suffix = continuation.concat_front(&tx[self.root_len..]);
        (self.root_q)(&suffix)
    }

    /// The optimal continuation play after absolute position `t`.
    pub(crate) fn eval(&self, t: &Vec<X>) -> Result<PaddedSequence<X>, Error> {
        if let Some(hit) = self.memo.borrow().get(t) {
            return Ok(hit.clone());
        }
        let extension = PaddedSequence::from_prefix(t.clone());
        let relevant_rounds = (self.control)(&extension)?;
        if relevant_rounds < t.len() as u64 {
            let zeros = PaddedSequence::zeros();
            self.memo.borrow_mut().insert(t.clone(), zeros.clone());
            return Ok(zeros);
        }
        self.spend()?;
        let selection = self.family.at(&Position::new(t.clone()));
        let chosen = selection.apply(&|x: &X| self.probe(t, x))?;
        let mut ta = t.clone();
        ta.push(chosen.clone());
        let rest = self.eval(&ta)?;
        let play = rest.prepend(chosen);
        self.memo.borrow_mut().insert(t.clone(), play.clone());
        Ok(play)
    }
}

pub(crate) fn eps_core<X: MoveValue, R: OutcomeValue>(
    start: &Position<X>,
    family: &SelectionFamily<X, R>,
    functionals: &GameFunctionals<X, R>,
    cfg: &EpsConfig,
) -> Result<PaddedSequence<X>, Error> {
    EpsRun::new(start, family, functionals, cfg).eval(&start.moves().to_vec())
}

/// The controlled product of the family, unfolded from `start`.
///
/// Returns the continuation play after `start`: the all-zero play when the
/// control function already bars `start`, and otherwise the chosen move
/// followed by the product unfolded one position deeper with the outcome
/// function shifted by that move.
///
/// The outcome function is understood to apply to continuations after
/// `start`; the control function always observes absolute plays extending
/// `start`'s moves.
pub fn eps<X: MoveValue, R: OutcomeValue>(
    start: &Position<X>,
    family: &SelectionFamily<X, R>,
    functionals: &GameFunctionals<X, R>,
    cfg: &EpsConfig,
) -> Result<PaddedSequence<X>, Error> {
    with_stack(cfg.stack_bytes, || eps_core(start, family, functionals, cfg))
}

/// The product over exactly rounds `0..=n`: [`eps`] with the control
/// function constantly `n`.
pub fn finite_product<X: MoveValue, R: OutcomeValue>(
    n: u64,
    family: &SelectionFamily<X, R>,
    outcome: OutcomeFn<X, R>,
    cfg: &EpsConfig,
) -> Result<PaddedSequence<X>, Error> {
    let functionals = GameFunctionals::fallible(outcome, Arc::new(move |_| Ok(n)));
    eps(&Position::empty(), family, &functionals, cfg)
}

/// The outcome of playing `x` at `s` and then continuing optimally.
pub fn continuation_outcome<X: MoveValue, R: OutcomeValue>(
    s: &Position<X>,
    x: &X,
    family: &SelectionFamily<X, R>,
    functionals: &GameFunctionals<X, R>,
    cfg: &EpsConfig,
) -> Result<R, Error> {
    with_stack(cfg.stack_bytes, || {
        EpsRun::new(s, family, functionals, cfg).probe(s.moves(), x)
    })
}

/// Checks that the product commutes with its own prefixes: for every
/// `n <= n_max`, re-running the product from the position extended by the
/// first `n` chosen moves (with the outcome function shifted by them)
/// reproduces the tail of the original play exactly.
pub fn check_prefix_consistency<X: MoveValue, R: OutcomeValue>(
    s: &Position<X>,
    family: &SelectionFamily<X, R>,
    functionals: &GameFunctionals<X, R>,
    n_max: u64,
    cfg: &EpsConfig,
) -> Result<bool, Error> {
    with_stack(cfg.stack_bytes, || {
        let alpha = eps_core(s, family, functionals, cfg)?;
        for n in 0..=n_max {
            let played = alpha.take_prefix(n);
            let mut deeper = s.moves().to_vec();
            deeper.extend(played.iter().cloned());
            let shifted = functionals.shift_outcome_by(&played);
            let tail = eps_core(&Position::new(deeper), family, &shifted, cfg)?;
            if tail.concat_front(&played) != alpha {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// Checks the equilibrium property of the product's play from the empty
/// position: for every relevant round `n`, the move played is the one the
/// round's selection function picks against the optimal-continuation outcome
/// map, and that map's value at the played move is the play's outcome.
pub fn check_equilibrium<X: MoveValue, R: OutcomeValue>(
    family: &SelectionFamily<X, R>,
    functionals: &GameFunctionals<X, R>,
    cfg: &EpsConfig,
) -> Result<bool, Error> {
    with_stack(cfg.stack_bytes, || {
        let root = Position::empty();
        let alpha = eps_core(&root, family, functionals, cfg)?;
        let outcome = functionals.outcome(&alpha)?;
        let relevant = functionals.control(&alpha)?;
        for n in 0..=relevant {
            let played = alpha.take_prefix(n);
            let here = Position::new(played.clone());
            let shifted = functionals.shift_outcome_by(&played);
            let run = EpsRun::new(&here, family, &shifted, cfg);
            let chosen = family.at(&here).apply(&|x: &X| run.probe(here.moves(), x))?;
            if chosen != alpha.get(n) {
                return Ok(false);
            }
            let value = run.probe(here.moves(), &alpha.get(n))?;
            if value != outcome {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

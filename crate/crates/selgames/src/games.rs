//! Sequential games of unbounded length, strategies, and optimal play.
//!
//! A sequential game couples a position-indexed family of selection
//! functions with an outcome function, a control function, and an explicit
//! finite move universe. The control function decides which positions are
//! still relevant; optimal strategies play, at every relevant position, the
//! move the position's selection function recommends against the outcomes of
//! strategy-following continuations.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eps::{
    eps_core, with_stack, EpsConfig, EpsRun, GameFunctionals, MoveValue, OutcomeValue,
    PaddedSequence, Position, SelectionFamily,
};
use crate::error::Error;
use crate::selection::FiniteDomain;

/// A sequential game: selections, outcome/control functionals, and the move
/// universe searches range over.
#[derive(Clone)]
pub struct SequentialGame<X: MoveValue, R> {
    pub selections: SelectionFamily<X, R>,
    pub functionals: GameFunctionals<X, R>,
    pub universe: FiniteDomain<X>,
}

/// A strategy: the next move to play at any position.
#[derive(Clone)]
pub struct Strategy<X> {
    next: Arc<dyn Fn(&Position<X>) -> Result<X, Error> + Send + Sync>,
}

impl<X: MoveValue> Strategy<X> {
    pub fn new(next: impl Fn(&Position<X>) -> Result<X, Error> + Send + Sync + 'static) -> Self {
        Strategy { next: Arc::new(next) }
    }

    /// Plays `x` everywhere.
    pub fn constant(x: X) -> Self {
        Strategy::new(move |_| Ok(x.clone()))
    }

    pub fn next(&self, s: &Position<X>) -> Result<X, Error> {
        (self.next)(s)
    }

    /// The same strategy with the moves at the listed positions replaced.
    pub fn with_overrides(&self, overrides: Vec<(Position<X>, X)>) -> Self {
        let base = self.clone();
        Strategy::new(move |s| {
            for (position, replacement) in &overrides {
                if position == s {
                    return Ok(replacement.clone());
                }
            }
            base.next(s)
        })
    }
}

/// A position is relevant while the control function, applied to the
/// position's canonical extension, has not yet barred it.
pub fn is_relevant_position<X: MoveValue, R: 'static>(
    game: &SequentialGame<X, R>,
    s: &Position<X>,
) -> Result<bool, Error> {
    Ok(s.len() <= game.functionals.control(&s.canonical_extension())?)
}

/// The play obtained by following `strategy` from `s` for `rounds` moves
/// (zero-padded beyond). The result is the continuation after `s`.
pub fn strategic_extension<X: MoveValue>(
    strategy: &Strategy<X>,
    s: &Position<X>,
    rounds: u64,
) -> Result<PaddedSequence<X>, Error> {
    let mut here = s.clone();
    let mut moves = Vec::new();
    for _ in 0..rounds {
        let x = strategy.next(&here)?;
        here = here.child(x.clone());
        moves.push(x);
    }
    Ok(PaddedSequence::from_prefix(moves))
}

/// The optimal strategy: at `s`, play the head of the controlled product
/// unfolded from `s` with the outcome function shifted by `s`'s moves.
pub fn optimal_strategy<X: MoveValue, R: OutcomeValue>(
    game: &SequentialGame<X, R>,
    cfg: &EpsConfig,
) -> Strategy<X> {
    let selections = game.selections.clone();
    let functionals = game.functionals.clone();
    let cfg = cfg.clone();
    Strategy::new(move |s| {
        let shifted = functionals.shift_outcome_by(s.moves());
        let play = with_stack(cfg.stack_bytes, || {
            eps_core(s, &selections, &shifted, &cfg)
        })?;
        Ok(play.get(0))
    })
}

fn strategy_line<X: MoveValue>(
    strategy: &Strategy<X>,
    from: &Position<X>,
    depth_cap: u64,
) -> Result<Vec<Position<X>>, Error> {
    let mut line = Vec::new();
    let mut here = from.clone();
    loop {
        line.push(here.clone());
        if here.len() >= depth_cap {
            return Ok(line);
        }
        here = here.child(strategy.next(&here)?);
    }
}

/// Verifies that `strategy` is optimal at every relevant position reachable
/// from the empty position with at most one deviation: along its own play,
/// and along the strategy-following line after each single deviating move.
///
/// At each such position `t` (while `|t| <= depth_cap`) the strategy's move
/// must equal the move the selection function at `t` picks against the map
/// sending a candidate `x` to the outcome of the full play `t * x *
/// (strategy-following extension)`, extensions being materialized out to
/// `depth_cap + 1` moves.
pub fn verify_optimality<X: MoveValue, R: OutcomeValue>(
    game: &SequentialGame<X, R>,
    strategy: &Strategy<X>,
    depth_cap: u64,
) -> Result<bool, Error> {
    let main_line = strategy_line(strategy, &Position::empty(), depth_cap)?;
    let mut positions = main_line.clone();
    for s in &main_line {
        if s.len() >= depth_cap {
            continue;
        }
        let followed = strategy.next(s)?;
        for x in game.universe.elements() {
            if *x == followed {
                continue;
            }
            positions.extend(strategy_line(strategy, &s.child(x.clone()), depth_cap)?);
        }
    }
    let mut seen = HashSet::new();
    for t in positions {
        if !seen.insert(t.clone()) {
            continue;
        }
        if !is_relevant_position(game, &t)? {
            continue;
        }
        if !strategy_agrees_at(game, strategy, &t, depth_cap)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive variant of [`verify_optimality`]: checks every relevant
/// position over the whole universe up to the depth cap. Cost is
/// `|universe|^depth_cap`; use only on small games.
pub fn verify_optimality_exhaustive<X: MoveValue, R: OutcomeValue>(
    game: &SequentialGame<X, R>,
    strategy: &Strategy<X>,
    depth_cap: u64,
) -> Result<bool, Error> {
    let mut frontier = vec![Position::empty()];
    while let Some(t) = frontier.pop() {
        if is_relevant_position(game, &t)? && !strategy_agrees_at(game, strategy, &t, depth_cap)? {
            return Ok(false);
        }
        if t.len() < depth_cap {
            for x in game.universe.elements() {
                frontier.push(t.child(x.clone()));
            }
        }
    }
    Ok(true)
}

fn strategy_agrees_at<X: MoveValue, R: OutcomeValue>(
    game: &SequentialGame<X, R>,
    strategy: &Strategy<X>,
    t: &Position<X>,
    depth_cap: u64,
) -> Result<bool, Error> {
    let horizon = (depth_cap + 1).saturating_sub(t.len() + 1);
    let recommended = game.selections.at(t).apply(&|x: &X| {
        let extension = strategic_extension(strategy, &t.child(x.clone()), horizon)?;
        let mut play = t.moves().to_vec();
        play.push(x.clone());
        game.functionals
            .outcome(&extension.concat_front(&play))
    })?;
    Ok(recommended == strategy.next(t)?)
}

/// Solves the game by plain backward induction, never consulting the
/// controlled product: at each unbarred position, every universe move's full
/// continuation is solved recursively and the position's selection function
/// chooses among them. Positions deeper than `depth_cap` fail with
/// [`Error::BudgetExhausted`].
pub fn brute_force_backward_induction<X: MoveValue, R: OutcomeValue>(
    game: &SequentialGame<X, R>,
    depth_cap: u64,
    cfg: &EpsConfig,
) -> Result<PaddedSequence<X>, Error> {
    fn solve<X: MoveValue, R: OutcomeValue>(
        game: &SequentialGame<X, R>,
        t: &Position<X>,
        depth_cap: u64,
        budget: &std::cell::Cell<u64>,
        limit: u64,
    ) -> Result<Vec<X>, Error> {
        if game.functionals.control(&t.canonical_extension())? < t.len() {
            return Ok(Vec::new());
        }
        if t.len() > depth_cap || budget.get() == 0 {
            return Err(Error::BudgetExhausted { limit });
        }
        budget.set(budget.get() - 1);
        let chosen = game.selections.at(t).apply(&|x: &X| {
            let continuation = solve(game, &t.child(x.clone()), depth_cap, budget, limit)?;
            let mut play = t.moves().to_vec();
            play.push(x.clone());
            play.extend(continuation);
            game.functionals.outcome(&PaddedSequence::from_prefix(play))
        })?;
        let mut rest = solve(game, &t.child(chosen.clone()), depth_cap, budget, limit)?;
        rest.insert(0, chosen);
        Ok(rest)
    }

    with_stack(cfg.stack_bytes, || {
        let budget = std::cell::Cell::new(cfg.max_expansions);
        solve(
            game,
            &Position::empty(),
            depth_cap,
            &budget,
            cfg.max_expansions,
        )
        .map(PaddedSequence::from_prefix)
    })
}

/// One round of a recorded play: where we were, what was played, and the
/// outcome the played move's optimal continuation promised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord<X, R> {
    pub position: Vec<X>,
    pub chosen: X,
    pub continuation_outcome: R,
}

/// A solved game: the play, its outcome, how many rounds were relevant, and
/// one record per relevant round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayTrace<X, R> {
    pub play: Vec<X>,
    pub outcome: R,
    pub relevant_length: u64,
    pub rounds: Vec<RoundRecord<X, R>>,
}

/// Solves the game from the empty position and records every relevant round.
pub fn play_trace<X: MoveValue, R: OutcomeValue>(
    game: &SequentialGame<X, R>,
    cfg: &EpsConfig,
) -> Result<PlayTrace<X, R>, Error> {
    with_stack(cfg.stack_bytes, || {
        let root = Position::empty();
        let alpha = eps_core(&root, &game.selections, &game.functionals, cfg)?;
        let outcome = game.functionals.outcome(&alpha)?;
        let relevant_length = game.functionals.control(&alpha)?;
        let mut rounds = Vec::new();
        for n in 0..=relevant_length {
            let played = alpha.take_prefix(n);
            let here = Position::new(played.clone());
            let shifted = game.functionals.shift_outcome_by(&played);
            let run = EpsRun::new(&here, &game.selections, &shifted, cfg);
            let continuation_outcome = run.probe(here.moves(), &alpha.get(n))?;
            rounds.push(RoundRecord {
                position: played,
                chosen: alpha.get(n),
                continuation_outcome,
            });
        }
        Ok(PlayTrace {
            play: alpha.prefix().to_vec(),
            outcome,
            relevant_length,
            rounds,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::{hilbert_epsilon_by, FiniteDomain};

    fn bool_game(
        outcome: impl Fn(&PaddedSequence<bool>) -> bool + Send + Sync + 'static,
        control: impl Fn(&PaddedSequence<bool>) -> u64 + Send + Sync + 'static,
    ) -> SequentialGame<bool, bool> {
        let universe = FiniteDomain::new(vec![false, true], false).unwrap();
        SequentialGame {
            selections: SelectionFamily::uniform(hilbert_epsilon_by(&universe, |b| *b)),
            functionals: GameFunctionals::new(outcome, control),
            universe,
        }
    }

    fn conjunction_game() -> SequentialGame<bool, bool> {
        bool_game(|a| a.get(0) && a.get(1), |_| 1)
    }

    #[test]
    fn relevance_follows_control() {
        let game = conjunction_game();
        assert!(is_relevant_position(&game, &Position::empty()).unwrap());
        assert!(is_relevant_position(&game, &Position::new(vec![true])).unwrap());
        assert!(!is_relevant_position(&game, &Position::new(vec![true, false])).unwrap());
    }

    #[test]
    fn relevance_with_prefix_reading_control() {
        let universe = FiniteDomain::new(vec![0i64, 1, 2, 3], 0).unwrap();
        let game = SequentialGame {
            selections: SelectionFamily::uniform(hilbert_epsilon_by(&universe, |r: &i64| *r != 0)),
            functionals: GameFunctionals::new(|a: &PaddedSequence<i64>| a.get(0), |a| a.get(0).max(0) as u64),
            universe,
        };
        assert!(is_relevant_position(&game, &Position::new(vec![3])).unwrap());
        assert!(!is_relevant_position(&game, &Position::new(vec![0, 0])).unwrap());
    }

    #[test]
    fn strategic_extension_of_constant_strategy() {
        let strategy = Strategy::constant(5u64);
        let ext = strategic_extension(&strategy, &Position::empty(), 3).unwrap();
        assert_eq!(ext.prefix(), &[5, 5, 5]);
    }

    #[test]
    fn strategic_extension_sees_growing_positions() {
        let strategy = Strategy::new(|s: &Position<u64>| Ok(s.len()));
        let ext = strategic_extension(&strategy, &Position::empty(), 3).unwrap();
        assert_eq!(ext.prefix(), &[0, 1, 2]);
    }

    #[test]
    fn optimal_strategy_on_conjunction() {
        let game = conjunction_game();
        let strategy = optimal_strategy(&game, &EpsConfig::default());
        assert!(strategy.next(&Position::empty()).unwrap());
        assert!(strategy.next(&Position::new(vec![true])).unwrap());
    }

    #[test]
    fn optimal_strategy_extension_reproduces_product_play() {
        let game = conjunction_game();
        let cfg = EpsConfig::default();
        let strategy = optimal_strategy(&game, &cfg);
        let ext = strategic_extension(&strategy, &Position::empty(), 4).unwrap();
        let play = eps_core(&Position::empty(), &game.selections, &game.functionals, &cfg).unwrap();
        assert_eq!(ext, play);
    }

    #[test]
    fn optimal_strategy_passes_verification() {
        let game = conjunction_game();
        let cfg = EpsConfig::default();
        let strategy = optimal_strategy(&game, &cfg);
        assert!(verify_optimality(&game, &strategy, 3).unwrap());
        assert!(verify_optimality_exhaustive(&game, &strategy, 3).unwrap());
    }

    #[test]
    fn constant_zero_strategy_fails_on_conjunction() {
        let game = conjunction_game();
        let strategy = Strategy::constant(false);
        assert!(!verify_optimality(&game, &strategy, 3).unwrap());
    }

    #[test]
    fn any_strategy_passes_when_only_root_is_relevant() {
        let game = bool_game(|_| false, |_| 0);
        let strategy = Strategy::constant(false);
        assert!(verify_optimality(&game, &strategy, 3).unwrap());
    }

    #[test]
    fn brute_force_solves_conjunction() {
        let game = conjunction_game();
        let play = brute_force_backward_induction(&game, 4, &EpsConfig::default()).unwrap();
        assert_eq!(play.prefix(), &[true, true]);
    }

    #[test]
    fn brute_force_unsatisfiable_outcome_gives_zero_play() {
        let game = bool_game(|_| false, |_| 2);
        let play = brute_force_backward_induction(&game, 4, &EpsConfig::default()).unwrap();
        assert_eq!(play, PaddedSequence::zeros());
    }

    #[test]
    fn brute_force_agrees_with_product_on_conjunction() {
        let game = conjunction_game();
        let cfg = EpsConfig::default();
        let oracle = brute_force_backward_induction(&game, 4, &cfg).unwrap();
        let play = eps_core(&Position::empty(), &game.selections, &game.functionals, &cfg).unwrap();
        assert_eq!(oracle, play);
    }

    #[test]
    fn play_trace_records_equilibrium_outcomes() {
        let game = conjunction_game();
        let trace = play_trace(&game, &EpsConfig::default()).unwrap();
        assert_eq!(trace.play, vec![true, true]);
        assert!(trace.outcome);
        assert_eq!(trace.relevant_length, 1);
        assert_eq!(trace.rounds.len(), 2);
        for round in &trace.rounds {
            assert_eq!(round.continuation_outcome, trace.outcome);
        }
    }

    #[test]
    fn corrupted_optimal_strategy_is_detected() {
        let game = conjunction_game();
        let cfg = EpsConfig::default();
        let strategy = optimal_strategy(&game, &cfg);
        let corrupted =
            strategy.with_overrides(vec![(Position::new(vec![true]), false)]);
        assert!(!verify_optimality(&game, &corrupted, 3).unwrap());
    }
}

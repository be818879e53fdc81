//! Acceptance suite: one test per shipping criterion. Each prints a single
//! pass line with its measured runtime against the stated limit; a failed
//! assertion is the corresponding fail line.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;

use selgames::bw::{bw_realizer, delta_selection, verify_bw, BwConfig};
use selgames::corpus::{
    comprehension_corpus, drinkers_corpus, game_corpus, injection_corpus, sequence_corpus,
};
use selgames::eps::{
    check_equilibrium, check_prefix_consistency, eps, finite_product, EpsConfig, GameFunctionals,
    PaddedSequence, Position, SelectionFamily,
};
use selgames::games::{
    brute_force_backward_induction, optimal_strategy, play_trace, verify_optimality,
};
use selgames::realizers::{
    collision_invariants_hold, drinkers_contract_holds, metastability_search,
    no_injection_witness, sigma1_ca_contract_holds, sigma1_ca_realizer, RationalSequence,
};
use selgames::selection::{hilbert_epsilon, FiniteDomain, SelectionFunction};
use selgames::sources::PsiSpec;
use selgames::Error;

fn report(number: u32, name: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < limit,
        "criterion {number} — {name}: FAIL (took {elapsed:?}, limit {limit:?})"
    );
    println!(
        "criterion {number} — {name}: pass ({} ms, limit {} ms)",
        elapsed.as_millis(),
        limit.as_millis()
    );
}

#[test]
fn criterion_01_prefix_consistency() {
    let started = Instant::now();
    let cfg = EpsConfig::default();
    for file in game_corpus(11, 200, 4) {
        let game = file.to_game().unwrap();
        let trace = play_trace(&game, &cfg).unwrap();
        let consistent = check_prefix_consistency(
            &Position::empty(),
            &game.selections,
            &game.functionals,
            trace.relevant_length,
            &cfg,
        )
        .unwrap();
        assert!(consistent, "game {file:?}");
    }
    report(
        1,
        "prefix consistency on 200 seeded games, exact equality",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_02_equilibrium() {
    let started = Instant::now();
    let cfg = EpsConfig::default();
    for file in game_corpus(11, 200, 4) {
        let game = file.to_game().unwrap();
        let balanced = check_equilibrium(&game.selections, &game.functionals, &cfg).unwrap();
        assert!(balanced, "game {file:?}");
    }
    report(
        2,
        "equilibrium equations on 200 seeded games, exact equality",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_03_backward_induction_oracle() {
    let started = Instant::now();
    let cfg = EpsConfig::default();
    let games = game_corpus(23, 50, 3);
    let mut corrupted_detected = 0u32;
    for file in &games {
        let game = file.to_game().unwrap();
        let product_play = eps(&Position::empty(), &game.selections, &game.functionals, &cfg)
            .unwrap();
        let induction_play = brute_force_backward_induction(&game, file.omega, &cfg).unwrap();
        assert_eq!(product_play, induction_play, "game {file:?}");

        let strategy = optimal_strategy(&game, &cfg);
        assert!(
            verify_optimality(&game, &strategy, file.omega).unwrap(),
            "game {file:?}"
        );

        // One corrupted sample per game: override the root with the next
        // domain element after the solver's own move.
        let played = strategy.next(&Position::empty()).unwrap();
        let other = game
            .universe
            .elements()
            .iter()
            .find(|m| **m != played)
            .copied()
            .unwrap();
        let corrupted = strategy.with_overrides(vec![(Position::empty(), other)]);
        if !verify_optimality(&game, &corrupted, file.omega).unwrap() {
            corrupted_detected += 1;
        }
    }
    let detected = f64::from(corrupted_detected) / games.len() as f64;
    assert!(
        detected >= 0.95,
        "only {corrupted_detected}/{} corrupted strategies detected",
        games.len()
    );
    report(
        3,
        "product play equals backward induction on 50 games; \
         corrupted strategies detected at >= 95%",
        started,
        Duration::from_secs(10),
    );
}

/// Exhaustively checks the product law on the full binary grid of the given
/// number of rounds: the product's play satisfies the predicate exactly when
/// some assignment does.
fn product_law_exhaustive(rounds: u32) {
    let cells = 1u32 << rounds;
    let domain = FiniteDomain::new(vec![false, true], false).unwrap();
    let cfg = EpsConfig::default();
    for table in 0..(1u64 << cells) {
        let q = move |play: &PaddedSequence<bool>| {
            let mut cell = 0u32;
            for round in 0..rounds {
                cell = (cell << 1) | u32::from(play.get(u64::from(round)));
            }
            table >> cell & 1 == 1
        };
        let family = SelectionFamily::uniform(hilbert_epsilon(&domain));
        let play = finite_product(
            u64::from(rounds) - 1,
            &family,
            Arc::new(move |play: &PaddedSequence<bool>| Ok(q(play))),
            &cfg,
        )
        .unwrap();
        let witness_exists = table != 0;
        assert_eq!(
            q(&play),
            witness_exists,
            "table {table:#b} over {rounds} rounds"
        );
    }
}

#[test]
fn criterion_04_product_existence_law() {
    let started = Instant::now();
    product_law_exhaustive(2);
    product_law_exhaustive(3);
    report(
        4,
        "product existence law, all 16 predicates on 2x2 and all 256 on 2x2x2",
        started,
        Duration::from_secs(2),
    );
}

#[test]
fn criterion_05_drinkers_contract() {
    let started = Instant::now();
    for sample in drinkers_corpus(17, 1000) {
        let pred = sample.pred();
        let responses = sample.response_fn();
        assert!(drinkers_contract_holds(&pred, &responses, 0).unwrap());
    }
    report(
        5,
        "drinkers implication on 1000 seeded predicate/counterexample pairs",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_06_metastability() {
    let started = Instant::now();
    let x = RationalSequence::new(|n| {
        BigRational::from_integer(BigInt::from(1))
            - BigRational::new(BigInt::from(1), BigInt::from(2u64).pow(n as u32))
    });
    for k in 0..=4u32 {
        let tolerance = BigRational::new(BigInt::from(1), BigInt::from(2u64).pow(k));
        for c in 0..=10u64 {
            let p = |n: u64| n + c;
            let witness = metastability_search(&x, k, &p).unwrap();
            let n = witness.index;
            // Nondecreasing, so the endpoint spread bounds the whole window.
            assert!(x.at(n + p(n)) - x.at(n) <= tolerance, "k={k} c={c}");
            assert!(witness.candidates <= (1 << k) + 1, "k={k} c={c}");
        }
    }
    let specific = metastability_search(&x, 1, &|n| n + 5).unwrap();
    assert_eq!(specific.index, 1);
    report(
        6,
        "metastable windows for k <= 4, offsets <= 10; (k=1, n+5) lands at 1",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_07_comprehension_contract() {
    let started = Instant::now();
    let cfg = EpsConfig::default();
    for sample in comprehension_corpus(29, 100) {
        let phi = sample.phi();
        let (omega, q) = (sample.omega.clone(), sample.q.clone());
        let functionals = GameFunctionals::new(
            move |play: &PaddedSequence<u64>| q.value(play),
            move |play: &PaddedSequence<u64>| omega.value(play),
        );
        let f = sigma1_ca_realizer(Arc::clone(&phi), &functionals, &cfg).unwrap();
        assert!(sigma1_ca_contract_holds(&phi, &f, &functionals).unwrap());
    }
    report(
        7,
        "comprehension membership implication on 100 seeded predicates",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_08_no_injection() {
    let started = Instant::now();
    let cfg = EpsConfig::default();
    for sample in injection_corpus(31, 50) {
        let psi = sample.build();
        let witness = no_injection_witness(&psi, &cfg).unwrap();
        assert!(
            collision_invariants_hold(&psi, &witness),
            "sample {sample:?}"
        );
    }
    report(
        8,
        "collision witnesses for 50 seeded claimed injections",
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_09_convergent_subsequences() {
    let started = Instant::now();
    let per_run_limit = Duration::from_secs(60);
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    let mut sequences = vec![
        RationalSequence::alternating(),
        RationalSequence::constant(third).unwrap(),
        RationalSequence::i_over_succ_i(),
    ];
    sequences.extend(sequence_corpus(37, 5, 16));
    let cfg = BwConfig::default();
    for (i, x) in sequences.iter().enumerate() {
        for psi_value in 0..=2u64 {
            let psi = PsiSpec::Const(psi_value).build();
            let run_started = Instant::now();
            let approx = bw_realizer(x, &psi, &cfg).unwrap();
            assert!(
                run_started.elapsed() < per_run_limit,
                "sequence {i}, psi const {psi_value}"
            );
            assert!(
                verify_bw(x, &psi, &approx),
                "sequence {i}, psi const {psi_value}"
            );
            assert!(
                approx
                    .b_fallback_indices
                    .iter()
                    .all(|idx| *idx > approx.psi_value),
                "fallback inside verified range: sequence {i}, psi const {psi_value}"
            );
        }
    }
    report(
        9,
        "subsequence window contract on 8 sequences x 3 counterexample \
         constants, default budgets, each run under 60 s",
        started,
        Duration::from_secs(8 * 3 * 60),
    );
}

#[test]
fn criterion_10_degenerate_paths() {
    let started = Instant::now();

    // A control functional that grows with the play it is given never bars
    // the product, so the budget is the only way out.
    let family = SelectionFamily::uniform(SelectionFunction::constant(1u64));
    let functionals = GameFunctionals::new(
        |_: &PaddedSequence<u64>| 0u64,
        |play: &PaddedSequence<u64>| play.prefix_len() + 1,
    );
    let err = eps(
        &Position::empty(),
        &family,
        &functionals,
        &EpsConfig::with_budget(1_000),
    )
    .unwrap_err();
    assert!(matches!(err, Error::BudgetExhausted { limit: 1_000 }));

    // The same failure through the binary: a game too deep for the budget
    // exits with the resource-limit status.
    let game = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples/deep_conjunction.json");
    let output = Command::new(env!("CARGO_BIN_EXE_selgames"))
        .args(["solve-game", game.to_str().unwrap(), "--max-depth", "10"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(3));

    // Interval-code length past the configured cap fails fast.
    let x = RationalSequence::alternating();
    let cfg = BwConfig::default();
    let err = delta_selection(&x, cfg.depth_cap_n + 1, &|_| Ok(0), &cfg).unwrap_err();
    assert!(matches!(err, Error::DepthCapExceeded { .. }));

    report(
        10,
        "unbarrable control exhausts its budget (library and exit status); \
         over-cap code length fails fast",
        started,
        Duration::from_secs(10),
    );
}

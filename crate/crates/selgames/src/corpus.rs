//! Seeded sample generators for the test corpora. Everything is driven by a
//! ChaCha stream cipher RNG, so a seed pins a corpus bit-for-bit.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eps::PaddedSequence;
use crate::gamefile::{Expr, GameFile};
use crate::realizers::{RationalSequence, SeqToNat};

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random outcome expression of the given depth reading rounds up to
/// `max_read`.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32, max_read: u64) -> Expr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_bool(0.7) {
            Expr::Read(rng.gen_range(0..=max_read))
        } else {
            Expr::Const(rng.gen_range(-2..=2))
        };
    }
    let a = Box::new(random_expr(rng, depth - 1, max_read));
    let b = Box::new(random_expr(rng, depth - 1, max_read));
    match rng.gen_range(0..14) {
        0 => Expr::Add(a, b),
        1 => Expr::Sub(a, b),
        2 => Expr::Mul(a, b),
        3 => Expr::Min(a, b),
        4 => Expr::Max(a, b),
        5 => Expr::Eq(a, b),
        6 => Expr::Ne(a, b),
        7 => Expr::Lt(a, b),
        8 => Expr::Le(a, b),
        9 => Expr::Gt(a, b),
        10 => Expr::Ge(a, b),
        11 => Expr::And(a, b),
        12 => Expr::Or(a, b),
        _ => Expr::Not(a),
    }
}

/// A random finite game: a two- or three-element move domain, a constant
/// control value at most `max_omega`, and an expression outcome.
pub fn random_game_file(rng: &mut ChaCha8Rng, max_omega: u64) -> GameFile {
    let move_domain = if rng.gen_bool(0.5) {
        vec![0, 1]
    } else {
        vec![0, 1, 2]
    };
    let omega = rng.gen_range(0..=max_omega);
    GameFile {
        move_domain,
        default_move: 0,
        omega,
        outcome: random_expr(rng, 3, omega),
        strategy: None,
    }
}

pub fn game_corpus(seed: u64, count: usize, max_omega: u64) -> Vec<GameFile> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| random_game_file(&mut rng, max_omega))
        .collect()
}

/// A drinkers-paradox instance: a predicate and a counterexample response
/// table, both over `0..=100`.
#[derive(Clone, Debug)]
pub struct DrinkersSample {
    pub holds: Vec<bool>,
    pub responses: Vec<u64>,
}

impl DrinkersSample {
    pub fn pred(&self) -> Arc<dyn Fn(&u64) -> bool + Send + Sync> {
        let holds = self.holds.clone();
        Arc::new(move |x| holds[(*x).min(100) as usize])
    }

    pub fn response_fn(&self) -> impl Fn(&u64) -> u64 + Send + Sync {
        let responses = self.responses.clone();
        move |x: &u64| responses[(*x).min(100) as usize]
    }
}

pub fn drinkers_corpus(seed: u64, count: usize) -> Vec<DrinkersSample> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| DrinkersSample {
            holds: (0..=100).map(|_| rng.gen_bool(0.3)).collect(),
            responses: (0..=100).map(|_| rng.gen_range(0..=100)).collect(),
        })
        .collect()
}

/// A constant or single-read-plus-offset functional with values capped at 8,
/// used as control and outcome functionals for comprehension games.
#[derive(Clone, Debug)]
pub enum SmallFunctional {
    Const(u64),
    ReadPlus { index: u64, offset: u64 },
}

impl SmallFunctional {
    pub fn value(&self, f: &PaddedSequence<u64>) -> u64 {
        match self {
            SmallFunctional::Const(c) => *c,
            SmallFunctional::ReadPlus { index, offset } => {
                f.get(*index).saturating_add(*offset).min(8)
            }
        }
    }

    fn random(rng: &mut ChaCha8Rng) -> Self {
        if rng.gen_bool(0.5) {
            SmallFunctional::Const(rng.gen_range(0..=8))
        } else {
            SmallFunctional::ReadPlus {
                index: rng.gen_range(0..=8),
                offset: rng.gen_range(0..=8),
            }
        }
    }
}

/// A comprehension instance: an existential predicate table over
/// `(n, k) <= 8` and the two counterexample functionals.
#[derive(Clone, Debug)]
pub struct ComprehensionSample {
    pub table: Vec<Vec<bool>>,
    pub omega: SmallFunctional,
    pub q: SmallFunctional,
}

impl ComprehensionSample {
    pub fn phi(&self) -> Arc<dyn Fn(u64, u64) -> bool + Send + Sync> {
        let table = self.table.clone();
        Arc::new(move |n, k| {
            *table
                .get(n as usize)
                .and_then(|row| row.get(k as usize))
                .unwrap_or(&false)
        })
    }
}

pub fn comprehension_corpus(seed: u64, count: usize) -> Vec<ComprehensionSample> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| ComprehensionSample {
            table: (0..9)
                .map(|_| (0..9).map(|_| rng.gen_bool(0.25)).collect())
                .collect(),
            omega: SmallFunctional::random(&mut rng),
            q: SmallFunctional::random(&mut rng),
        })
        .collect()
}

/// A claimed injection that reads at most three fixed positions, each with
/// index at most 3, and combines them modulo a small base — continuous by
/// construction, so its refutation terminates.
#[derive(Clone, Debug)]
pub struct InjectionSample {
    pub reads: Vec<(u64, u64)>,
    pub constant: u64,
    pub modulus: u64,
}

impl InjectionSample {
    pub fn build(&self) -> SeqToNat {
        let reads = self.reads.clone();
        let constant = self.constant;
        let modulus = self.modulus;
        Arc::new(move |f| {
            let mut acc = constant;
            for (position, coefficient) in &reads {
                acc = acc.wrapping_add(coefficient.wrapping_mul(f.get(*position)));
            }
            acc % modulus
        })
    }
}

pub fn injection_corpus(seed: u64, count: usize) -> Vec<InjectionSample> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| {
            let arity = rng.gen_range(1..=3);
            InjectionSample {
                reads: (0..arity)
                    .map(|_| (rng.gen_range(0..=3), rng.gen_range(1..=3)))
                    .collect(),
                constant: rng.gen_range(0..=3),
                modulus: rng.gen_range(1..=6),
            }
        })
        .collect()
}

/// Cyclic rational sequences with denominators at most `max_denominator`.
pub fn sequence_corpus(seed: u64, count: usize, max_denominator: u64) -> Vec<RationalSequence> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            let values = (0..len)
                .map(|_| {
                    let d = rng.gen_range(1..=max_denominator);
                    let n = rng.gen_range(0..=d);
                    BigRational::new(BigInt::from(n), BigInt::from(d))
                })
                .collect();
            RationalSequence::from_cycle(values).expect("generated values lie in [0, 1]")
        })
        .collect()
}

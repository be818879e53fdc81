//! Computational content of classical theorems, built from selection
//! functions and their controlled product.
//!
//! Each realizer turns a classical existence statement into a terminating
//! search whose result satisfies a checkable contract:
//!
//! * [`drinkers_selection`]: a single selection function whose choice `e`
//!   satisfies `P(p(e)) -> P(e)` for every counterexample function `p`.
//! * [`metastability_search`]: for a nondecreasing sequence into `[0, 1]`, a
//!   point `n` whose window `[n, n + p(n)]` varies by at most `2^-k`.
//! * [`sigma1_ca_realizer`]: a finite approximation to a comprehension
//!   function for an existential predicate, exact up to the control value.
//! * [`no_injection_witness`]: a collision of any claimed injection from
//!   sequence-valued functions into the naturals.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::eps::{
    eps, CanonicalZero, EpsConfig, GameFunctionals, PaddedSequence, Position, SelectionFamily,
};
use crate::error::Error;
use crate::selection::SelectionFunction;

/// Selection function for the drinkers paradox over moves `X` with outcomes
/// `X`: probe the candidate `p(zero)`; keep it if it satisfies `pred`,
/// otherwise settle for `zero`.
///
/// For every `p`, the chosen `e` satisfies `pred(p(e)) -> pred(e)`.
pub fn drinkers_selection<X>(
    pred: Arc<dyn Fn(&X) -> bool + Send + Sync>,
    zero: X,
) -> SelectionFunction<X, X>
where
    X: Clone + Send + Sync + 'static,
{
    SelectionFunction::new(move |p| {
        let candidate = p(&zero)?;
        if pred(&candidate) {
            Ok(candidate)
        } else {
            Ok(zero.clone())
        }
    })
}

/// Checks the drinkers contract `pred(p(e)) -> pred(e)` for the element `e`
/// chosen against `p`.
pub fn drinkers_contract_holds<X>(
    pred: &Arc<dyn Fn(&X) -> bool + Send + Sync>,
    p: &dyn Fn(&X) -> X,
    zero: X,
) -> Result<bool, Error>
where
    X: Clone + Send + Sync + 'static,
{
    let selection = drinkers_selection(Arc::clone(pred), zero);
    let chosen = selection.apply(&|x| Ok(p(x)))?;
    Ok(!pred(&p(&chosen)) || pred(&chosen))
}

/// A rational-valued sequence, assumed to take values in `[0, 1]`.
#[derive(Clone)]
pub struct RationalSequence {
    at: Arc<dyn Fn(u64) -> BigRational + Send + Sync>,
}

impl RationalSequence {
    pub fn new(at: impl Fn(u64) -> BigRational + Send + Sync + 'static) -> Self {
        RationalSequence { at: Arc::new(at) }
    }

    /// The sequence `0, 1, 0, 1, ...`.
    pub fn alternating() -> Self {
        RationalSequence::new(|i| {
            if i % 2 == 0 {
                BigRational::zero()
            } else {
                BigRational::one()
            }
        })
    }

    /// A constant sequence. The value must lie in `[0, 1]`.
    pub fn constant(value: BigRational) -> Result<Self, Error> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(Error::InvalidInput(format!(
                "constant sequence value {value} outside [0, 1]"
            )));
        }
        Ok(RationalSequence::new(move |_| value.clone()))
    }

    /// The sequence `i / (i + 1)`.
    pub fn i_over_succ_i() -> Self {
        RationalSequence::new(|i| {
            BigRational::new(BigInt::from(i), BigInt::from(i + 1))
        })
    }

    /// Cycles through a nonempty list of values, all required in `[0, 1]`.
    pub fn from_cycle(values: Vec<BigRational>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::InvalidInput("cycle must hold at least one value".into()));
        }
        for v in &values {
            if *v < BigRational::zero() || *v > BigRational::one() {
                return Err(Error::InvalidInput(format!("cycle value {v} outside [0, 1]")));
            }
        }
        Ok(RationalSequence::new(move |i| {
            values[(i % values.len() as u64) as usize].clone()
        }))
    }

    pub fn at(&self, i: u64) -> BigRational {
        (self.at)(i)
    }
}

/// Result of a metastability search: the start of the stable window and how
/// many candidate windows were examined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetastabilityWitness {
    pub index: u64,
    pub candidates: u64,
}

const METASTABILITY_CANDIDATE_CAP: u64 = 1_000_000;

/// Finds `n` with `|x_i - x_j| <= 2^-k` for all `i, j` in `[n, n + p(n)]`,
/// scanning candidates `n = 0, 1, 2, ...` and checking each window exactly.
///
/// `x` must be nondecreasing into `[0, 1]`; a decrease observed inside any
/// examined window fails with [`Error::MonotonicityViolation`]. For
/// nondecreasing `x` the scan provably terminates, but a generous hard cap
/// on candidates guards against inputs that break the range assumption
/// without ever decreasing inside an examined window.
pub fn metastability_search(
    x: &RationalSequence,
    k: u32,
    p: &dyn Fn(u64) -> u64,
) -> Result<MetastabilityWitness, Error> {
    let tolerance = BigRational::new(BigInt::one(), BigInt::from(2u64).pow(k));
    for n in 0..METASTABILITY_CANDIDATE_CAP {
        let end = n + p(n);
        let mut previous = x.at(n);
        for i in n..end {
            let next = x.at(i + 1);
            if next < previous {
                return Err(Error::MonotonicityViolation { index: i + 1 });
            }
            previous = next;
        }
        // Monotone on the window, so the spread is the endpoint difference.
        if previous - x.at(n) <= tolerance {
            return Ok(MetastabilityWitness {
                index: n,
                candidates: n + 1,
            });
        }
    }
    Err(Error::InternalInvariantViolation(
        "no metastable window within the candidate cap; sequence is not \
         nondecreasing into [0, 1]",
    ))
}

/// Per-round selection function for comprehension over the existential
/// predicate `phi`: given the opponent's bound `p(0)`, answer `p(0)` when
/// some witness `k < p(0)` satisfies `phi(n, k)`, and `0` otherwise.
pub fn sigma1_ca_selection(
    phi: Arc<dyn Fn(u64, u64) -> bool + Send + Sync>,
    n: u64,
) -> SelectionFunction<u64, u64> {
    SelectionFunction::new(move |p| {
        let bound = p(&0)?;
        if (0..bound).any(|k| phi(n, k)) {
            Ok(bound)
        } else {
            Ok(0)
        }
    })
}

/// Runs the controlled product over the comprehension selections, producing
/// a finite approximation `F` to the comprehension function of `phi`.
pub fn sigma1_ca_realizer(
    phi: Arc<dyn Fn(u64, u64) -> bool + Send + Sync>,
    functionals: &GameFunctionals<u64, u64>,
    cfg: &EpsConfig,
) -> Result<PaddedSequence<u64>, Error> {
    let family = SelectionFamily::by_round(move |n| sigma1_ca_selection(Arc::clone(&phi), n));
    eps(&Position::empty(), &family, functionals, cfg)
}

/// The comprehension contract: for every `i` up to the control value of `F`,
/// a witness below the outcome value exists exactly when one below `F(i)`
/// does (left to right; the converse holds because `F(i)` is `0` or the
/// claimed bound).
pub fn sigma1_ca_contract_holds(
    phi: &Arc<dyn Fn(u64, u64) -> bool + Send + Sync>,
    f: &PaddedSequence<u64>,
    functionals: &GameFunctionals<u64, u64>,
) -> Result<bool, Error> {
    let relevant = functionals.control(f)?;
    let claimed = functionals.outcome(f)?;
    for i in 0..=relevant {
        let exists_below_claimed = (0..claimed).any(|k| phi(i, k));
        let exists_below_fi = (0..f.get(i)).any(|k| phi(i, k));
        if exists_below_claimed && !exists_below_fi {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The finite comprehension set determined by `F`: the rounds `i` up to the
/// control value with a witness below `F(i)`.
pub fn sigma1_ca_approximation_set(
    phi: &Arc<dyn Fn(u64, u64) -> bool + Send + Sync>,
    f: &PaddedSequence<u64>,
    relevant: u64,
) -> Vec<u64> {
    (0..=relevant)
        .filter(|i| (0..f.get(*i)).any(|k| phi(*i, k)))
        .collect()
}

/// A function from naturals to naturals with finite support over a constant:
/// an explicit prefix followed by `tail` forever.
///
/// The moves of the no-injection game are values of this type; diagonal
/// outcome functions produce values with tail `1`, which a zero-padded
/// sequence could not represent exactly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NatSeq {
    prefix: Vec<u64>,
    tail: u64,
}

impl NatSeq {
    pub fn new(mut prefix: Vec<u64>, tail: u64) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        NatSeq { prefix, tail }
    }

    /// The constant function `c, c, c, ...`.
    pub fn constant(c: u64) -> Self {
        NatSeq::new(Vec::new(), c)
    }

    pub fn get(&self, k: u64) -> u64 {
        self.prefix.get(k as usize).copied().unwrap_or(self.tail)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }
}

impl CanonicalZero for NatSeq {
    fn canonical_zero() -> Self {
        NatSeq::constant(0)
    }
}

impl fmt::Debug for NatSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}*{}..", self.prefix, self.tail)
    }
}

/// A claimed injection: any total map from sequence-valued functions to
/// naturals (continuity is what makes the refutation terminate).
pub type SeqToNat = Arc<dyn Fn(&NatSeq) -> u64 + Send + Sync>;

/// Two distinct functions that `psi` maps to the same natural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionWitness {
    pub g1: NatSeq,
    pub g2: NatSeq,
    pub index: u64,
}

/// The diagonal outcome of a play of function moves: `k -> F_k(k) + 1`.
/// Beyond the play's support every move is the zero function, so the value
/// settles at `1`.
fn diagonal_successor(play: &PaddedSequence<NatSeq>) -> NatSeq {
    let len = play.prefix_len();
    let prefix = (0..len).map(|k| play.get(k).get(k) + 1).collect();
    NatSeq::new(prefix, 1)
}

/// Refutes injectivity of `psi`: plays the game whose round-`n` selection
/// keeps the probed candidate exactly when `psi` sends it to `n`, reads off
/// the diagonal `g1` of the resulting play, and returns it together with the
/// play's move `g2` at round `psi(g1)`.
///
/// The witness satisfies `psi(g1) = psi(g2) = index` and
/// `g1(index) = g2(index) + 1`, so `g1 != g2` while `psi` identifies them.
pub fn no_injection_witness(psi: &SeqToNat, cfg: &EpsConfig) -> Result<CollisionWitness, Error> {
    let selection_psi = Arc::clone(psi);
    let family = SelectionFamily::by_round(move |n| {
        let psi = Arc::clone(&selection_psi);
        SelectionFunction::new(move |p| {
            let candidate = p(&NatSeq::canonical_zero())?;
            if psi(&candidate) == n {
                Ok(candidate)
            } else {
                Ok(NatSeq::canonical_zero())
            }
        })
    });
    let outcome_psi = Arc::clone(psi);
    let functionals = GameFunctionals::new(diagonal_successor, move |play| {
        outcome_psi(&diagonal_successor(play))
    });
    let play = eps(&Position::empty(), &family, &functionals, cfg)?;
    let g1 = diagonal_successor(&play);
    let index = psi(&g1);
    let g2 = play.get(index);
    Ok(CollisionWitness { g1, g2, index })
}

/// Checks the collision contract of a witness against `psi`.
pub fn collision_invariants_hold(psi: &SeqToNat, witness: &CollisionWitness) -> bool {
    psi(&witness.g1) == witness.index
        && psi(&witness.g2) == witness.index
        && witness.g1.get(witness.index) == witness.g2.get(witness.index) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn drinkers_takes_the_probed_candidate() {
        let pred: Arc<dyn Fn(&u64) -> bool + Send + Sync> = Arc::new(|x| x % 3 == 0);
        let selection = drinkers_selection(Arc::clone(&pred), 0u64);
        let chosen = selection.apply(&|x| Ok(x + 3)).unwrap();
        assert_eq!(chosen, 3);
    }

    #[test]
    fn drinkers_settles_for_zero_when_probe_fails() {
        let pred: Arc<dyn Fn(&u64) -> bool + Send + Sync> = Arc::new(|_| false);
        let selection = drinkers_selection(Arc::clone(&pred), 0u64);
        let chosen = selection.apply(&|x| Ok(x + 3)).unwrap();
        assert_eq!(chosen, 0);
    }

    #[test]
    fn drinkers_contract_on_constant_counterexample() {
        let pred: Arc<dyn Fn(&u64) -> bool + Send + Sync> = Arc::new(|x| *x == 7);
        assert!(drinkers_contract_holds(&pred, &|_| 7, 0).unwrap());
        let selection = drinkers_selection(Arc::clone(&pred), 0u64);
        assert_eq!(selection.apply(&|_| Ok(7)).unwrap(), 7);
    }

    #[test]
    fn metastability_on_dyadic_approach() {
        let x = RationalSequence::new(|n| {
            BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(2u64).pow(n as u32))
        });
        let witness = metastability_search(&x, 1, &|n| n + 5).unwrap();
        assert_eq!(witness.index, 1);
        assert_eq!(witness.candidates, 2);
    }

    #[test]
    fn metastability_on_constant_sequence() {
        let x = RationalSequence::constant(rat(1, 3)).unwrap();
        let witness = metastability_search(&x, 4, &|n| 2 * n + 7).unwrap();
        assert_eq!(witness.index, 0);
        assert_eq!(witness.candidates, 1);
    }

    #[test]
    fn metastability_with_coarse_tolerance() {
        let x = RationalSequence::new(|n| rat(n.min(10) as i64, 10));
        let witness = metastability_search(&x, 0, &|n| n + 3).unwrap();
        assert_eq!(witness.index, 0);
    }

    #[test]
    fn metastability_rejects_decreasing_sequence() {
        let x = RationalSequence::new(|n| rat(1, 1 + n.min(100) as i64));
        let err = metastability_search(&x, 2, &|_| 4).unwrap_err();
        assert!(matches!(err, Error::MonotonicityViolation { .. }));
    }

    #[test]
    fn comprehension_selection_accepts_witnessed_bound() {
        let phi: Arc<dyn Fn(u64, u64) -> bool + Send + Sync> = Arc::new(|n, k| k == 2 * n);
        let selection = sigma1_ca_selection(Arc::clone(&phi), 1);
        assert_eq!(selection.apply(&|_| Ok(5)).unwrap(), 5);
        assert_eq!(selection.apply(&|_| Ok(0)).unwrap(), 0);
        let never: Arc<dyn Fn(u64, u64) -> bool + Send + Sync> = Arc::new(|_, _| false);
        let selection = sigma1_ca_selection(never, 1);
        assert_eq!(selection.apply(&|_| Ok(5)).unwrap(), 0);
    }

    #[test]
    fn comprehension_realizer_satisfies_contract() {
        let phi: Arc<dyn Fn(u64, u64) -> bool + Send + Sync> = Arc::new(|n, k| k == 2 * n);
        let functionals = GameFunctionals::new(|_| 6u64, |_| 2u64);
        let f = sigma1_ca_realizer(Arc::clone(&phi), &functionals, &EpsConfig::default()).unwrap();
        assert_eq!(f.take_prefix(3), vec![6, 6, 6]);
        assert!(sigma1_ca_contract_holds(&phi, &f, &functionals).unwrap());
        assert_eq!(sigma1_ca_approximation_set(&phi, &f, 2), vec![0, 1, 2]);
    }

    #[test]
    fn comprehension_realizer_on_empty_predicate() {
        let phi: Arc<dyn Fn(u64, u64) -> bool + Send + Sync> = Arc::new(|_, _| false);
        let functionals = GameFunctionals::new(|_| 6u64, |_| 2u64);
        let f = sigma1_ca_realizer(Arc::clone(&phi), &functionals, &EpsConfig::default()).unwrap();
        assert_eq!(f, PaddedSequence::zeros());
        assert!(sigma1_ca_contract_holds(&phi, &f, &functionals).unwrap());
        assert!(sigma1_ca_approximation_set(&phi, &f, 2).is_empty());
    }

    #[test]
    fn nat_seq_normalizes_against_tail() {
        let f = NatSeq::new(vec![2, 1, 1], 1);
        assert_eq!(f.prefix(), &[2]);
        assert_eq!(f.get(0), 2);
        assert_eq!(f.get(7), 1);
        assert_eq!(NatSeq::new(vec![1, 1], 1), NatSeq::constant(1));
    }

    #[test]
    fn no_injection_witness_for_head_projection() {
        let psi: SeqToNat = Arc::new(|f| f.get(0));
        let witness = no_injection_witness(&psi, &EpsConfig::default()).unwrap();
        assert!(collision_invariants_hold(&psi, &witness));
        assert_eq!(witness.index, 1);
        assert_eq!(witness.g1, NatSeq::new(vec![1, 2], 1));
        assert_eq!(witness.g2, NatSeq::constant(1));
    }

    #[test]
    fn no_injection_witness_for_constant_map() {
        let psi: SeqToNat = Arc::new(|_| 0);
        let witness = no_injection_witness(&psi, &EpsConfig::default()).unwrap();
        assert!(collision_invariants_hold(&psi, &witness));
        assert_eq!(witness.index, 0);
        assert_eq!(witness.g1.get(0), witness.g2.get(0) + 1);
    }

    #[test]
    fn no_injection_witness_for_wider_reader() {
        let psi: SeqToNat = Arc::new(|f| (f.get(0) + 2 * f.get(3)) % 5);
        let witness = no_injection_witness(&psi, &EpsConfig::default()).unwrap();
        assert!(collision_invariants_hold(&psi, &witness));
        assert_ne!(witness.g1, witness.g2);
    }
}

//! Convergent-subsequence approximations for rational sequences in the unit
//! interval, driven by the controlled product of selection functions.
//!
//! The pipeline: dyadic interval coding, the tree predicate `T`, per-round
//! selection functions `delta_n`, an approximate bound function `beta`
//! computed by the product, a binary bar recursion `N` locating a finite
//! path, and finally the path/subsequence pair `(A, B)` whose contract
//! [`verify_bw`] checks exactly.
//!
//! All arithmetic is exact rational arithmetic; interval membership at
//! dyadic boundaries is decided exactly.

use std::cell::Cell;
use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::eps::{
    eps_core, with_stack, EpsConfig, GameFunctionals, PaddedSequence, Position, SelectionFamily,
};
use crate::error::Error;
use crate::realizers::RationalSequence;

/// Tuning knobs for the subsequence search.
#[derive(Clone, Copy, Debug)]
pub struct BwConfig {
    /// Largest interval-code length `n` a round selection will handle; the
    /// per-round search degrades as `4^n` in the worst case, so overruns
    /// fail fast instead of hanging.
    pub depth_cap_n: u64,
    /// Expansion budget shared by the product run and each bar recursion.
    pub eps_budget: u64,
    /// When the path search finds no admissible prefix (a budget or
    /// continuity problem), fall back to the full path instead of failing.
    pub mu_fallback: bool,
}

impl Default for BwConfig {
    fn default() -> Self {
        BwConfig {
            depth_cap_n: 16,
            eps_budget: 100_000,
            mu_fallback: false,
        }
    }
}

/// Counterexample functional over a candidate path and bound function.
pub type PhiFn = Arc<dyn Fn(&PaddedSequence<bool>, &PaddedSequence<u64>) -> u64 + Send + Sync>;

/// Counterexample functional for the final approximation: sees the path `A`
/// and may probe the subsequence `B` at arbitrary indices.
pub type PsiFn =
    Arc<dyn Fn(&PaddedSequence<bool>, &mut dyn FnMut(u64) -> u64) -> u64 + Send + Sync>;

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Endpoints of the closed dyadic interval coded by `bits`: the empty code
/// yields `[0, 1]` and each bit halves the interval, `false` keeping the
/// lower half.
pub fn interval(bits: &[bool]) -> (BigRational, BigRational) {
    let mut lower = BigRational::zero();
    let mut width = BigRational::one();
    for &bit in bits {
        width *= half();
        if bit {
            lower += &width;
        }
    }
    let upper = &lower + &width;
    (lower, upper)
}

/// Closed-interval membership, decided exactly.
pub fn interval_contains(bits: &[bool], value: &BigRational) -> bool {
    let (lower, upper) = interval(bits);
    lower <= *value && *value <= upper
}

/// The tree predicate: `bits` codes an interval seen to contain some later
/// point, specifically some `x_i` with `|bits| < i <= k`.
pub fn tree_predicate(x: &RationalSequence, bits: &[bool], k: u64) -> bool {
    let n = bits.len() as u64;
    n < k && (n + 1..=k).any(|i| interval_contains(bits, &x.at(i)))
}

/// All length-`n` interval codes containing `value`: at most two, since a
/// point interior to the level-`n` grid has one code and a grid point has
/// two (closed intervals share endpoints).
fn codes_containing(value: &BigRational, n: u64) -> Vec<Vec<bool>> {
    if *value < BigRational::zero() || *value > BigRational::one() {
        return Vec::new();
    }
    let mut found = Vec::new();
    let mut frontier = vec![(Vec::new(), BigRational::zero(), BigRational::one())];
    while let Some((bits, lower, width)) = frontier.pop() {
        if bits.len() as u64 == n {
            found.push(bits);
            continue;
        }
        let next_width = &width * half();
        let mid = &lower + &next_width;
        if *value <= mid {
            let mut left = bits.clone();
            left.push(false);
            frontier.push((left, lower.clone(), next_width.clone()));
        }
        if *value >= mid {
            let mut right = bits;
            right.push(true);
            frontier.push((right, mid, next_width));
        }
    }
    found
}

/// Does `T(s, antecedent) -> T(s, consequent)` hold for every length-`n`
/// code `s`? Only codes containing a witness point of the antecedent can
/// falsify the implication, and each witness lies in at most two codes, so
/// the check enumerates witnesses instead of all `2^n` codes.
fn bound_refinement_holds(
    x: &RationalSequence,
    n: u64,
    antecedent: u64,
    consequent: u64,
) -> bool {
    if antecedent <= n {
        return true;
    }
    let mut checked: HashSet<Vec<bool>> = HashSet::new();
    for i in n + 1..=antecedent {
        let xi = x.at(i);
        for code in codes_containing(&xi, n) {
            if checked.insert(code.clone()) && !tree_predicate(x, &code, consequent) {
                return false;
            }
        }
    }
    true
}

/// The round-`n` selection: iterate the outcome map from `0` and return the
/// first iterate `m` such that extending the bound from `m` to its outcome
/// reveals no interval code newly seen to contain a point. At most `2^n`
/// iterations are needed because there are only `2^n` codes of length `n`.
pub fn delta_selection(
    x: &RationalSequence,
    n: u64,
    p: &dyn Fn(u64) -> Result<u64, Error>,
    cfg: &BwConfig,
) -> Result<u64, Error> {
    if n > cfg.depth_cap_n {
        return Err(Error::DepthCapExceeded {
            n,
            cap: cfg.depth_cap_n,
        });
    }
    let tries = 1u64
        .checked_shl(u32::try_from(n).unwrap_or(u32::MAX))
        .unwrap_or(u64::MAX);
    let mut current = 0u64;
    for _ in 0..=tries {
        let next = p(current)?;
        if bound_refinement_holds(x, n, next, current) {
            return Ok(current);
        }
        current = next;
    }
    Err(Error::InternalInvariantViolation(
        "no stable iterate within 2^n steps; the pigeonhole bound was violated",
    ))
}

/// The family of round selections over a fixed sequence.
pub fn delta_family(x: RationalSequence, cfg: BwConfig) -> SelectionFamily<u64, u64> {
    SelectionFamily::by_round(move |n| {
        let x = x.clone();
        crate::selection::SelectionFunction::new(move |p| {
            delta_selection(&x, n, &|v| p(&v), &cfg)
        })
    })
}

/// Runs the controlled product over the round selections, yielding a bound
/// function `beta` with: for every `n` up to the control value and every
/// length-`n` code `s`, `T(s, outcome(beta))` implies `T(s, beta(n))`.
pub fn beta_via_eps(
    x: &RationalSequence,
    functionals: &GameFunctionals<u64, u64>,
    cfg: &BwConfig,
) -> Result<PaddedSequence<u64>, Error> {
    let eps_cfg = EpsConfig::with_budget(cfg.eps_budget);
    let family = delta_family(x.clone(), *cfg);
    with_stack(eps_cfg.stack_bytes, || {
        eps_core(&Position::empty(), &family, functionals, &eps_cfg)
    })
}

fn all_codes(n: u64) -> Vec<Vec<bool>> {
    let mut codes = vec![Vec::new()];
    for _ in 0..n {
        codes = codes
            .into_iter()
            .flat_map(|code| {
                [false, true].map(|bit| {
                    let mut next = code.clone();
                    next.push(bit);
                    next
                })
            })
            .collect();
    }
    codes
}

/// Exhaustively checks the bound-function contract of [`beta_via_eps`].
/// Exponential in the control value; intended for small desk checks.
pub fn bound_contract_holds(
    x: &RationalSequence,
    functionals: &GameFunctionals<u64, u64>,
    beta: &PaddedSequence<u64>,
) -> Result<bool, Error> {
    let rounds = functionals.control(beta)?;
    if rounds > 16 {
        return Err(Error::InvalidInput(format!(
            "exhaustive contract check over 2^{rounds} codes refused"
        )));
    }
    let claimed = functionals.outcome(beta)?;
    for n in 0..=rounds {
        for code in all_codes(n) {
            if tree_predicate(x, &code, claimed) && !tree_predicate(x, &code, beta.get(n)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn canonical_bits(bits: &[bool]) -> PaddedSequence<bool> {
    PaddedSequence::from_prefix(bits.to_vec())
}

fn spend(remaining: &Cell<u64>, limit: u64) -> Result<(), Error> {
    let left = remaining.get();
    if left == 0 {
        return Err(Error::BudgetExhausted { limit });
    }
    remaining.set(left - 1);
    Ok(())
}

// Every proper prefix of `path`, and `path` itself, is known unbarred, so
// children only test their own new prefix.
fn bar_height(
    phi: &PhiFn,
    beta: &PaddedSequence<u64>,
    path: &mut Vec<bool>,
    remaining: &Cell<u64>,
    limit: u64,
) -> Result<u64, Error> {
    spend(remaining, limit)?;
    let mut tallest = 0;
    for bit in [false, true] {
        path.push(bit);
        let barred = phi(&canonical_bits(path), beta) < path.len() as u64;
        let below = if barred {
            0
        } else {
            bar_height(phi, beta, path, remaining, limit)?
        };
        path.pop();
        tallest = tallest.max(below);
    }
    Ok(1 + tallest)
}

/// Binary bar recursion: the height of the unbarred tree above `t`, where a
/// node `s` is barred as soon as `phi` on its zero-extension drops below
/// `|s|`. Returns `0` when some prefix of `t` is already barred; budget
/// exhaustion signals a `phi` that never bars the tree.
pub fn howard_bar_rec(
    phi: &PhiFn,
    beta: &PaddedSequence<u64>,
    t: &[bool],
    cfg: &BwConfig,
) -> Result<u64, Error> {
    for len in 0..=t.len() {
        if phi(&canonical_bits(&t[..len]), beta) < len as u64 {
            return Ok(0);
        }
    }
    let remaining = Cell::new(cfg.eps_budget);
    let mut path = t.to_vec();
    bar_height(phi, beta, &mut path, &remaining, cfg.eps_budget)
}

/// The length-`n` interval code containing the point `x_n`, built by greedy
/// bisection; an exact midpoint keeps the lower half.
pub fn h_function(x: &RationalSequence, n: u64) -> Vec<bool> {
    let value = x.at(n);
    let mut bits = Vec::with_capacity(n as usize);
    let mut lower = BigRational::zero();
    let mut width = BigRational::one();
    for _ in 0..n {
        width *= half();
        let mid = &lower + &width;
        if value <= mid {
            bits.push(false);
        } else {
            bits.push(true);
            lower = mid;
        }
    }
    bits
}

/// A path search result: the chosen path and whether the full-path fallback
/// was taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathApproximation {
    pub a: PaddedSequence<bool>,
    pub mu_fallback_used: bool,
}

/// Finds the path approximation `A`: the shortest prefix of the bisection
/// path of length `N(<>)` that `phi` bars, zero-extended. By the bar
/// recursion's bound fact some prefix must qualify; a fruitless scan fails
/// with [`Error::MuSearchFailed`] unless the fallback is enabled.
pub fn construct_a(
    x: &RationalSequence,
    phi: &PhiFn,
    beta: &PaddedSequence<u64>,
    cfg: &BwConfig,
) -> Result<PathApproximation, Error> {
    let height = howard_bar_rec(phi, beta, &[], cfg)?;
    let path = h_function(x, height);
    for len in 0..=path.len() {
        if phi(&canonical_bits(&path[..len]), beta) < len as u64 {
            return Ok(PathApproximation {
                a: canonical_bits(&path[..len]),
                mu_fallback_used: false,
            });
        }
    }
    if cfg.mu_fallback {
        Ok(PathApproximation {
            a: canonical_bits(&path),
            mu_fallback_used: true,
        })
    } else {
        Err(Error::MuSearchFailed)
    }
}

/// Lazily materialized subsequence `b`: `b(0) = 0`, and `b(n+1)` is the
/// least index in `(b(n)+1, beta(b(n)+1)]` whose point lies in the interval
/// coded by the first `b(n)+1` bits of `a`. An empty search steps to
/// `b(n)+1` instead and records the fallback, keeping `b` total and strictly
/// increasing — the bar recursion probes it on unverified candidates.
pub struct SubsequenceOracle {
    x: RationalSequence,
    a: PaddedSequence<bool>,
    beta: PaddedSequence<u64>,
    values: Vec<u64>,
    fallback_indices: Vec<u64>,
}

impl SubsequenceOracle {
    pub fn new(x: RationalSequence, a: PaddedSequence<bool>, beta: PaddedSequence<u64>) -> Self {
        SubsequenceOracle {
            x,
            a,
            beta,
            values: vec![0],
            fallback_indices: Vec::new(),
        }
    }

    pub fn get(&mut self, n: u64) -> u64 {
        while (self.values.len() as u64) <= n {
            self.extend();
        }
        self.values[n as usize]
    }

    fn extend(&mut self) {
        let previous = *self.values.last().expect("oracle always holds b(0)");
        let start = previous + 1;
        let bound = self.beta.get(start);
        let code = self.a.take_prefix(start);
        let found = (start + 1..=bound).find(|i| interval_contains(&code, &self.x.at(*i)));
        match found {
            Some(i) => self.values.push(i),
            None => {
                self.fallback_indices.push(self.values.len() as u64);
                self.values.push(start);
            }
        }
    }

    pub fn fallback_indices(&self) -> &[u64] {
        &self.fallback_indices
    }

    /// The values materialized so far, as a padded sequence.
    pub fn materialized(&self) -> PaddedSequence<u64> {
        PaddedSequence::from_prefix(self.values.clone())
    }
}

/// Running maximum of `beta` over indices up to `n + 1`.
pub fn beta_tilde(beta: &PaddedSequence<u64>, n: u64) -> u64 {
    let top = n.saturating_add(1).min(beta.prefix_len());
    (0..=top).map(|i| beta.get(i)).max().unwrap_or(0)
}

fn iterate_beta_tilde(beta: &PaddedSequence<u64>, times: u64) -> u64 {
    let mut value = 0;
    for _ in 0..times {
        let next = beta_tilde(beta, value);
        if next == value {
            break;
        }
        value = next;
    }
    value
}

/// Turns a counterexample functional on `(A, B)` into one on `(A, beta)`:
/// build the subsequence for the candidate pair, apply `psi` to it, and
/// iterate the running maximum of `beta` that many times from `0`.
pub fn phi_from_psi(x: &RationalSequence, psi: &PsiFn) -> PhiFn {
    let x = x.clone();
    let psi = Arc::clone(psi);
    Arc::new(move |a, beta| {
        let mut oracle = SubsequenceOracle::new(x.clone(), a.clone(), beta.clone());
        let probes = psi(a, &mut |i| oracle.get(i));
        iterate_beta_tilde(beta, probes)
    })
}

/// Checks the path contract of [`construct_a`]: every restriction of `a` up
/// to `phi(a, beta)` codes an interval containing a point indexed within the
/// `beta` bound for that length.
pub fn path_contract_holds(
    x: &RationalSequence,
    phi: &PhiFn,
    a: &PaddedSequence<bool>,
    beta: &PaddedSequence<u64>,
) -> bool {
    let rounds = phi(a, beta);
    (0..=rounds).all(|n| tree_predicate(x, &a.take_prefix(n), beta.get(n)))
}

/// A finite convergent-subsequence approximation: interval-code path `a`,
/// strictly increasing index sequence `b`, the bound function `beta` behind
/// them, and the counterexample value they were verified against.
#[derive(Clone, Debug)]
pub struct BwApproximation {
    pub a: PaddedSequence<bool>,
    pub b: PaddedSequence<u64>,
    pub beta: PaddedSequence<u64>,
    pub psi_value: u64,
    /// Subsequence steps that took the totalizing fallback; sound output
    /// has none at or below `psi_value` (a fallback there would mean a
    /// verified index was never found inside its interval).
    pub b_fallback_indices: Vec<u64>,
    pub mu_fallback_used: bool,
}

/// End-to-end search: given a counterexample functional `psi`, produce
/// `(a, b)` such that for all `n <= psi(a, b)` the indices `b` strictly
/// increase and `x_{b(n)}` lies in the interval coded by the first `n` bits
/// of `a`.
/// Builds the bound sequence round by round against the self-referential
/// outcome: each candidate play scores one more than the bar height it
/// induces, and a round is relevant while that score (of the zero-padded
/// prefix) has not yet dropped below the round index.
///
/// Round moves come from [`delta_selection`], with the local outcome
/// evaluated on the zero-padded extension of the prefix. Re-solving the
/// continuation at every probe instead would feed each probed move back
/// into the bar height, inflating the score of every deeper candidate;
/// the relevant horizon then outruns any depth cap and the probe tree
/// grows exponentially with it. The zero-padded probe keeps the search
/// linear in the horizon; what the continuation search is ultimately for —
/// window bounds wide enough for the subsequence along the chosen path —
/// is checked on the finished approximation by [`bw_realizer`], so a bad
/// bound sequence is an error, never a silent output.
///
/// Returns the bound sequence together with its final score.
pub fn construct_beta(
    x: &RationalSequence,
    phi: &PhiFn,
    cfg: &BwConfig,
) -> Result<(PaddedSequence<u64>, u64), Error> {
    let score = |prefix: &[u64]| -> Result<u64, Error> {
        let play = PaddedSequence::from_prefix(prefix.to_vec());
        Ok(howard_bar_rec(phi, &play, &[], cfg)? + 1)
    };
    let mut prefix: Vec<u64> = Vec::new();
    loop {
        let n = prefix.len() as u64;
        let bound = score(&prefix)?;
        if bound < n {
            return Ok((PaddedSequence::from_prefix(prefix), bound));
        }
        let p = |m: u64| -> Result<u64, Error> {
            let mut candidate = prefix.clone();
            candidate.push(m);
            score(&candidate)
        };
        let move_n = delta_selection(x, n, &p, cfg)?;
        prefix.push(move_n);
    }
}

pub fn bw_realizer(
    x: &RationalSequence,
    psi: &PsiFn,
    cfg: &BwConfig,
) -> Result<BwApproximation, Error> {
    let phi = phi_from_psi(x, psi);
    let (beta, _) = construct_beta(x, &phi, cfg)?;
    let path = construct_a(x, &phi, &beta, cfg)?;
    let mut oracle = SubsequenceOracle::new(x.clone(), path.a.clone(), beta.clone());
    let mut deepest_probe = 0u64;
    let psi_value = psi(&path.a, &mut |i| {
        deepest_probe = deepest_probe.max(i);
        oracle.get(i)
    });
    // Materialize everything the verifier can touch: the contract reads
    // b up to psi_value + 1 and psi re-probes the same indices.
    oracle.get(deepest_probe.max(psi_value + 1));
    // The windows the bound sequence granted must have been wide enough for
    // every verified step of the subsequence: a fallback inside the range,
    // a non-increase, or a point outside its interval means the bound
    // search undershot the path and the output would be unsound.
    let in_contract = oracle.fallback_indices().iter().all(|i| *i > psi_value)
        && (0..=psi_value).all(|n| {
            let here = oracle.materialized().get(n);
            here < oracle.materialized().get(n + 1)
                && interval_contains(&path.a.take_prefix(n), &x.at(here))
        });
    if !in_contract {
        return Err(Error::InternalInvariantViolation(
            "bound sequence left the subsequence search short of its window contract",
        ));
    }
    Ok(BwApproximation {
        a: path.a,
        b: oracle.materialized(),
        beta,
        psi_value,
        b_fallback_indices: oracle.fallback_indices().to_vec(),
        mu_fallback_used: path.mu_fallback_used,
    })
}

/// Checks the approximation contract against `psi` from scratch: for all
/// `n <= psi(a, b)`, `b(n) < b(n+1)` and `x_{b(n)}` lies in the interval
/// coded by the first `n` bits of `a`.
pub fn verify_bw(x: &RationalSequence, psi: &PsiFn, approx: &BwApproximation) -> bool {
    let bound = psi(&approx.a, &mut |i| approx.b.get(i));
    (0..=bound).all(|n| {
        let here = approx.b.get(n);
        let next = approx.b.get(n + 1);
        here < next && interval_contains(&approx.a.take_prefix(n), &x.at(here))
    })
}

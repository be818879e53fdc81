//! Selection functions and their quantifiers.
//!
//! A selection function of type `(X -> R) -> X` picks an element of `X` when
//! handed a map from elements to outcomes; its associated quantifier reports
//! the outcome of the chosen element. The binary product combines a selection
//! function for the first coordinate with a family for the second so that the
//! chosen pair is optimal for predicates over pairs.
//!
//! Outcome maps are fallible (`Result`) so that selections built from
//! recursive searches can propagate budget errors without a side channel.

use std::sync::Arc;

use crate::error::Error;

/// The argument handed to a selection function: a map from moves to outcomes.
/// Carries a lifetime so that borrowing closures qualify.
pub type OutcomeMap<'a, X, R> = dyn Fn(&X) -> Result<R, Error> + 'a;

/// A selection function `(X -> R) -> X`.
pub struct SelectionFunction<X, R> {
    #[allow(clippy::type_complexity)]
    f: Arc<dyn for<'a> Fn(&OutcomeMap<'a, X, R>) -> Result<X, Error> + Send + Sync>,
}

impl<X, R> Clone for SelectionFunction<X, R> {
    fn clone(&self) -> Self {
        SelectionFunction {
            f: Arc::clone(&self.f),
        }
    }
}

impl<X, R> SelectionFunction<X, R> {
    pub fn new(
        f: impl for<'a> Fn(&OutcomeMap<'a, X, R>) -> Result<X, Error> + Send + Sync + 'static,
    ) -> Self {
        SelectionFunction { f: Arc::new(f) }
    }

    /// A selection function that ignores the outcome map.
    pub fn constant(x: X) -> Self
    where
        X: Clone + Send + Sync + 'static,
    {
        SelectionFunction::new(move |_| Ok(x.clone()))
    }

    pub fn apply(&self, p: &OutcomeMap<'_, X, R>) -> Result<X, Error> {
        (self.f)(p)
    }
}

/// A quantifier `(X -> R) -> R`.
pub struct Quantifier<X, R> {
    #[allow(clippy::type_complexity)]
    f: Arc<dyn for<'a> Fn(&OutcomeMap<'a, X, R>) -> Result<R, Error> + Send + Sync>,
}

impl<X, R> Clone for Quantifier<X, R> {
    fn clone(&self) -> Self {
        Quantifier {
            f: Arc::clone(&self.f),
        }
    }
}

impl<X, R> Quantifier<X, R> {
    pub fn new(
        f: impl for<'a> Fn(&OutcomeMap<'a, X, R>) -> Result<R, Error> + Send + Sync + 'static,
    ) -> Self {
        Quantifier { f: Arc::new(f) }
    }

    pub fn apply(&self, p: &OutcomeMap<'_, X, R>) -> Result<R, Error> {
        (self.f)(p)
    }
}

/// The quantifier attained by a selection function: `p(epsilon(p))`.
pub fn quantifier_of<X, R>(epsilon: &SelectionFunction<X, R>) -> Quantifier<X, R>
where
    X: Send + Sync + 'static,
    R: Send + Sync + 'static,
{
    let epsilon = epsilon.clone();
    Quantifier::new(move |p| {
        let chosen = epsilon.apply(p)?;
        p(&chosen)
    })
}

/// A nonempty, explicitly ordered move universe with a distinguished default.
///
/// The element order is fixed and is the order every search respects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDomain<X> {
    elements: Vec<X>,
    default: X,
}

impl<X: Clone + PartialEq> FiniteDomain<X> {
    pub fn new(elements: Vec<X>, default: X) -> Result<Self, Error> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("move domain must be nonempty".into()));
        }
        if !elements.contains(&default) {
            return Err(Error::InvalidInput(
                "default move must be an element of the domain".into(),
            ));
        }
        Ok(FiniteDomain { elements, default })
    }

    pub fn elements(&self) -> &[X] {
        &self.elements
    }

    pub fn default_element(&self) -> &X {
        &self.default
    }

    pub fn contains(&self, x: &X) -> bool {
        self.elements.contains(x)
    }
}

/// Hilbert choice over a finite domain: the first element (in declared
/// order) whose outcome satisfies `truthy`, or the default when none does.
pub fn hilbert_epsilon_by<X, R>(
    domain: &FiniteDomain<X>,
    truthy: impl Fn(&R) -> bool + Send + Sync + 'static,
) -> SelectionFunction<X, R>
where
    X: Clone + PartialEq + Send + Sync + 'static,
{
    let domain = domain.clone();
    SelectionFunction::new(move |p| {
        for x in domain.elements() {
            if truthy(&p(x)?) {
                return Ok(x.clone());
            }
        }
        Ok(domain.default_element().clone())
    })
}

/// Hilbert choice for boolean outcomes: the first witness of `p`, or the
/// default when `p` has no witness in the domain.
pub fn hilbert_epsilon<X>(domain: &FiniteDomain<X>) -> SelectionFunction<X, bool>
where
    X: Clone + PartialEq + Send + Sync + 'static,
{
    hilbert_epsilon_by(domain, |b| *b)
}

/// The binary product of selection functions.
///
/// Returns the pair `(a, A(a))` where `A(x)` is the second coordinate chosen
/// by `second(x)` against `q(x, .)`, and `a` is chosen by `first` against
/// `x -> q(x, A(x))`. When `q` has a satisfying pair and both inputs attain
/// their quantifiers, the returned pair satisfies `q`.
pub fn binary_product<X, Y, R>(
    first: &SelectionFunction<X, R>,
    second: impl Fn(&X) -> SelectionFunction<Y, R>,
    q: impl Fn(&X, &Y) -> Result<R, Error>,
) -> Result<(X, Y), Error>
where
    X: Clone,
{
    let best_second = |x: &X| -> Result<Y, Error> { second(x).apply(&|y| q(x, y)) };
    let a = first.apply(&|x| {
        let ax = best_second(x)?;
        q(x, &ax)
    })?;
    let b = best_second(&a)?;
    Ok((a, b))
}

/// The simple product: a binary product whose second family is constant.
pub fn simple_product<X, Y, R>(
    first: &SelectionFunction<X, R>,
    second: &SelectionFunction<Y, R>,
    q: impl Fn(&X, &Y) -> Result<R, Error>,
) -> Result<(X, Y), Error>
where
    X: Clone,
{
    binary_product(first, |_| second.clone(), q)
}

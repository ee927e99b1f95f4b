//! Evaluation-only functions over a field.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::poly::MultiPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("black box evaluation failed: {0}")]
pub struct EvalError(pub String);

/// A function `F^n -> F` that can only be evaluated. Implementations must be
/// deterministic and safe to call from several threads at once.
pub trait BlackBox: Sync {
    fn field(&self) -> &Field;
    fn arity(&self) -> usize;
    fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, EvalError>;
}

impl BlackBox for MultiPoly {
    fn field(&self) -> &Field {
        MultiPoly::field(self)
    }

    fn arity(&self) -> usize {
        self.nvars()
    }

    fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, EvalError> {
        self.evaluate(point).map_err(|e| EvalError(e.to_string()))
    }
}

impl<B: BlackBox + ?Sized> BlackBox for &B {
    fn field(&self) -> &Field {
        (**self).field()
    }

    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, EvalError> {
        (**self).eval(point)
    }
}

/// Wraps a closure as a black box.
pub struct FnBox<F> {
    field: Field,
    arity: usize,
    func: F,
}

impl<F> FnBox<F>
where
    F: Fn(&[FieldElement]) -> FieldElement + Sync,
{
    pub fn new(field: &Field, arity: usize, func: F) -> Self {
        FnBox {
            field: field.clone(),
            arity,
            func,
        }
    }
}

impl<F> BlackBox for FnBox<F>
where
    F: Fn(&[FieldElement]) -> FieldElement + Sync,
{
    fn field(&self) -> &Field {
        &self.field
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, EvalError> {
        if point.len() != self.arity {
            return Err(EvalError(format!(
                "expected {} inputs, got {}",
                self.arity,
                point.len()
            )));
        }
        Ok((self.func)(point))
    }
}

/// Counts evaluations of the wrapped black box.
pub struct Counted<B> {
    inner: B,
    calls: AtomicU64,
}

impl<B: BlackBox> Counted<B> {
    pub fn new(inner: B) -> Self {
        Counted {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    pub fn into_inner(self) -> B {
        self.inner
    }
}

impl<B: BlackBox> BlackBox for Counted<B> {
    fn field(&self) -> &Field {
        self.inner.field()
    }

    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, EvalError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(point)
    }
}

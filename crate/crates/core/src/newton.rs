//! Certified square roots of positive rationals by Newton iteration.

use std::sync::{Arc, Mutex};

use crate::completion::Chain;
use crate::error::DomainError;
use crate::interval::{IntervalBase, IntervalQ};
use crate::numerics::Rational;
use crate::reals::Real;

/// One row of the width/modulus comparison for `√q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtTableRow {
    pub iteration: usize,
    pub lower: Rational,
    pub upper: Rational,
    /// `upper − lower`.
    pub width: Rational,
    /// `(s̄_0 − s̲_0) / 2^n`.
    pub modulus_bound: Rational,
}

/// Newton iterates `s̄_n = ½(s̄_{n−1} + q/s̄_{n−1})` from `s̄_{−1} = 1`,
/// with `s̲_n = q/s̄_n`, computed forward and kept.
struct Iterates {
    q: Rational,
    upper: Mutex<Vec<Rational>>,
}

impl Iterates {
    fn new(q: Rational) -> Self {
        Iterates {
            q,
            upper: Mutex::new(Vec::new()),
        }
    }

    fn level(&self, n: usize) -> IntervalQ {
        let mut upper = self.upper.lock().expect("newton memo poisoned");
        while upper.len() <= n {
            let prev = upper.last().cloned().unwrap_or_else(Rational::one);
            let next = (&prev + &self.q.checked_div(&prev).expect("iterates are positive")).half();
            upper.push(next);
        }
        let hi = upper[n].clone();
        let lo = self.q.checked_div(&hi).expect("iterates are positive");
        IntervalQ::new(lo, hi).expect("s̲_n ≤ s̄_n")
    }
}

fn check_positive(q: &Rational) -> Result<(), DomainError> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(DomainError::NonPositive(q.to_string()))
    }
}

/// `√q` as the chain `([s̲_n, s̄_n])_n`. Widths at least halve at each
/// step, which gives the width hint.
pub fn sqrt(q: &Rational) -> Result<Real, DomainError> {
    check_positive(q)?;
    let it = Arc::new(Iterates::new(q.clone()));
    let w0 = it.level(0).length();
    let gen = it.clone();
    let chain = Chain::from_fn(IntervalBase, move |n| gen.level(n));
    Ok(Real::with_hint(chain, move |k| {
        let target = Rational::pow2(-(k as i64));
        let mut w = w0.clone();
        let mut n = 0;
        while w > target {
            w = w.half();
            n += 1;
        }
        n
    }))
}

/// Rows `1..=iters` of the comparison between the interval width and the
/// modulus bound `(s̄_0 − s̲_0)/2^n`.
pub fn sqrt_table(q: &Rational, iters: usize) -> Result<Vec<SqrtTableRow>, DomainError> {
    check_positive(q)?;
    let it = Iterates::new(q.clone());
    let w0 = it.level(0).length();
    let mut modulus = w0;
    let mut rows = Vec::with_capacity(iters);
    for n in 1..=iters {
        modulus = modulus.half();
        let (lower, upper) = it.level(n).into_bounds();
        rows.push(SqrtTableRow {
            iteration: n,
            width: &upper - &lower,
            lower,
            upper,
            modulus_bound: modulus.clone(),
        });
    }
    Ok(rows)
}

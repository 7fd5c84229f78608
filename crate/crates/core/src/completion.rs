//! The continuous completion of a predomain base: increasing chains of base
//! elements, ordered by transfer of way-below approximants.
//!
//! The order on chains is a classical (Π2) statement. It is observed here
//! through budgeted probes: [`ProbeResult::ConfirmedUpTo`] means every probe
//! inspected up to the budget succeeded, which is evidence and not a proof;
//! [`ProbeResult::Refuted`] is a definite counterexample, made permanent by
//! monotonicity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::DomainError;
use crate::predomain::{Base, WayBelow};

type Generator<E> = dyn Fn(usize) -> Result<E, DomainError> + Send + Sync;

struct Inner<E> {
    gen: Box<Generator<E>>,
    memo: Mutex<BTreeMap<usize, E>>,
    stationary: bool,
}

/// A memoized, lazily evaluated increasing sequence `(b_n)_n` in a base.
pub struct Chain<B: Base> {
    base: B,
    inner: Arc<Inner<B::Elem>>,
}

impl<B: Base> Clone for Chain<B> {
    fn clone(&self) -> Self {
        Chain {
            base: self.base.clone(),
            inner: Arc::clone(&self.inner),
        }
    }
}

impl<B: Base> fmt::Debug for Chain<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let memo = self.inner.memo.lock().expect("chain memo poisoned");
        f.debug_struct("Chain")
            .field("computed", &*memo)
            .field("stationary", &self.inner.stationary)
            .finish()
    }
}

impl<B: Base> Chain<B> {
    /// `gen` must be deterministic; monotonicity is checked on access.
    pub fn new(base: B, gen: impl Fn(usize) -> Result<B::Elem, DomainError> + Send + Sync + 'static) -> Self {
        Self::build(base, gen, false)
    }

    pub fn from_fn(base: B, f: impl Fn(usize) -> B::Elem + Send + Sync + 'static) -> Self {
        Self::build(base, move |n| Ok(f(n)), false)
    }

    fn build(
        base: B,
        gen: impl Fn(usize) -> Result<B::Elem, DomainError> + Send + Sync + 'static,
        stationary: bool,
    ) -> Self {
        Chain {
            base,
            inner: Arc::new(Inner {
                gen: Box::new(gen),
                memo: Mutex::new(BTreeMap::new()),
                stationary,
            }),
        }
    }

    /// The canonical embedding of a base element as a constant chain.
    pub fn embed(base: B, b: B::Elem) -> Self {
        Self::build(base, move |_| Ok(b.clone()), true)
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    /// Whether the chain is known to be constant.
    pub fn is_stationary(&self) -> bool {
        self.inner.stationary
    }

    pub fn get(&self, n: usize) -> Result<B::Elem, DomainError> {
        // a constant chain keeps a single memo entry
        let n = if self.inner.stationary { 0 } else { n };
        let (below, above) = {
            let memo = self.inner.memo.lock().expect("chain memo poisoned");
            if let Some(v) = memo.get(&n) {
                return Ok(v.clone());
            }
            let below = memo.range(..n).next_back().map(|(k, v)| (*k, v.clone()));
            let above = memo.range(n + 1..).next().map(|(k, v)| (*k, v.clone()));
            (below, above)
        };
        let v = (self.inner.gen)(n)?;
        if let Some((k, b)) = &below {
            if !self.base.leq(b, &v) {
                return Err(DomainError::ChainNotMonotone { lower: *k, upper: n });
            }
        }
        if let Some((k, a)) = &above {
            if !self.base.leq(&v, a) {
                return Err(DomainError::ChainNotMonotone { lower: n, upper: *k });
            }
        }
        let mut memo = self.inner.memo.lock().expect("chain memo poisoned");
        Ok(memo.entry(n).or_insert(v).clone())
    }

    /// Elements `0..=n`.
    pub fn prefix(&self, n: usize) -> Result<Vec<B::Elem>, DomainError> {
        (0..=n).map(|i| self.get(i)).collect()
    }

    /// Pointwise image under a monotone map of base elements.
    pub fn map<C: Base>(
        &self,
        base: C,
        f: impl Fn(&B::Elem) -> Result<C::Elem, DomainError> + Send + Sync + 'static,
    ) -> Chain<C> {
        let src = self.clone();
        Chain::build(base, move |n| f(&src.get(n)?), self.is_stationary())
    }

    /// Pointwise combination of two chains by a monotone map.
    pub fn zip_with<C: Base, D: Base>(
        &self,
        other: &Chain<C>,
        base: D,
        f: impl Fn(&B::Elem, &C::Elem) -> Result<D::Elem, DomainError> + Send + Sync + 'static,
    ) -> Chain<D> {
        let (x, y) = (self.clone(), other.clone());
        let stationary = x.is_stationary() && y.is_stationary();
        Chain::build(base, move |n| f(&x.get(n)?, &y.get(n)?), stationary)
    }

    /// The chain `(b_{φ(n)})_n` for strictly increasing `φ`; it has the same
    /// supremum.
    pub fn subsequence(&self, phi: impl Fn(usize) -> usize + Send + Sync + 'static) -> Chain<B> {
        let src = self.clone();
        Chain::build(self.base.clone(), move |n| src.get(phi(n)), self.is_stationary())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeResult {
    /// Every probe up to this depth succeeded. For semi-decisions with a
    /// single witness (basic-open membership, sign probes) the payload is the
    /// index of the witness instead.
    ConfirmedUpTo(usize),
    /// A permanent counterexample at chain indices `n` and `m`.
    Refuted {
        n: usize,
        m: usize,
    },
    Inconclusive(usize),
}

impl ProbeResult {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, ProbeResult::ConfirmedUpTo(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, ProbeResult::Refuted { .. })
    }
}

fn refutes<B: WayBelow>(y: &Chain<B>, probe: &B::Elem, target: &B::Elem) -> bool {
    y.is_stationary() || y.base.permanently_not_way_below(probe, target)
}

/// Probes `x ⊑ y`.
///
/// For each `n ≤ budget` the probe `p_n = approx(x_n, budget)` must be
/// way-below some `y_m`; targets are searched for `m ≤ 2·budget` so that
/// chains which lag `x` by a bounded shift (padded chains, sups in general
/// mode) can still be confirmed at depth `budget`.
pub fn leq_probe<B: WayBelow>(x: &Chain<B>, y: &Chain<B>, budget: usize) -> Result<ProbeResult, DomainError> {
    let base = &x.base;
    let horizon = 2 * budget;
    let mut start = 0usize;
    let mut exhausted = false;
    for n in 0..=budget {
        let p = base.approx(&x.get(n)?, budget);
        let mut found = None;
        let mut m = start;
        while m <= horizon {
            let t = y.get(m)?;
            if base.way_below(&p, &t) {
                found = Some(m);
                break;
            }
            if refutes(y, &p, &t) {
                return Ok(ProbeResult::Refuted { n, m });
            }
            m += 1;
        }
        match found {
            // later probes are larger, so they cannot succeed earlier
            Some(m) => start = m,
            None => exhausted = true,
        }
    }
    Ok(if exhausted {
        ProbeResult::Inconclusive(budget)
    } else {
        ProbeResult::ConfirmedUpTo(budget)
    })
}

/// Probes both `x ⊑ y` and `y ⊑ x`.
pub fn probe_equal<B: WayBelow>(
    x: &Chain<B>,
    y: &Chain<B>,
    budget: usize,
) -> Result<(ProbeResult, ProbeResult), DomainError> {
    Ok((leq_probe(x, y, budget)?, leq_probe(y, x, budget)?))
}

/// Membership of `x` in the basic Scott-open set `{x | b ≪ x}`. A
/// confirmation carries the index of the witnessing chain element and is
/// definite.
pub fn basic_open_member<B: WayBelow>(b: &B::Elem, x: &Chain<B>, budget: usize) -> Result<ProbeResult, DomainError> {
    for n in 0..=budget {
        let t = x.get(n)?;
        if x.base.way_below(b, &t) {
            return Ok(ProbeResult::ConfirmedUpTo(n));
        }
        if refutes(x, b, &t) {
            return Ok(ProbeResult::Refuted { n, m: n });
        }
    }
    Ok(ProbeResult::Inconclusive(budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupMode {
    /// `d_k = ⊔ { approx(c_{n,m}, k) | n, m ≤ k }`; needs only approximants.
    General,
    /// `d_k = ⊔ { c_{n,k} | n ≤ k }`; needs consistency to be continuous.
    ContinuousConsistency,
}

/// Supremum of an increasing family of chains.
pub fn sup_increasing<B: Base>(
    base: B,
    chains: impl Fn(usize) -> Chain<B> + Send + Sync + 'static,
    mode: SupMode,
) -> Chain<B> {
    let family: Mutex<HashMap<usize, Chain<B>>> = Mutex::new(HashMap::new());
    let member = move |n: usize| -> Chain<B> {
        let mut fam = family.lock().expect("family memo poisoned");
        fam.entry(n).or_insert_with(|| chains(n)).clone()
    };
    let b = base.clone();
    Chain::new(base, move |k| {
        let mut set = Vec::new();
        for n in 0..=k {
            let c = member(n);
            match mode {
                SupMode::General => {
                    for m in 0..=k {
                        set.push(b.approx(&c.get(m)?, k));
                    }
                }
                SupMode::ContinuousConsistency => set.push(c.get(k)?),
            }
        }
        if !b.consistent(&set) {
            return Err(DomainError::InconsistentLevel { level: k });
        }
        b.sup(&set)
    })
}

/// Pointwise supremum of finitely many chains. Level 0 is checked eagerly;
/// later inconsistencies surface when the level is accessed.
pub fn sup_finite<B: Base>(xs: &[Chain<B>]) -> Result<Chain<B>, DomainError> {
    let first = xs.first().ok_or(DomainError::EmptyInput("sup of no chains"))?;
    let base = first.base.clone();
    let stationary = xs.iter().all(|x| x.is_stationary());
    let members: Vec<Chain<B>> = xs.to_vec();
    let b = base.clone();
    let out = Chain::build(
        base,
        move |n| {
            let level = members.iter().map(|x| x.get(n)).collect::<Result<Vec<_>, _>>()?;
            if !b.consistent(&level) {
                return Err(DomainError::InconsistentLevel { level: n });
            }
            b.sup(&level)
        },
        stationary,
    );
    out.get(0)?;
    Ok(out)
}

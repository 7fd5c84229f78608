//! Real numbers as total elements of the interval completion, together with
//! classical null sequences and the Cauchy/Markov modulus machinery.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::completion::{Chain, ProbeResult};
use crate::error::DomainError;
use crate::interval::{IntervalBase, IntervalQ};
use crate::numerics::Rational;
use crate::predomain::{Base, LiftedBase};

/// `a + b = [a̲ + b̲, ā + b̄]`.
pub fn interval_add(a: &IntervalQ, b: &IntervalQ) -> IntervalQ {
    IntervalQ::new(a.lo() + b.lo(), a.hi() + b.hi()).expect("sum of intervals")
}

/// `−a = [−ā, −a̲]`.
pub fn interval_neg(a: &IntervalQ) -> IntervalQ {
    IntervalQ::new(-a.hi(), -a.lo()).expect("negated interval")
}

/// `|a|`: `a` when nonnegative, `−a` when nonpositive, and
/// `[0, max{−a̲, ā}]` when `a` straddles zero.
pub fn interval_abs(a: &IntervalQ) -> IntervalQ {
    if !a.lo().is_negative() {
        a.clone()
    } else if !a.hi().is_positive() {
        interval_neg(a)
    } else {
        let top = std::cmp::max(-a.lo(), a.hi().clone());
        IntervalQ::new(Rational::zero(), top).expect("absolute value")
    }
}

/// `[n·a̲, n·ā]`.
pub fn interval_scale(n: u64, a: &IntervalQ) -> IntervalQ {
    IntervalQ::new(a.lo().mul_int(n), a.hi().mul_int(n)).expect("scaled interval")
}

/// The pointwise order on intervals: `x ≤ y` iff `x̲ ≤ ȳ`.
pub fn interval_le(x: &IntervalQ, y: &IntervalQ) -> bool {
    x.lo() <= y.hi()
}

type Hint = Arc<dyn Fn(u32) -> usize + Send + Sync>;

fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// An element of the interval completion, optionally carrying an effective
/// totality certificate: `hint(k)` is an index `n` with `ℓ(x_n) ≤ 2^{-k}`.
#[derive(Clone)]
pub struct Real {
    chain: Chain<IntervalBase>,
    hint: Option<Hint>,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Real")
            .field("chain", &self.chain)
            .field("hinted", &self.hint.is_some())
            .finish()
    }
}

impl Real {
    pub fn from_chain(chain: Chain<IntervalBase>) -> Self {
        Real { chain, hint: None }
    }

    pub fn with_hint(chain: Chain<IntervalBase>, hint: impl Fn(u32) -> usize + Send + Sync + 'static) -> Self {
        Real {
            chain,
            hint: Some(Arc::new(hint)),
        }
    }

    pub fn from_fn(f: impl Fn(usize) -> IntervalQ + Send + Sync + 'static) -> Self {
        Real::from_chain(Chain::from_fn(IntervalBase, f))
    }

    /// The constant chain of an interval. Only singletons are total.
    pub fn embed(a: IntervalQ) -> Self {
        let exact = a.is_singleton();
        let chain = Chain::embed(IntervalBase, a);
        if exact {
            Real::with_hint(chain, |_| 0)
        } else {
            Real::from_chain(chain)
        }
    }

    pub fn rational(q: Rational) -> Self {
        Real::embed(IntervalQ::point(q))
    }

    pub fn chain(&self) -> &Chain<IntervalBase> {
        &self.chain
    }

    pub fn level(&self, n: usize) -> Result<IntervalQ, DomainError> {
        self.chain.get(n)
    }

    pub fn width_hint(&self, k: u32) -> Option<usize> {
        self.hint.as_ref().map(|h| h(k))
    }

    fn shifted_hint(&self, shift: u32) -> Option<Hint> {
        let h = self.hint.clone()?;
        Some(Arc::new(move |k| h(k + shift)))
    }

    fn unary(&self, hint: Option<Hint>, f: impl Fn(&IntervalQ) -> IntervalQ + Send + Sync + 'static) -> Real {
        Real {
            chain: self.chain.map(IntervalBase, move |a| Ok(f(a))),
            hint,
        }
    }

    pub fn add(&self, other: &Real) -> Real {
        let hint: Option<Hint> = match (&self.hint, &other.hint) {
            (Some(h), Some(g)) => {
                let (h, g) = (h.clone(), g.clone());
                Some(Arc::new(move |k| h(k + 1).max(g(k + 1))))
            }
            _ => None,
        };
        Real {
            chain: self
                .chain
                .zip_with(&other.chain, IntervalBase, |a, b| Ok(interval_add(a, b))),
            hint,
        }
    }

    pub fn neg(&self) -> Real {
        self.unary(self.hint.clone(), interval_neg)
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn abs(&self) -> Real {
        self.unary(self.hint.clone(), interval_abs)
    }

    /// `n·x`, equal level by level to the `n`-fold sum `x + ... + x`.
    pub fn scale(&self, n: u64) -> Real {
        let hint = if n == 0 {
            Some(Arc::new(|_| 0usize) as Hint)
        } else {
            self.shifted_hint(ceil_log2(n))
        };
        self.unary(hint, move |a| interval_scale(n, a))
    }

    /// `x ± ε` at every level. Not total unless `ε = 0`.
    pub fn pad(&self, eps: &Rational) -> Result<Real, DomainError> {
        if eps.is_negative() {
            return Err(DomainError::NegativeDelta(eps.to_string()));
        }
        let eps = eps.clone();
        let hint = if eps.is_zero() { self.hint.clone() } else { None };
        Ok(self.unary(hint, move |a| a.pad(&eps)))
    }

    /// `(x_n ± q_n)_n` for a nonincreasing sequence `q` of nonnegative
    /// rationals. When `q` is null the result equals `x`.
    pub fn pad_seq(&self, q: impl Fn(usize) -> Rational + Send + Sync + 'static) -> Real {
        let x = self.chain.clone();
        Real::from_chain(Chain::new(IntervalBase, move |n| {
            let e = q(n);
            if e.is_negative() {
                return Err(DomainError::NegativeDelta(e.to_string()));
            }
            Ok(x.get(n)?.pad(&e))
        }))
    }

    /// `(x_n ± 2^{-n})_n`.
    pub fn pad_null(&self) -> Real {
        let mut out = self.pad_seq(|n| Rational::pow2(-(n as i64)));
        if let Some(h) = self.hint.clone() {
            out.hint = Some(Arc::new(move |k| h(k + 1).max(k as usize + 2)));
        }
        out
    }
}

/// Probes `0 ≤ x` at tolerance `2^{-k}`: confirmed at the first `n` with
/// `x̲_n ≥ −2^{-k}`, refuted at the first `n` with `x̄_n < −2^{-k}`.
pub fn nonneg_probe(x: &Real, k: u32, budget: usize) -> Result<ProbeResult, DomainError> {
    let tol = -Rational::pow2(-(k as i64));
    for n in 0..=budget {
        let a = x.level(n)?;
        if a.lo() >= &tol {
            return Ok(ProbeResult::ConfirmedUpTo(n));
        }
        if a.hi() < &tol {
            return Ok(ProbeResult::Refuted { n, m: n });
        }
    }
    Ok(ProbeResult::Inconclusive(budget))
}

/// Probes `x ≤ y` as `0 ≤ y − x`.
pub fn le_probe(x: &Real, y: &Real, k: u32, budget: usize) -> Result<ProbeResult, DomainError> {
    nonneg_probe(&y.sub(x), k, budget)
}

/// Strict positivity: confirmed at the first `n` with `x̲_n > 0`, refuted
/// at the first `n` with `x̄_n ≤ 0`.
pub fn positive_probe(x: &Real, budget: usize) -> Result<ProbeResult, DomainError> {
    for n in 0..=budget {
        let a = x.level(n)?;
        if a.lo().is_positive() {
            return Ok(ProbeResult::ConfirmedUpTo(n));
        }
        if !a.hi().is_positive() {
            return Ok(ProbeResult::Refuted { n, m: n });
        }
    }
    Ok(ProbeResult::Inconclusive(budget))
}

fn narrow_enough(a: &IntervalQ, k: u32) -> bool {
    a.length() <= Rational::pow2(-(k as i64))
}

/// The first `x_n` with `ℓ(x_n) ≤ 2^{-k}`, scanning `n ≤ budget` (and no
/// further than the width hint, when there is one).
pub fn refine(x: &Real, k: u32, budget: usize) -> Result<IntervalQ, DomainError> {
    let hinted = x.width_hint(k);
    let limit = hinted.map_or(budget, |h| h.min(budget));
    for n in 0..=limit {
        let a = x.level(n)?;
        if narrow_enough(&a, k) {
            return Ok(a);
        }
    }
    match hinted {
        Some(h) if h <= budget => Err(DomainError::CertificateViolated(format!(
            "width hint promised 2^-{k} at level {h}"
        ))),
        _ => Err(DomainError::BudgetExhausted { k, budget }),
    }
}

/// First `n ≤ budget` satisfying a predicate that stays true once true,
/// found by doubling and then bisection.
pub fn first_index(
    budget: usize,
    mut pred: impl FnMut(usize) -> Result<bool, DomainError>,
) -> Result<Option<usize>, DomainError> {
    let mut lo = 0usize;
    let mut hi = None;
    let mut step = 0usize;
    loop {
        let n = step.min(budget);
        if pred(n)? {
            hi = Some(n);
            break;
        }
        lo = n + 1;
        if n == budget {
            break;
        }
        step = 2 * step + 1;
    }
    let Some(mut hi) = hi else {
        return Ok(None);
    };
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(hi))
}

/// Same result as [`refine`] without a hint, but evaluates only
/// logarithmically many levels; widths of a chain never grow.
pub fn refine_galloping(x: &Real, k: u32, budget: usize) -> Result<IntervalQ, DomainError> {
    match first_index(budget, |n| Ok(narrow_enough(&x.level(n)?, k)))? {
        Some(n) => x.level(n),
        None => Err(DomainError::BudgetExhausted { k, budget }),
    }
}

/// [`refine_galloping`] for chains in `IQ_⊥`; bottom has unbounded width.
pub fn refine_lifted(x: &Chain<LiftedBase<IntervalBase>>, k: u32, budget: usize) -> Result<IntervalQ, DomainError> {
    let ok = |n| -> Result<bool, DomainError> { Ok(x.get(n)?.is_some_and(|a| narrow_enough(&a, k))) };
    match first_index(budget, ok)? {
        Some(n) => Ok(x.get(n)?.expect("narrow level is not bottom")),
        None => Err(DomainError::BudgetExhausted { k, budget }),
    }
}

/// A nonnegative rational or `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinity => None,
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
            (ExtRational::Infinity, _) => Ordering::Greater,
            (_, ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

type Seq<T> = Arc<dyn Fn(usize) -> Result<T, DomainError> + Send + Sync>;

/// A nonincreasing sequence in `ℚ≥0 ∪ {∞}` assumed to fall below every
/// positive rational (which cannot be checked).
#[derive(Clone)]
pub struct ClassicalNullSeq {
    terms: Seq<ExtRational>,
}

impl ClassicalNullSeq {
    pub fn new(terms: impl Fn(usize) -> ExtRational + Send + Sync + 'static) -> Self {
        ClassicalNullSeq {
            terms: Arc::new(move |n| Ok(terms(n))),
        }
    }

    pub fn finite(terms: impl Fn(usize) -> Rational + Send + Sync + 'static) -> Self {
        Self::new(move |n| ExtRational::Finite(terms(n)))
    }

    fn fallible(terms: Seq<ExtRational>) -> Self {
        ClassicalNullSeq { terms }
    }

    pub fn term(&self, n: usize) -> Result<ExtRational, DomainError> {
        (self.terms)(n)
    }

    /// Checks nonnegativity and monotonicity on `0..=upto`.
    pub fn check(&self, upto: usize) -> Result<(), DomainError> {
        let mut prev = ExtRational::Infinity;
        for n in 0..=upto {
            let t = self.term(n)?;
            if t.finite().is_some_and(|q| q.is_negative()) || t > prev {
                return Err(DomainError::CertificateViolated(format!(
                    "null sequence increases or is negative at {n}"
                )));
            }
            prev = t;
        }
        Ok(())
    }
}

/// A rational sequence with a modulus of convergence `M`:
/// `|q_n − q_m| ≤ 2^{-k}` for all `n, m ≥ M(k)`.
#[derive(Clone)]
pub struct CauchyReal {
    seq: Seq<Rational>,
    modulus: Arc<dyn Fn(usize) -> usize + Send + Sync>,
}

impl CauchyReal {
    pub fn new(
        seq: impl Fn(usize) -> Rational + Send + Sync + 'static,
        modulus: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> Self {
        CauchyReal {
            seq: Arc::new(move |n| Ok(seq(n))),
            modulus: Arc::new(modulus),
        }
    }

    pub fn term(&self, n: usize) -> Result<Rational, DomainError> {
        (self.seq)(n)
    }

    pub fn modulus(&self, k: usize) -> usize {
        (self.modulus)(k)
    }

    /// Checks the modulus for `k ≤ ks` on indices below `upto`.
    pub fn check(&self, ks: usize, upto: usize) -> Result<(), DomainError> {
        let terms = (0..upto).map(|n| self.term(n)).collect::<Result<Vec<_>, _>>()?;
        for k in 0..=ks {
            let start = self.modulus(k).min(upto);
            let tail = &terms[start..];
            if let (Some(lo), Some(hi)) = (tail.iter().min(), tail.iter().max()) {
                if hi - lo > Rational::pow2(-(k as i64)) {
                    return Err(DomainError::CertificateViolated(format!(
                        "modulus of convergence fails at k = {k}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A rational sequence with a modulus of non-divergence `c`:
/// `|q_n − q_m| ≤ c_N` for all `n, m ≥ N`.
#[derive(Clone)]
pub struct MarkovReal {
    seq: Seq<Rational>,
    modulus: ClassicalNullSeq,
}

impl MarkovReal {
    pub fn new(seq: impl Fn(usize) -> Rational + Send + Sync + 'static, modulus: ClassicalNullSeq) -> Self {
        MarkovReal {
            seq: Arc::new(move |n| Ok(seq(n))),
            modulus,
        }
    }

    pub fn term(&self, n: usize) -> Result<Rational, DomainError> {
        (self.seq)(n)
    }

    pub fn modulus(&self) -> &ClassicalNullSeq {
        &self.modulus
    }

    /// Checks the modulus on indices below `upto`.
    pub fn check(&self, upto: usize) -> Result<(), DomainError> {
        self.modulus.check(upto)?;
        let terms = (0..upto).map(|n| self.term(n)).collect::<Result<Vec<_>, _>>()?;
        for big_n in 0..upto {
            let ExtRational::Finite(c) = self.modulus.term(big_n)? else {
                continue;
            };
            let tail = &terms[big_n..];
            let lo = tail.iter().min().expect("nonempty tail");
            let hi = tail.iter().max().expect("nonempty tail");
            if (hi - lo) > c {
                return Err(DomainError::InvalidMarkov { level: big_n });
            }
        }
        Ok(())
    }
}

/// The waiting function of a nondecreasing `M`: `W(n) = 0` for
/// `n ≤ M(0)`, and above that `W(n) = W(n−1) + 1` if `M(W(n−1) + 1) ≤ n`,
/// else `W(n−1)`.
#[derive(Clone)]
pub struct WaitingFunction {
    m: Arc<dyn Fn(usize) -> usize + Send + Sync>,
    memo: Arc<Mutex<Vec<usize>>>,
}

impl WaitingFunction {
    pub fn get(&self, n: usize) -> usize {
        let mut memo = self.memo.lock().expect("waiting memo poisoned");
        let m0 = (self.m)(0);
        while memo.len() <= n {
            let i = memo.len();
            let w = if i <= m0 {
                0
            } else {
                let prev = memo[i - 1];
                if (self.m)(prev + 1) <= i {
                    prev + 1
                } else {
                    prev
                }
            };
            memo.push(w);
        }
        memo[n]
    }
}

pub fn waiting_function(m: impl Fn(usize) -> usize + Send + Sync + 'static) -> WaitingFunction {
    WaitingFunction {
        m: Arc::new(m),
        memo: Arc::new(Mutex::new(Vec::new())),
    }
}

/// Same sequence, with the non-divergence modulus
/// `c_n = 1 + max{|q_k − q_l| : n ≤ k, l ≤ M(0)}` for `n < M(0)` and
/// `c_n = 2^{-W(n)}` from `M(0)` on.
pub fn cauchy_to_markov(c: &CauchyReal) -> MarkovReal {
    let m0 = c.modulus(0);
    let w = waiting_function({
        let c = c.clone();
        move |k| c.modulus(k)
    });
    let src = c.clone();
    let modulus = ClassicalNullSeq::fallible(Arc::new(move |n| {
        if n < m0 {
            let terms = (n..=m0).map(|i| src.term(i)).collect::<Result<Vec<_>, _>>()?;
            let lo = terms.iter().min().expect("nonempty");
            let hi = terms.iter().max().expect("nonempty");
            Ok(ExtRational::Finite(Rational::one() + (hi - lo)))
        } else {
            Ok(ExtRational::Finite(Rational::pow2(-(w.get(n) as i64))))
        }
    }));
    MarkovReal {
        seq: c.seq.clone(),
        modulus,
    }
}

/// `m(x)`: midpoints `½(x̄_n + x̲_n)` with modulus `c_n = x̄_n − x̲_n`.
pub fn total_to_markov(x: &Real) -> MarkovReal {
    let (a, b) = (x.chain.clone(), x.chain.clone());
    MarkovReal {
        seq: Arc::new(move |n| Ok(a.get(n)?.midpoint())),
        modulus: ClassicalNullSeq::fallible(Arc::new(move |n| Ok(ExtRational::Finite(b.get(n)?.length())))),
    }
}

const EAGER_LEVELS: usize = 16;
const FIRST_FINITE_SEARCH: usize = 1 << 16;

/// `t(q)_n = ⊔_{i ≤ n} q_i ± c_i`, skipping infinite moduli. If the first
/// finite modulus is `c_N`, levels below `N` repeat level `N`. The first
/// few levels are validated eagerly; an inconsistent running supremum
/// means the modulus does not bound the oscillation.
pub fn markov_to_total(q: &MarkovReal) -> Result<Real, DomainError> {
    let mut first = None;
    for n in 0..FIRST_FINITE_SEARCH {
        if q.modulus.term(n)?.finite().is_some() {
            first = Some(n);
            break;
        }
    }
    let first = first.ok_or(DomainError::UnboundedLevel(FIRST_FINITE_SEARCH))?;
    let src = q.clone();
    let chain = Chain::new(IntervalBase, move |n| {
        let top = n.max(first);
        let mut parts = Vec::with_capacity(top + 1);
        for i in 0..=top {
            if let ExtRational::Finite(c) = src.modulus.term(i)? {
                parts.push(IntervalQ::point(src.term(i)?).pad(&c));
            }
        }
        if !IntervalBase.consistent(&parts) {
            return Err(DomainError::InvalidMarkov { level: n });
        }
        IntervalBase.sup(&parts)
    });
    chain.prefix(first + EAGER_LEVELS)?;
    Ok(Real::from_chain(chain))
}

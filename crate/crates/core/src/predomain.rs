//! Predomain bases and the standard base combinators.
//!
//! A predomain base is a countable poset with decidable order in which every
//! element has an approximating sequence: an increasing sequence of elements
//! way-below it whose supremum (in the completion) is the element itself.

use std::fmt::Debug;
use std::hash::Hash;
use std::marker::PhantomData;

use num_integer::Roots;

use crate::error::DomainError;

/// Cantor pairing. `None` when the result does not fit in a `u64`.
pub fn pair(x: u64, y: u64) -> Option<u64> {
    let s = x as u128 + y as u128;
    let z = s.checked_mul(s + 1)? / 2 + y as u128;
    u64::try_from(z).ok()
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    let z = z as u128;
    let w = ((8 * z + 1).sqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let y = z - t;
    let x = w - y;
    (x as u64, y as u64)
}

/// Bijective encoding of integers as naturals (0, -1, 1, -2, 2, ...).
pub fn zigzag(n: i64) -> u64 {
    ((n << 1) ^ (n >> 63)) as u64
}

pub fn unzigzag(i: u64) -> i64 {
    ((i >> 1) as i64) ^ -((i & 1) as i64)
}

/// Common operations of a predomain base.
///
/// Implementations must be cheap to clone; chains keep a copy of their base.
pub trait Base: Clone + Send + Sync + 'static {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync + 'static;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// The `i`-th element of the fixed approximating sequence of `b`.
    fn approx(&self, b: &Self::Elem, i: usize) -> Self::Elem;

    /// A surjective enumeration of the base.
    fn enumerate(&self, i: u64) -> Self::Elem;

    /// Some `i` with `enumerate(i) == b`, or `None` if it overflows `u64`.
    fn index_of(&self, b: &Self::Elem) -> Option<u64>;

    /// Decides whether a finite set has an upper bound. Only bases with a
    /// decision procedure for consistency implement this trait.
    fn consistent(&self, set: &[Self::Elem]) -> bool;

    /// Least upper bound of a consistent finite set. The empty set has the
    /// bottom element as supremum in pointed bases.
    fn sup(&self, set: &[Self::Elem]) -> Result<Self::Elem, DomainError>;

    fn bottom(&self) -> Option<Self::Elem> {
        None
    }

    /// Whether pairwise consistency implies consistency of every finite set.
    fn is_helly(&self) -> bool {
        false
    }
}

/// Bases with a decidable way-below relation.
pub trait WayBelow: Base {
    fn way_below(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// Some `y` with `b ≪ y ≪ c`.
    fn interpolate(&self, b: &Self::Elem, c: &Self::Elem) -> Result<Self::Elem, DomainError> {
        if !self.way_below(b, c) {
            return Err(not_way_below(b, c));
        }
        Err(DomainError::Unsupported("interpolation for this base"))
    }

    /// True when `probe ≪ t` fails for every `t ⊒ target`, so a probe failure
    /// against an increasing chain is permanent from this point on.
    fn permanently_not_way_below(&self, _probe: &Self::Elem, _target: &Self::Elem) -> bool {
        false
    }

    /// Firing pattern of `guards` on the elements way-above `alpha`.
    ///
    /// `Ok(None)` when nothing is way-above `alpha`. Otherwise the indices of
    /// the guards way-below one particular `x ≫ alpha` that fires the fewest
    /// guards: every other `x' ≫ alpha` fires a superset.
    fn firing_floor(&self, _alpha: &Self::Elem, _guards: &[&Self::Elem]) -> Result<Option<Vec<usize>>, DomainError> {
        Err(DomainError::Unsupported("firing pattern for this base"))
    }
}

/// Bases with a decision procedure for separatedness of finite sets:
/// `A` and `D` are separated when some `ω` has `a ≪ ω` for all `a ∈ A` and
/// `d ≪ ω` for no `d ∈ D`.
pub trait SeparatedBase: WayBelow {
    fn separated(&self, a: &[Self::Elem], d: &[Self::Elem]) -> Result<bool, DomainError>;
}

pub(crate) fn not_way_below<E: Debug>(b: &E, c: &E) -> DomainError {
    DomainError::NotWayBelow(format!("{b:?}"), format!("{c:?}"))
}

/// Countable sets with decidable equality, used by the flat and sequence bases.
pub trait Countable: Clone + Eq + Hash + Debug + Send + Sync + 'static {
    fn nth(i: u64) -> Self;
    fn index(&self) -> Option<u64>;
}

impl Countable for u64 {
    fn nth(i: u64) -> Self {
        i
    }
    fn index(&self) -> Option<u64> {
        Some(*self)
    }
}

impl Countable for i64 {
    fn nth(i: u64) -> Self {
        unzigzag(i)
    }
    fn index(&self) -> Option<u64> {
        Some(zigzag(*self))
    }
}

impl Countable for bool {
    fn nth(i: u64) -> Self {
        i % 2 == 1
    }
    fn index(&self) -> Option<u64> {
        Some(*self as u64)
    }
}

/// Discrete order: `x ⊑ y` iff `x = y`, and `≪` coincides with `⊑`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlatBase<T>(PhantomData<fn() -> T>);

impl<T> FlatBase<T> {
    pub fn new() -> Self {
        FlatBase(PhantomData)
    }
}

impl<T: Countable> Base for FlatBase<T> {
    type Elem = T;

    fn leq(&self, a: &T, b: &T) -> bool {
        a == b
    }
    fn approx(&self, b: &T, _i: usize) -> T {
        b.clone()
    }
    fn enumerate(&self, i: u64) -> T {
        T::nth(i)
    }
    fn index_of(&self, b: &T) -> Option<u64> {
        b.index()
    }
    fn consistent(&self, set: &[T]) -> bool {
        set.windows(2).all(|w| w[0] == w[1])
    }
    fn sup(&self, set: &[T]) -> Result<T, DomainError> {
        let first = set.first().ok_or(DomainError::EmptyInput("sup in a flat base"))?;
        if !self.consistent(set) {
            return Err(DomainError::Inconsistent(format!("{set:?}")));
        }
        Ok(first.clone())
    }
    fn is_helly(&self) -> bool {
        true
    }
}

impl<T: Countable> WayBelow for FlatBase<T> {
    fn way_below(&self, a: &T, b: &T) -> bool {
        a == b
    }
    fn interpolate(&self, b: &T, c: &T) -> Result<T, DomainError> {
        if b != c {
            return Err(not_way_below(b, c));
        }
        Ok(b.clone())
    }
    fn permanently_not_way_below(&self, probe: &T, target: &T) -> bool {
        probe != target
    }
    fn firing_floor(&self, alpha: &T, guards: &[&T]) -> Result<Option<Vec<usize>>, DomainError> {
        Ok(Some(indices_where(guards, |g| g == alpha)))
    }
}

fn indices_where<E>(guards: &[&E], pred: impl Fn(&E) -> bool) -> Vec<usize> {
    guards
        .iter()
        .enumerate()
        .filter(|(_, g)| pred(g))
        .map(|(i, _)| i)
        .collect()
}

/// Finite sequences under the prefix order; every element is compact, so
/// `≪` is the prefix order as well.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeqBase<T>(PhantomData<fn() -> T>);

impl<T> SeqBase<T> {
    pub fn new() -> Self {
        SeqBase(PhantomData)
    }
}

pub fn is_prefix<T: PartialEq>(u: &[T], v: &[T]) -> bool {
    u.len() <= v.len() && u == &v[..u.len()]
}

impl<T: Countable> Base for SeqBase<T> {
    type Elem = Vec<T>;

    fn leq(&self, a: &Vec<T>, b: &Vec<T>) -> bool {
        is_prefix(a, b)
    }
    fn approx(&self, b: &Vec<T>, _i: usize) -> Vec<T> {
        b.clone()
    }
    fn enumerate(&self, i: u64) -> Vec<T> {
        let mut out = Vec::new();
        let mut i = i;
        while i > 0 {
            let (head, tail) = unpair(i - 1);
            out.push(T::nth(head));
            i = tail;
        }
        out
    }
    fn index_of(&self, b: &Vec<T>) -> Option<u64> {
        let mut i = 0u64;
        for x in b.iter().rev() {
            i = pair(x.index()?, i)?.checked_add(1)?;
        }
        Some(i)
    }
    fn consistent(&self, set: &[Vec<T>]) -> bool {
        match set.iter().max_by_key(|s| s.len()) {
            None => true,
            Some(longest) => set.iter().all(|s| is_prefix(s, longest)),
        }
    }
    fn sup(&self, set: &[Vec<T>]) -> Result<Vec<T>, DomainError> {
        if !self.consistent(set) {
            return Err(DomainError::Inconsistent(format!("{set:?}")));
        }
        Ok(set.iter().max_by_key(|s| s.len()).cloned().unwrap_or_default())
    }
    fn bottom(&self) -> Option<Vec<T>> {
        Some(Vec::new())
    }
    fn is_helly(&self) -> bool {
        true
    }
}

impl<T: Countable> WayBelow for SeqBase<T> {
    fn way_below(&self, a: &Vec<T>, b: &Vec<T>) -> bool {
        is_prefix(a, b)
    }
    fn interpolate(&self, b: &Vec<T>, c: &Vec<T>) -> Result<Vec<T>, DomainError> {
        if !is_prefix(b, c) {
            return Err(not_way_below(b, c));
        }
        Ok(b.clone())
    }
    fn permanently_not_way_below(&self, probe: &Vec<T>, target: &Vec<T>) -> bool {
        !is_prefix(probe, target) && !is_prefix(target, probe)
    }
    fn firing_floor(&self, alpha: &Vec<T>, guards: &[&Vec<T>]) -> Result<Option<Vec<usize>>, DomainError> {
        Ok(Some(indices_where(guards, |g| is_prefix(g, alpha))))
    }
}

/// Componentwise order, way-below and suprema.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductBase<A, B>(pub A, pub B);

impl<A: Base, B: Base> Base for ProductBase<A, B> {
    type Elem = (A::Elem, B::Elem);

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.leq(&a.0, &b.0) && self.1.leq(&a.1, &b.1)
    }
    fn approx(&self, b: &Self::Elem, i: usize) -> Self::Elem {
        (self.0.approx(&b.0, i), self.1.approx(&b.1, i))
    }
    fn enumerate(&self, i: u64) -> Self::Elem {
        let (x, y) = unpair(i);
        (self.0.enumerate(x), self.1.enumerate(y))
    }
    fn index_of(&self, b: &Self::Elem) -> Option<u64> {
        pair(self.0.index_of(&b.0)?, self.1.index_of(&b.1)?)
    }
    fn consistent(&self, set: &[Self::Elem]) -> bool {
        let (l, r) = split(set);
        self.0.consistent(&l) && self.1.consistent(&r)
    }
    fn sup(&self, set: &[Self::Elem]) -> Result<Self::Elem, DomainError> {
        let (l, r) = split(set);
        Ok((self.0.sup(&l)?, self.1.sup(&r)?))
    }
    fn bottom(&self) -> Option<Self::Elem> {
        Some((self.0.bottom()?, self.1.bottom()?))
    }
    fn is_helly(&self) -> bool {
        self.0.is_helly() && self.1.is_helly()
    }
}

fn split<X: Clone, Y: Clone>(set: &[(X, Y)]) -> (Vec<X>, Vec<Y>) {
    set.iter().cloned().unzip()
}

impl<A: WayBelow, B: WayBelow> WayBelow for ProductBase<A, B> {
    fn way_below(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.way_below(&a.0, &b.0) && self.1.way_below(&a.1, &b.1)
    }
    fn interpolate(&self, b: &Self::Elem, c: &Self::Elem) -> Result<Self::Elem, DomainError> {
        Ok((self.0.interpolate(&b.0, &c.0)?, self.1.interpolate(&b.1, &c.1)?))
    }
    fn permanently_not_way_below(&self, probe: &Self::Elem, target: &Self::Elem) -> bool {
        self.0.permanently_not_way_below(&probe.0, &target.0) || self.1.permanently_not_way_below(&probe.1, &target.1)
    }
    fn firing_floor(&self, alpha: &Self::Elem, guards: &[&Self::Elem]) -> Result<Option<Vec<usize>>, DomainError> {
        // the component witnesses combine into one witness for the product
        let left: Vec<&A::Elem> = guards.iter().map(|g| &g.0).collect();
        let right: Vec<&B::Elem> = guards.iter().map(|g| &g.1).collect();
        let (Some(fl), Some(fr)) = (
            self.0.firing_floor(&alpha.0, &left)?,
            self.1.firing_floor(&alpha.1, &right)?,
        ) else {
            return Ok(None);
        };
        Ok(Some(fl.into_iter().filter(|i| fr.contains(i)).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sum<L, R> {
    Left(L),
    Right(R),
}

/// Disjoint union; elements with different tags are incomparable.
#[derive(Debug, Clone, Copy, Default)]
pub struct CoproductBase<A, B>(pub A, pub B);

impl<A: Base, B: Base> CoproductBase<A, B> {
    #[allow(clippy::type_complexity)]
    fn sides(set: &[Sum<A::Elem, B::Elem>]) -> Option<Result<Vec<A::Elem>, Vec<B::Elem>>> {
        match set.first()? {
            Sum::Left(_) => {
                let mut out = Vec::new();
                for s in set {
                    match s {
                        Sum::Left(a) => out.push(a.clone()),
                        Sum::Right(_) => return None,
                    }
                }
                Some(Ok(out))
            }
            Sum::Right(_) => {
                let mut out = Vec::new();
                for s in set {
                    match s {
                        Sum::Right(b) => out.push(b.clone()),
                        Sum::Left(_) => return None,
                    }
                }
                Some(Err(out))
            }
        }
    }
}

impl<A: Base, B: Base> Base for CoproductBase<A, B> {
    type Elem = Sum<A::Elem, B::Elem>;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        match (a, b) {
            (Sum::Left(x), Sum::Left(y)) => self.0.leq(x, y),
            (Sum::Right(x), Sum::Right(y)) => self.1.leq(x, y),
            _ => false,
        }
    }
    fn approx(&self, b: &Self::Elem, i: usize) -> Self::Elem {
        match b {
            Sum::Left(x) => Sum::Left(self.0.approx(x, i)),
            Sum::Right(y) => Sum::Right(self.1.approx(y, i)),
        }
    }
    fn enumerate(&self, i: u64) -> Self::Elem {
        if i.is_multiple_of(2) {
            Sum::Left(self.0.enumerate(i / 2))
        } else {
            Sum::Right(self.1.enumerate(i / 2))
        }
    }
    fn index_of(&self, b: &Self::Elem) -> Option<u64> {
        match b {
            Sum::Left(x) => self.0.index_of(x)?.checked_mul(2),
            Sum::Right(y) => self.1.index_of(y)?.checked_mul(2)?.checked_add(1),
        }
    }
    fn consistent(&self, set: &[Self::Elem]) -> bool {
        match Self::sides(set) {
            None => set.is_empty(),
            Some(Ok(l)) => self.0.consistent(&l),
            Some(Err(r)) => self.1.consistent(&r),
        }
    }
    fn sup(&self, set: &[Self::Elem]) -> Result<Self::Elem, DomainError> {
        match Self::sides(set) {
            None if set.is_empty() => Err(DomainError::EmptyInput("sup in a coproduct")),
            None => Err(DomainError::Inconsistent("mixed tags".into())),
            Some(Ok(l)) => Ok(Sum::Left(self.0.sup(&l)?)),
            Some(Err(r)) => Ok(Sum::Right(self.1.sup(&r)?)),
        }
    }
    fn is_helly(&self) -> bool {
        self.0.is_helly() && self.1.is_helly()
    }
}

impl<A: WayBelow, B: WayBelow> WayBelow for CoproductBase<A, B> {
    fn way_below(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        match (a, b) {
            (Sum::Left(x), Sum::Left(y)) => self.0.way_below(x, y),
            (Sum::Right(x), Sum::Right(y)) => self.1.way_below(x, y),
            _ => false,
        }
    }
    fn interpolate(&self, b: &Self::Elem, c: &Self::Elem) -> Result<Self::Elem, DomainError> {
        match (b, c) {
            (Sum::Left(x), Sum::Left(y)) => Ok(Sum::Left(self.0.interpolate(x, y)?)),
            (Sum::Right(x), Sum::Right(y)) => Ok(Sum::Right(self.1.interpolate(x, y)?)),
            _ => Err(not_way_below(b, c)),
        }
    }
    fn permanently_not_way_below(&self, probe: &Self::Elem, target: &Self::Elem) -> bool {
        match (probe, target) {
            (Sum::Left(x), Sum::Left(y)) => self.0.permanently_not_way_below(x, y),
            (Sum::Right(x), Sum::Right(y)) => self.1.permanently_not_way_below(x, y),
            _ => true,
        }
    }
    fn firing_floor(&self, alpha: &Self::Elem, guards: &[&Self::Elem]) -> Result<Option<Vec<usize>>, DomainError> {
        let mut idx = Vec::new();
        let floor = match alpha {
            Sum::Left(a) => {
                let mut same = Vec::new();
                for (i, g) in guards.iter().enumerate() {
                    if let Sum::Left(x) = g {
                        idx.push(i);
                        same.push(x);
                    }
                }
                self.0.firing_floor(a, &same)?
            }
            Sum::Right(b) => {
                let mut same = Vec::new();
                for (i, g) in guards.iter().enumerate() {
                    if let Sum::Right(y) = g {
                        idx.push(i);
                        same.push(y);
                    }
                }
                self.1.firing_floor(b, &same)?
            }
        };
        Ok(floor.map(|f| f.into_iter().map(|j| idx[j]).collect()))
    }
}

/// Adds a fresh least element (`None`) below an inner base.
#[derive(Debug, Clone, Copy, Default)]
pub struct LiftedBase<A>(pub A);

impl<A: Base> Base for LiftedBase<A> {
    type Elem = Option<A::Elem>;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => self.0.leq(x, y),
        }
    }
    fn approx(&self, b: &Self::Elem, i: usize) -> Self::Elem {
        b.as_ref().map(|x| self.0.approx(x, i))
    }
    fn enumerate(&self, i: u64) -> Self::Elem {
        if i == 0 {
            None
        } else {
            Some(self.0.enumerate(i - 1))
        }
    }
    fn index_of(&self, b: &Self::Elem) -> Option<u64> {
        match b {
            None => Some(0),
            Some(x) => self.0.index_of(x)?.checked_add(1),
        }
    }
    fn consistent(&self, set: &[Self::Elem]) -> bool {
        let inner: Vec<A::Elem> = set.iter().flatten().cloned().collect();
        self.0.consistent(&inner)
    }
    fn sup(&self, set: &[Self::Elem]) -> Result<Self::Elem, DomainError> {
        let inner: Vec<A::Elem> = set.iter().flatten().cloned().collect();
        if inner.is_empty() {
            return Ok(None);
        }
        Ok(Some(self.0.sup(&inner)?))
    }
    fn bottom(&self) -> Option<Self::Elem> {
        Some(None)
    }
    fn is_helly(&self) -> bool {
        self.0.is_helly()
    }
}

impl<A: WayBelow> WayBelow for LiftedBase<A> {
    fn way_below(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => self.0.way_below(x, y),
        }
    }
    fn interpolate(&self, b: &Self::Elem, c: &Self::Elem) -> Result<Self::Elem, DomainError> {
        match (b, c) {
            (None, _) => Ok(None),
            (Some(x), Some(y)) => Ok(Some(self.0.interpolate(x, y)?)),
            (Some(_), None) => Err(not_way_below(b, c)),
        }
    }
    fn permanently_not_way_below(&self, probe: &Self::Elem, target: &Self::Elem) -> bool {
        match (probe, target) {
            (Some(x), Some(y)) => self.0.permanently_not_way_below(x, y),
            _ => false,
        }
    }
    fn firing_floor(&self, alpha: &Self::Elem, guards: &[&Self::Elem]) -> Result<Option<Vec<usize>>, DomainError> {
        match alpha {
            // bottom is way-below itself, and fires only bottom guards
            None => Ok(Some(indices_where(guards, |g| g.is_none()))),
            Some(a) => {
                let mut idx = Vec::new();
                let mut inner = Vec::new();
                let mut always = Vec::new();
                for (i, g) in guards.iter().enumerate() {
                    match g {
                        None => always.push(i),
                        Some(x) => {
                            idx.push(i);
                            inner.push(x);
                        }
                    }
                }
                let Some(floor) = self.0.firing_floor(a, &inner)? else {
                    return Ok(None);
                };
                always.extend(floor.into_iter().map(|j| idx[j]));
                always.sort_unstable();
                Ok(Some(always))
            }
        }
    }
}

/// Checks that suprema preserve way-below: with `b_i ≪ b'_i` for each pair,
/// `⊔ b_i ≪ ⊔ b'_i`. Always `true` on valid input; exposed for law tests.
pub fn sup_preserves_waybelow_check<B: WayBelow>(base: &B, pairs: &[(B::Elem, B::Elem)]) -> Result<bool, DomainError> {
    if pairs.is_empty() {
        return Err(DomainError::EmptyInput("pairs"));
    }
    for (b, c) in pairs {
        if !base.way_below(b, c) {
            return Err(not_way_below(b, c));
        }
    }
    let (left, right): (Vec<_>, Vec<_>) = pairs.iter().cloned().unzip();
    let s = base.sup(&left)?;
    let t = base.sup(&right)?;
    Ok(base.way_below(&s, &t))
}

/// Some `y` with `b ≪ y` for every `b` in `bs` and `y ≪ c`, built as the
/// supremum of pairwise interpolants.
pub fn interpolate_multi<B: WayBelow>(base: &B, bs: &[B::Elem], c: &B::Elem) -> Result<B::Elem, DomainError> {
    if bs.is_empty() {
        return Err(DomainError::EmptyInput("interpolation needs at least one element"));
    }
    let ys = bs
        .iter()
        .map(|b| base.interpolate(b, c))
        .collect::<Result<Vec<_>, _>>()?;
    base.sup(&ys)
}

/// `⊔_{n ≤ depth} f(n, n)` for `f` monotone in both arguments.
///
/// The grid `[0, depth]²` is checked for monotonicity, and the diagonal
/// supremum is compared against the iterated supremum
/// `⊔_m ⊔_n f(n, m)`; a mismatch is reported as an error.
pub fn diagonal_sup<B: Base>(
    base: &B,
    f: impl Fn(usize, usize) -> B::Elem,
    depth: usize,
) -> Result<B::Elem, DomainError> {
    let grid: Vec<Vec<B::Elem>> = (0..=depth).map(|n| (0..=depth).map(|m| f(n, m)).collect()).collect();
    for n in 0..=depth {
        for m in 0..=depth {
            let here = &grid[n][m];
            let down = n < depth && !base.leq(here, &grid[n + 1][m]);
            let right = m < depth && !base.leq(here, &grid[n][m + 1]);
            if down || right {
                return Err(DomainError::NonMonotoneGrid { n, m });
            }
        }
    }
    let diag: Vec<B::Elem> = (0..=depth).map(|n| grid[n][n].clone()).collect();
    let d = base.sup(&diag)?;
    let iterated = iterated_sup(base, &grid)?;
    if d != iterated {
        return Err(DomainError::Inconsistent(format!(
            "diagonal sup {d:?} differs from iterated sup {iterated:?}"
        )));
    }
    Ok(d)
}

fn iterated_sup<B: Base>(base: &B, grid: &[Vec<B::Elem>]) -> Result<B::Elem, DomainError> {
    let depth = grid.len();
    let columns = (0..depth)
        .map(|m| {
            let col: Vec<B::Elem> = grid.iter().map(|row| row[m].clone()).collect();
            base.sup(&col)
        })
        .collect::<Result<Vec<_>, _>>()?;
    base.sup(&columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pairing_round_trip() {
        for z in 0..5000u64 {
            let (x, y) = unpair(z);
            assert_eq!(pair(x, y), Some(z));
        }
        assert_eq!(pair(u64::MAX, 1), None);
        let (x, y) = unpair(u64::MAX);
        assert_eq!(pair(x, y), Some(u64::MAX));
        for n in -50i64..50 {
            assert_eq!(unzigzag(zigzag(n)), n);
        }
        assert_eq!(zigzag(-1), 1);
    }

    fn check_laws<B: WayBelow>(base: &B, elems: &[B::Elem]) {
        for a in elems {
            assert!(base.leq(a, a));
            for b in elems {
                if base.way_below(a, b) {
                    assert!(base.leq(a, b), "{a:?} << {b:?} but not <=");
                }
                if base.leq(a, b) && base.leq(b, a) {
                    assert_eq!(a, b);
                }
                for c in elems {
                    if base.leq(a, b) && base.leq(b, c) {
                        assert!(base.leq(a, c));
                    }
                    if base.leq(a, b) && base.way_below(b, c) {
                        assert!(base.way_below(a, c));
                    }
                    if base.way_below(a, b) && base.leq(b, c) {
                        assert!(base.way_below(a, c));
                    }
                }
            }
            for i in 0..4 {
                assert!(base.leq(&base.approx(a, i), &base.approx(a, i + 1)));
                assert!(base.way_below(&base.approx(a, i), a));
            }
        }
    }

    fn first<B: Base>(base: &B, n: u64) -> Vec<B::Elem> {
        (0..n).map(|i| base.enumerate(i)).collect()
    }

    #[test]
    fn combinator_laws() {
        let flat = FlatBase::<i64>::new();
        check_laws(&flat, &first(&flat, 12));
        let seq = SeqBase::<bool>::new();
        check_laws(&seq, &first(&seq, 40));
        let prod = ProductBase(seq, FlatBase::<u64>::new());
        check_laws(&prod, &first(&prod, 40));
        let coprod = CoproductBase(seq, flat);
        check_laws(&coprod, &first(&coprod, 40));
        let lifted = LiftedBase(flat);
        check_laws(&lifted, &first(&lifted, 12));
    }

    #[test]
    fn enumerations_invert() {
        let seq = SeqBase::<bool>::new();
        let prod = ProductBase(seq, FlatBase::<i64>::new());
        let coprod = CoproductBase(seq, FlatBase::<u64>::new());
        let lifted = LiftedBase(seq);
        fn round_trip<B: Base>(base: &B, i: u64) {
            let b = base.enumerate(i);
            assert_eq!(base.enumerate(base.index_of(&b).unwrap()), b);
        }
        for i in 0..300u64 {
            round_trip(&seq, i);
            round_trip(&prod, i);
            round_trip(&coprod, i);
            round_trip(&lifted, i);
        }
        let nat_seq = SeqBase::<u64>::new();
        for i in 0..300u64 {
            assert_eq!(nat_seq.index_of(&nat_seq.enumerate(i)), Some(i));
        }
    }

    fn all_words(max_len: usize) -> Vec<Vec<bool>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for b in [false, true] {
                    let mut v: Vec<bool> = w.clone();
                    v.push(b);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn seq_way_below_is_prefix_brute_force() {
        let seq = SeqBase::<bool>::new();
        let words = all_words(5);
        assert_eq!(words.len(), 63);
        for u in &words {
            for v in &words {
                let oracle = u.len() <= v.len() && (0..u.len()).all(|i| u[i] == v[i]);
                assert_eq!(seq.way_below(u, v), oracle);
            }
        }
        // every word of length <= 5 shows up in the enumeration
        for w in &words {
            assert_eq!(&seq.enumerate(seq.index_of(w).unwrap()), w);
        }
    }

    #[test]
    fn flat_interpolates_itself() {
        let flat = FlatBase::<u64>::new();
        assert_eq!(flat.interpolate(&3, &3), Ok(3));
        assert!(flat.interpolate(&3, &4).is_err());
    }

    #[test]
    fn lifted_bottom() {
        let lifted = LiftedBase(FlatBase::<u64>::new());
        assert!(lifted.leq(&None, &Some(4)));
        assert!(lifted.way_below(&None, &Some(4)));
        assert!(!lifted.leq(&Some(4), &None));
        assert_eq!(lifted.sup(&[]), Ok(None));
        assert_eq!(lifted.sup(&[None, Some(2)]), Ok(Some(2)));
        assert!(!lifted.consistent(&[Some(1), Some(2)]));
    }

    #[test]
    fn flat_firing_floor_matches_definition() {
        let flat = FlatBase::<u64>::new();
        let guards = [1u64, 2, 1];
        let refs: Vec<&u64> = guards.iter().collect();
        assert_eq!(flat.firing_floor(&1, &refs), Ok(Some(vec![0, 2])));
    }

    proptest! {
        #[test]
        fn seq_sup_is_least(words in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 0..5), 1..4)) {
            let seq = SeqBase::<bool>::new();
            if seq.consistent(&words) {
                let s = seq.sup(&words).unwrap();
                for w in &words {
                    prop_assert!(seq.leq(w, &s));
                }
                for cand in all_words(5) {
                    if words.iter().all(|w| seq.leq(w, &cand)) {
                        prop_assert!(seq.leq(&s, &cand));
                    }
                }
            } else {
                prop_assert!(seq.sup(&words).is_err());
            }
        }
    }
}

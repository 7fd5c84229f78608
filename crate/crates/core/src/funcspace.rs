//! Step functions `⊔ b_i ↘ c_i` as a base for the function space `B → C`,
//! chains of step functions, and the extension of intensionally
//! non-discontinuous real functions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::completion::Chain;
use crate::error::DomainError;
use crate::interval::{IntervalBase, IntervalQ};
use crate::numerics::Rational;
use crate::predomain::{pair, unpair, Base, LiftedBase, SeparatedBase, WayBelow};
use crate::reals::Real;

/// Largest step function validated or decided by subset enumeration.
pub const STEP_CAP: usize = 12;

/// `guard ↘ value`: `value` on inputs way-above `guard`, bottom elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SingleStep<G, V> {
    pub guard: G,
    pub value: V,
}

impl<G, V> SingleStep<G, V> {
    pub fn new(guard: G, value: V) -> Self {
        SingleStep { guard, value }
    }
}

/// A finite join of single steps satisfying the consistency implication.
/// Only [`StepSpace::validate`] and the constructions in this module build
/// one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction<G, V> {
    steps: Vec<SingleStep<G, V>>,
}

impl<G, V> StepFunction<G, V> {
    pub fn empty() -> Self {
        StepFunction { steps: Vec::new() }
    }

    pub fn steps(&self) -> &[SingleStep<G, V>] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The function space `B → C` over step functions. `C` must have a least
/// element.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepSpace<B, C> {
    pub dom: B,
    pub cod: C,
}

pub type Step<B, C> = StepFunction<<B as Base>::Elem, <C as Base>::Elem>;
pub type Single<B, C> = SingleStep<<B as Base>::Elem, <C as Base>::Elem>;

/// A chain of step functions, i.e. an element of the completed function
/// space.
pub type FunctionChain<B, C> = Chain<StepSpace<B, C>>;

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn masks_by_size(n: usize) -> Vec<u32> {
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
}

impl<B: WayBelow, C: Base> StepSpace<B, C> {
    pub fn new(dom: B, cod: C) -> Self {
        StepSpace { dom, cod }
    }

    fn bottom(&self) -> Result<C::Elem, DomainError> {
        self.cod
            .bottom()
            .ok_or(DomainError::Unsupported("step functions into a base without bottom"))
    }

    pub fn eval_single(&self, s: &Single<B, C>, x: &B::Elem) -> Result<C::Elem, DomainError> {
        if self.dom.way_below(&s.guard, x) {
            Ok(s.value.clone())
        } else {
            self.bottom()
        }
    }

    /// Join of the values whose guards are way-below `x`.
    pub fn eval_step(&self, s: &Step<B, C>, x: &B::Elem) -> Result<C::Elem, DomainError> {
        let fired: Vec<C::Elem> = s
            .steps
            .iter()
            .filter(|st| self.dom.way_below(&st.guard, x))
            .map(|st| st.value.clone())
            .collect();
        if fired.is_empty() {
            return self.bottom();
        }
        if !self.cod.consistent(&fired) {
            return Err(DomainError::Inconsistent(format!(
                "fired values of an invalid step function at {x:?}"
            )));
        }
        self.cod.sup(&fired)
    }

    /// Checks that every subset with consistent guards has consistent values.
    /// With a Helly value base, pairs suffice; otherwise all subsets are
    /// enumerated, which is capped at [`STEP_CAP`] singles.
    pub fn validate(&self, steps: Vec<Single<B, C>>) -> Result<Step<B, C>, DomainError> {
        if self.cod.is_helly() {
            for j in 0..steps.len() {
                for i in 0..j {
                    let guards = [steps[i].guard.clone(), steps[j].guard.clone()];
                    let values = [steps[i].value.clone(), steps[j].value.clone()];
                    if self.dom.consistent(&guards) && !self.cod.consistent(&values) {
                        return Err(DomainError::InvalidStepFunction { subset: vec![i, j] });
                    }
                }
            }
        } else {
            if steps.len() > STEP_CAP {
                return Err(DomainError::TooManySteps {
                    len: steps.len(),
                    cap: STEP_CAP,
                });
            }
            for mask in masks_by_size(steps.len()) {
                let idx = bits(mask);
                let guards: Vec<_> = idx.iter().map(|&i| steps[i].guard.clone()).collect();
                let values: Vec<_> = idx.iter().map(|&i| steps[i].value.clone()).collect();
                if self.dom.consistent(&guards) && !self.cod.consistent(&values) {
                    return Err(DomainError::InvalidStepFunction { subset: idx });
                }
            }
        }
        Ok(StepFunction { steps })
    }

    /// Whether `alpha ↘ beta ⊑ t`, with `i` the position of the single in
    /// its own step function.
    fn single_below(&self, i: usize, alpha: &B::Elem, beta: &C::Elem, t: &Step<B, C>) -> Result<bool, DomainError> {
        let dominates = |u: &Single<B, C>| self.dom.leq(&u.guard, alpha) && self.cod.leq(beta, &u.value);
        if self.cod.bottom().as_ref() == Some(beta) {
            return Ok(true);
        }
        // chains of step functions usually grow by refining values in place
        if t.steps.get(i).is_some_and(dominates) || t.steps.iter().any(dominates) {
            return Ok(true);
        }
        let guards: Vec<&B::Elem> = t.steps.iter().map(|u| &u.guard).collect();
        let Some(floor) = self.dom.firing_floor(alpha, &guards)? else {
            return Ok(true);
        };
        let values: Vec<C::Elem> = floor.iter().map(|&j| t.steps[j].value.clone()).collect();
        if !self.cod.consistent(&values) {
            return Err(DomainError::Inconsistent("values of an invalid step function".into()));
        }
        Ok(self.cod.leq(beta, &self.cod.sup(&values)?))
    }

    /// `s ⊑ t`: each single `α ↘ β` of `s` needs `β ⊑ t(x)` for the `x ≫ α`
    /// that fires the fewest guards of `t`.
    pub fn leq_checked(&self, s: &Step<B, C>, t: &Step<B, C>) -> Result<bool, DomainError> {
        for (i, st) in s.steps.iter().enumerate() {
            if !self.single_below(i, &st.guard, &st.value, t)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn decode(&self, mut code: u64) -> Vec<Single<B, C>> {
        let mut steps = Vec::new();
        while code > 0 {
            let (head, rest) = unpair(code - 1);
            let (g, v) = unpair(head);
            steps.push(SingleStep::new(self.dom.enumerate(g), self.cod.enumerate(v)));
            code = rest;
        }
        steps
    }
}

impl<B: SeparatedBase, C: Base> StepSpace<B, C> {
    /// Decides `s ⊑ t` by enumerating the firing sets `I₀` of `t` that some
    /// `x ≫ α` realizes, via separatedness of `{α} ∪ {γ_i | i ∈ I₀}` from the
    /// remaining guards, and requiring `β ⊑ ⊔{δ_i | i ∈ I₀}` for each.
    pub fn step_leq(&self, s: &Step<B, C>, t: &Step<B, C>) -> Result<bool, DomainError> {
        if t.len() > STEP_CAP {
            return Err(DomainError::TooManySteps {
                len: t.len(),
                cap: STEP_CAP,
            });
        }
        for st in &s.steps {
            for mask in 0..(1u32 << t.len()) {
                let inside = bits(mask);
                let mut a = vec![st.guard.clone()];
                let mut d = Vec::new();
                for (j, u) in t.steps.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        a.push(u.guard.clone());
                    } else {
                        d.push(u.guard.clone());
                    }
                }
                if !self.dom.separated(&a, &d)? {
                    continue;
                }
                let values: Vec<C::Elem> = inside.iter().map(|&j| t.steps[j].value.clone()).collect();
                if !self.cod.leq(&st.value, &self.cod.sup(&values)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl<B: WayBelow, C: Base> Base for StepSpace<B, C> {
    type Elem = Step<B, C>;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.leq_checked(a, b).expect("firing pattern of a valid step function")
    }

    /// `s_n = ⊔_{i ≤ n} b_i ↘ approx(s(b_i), n)` over the enumeration of `B`.
    fn approx(&self, s: &Self::Elem, n: usize) -> Self::Elem {
        let steps = (0..=n as u64)
            .map(|i| {
                let b = self.dom.enumerate(i);
                let v = self.eval_step(s, &b).expect("value of a valid step function");
                SingleStep::new(b, self.cod.approx(&v, n))
            })
            .collect();
        StepFunction { steps }
    }

    /// Codes are `0` for the empty list and `pair(pair(g, v), rest) + 1`
    /// otherwise. Codes of invalid lists stand for the empty function.
    fn enumerate(&self, i: u64) -> Self::Elem {
        self.validate(self.decode(i)).unwrap_or_else(|_| StepFunction::empty())
    }

    fn index_of(&self, s: &Self::Elem) -> Option<u64> {
        let mut code = 0u64;
        for st in s.steps.iter().rev() {
            let head = pair(self.dom.index_of(&st.guard)?, self.cod.index_of(&st.value)?)?;
            code = pair(head, code)?.checked_add(1)?;
        }
        Some(code)
    }

    fn consistent(&self, set: &[Self::Elem]) -> bool {
        self.sup(set).is_ok()
    }

    /// The union of the singles, when it is a valid step function.
    fn sup(&self, set: &[Self::Elem]) -> Result<Self::Elem, DomainError> {
        let mut steps: Vec<Single<B, C>> = Vec::new();
        for s in set {
            for st in &s.steps {
                if !steps.contains(st) {
                    steps.push(st.clone());
                }
            }
        }
        self.validate(steps)
    }

    fn bottom(&self) -> Option<Self::Elem> {
        Some(StepFunction::empty())
    }
}

/// Validation of interval step functions in `O(n log n)`: guards are swept
/// by lower end, and earlier guards still overlapping the current one are
/// queried for the largest value lower end and the smallest value upper end.
pub fn validate_interval_steps(
    steps: Vec<SingleStep<IntervalQ, Option<IntervalQ>>>,
) -> Result<StepFunction<IntervalQ, Option<IntervalQ>>, DomainError> {
    let mut order: Vec<usize> = (0..steps.len()).filter(|&i| steps[i].value.is_some()).collect();
    order.sort_by(|&i, &j| steps[i].guard.lo().cmp(steps[j].guard.lo()));
    let mut his: Vec<&Rational> = order.iter().map(|&i| steps[i].guard.hi()).collect();
    his.sort();
    his.dedup();
    let slot = |h: &Rational| his.len() - 1 - his.partition_point(|x| *x < h);
    let mut top_lo = MaxTree::new(his.len());
    let mut top_neg_hi = MaxTree::new(his.len());
    for &j in &order {
        let g = &steps[j].guard;
        let v = steps[j].value.as_ref().expect("filtered to lifted values");
        let first = his.partition_point(|x| *x < g.lo());
        if first < his.len() {
            let reach = his.len() - 1 - first;
            let clash = match top_lo.query(reach) {
                Some((lo, i)) if &lo > v.hi() => Some(i),
                _ => match top_neg_hi.query(reach) {
                    Some((neg_hi, i)) if &-&neg_hi < v.lo() => Some(i),
                    _ => None,
                },
            };
            if let Some(i) = clash {
                let mut subset = vec![i, j];
                subset.sort_unstable();
                return Err(DomainError::InvalidStepFunction { subset });
            }
        }
        let at = slot(g.hi());
        top_lo.insert(at, v.lo().clone(), j);
        top_neg_hi.insert(at, -v.hi(), j);
    }
    Ok(StepFunction { steps })
}

/// Prefix maxima with the index that attains them.
struct MaxTree {
    tree: Vec<Option<(Rational, usize)>>,
}

impl MaxTree {
    fn new(n: usize) -> Self {
        MaxTree {
            tree: vec![None; n + 1],
        }
    }

    fn insert(&mut self, pos: usize, v: Rational, idx: usize) {
        let mut p = pos + 1;
        while p < self.tree.len() {
            if self.tree[p].as_ref().is_none_or(|(w, _)| &v > w) {
                self.tree[p] = Some((v.clone(), idx));
            }
            p += p & p.wrapping_neg();
        }
    }

    fn query(&self, pos: usize) -> Option<(Rational, usize)> {
        let mut p = pos + 1;
        let mut best: Option<&(Rational, usize)> = None;
        while p > 0 {
            if let Some(e) = &self.tree[p] {
                if best.is_none_or(|b| e.0 > b.0) {
                    best = Some(e);
                }
            }
            p -= p & p.wrapping_neg();
        }
        best.cloned()
    }
}

/// `f̂((x_k)_k) = (s_k(x_k))_k`, diagonally.
pub fn apply<B: WayBelow, C: Base>(f: &FunctionChain<B, C>, x: &Chain<B>) -> Chain<C> {
    let space = f.base().clone();
    let (f, x) = (f.clone(), x.clone());
    Chain::new(space.cod.clone(), move |k| space.eval_step(&f.get(k)?, &x.get(k)?))
}

/// `s_n = ⊔_{i ≤ n} b_i ↘ f(b_i)_n` over the enumeration of `B`. Pairs
/// `b_i ⊑ b_j` whose values are inconsistent are reported as a detected
/// non-monotonicity of `f`.
pub fn from_base_function<B: WayBelow, C: Base>(
    space: StepSpace<B, C>,
    f: impl Fn(&B::Elem) -> Chain<C> + Send + Sync + 'static,
) -> FunctionChain<B, C> {
    let images: Mutex<HashMap<u64, Chain<C>>> = Mutex::new(HashMap::new());
    let sp = space.clone();
    Chain::new(space, move |n| {
        let guards: Vec<B::Elem> = (0..=n as u64).map(|i| sp.dom.enumerate(i)).collect();
        let mut values = Vec::with_capacity(n + 1);
        for (i, b) in guards.iter().enumerate() {
            let chain = {
                let mut memo = images.lock().expect("image memo poisoned");
                memo.entry(i as u64).or_insert_with(|| f(b)).clone()
            };
            values.push(chain.get(n)?);
        }
        for i in 0..=n {
            for j in 0..=n {
                if i != j
                    && sp.dom.leq(&guards[i], &guards[j])
                    && !sp.cod.consistent(&[values[i].clone(), values[j].clone()])
                {
                    return Err(DomainError::NonMonotoneFunction { level: n, i, j });
                }
            }
        }
        let steps = guards
            .into_iter()
            .zip(values)
            .map(|(g, v)| SingleStep::new(g, v))
            .collect();
        sp.validate(steps)
    })
}

/// 64 intervals with half-integer lower endpoints in `[−7/2, 7/2]` and
/// widths from 0 to 13/2, used as a pointwise comparison grid.
pub fn sample_grid() -> Vec<IntervalQ> {
    let mut out = Vec::new();
    for a in -4..4i64 {
        for w in [0i64, 1, 2, 3, 5, 7, 9, 13] {
            out.push(IntervalQ::frac(2 * a + 1, 2, 2 * a + 1 + w, 2));
        }
    }
    out
}

/// A modulus of intensional non-discontinuity `ω: IQ → ℚ>0`.
#[derive(Clone)]
pub struct NondiscontinuityModulus {
    omega: Arc<dyn Fn(&IntervalQ) -> Rational + Send + Sync>,
}

impl NondiscontinuityModulus {
    pub fn new(omega: impl Fn(&IntervalQ) -> Rational + Send + Sync + 'static) -> Self {
        NondiscontinuityModulus { omega: Arc::new(omega) }
    }

    pub fn at(&self, a: &IntervalQ) -> Rational {
        (self.omega)(a)
    }
}

impl std::fmt::Debug for NondiscontinuityModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("NondiscontinuityModulus")
    }
}

pub type IntervalFunctionChain = FunctionChain<IntervalBase, LiftedBase<IntervalBase>>;

/// The non-singleton intervals of the IQ enumeration, in order, with the
/// data each guard contributes to a level.
struct Guards {
    next: u64,
    steps: Vec<GuardData>,
    /// Index of the first guard whose value changes with the level.
    first_moving: usize,
    /// Longest prefix of constant-valued steps known to be valid; every
    /// shorter prefix is then valid too.
    valid_prefix: usize,
}

struct GuardData {
    guard: IntervalQ,
    image: Real,
    omega: Rational,
    /// The padded value, when the image is a constant chain.
    fixed: Option<IntervalQ>,
}

impl Guards {
    fn grow(
        &mut self,
        n: usize,
        f: &dyn Fn(&Rational) -> Result<Real, DomainError>,
        omega: &NondiscontinuityModulus,
    ) -> Result<(), DomainError> {
        while self.steps.len() <= n {
            let guard = IntervalBase.enumerate(self.next);
            self.next += 1;
            if guard.is_singleton() {
                continue;
            }
            let w = omega.at(&guard);
            if !w.is_positive() {
                return Err(DomainError::NonPositiveModulus(guard.to_string()));
            }
            let image = f(&guard.midpoint())?;
            let fixed = if image.chain().is_stationary() {
                Some(image.level(0)?.extend(&w)?)
            } else {
                None
            };
            if fixed.is_some() && self.first_moving == self.steps.len() {
                self.first_moving += 1;
            }
            self.steps.push(GuardData {
                guard,
                image,
                omega: w,
                fixed,
            });
        }
        Ok(())
    }

    fn level(&self, n: usize) -> Result<Vec<SingleStep<IntervalQ, Option<IntervalQ>>>, DomainError> {
        self.steps[..=n]
            .iter()
            .map(|d| {
                let v = match &d.fixed {
                    Some(v) => v.clone(),
                    None => d.image.level(n)?.extend(&d.omega)?,
                };
                Ok(SingleStep::new(d.guard.clone(), Some(v)))
            })
            .collect()
    }
}

const EAGER_LEVELS: usize = 32;

/// `g_n = ⊔_{i ≤ n} α_i ↘ f(m(α_i))_n ± ω(α_i)`, with `α_i` running over the
/// non-singleton intervals of the IQ enumeration and `m` the midpoint. Each
/// level is validated when it is built; an inconsistency means `ω` is too
/// small for `f`. The first levels are built eagerly.
pub fn extend_nondiscontinuous(
    f: impl Fn(&Rational) -> Result<Real, DomainError> + Send + Sync + 'static,
    omega: NondiscontinuityModulus,
) -> Result<IntervalFunctionChain, DomainError> {
    let state = Mutex::new(Guards {
        next: 0,
        steps: Vec::new(),
        first_moving: 0,
        valid_prefix: 0,
    });
    let space = StepSpace::new(IntervalBase, LiftedBase(IntervalBase));
    let chain = Chain::new(space, move |n| {
        let mut st = state.lock().expect("guard cache poisoned");
        st.grow(n, &f, &omega)?;
        let steps = st.level(n)?;
        let constant = n < st.first_moving;
        if constant && n < st.valid_prefix {
            return Ok(StepFunction { steps });
        }
        let level = validate_interval_steps(steps)?;
        if constant {
            st.valid_prefix = n + 1;
        }
        Ok(level)
    });
    chain.prefix(EAGER_LEVELS)?;
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{leq_probe, probe_equal, sup_increasing, ProbeResult, SupMode};
    use crate::predomain::FlatBase;
    use crate::reals::refine_lifted;
    use proptest::prelude::*;

    type Iq = StepSpace<IntervalBase, LiftedBase<IntervalBase>>;

    fn space() -> Iq {
        StepSpace::new(IntervalBase, LiftedBase(IntervalBase))
    }

    fn iv(a: i64, b: i64) -> IntervalQ {
        IntervalQ::ints(a, b)
    }

    fn st(g: IntervalQ, v: IntervalQ) -> SingleStep<IntervalQ, Option<IntervalQ>> {
        SingleStep::new(g, Some(v))
    }

    fn sf(steps: Vec<SingleStep<IntervalQ, Option<IntervalQ>>>) -> StepFunction<IntervalQ, Option<IntervalQ>> {
        space().validate(steps).unwrap()
    }

    fn both(p: (ProbeResult, ProbeResult)) -> bool {
        p.0.is_confirmed() && p.1.is_confirmed()
    }

    #[test]
    fn eval_single_examples() {
        let s = st(iv(0, 4), iv(1, 2));
        let sp = space();
        assert_eq!(sp.eval_single(&s, &iv(1, 3)).unwrap(), Some(iv(1, 2)));
        assert_eq!(sp.eval_single(&s, &iv(0, 4)).unwrap(), None);
        assert_eq!(sp.eval_single(&s, &iv(5, 6)).unwrap(), None);
    }

    #[test]
    fn eval_step_examples() {
        let sp = space();
        let s = sf(vec![st(iv(0, 4), iv(1, 3)), st(iv(1, 5), iv(2, 3))]);
        assert_eq!(sp.eval_step(&s, &iv(2, 3)).unwrap(), Some(iv(2, 3)));
        assert_eq!(sp.eval_step(&s, &iv(7, 8)).unwrap(), None);
        assert_eq!(sp.eval_step(&s, &iv(1, 2)).unwrap(), Some(iv(1, 3)));
    }

    #[test]
    fn validate_examples() {
        let sp = space();
        assert_eq!(
            sp.validate(vec![st(iv(0, 2), iv(0, 1)), st(iv(1, 3), iv(2, 3))]),
            Err(DomainError::InvalidStepFunction { subset: vec![0, 1] })
        );
        assert!(sp
            .validate(vec![st(iv(0, 2), iv(0, 2)), st(iv(1, 3), iv(1, 3))])
            .is_ok());
        assert!(sp.validate(vec![st(iv(0, 2), iv(7, 9))]).is_ok());
    }

    /// Subsets of `{0, 1, 2}` with at most two members: pairwise bounded
    /// but with no bound for all three singletons.
    #[derive(Debug, Clone, Copy)]
    struct Triangle;

    const TRIANGLE: [u8; 7] = [0, 1, 2, 4, 3, 5, 6];

    impl Base for Triangle {
        type Elem = u8;
        fn leq(&self, a: &u8, b: &u8) -> bool {
            a & !b == 0
        }
        fn approx(&self, b: &u8, _i: usize) -> u8 {
            *b
        }
        fn enumerate(&self, i: u64) -> u8 {
            TRIANGLE[(i % 7) as usize]
        }
        fn index_of(&self, b: &u8) -> Option<u64> {
            TRIANGLE.iter().position(|x| x == b).map(|i| i as u64)
        }
        fn consistent(&self, set: &[u8]) -> bool {
            set.iter().fold(0, |acc, x| acc | x).count_ones() <= 2
        }
        fn sup(&self, set: &[u8]) -> Result<u8, DomainError> {
            if !self.consistent(set) {
                return Err(DomainError::Inconsistent("triangle".into()));
            }
            Ok(set.iter().fold(0, |acc, x| acc | x))
        }
        fn bottom(&self) -> Option<u8> {
            Some(0)
        }
    }

    #[test]
    fn subset_validation_for_non_helly_values() {
        let sp = StepSpace::new(FlatBase::<u64>::new(), Triangle);
        let pair_ok = sp.validate(vec![SingleStep::new(1, 1), SingleStep::new(1, 2)]);
        assert!(pair_ok.is_ok());
        let triple = sp.validate(vec![
            SingleStep::new(1, 1),
            SingleStep::new(1, 2),
            SingleStep::new(1, 4),
        ]);
        assert_eq!(triple, Err(DomainError::InvalidStepFunction { subset: vec![0, 1, 2] }));
        // different guards never fire together in a flat base
        assert!(sp
            .validate(vec![
                SingleStep::new(1, 1),
                SingleStep::new(2, 2),
                SingleStep::new(3, 4)
            ])
            .is_ok());
        let many = (0..13).map(|i| SingleStep::new(i, 0)).collect();
        assert_eq!(
            sp.validate(many),
            Err(DomainError::TooManySteps { len: 13, cap: STEP_CAP })
        );
    }

    #[test]
    fn step_leq_examples() {
        let sp = space();
        let half = IntervalQ::frac(3, 2, 2, 1);
        let a = sf(vec![st(iv(0, 4), iv(1, 3))]);
        let b = sf(vec![st(iv(0, 4), half)]);
        assert!(sp.step_leq(&a, &b).unwrap());
        assert!(sp.leq(&a, &b));
        let c = sf(vec![st(iv(0, 4), iv(1, 2))]);
        let d = sf(vec![st(iv(0, 4), iv(1, 3))]);
        assert!(!sp.step_leq(&c, &d).unwrap());
        assert!(!sp.leq(&c, &d));
        assert!(sp.step_leq(&a, &a).unwrap() && sp.leq(&a, &a));
        // two guards jointly cover what one guard needs
        let e = sf(vec![st(iv(0, 4), iv(0, 2))]);
        let f = sf(vec![st(iv(-1, 5), iv(0, 3)), st(iv(0, 6), iv(-1, 2))]);
        assert!(sp.step_leq(&e, &f).unwrap() && sp.leq(&e, &f));
    }

    #[test]
    fn enumeration_round_trip() {
        let sp = space();
        let mut coded = 0;
        for i in 0..3000u64 {
            let s = sp.enumerate(i);
            // codes of guards from the dyadic stream can overflow
            if let Some(j) = sp.index_of(&s) {
                assert_eq!(sp.enumerate(j), s);
                coded += 1;
            }
        }
        assert!(coded > 1000);
        assert_eq!(sp.enumerate(0), StepFunction::empty());
    }

    #[test]
    fn sweep_agrees_with_pairwise() {
        let sp = space();
        let mut rng_state = 7u64;
        let mut next = |m: i64| {
            rng_state = rng_state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((rng_state >> 33) % m as u64) as i64
        };
        for _ in 0..400 {
            let n = next(7) as usize;
            let steps: Vec<_> = (0..n)
                .map(|_| {
                    let a = next(8);
                    let g = iv(a, a + next(4));
                    if next(5) == 0 {
                        SingleStep::new(g, None)
                    } else {
                        let c = next(8);
                        st(g, iv(c, c + next(4)))
                    }
                })
                .collect();
            let pairwise = sp.validate(steps.clone()).is_ok();
            assert_eq!(validate_interval_steps(steps).is_ok(), pairwise);
        }
    }

    #[test]
    fn approx_step_is_a_chain_below_s() {
        let sp = space();
        let s = sf(vec![
            st(iv(-1, 1), iv(0, 1)),
            st(IntervalQ::frac(-1, 2, 3, 2), IntervalQ::frac(1, 2, 1, 1)),
        ]);
        for n in 0..8 {
            let a = sp.approx(&s, n);
            assert!(sp.leq(&a, &sp.approx(&s, n + 1)));
            assert!(sp.leq(&a, &s));
            for single in a.steps() {
                let target = sp.eval_step(&s, &single.guard).unwrap();
                assert!(LiftedBase(IntervalBase).way_below(&single.value, &target));
            }
        }
        // nothing fires on the first enumerated guards
        let far = sf(vec![st(iv(100, 102), iv(0, 1))]);
        assert!(sp.approx(&far, 5).steps().iter().all(|s| s.value.is_none()));
    }

    #[test]
    fn function_space_sup_and_consistency() {
        let sp = space();
        let a = sf(vec![st(iv(0, 2), iv(0, 2))]);
        let b = sf(vec![st(iv(1, 3), iv(1, 3))]);
        let c = sf(vec![st(iv(1, 3), iv(5, 6))]);
        assert!(sp.consistent(&[a.clone(), b.clone()]));
        let ab = sp.sup(&[a.clone(), b.clone()]).unwrap();
        assert!(sp.leq(&a, &ab) && sp.leq(&b, &ab));
        assert!(!sp.consistent(&[a, c]));
    }

    fn identity() -> FunctionChain<IntervalBase, LiftedBase<IntervalBase>> {
        from_base_function(space(), |b: &IntervalQ| {
            Chain::embed(LiftedBase(IntervalBase), Some(b.clone()))
        })
    }

    fn lifted(x: &Chain<IntervalBase>) -> Chain<LiftedBase<IntervalBase>> {
        x.map(LiftedBase(IntervalBase), |a| Ok(Some(a.clone())))
    }

    #[test]
    fn identity_is_recovered() {
        // the guards near a point only get fine deep in the enumeration,
        // so the function chain is sampled sparsely
        let f = identity().subsequence(|k| 160 * (k + 1));
        for q in [Rational::frac(1, 2), Rational::frac(-3, 4), Rational::frac(5, 4)] {
            let x = Chain::embed(IntervalBase, IntervalQ::point(q));
            assert!(both(probe_equal(&apply(&f, &x), &lifted(&x), 3).unwrap()));
        }
        let root = crate::newton::sqrt(&Rational::from(2)).unwrap();
        assert!(both(
            probe_equal(&apply(&f, root.chain()), &lifted(root.chain()), 3).unwrap()
        ));
    }

    #[test]
    fn constant_function() {
        let c = Some(IntervalQ::frac(1, 3, 1, 2));
        let cc = c.clone();
        let f = from_base_function(space(), move |_: &IntervalQ| {
            Chain::embed(LiftedBase(IntervalBase), cc.clone())
        });
        let x = Chain::from_fn(IntervalBase, |n| {
            IntervalQ::point(Rational::zero()).pad(&Rational::pow2(-(n as i64)))
        });
        let y = apply(&f, &x);
        let want = Chain::embed(LiftedBase(IntervalBase), c);
        assert!(both(probe_equal(&y, &want, 10).unwrap()));
    }

    #[test]
    fn null_padding_inside_f() {
        let f = from_base_function(space(), |b: &IntervalQ| {
            let b = b.clone();
            Chain::from_fn(LiftedBase(IntervalBase), move |n| {
                Some(b.pad(&Rational::pow2(-(n as i64))))
            })
        })
        .subsequence(|k| 160 * (k + 1));
        let x = Chain::embed(IntervalBase, IntervalQ::point(Rational::frac(1, 4)));
        assert!(both(probe_equal(&apply(&f, &x), &lifted(&x), 3).unwrap()));
    }

    #[test]
    fn non_monotone_function_is_reported() {
        let f = from_base_function(space(), |b: &IntervalQ| {
            let v = if b.lo() < &Rational::zero() { iv(0, 0) } else { iv(1, 1) };
            Chain::embed(LiftedBase(IntervalBase), Some(v))
        });
        let err = (0..40).find_map(|n| f.get(n).err()).unwrap();
        assert!(matches!(err, DomainError::NonMonotoneFunction { .. }), "{err:?}");
    }

    fn doubling() -> impl Fn(&Rational) -> Result<Real, DomainError> + Send + Sync + 'static {
        |q: &Rational| {
            let x = Real::rational(q.clone());
            Ok(x.add(&x))
        }
    }

    #[test]
    fn extension_of_doubling() {
        let g = extend_nondiscontinuous(doubling(), NondiscontinuityModulus::new(|a| a.length().mul_int(3))).unwrap();
        let x = Chain::from_fn(IntervalBase, |n| {
            IntervalQ::point(Rational::one()).pad(&Rational::frac(1, n as i64 + 1))
        });
        let y = refine_lifted(&apply(&g, &x), 6, 16384).unwrap();
        assert!(y.length() <= Rational::pow2(-6));
        assert!(y.contains(&Rational::from(2)));
    }

    #[test]
    fn extension_level_values() {
        let g = extend_nondiscontinuous(doubling(), NondiscontinuityModulus::new(|a| a.length().mul_int(3))).unwrap();
        let level = g.get(10).unwrap();
        for s in level.steps() {
            let l = s.guard.length();
            let want = IntervalQ::new(
                s.guard.lo().mul_int(2) - l.mul_int(2),
                s.guard.hi().mul_int(2) + l.mul_int(2),
            )
            .unwrap();
            assert_eq!(s.value, Some(want));
        }
    }

    #[test]
    fn extension_of_a_constant() {
        let c = Rational::frac(2, 3);
        let cc = c.clone();
        let g = extend_nondiscontinuous(
            move |_| Ok(Real::rational(cc.clone())),
            NondiscontinuityModulus::new(|a| a.length()),
        )
        .unwrap();
        let x = Chain::from_fn(IntervalBase, |n| {
            IntervalQ::point(Rational::frac(1, 3)).pad(&Rational::pow2(-(n as i64)))
        });
        let g = g.subsequence(|k| 640 * (k + 1));
        let want = Chain::embed(LiftedBase(IntervalBase), Some(IntervalQ::point(c)));
        assert!(both(probe_equal(&apply(&g, &x), &want, 4).unwrap()));
    }

    #[test]
    fn too_small_modulus_is_rejected() {
        let err = extend_nondiscontinuous(
            doubling(),
            NondiscontinuityModulus::new(|a| a.length() * Rational::frac(1, 10)),
        )
        .unwrap_err();
        assert!(matches!(err, DomainError::InvalidStepFunction { .. }), "{err:?}");
        let zero = extend_nondiscontinuous(doubling(), NondiscontinuityModulus::new(|_| Rational::zero())).unwrap_err();
        assert!(matches!(zero, DomainError::NonPositiveModulus(_)));
    }

    fn small() -> impl Strategy<Value = IntervalQ> {
        (-8i64..8, 0i64..6).prop_map(|(a, w)| IntervalQ::frac(a, 2, a + w, 2))
    }

    fn step_fn() -> impl Strategy<Value = StepFunction<IntervalQ, Option<IntervalQ>>> {
        proptest::collection::vec((small(), small()), 0..4).prop_filter_map("invalid", |pairs| {
            space()
                .validate(pairs.into_iter().map(|(g, v)| st(g, v)).collect())
                .ok()
        })
    }

    fn grid() -> Vec<IntervalQ> {
        sample_grid()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn step_orders_agree(s in step_fn(), t in step_fn()) {
            let sp = space();
            let fast = sp.leq(&s, &t);
            prop_assert_eq!(fast, sp.step_leq(&s, &t).unwrap());
            if fast {
                let cod = LiftedBase(IntervalBase);
                for x in grid() {
                    prop_assert!(cod.leq(&sp.eval_step(&s, &x).unwrap(), &sp.eval_step(&t, &x).unwrap()));
                }
            }
        }

        #[test]
        fn eval_is_monotone(s in step_fn(), x in small(), d in 0i64..3) {
            let sp = space();
            let y = x.pad(&Rational::frac(d, 4));
            let cod = LiftedBase(IntervalBase);
            prop_assert!(cod.leq(&sp.eval_step(&s, &y).unwrap(), &sp.eval_step(&s, &x).unwrap()));
        }

        #[test]
        fn approx_is_below(s in step_fn(), n in 0usize..8) {
            let sp = space();
            prop_assert!(sp.leq(&sp.approx(&s, n), &s));
        }

        #[test]
        fn single_steps_are_continuous(g in small(), v in small(), c in -8i64..8, r in 1i64..4) {
            let sp = space();
            let s = sp.validate(vec![st(g, v)]).unwrap();
            let f = Chain::embed(sp, s);
            let centre = Rational::frac(c, 4);
            let family = move |m: usize| {
                let centre = centre.clone();
                let r = Rational::frac(r, 1);
                Chain::from_fn(IntervalBase, move |n| {
                    let w = &r * &Rational::pow2(-((n + m) as i64));
                    IntervalQ::point(centre.clone()).pad(&w)
                })
            };
            let fam = family.clone();
            let sup = sup_increasing(IntervalBase, fam, SupMode::General);
            let f2 = f.clone();
            let lhs = apply(&f, &sup);
            let rhs = sup_increasing(LiftedBase(IntervalBase), move |m| apply(&f2, &family(m)), SupMode::General);
            prop_assert!(leq_probe(&lhs, &rhs, 10).unwrap().is_confirmed());
            prop_assert!(leq_probe(&rhs, &lhs, 10).unwrap().is_confirmed());
        }
    }
}

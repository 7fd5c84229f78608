//! Seeded random generators for law checks, with greedy shrinking.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::completion::Chain;
use crate::funcspace::{SingleStep, StepFunction, StepSpace};
use crate::interval::{IntervalBase, IntervalQ};
use crate::numerics::Rational;
use crate::predomain::LiftedBase;
use crate::reals::Real;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n/d` with `|n| ≤ num` and `1 ≤ d ≤ den`.
pub fn rational(rng: &mut TestRng, num: i64, den: i64) -> Rational {
    Rational::frac(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// Intervals with quarter endpoints in `[−4, 4]`; equal endpoints between
/// two draws are common.
pub fn interval(rng: &mut TestRng) -> IntervalQ {
    let a = rng.gen_range(-16..=16i64);
    let w = rng.gen_range(0..=8i64);
    IntervalQ::frac(a, 4, a + w, 4)
}

/// Intervals with endpoints of denominator up to `den`.
pub fn interval_with(rng: &mut TestRng, num: i64, den: i64) -> IntervalQ {
    let a = rational(rng, num, den);
    let b = rational(rng, num, den);
    IntervalQ::new(a.clone().min(b.clone()), a.max(b)).expect("ordered endpoints")
}

pub fn intervals(rng: &mut TestRng, max: usize) -> Vec<IntervalQ> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| interval(rng)).collect()
}

/// The chain `[c − f − l·2^{-rn}, c + f + r·2^{-rn}]`, total iff `f = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub centre: Rational,
    pub left: Rational,
    pub right: Rational,
    pub floor: Rational,
    pub rate: u32,
}

impl ChainSpec {
    pub fn level(&self, n: usize) -> IntervalQ {
        let t = Rational::pow2(-((self.rate as usize * n) as i64));
        IntervalQ::new(
            &self.centre - &self.floor - &self.left * &t,
            &self.centre + &self.floor + &self.right * &t,
        )
        .expect("nonnegative radii")
    }

    pub fn chain(&self) -> Chain<IntervalBase> {
        let spec = self.clone();
        Chain::from_fn(IntervalBase, move |n| spec.level(n))
    }

    pub fn is_total(&self) -> bool {
        self.floor.is_zero()
    }

    /// The chain as a real, with a width hint when it is total.
    pub fn real(&self) -> Real {
        if !self.is_total() {
            return Real::from_chain(self.chain());
        }
        let mut scale = 0u32;
        let width = &self.left + &self.right;
        while Rational::pow2(scale as i64) < width {
            scale += 1;
        }
        let rate = self.rate;
        Real::with_hint(self.chain(), move |k| (k + scale).div_ceil(rate) as usize)
    }
}

pub fn chain_spec(rng: &mut TestRng, total: bool) -> ChainSpec {
    let floor = if total || rng.gen_bool(0.5) {
        Rational::zero()
    } else {
        Rational::frac(rng.gen_range(1..=4), 4)
    };
    ChainSpec {
        centre: rational(rng, 16, 4),
        left: Rational::frac(rng.gen_range(0..=8), 4),
        right: Rational::frac(rng.gen_range(0..=8), 4),
        floor,
        rate: rng.gen_range(1..=2),
    }
}

pub type IntervalStep = StepFunction<IntervalQ, Option<IntervalQ>>;

/// A valid interval step function with at most `max` singles, drawn by
/// rejection.
pub fn step_function(rng: &mut TestRng, max: usize) -> IntervalStep {
    let space = StepSpace::new(IntervalBase, LiftedBase(IntervalBase));
    loop {
        let n = rng.gen_range(0..=max);
        let steps = (0..n)
            .map(|_| SingleStep::new(interval(rng), Some(interval(rng))))
            .collect();
        if let Ok(s) = space.validate(steps) {
            return s;
        }
    }
}

/// A nondecreasing `M` given by `M(0)` and its increments; past the listed
/// increments it grows by 3 per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusSpec {
    pub m0: usize,
    pub increments: Vec<usize>,
}

impl ModulusSpec {
    pub fn values(&self) -> Vec<usize> {
        let mut out = vec![self.m0];
        for i in &self.increments {
            out.push(out[out.len() - 1] + i);
        }
        out
    }

    pub fn function(&self) -> impl Fn(usize) -> usize + Send + Sync + Clone + 'static {
        let values = self.values();
        move |k| match values.get(k) {
            Some(v) => *v,
            None => values[values.len() - 1] + 3 * (k + 1 - values.len()),
        }
    }
}

pub fn modulus_spec(rng: &mut TestRng) -> ModulusSpec {
    ModulusSpec {
        m0: rng.gen_range(0..10),
        increments: (0..32).map(|_| rng.gen_range(0..=4)).collect(),
    }
}

/// Candidates strictly simpler than a value, simplest first.
pub trait Shrink: Sized {
    fn shrink(&self) -> Vec<Self>;
}

impl Shrink for Rational {
    fn shrink(&self) -> Vec<Self> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero()];
        let whole = if self.is_negative() {
            -Rational::from_integer((-self.clone()).floor())
        } else {
            Rational::from_integer(self.floor())
        };
        if &whole != self {
            out.push(whole);
        }
        let half = self.half();
        if half.denom() <= self.denom() {
            out.push(half);
        }
        if self.is_negative() {
            out.push(-self.clone());
        }
        out.retain(|c| c != self);
        out
    }
}

impl Shrink for IntervalQ {
    fn shrink(&self) -> Vec<Self> {
        let (lo, hi) = (self.lo(), self.hi());
        let mut out = Vec::new();
        for l in lo.shrink() {
            if let Ok(i) = IntervalQ::new(l, hi.clone()) {
                out.push(i);
            }
        }
        for h in hi.shrink() {
            if let Ok(i) = IntervalQ::new(lo.clone(), h) {
                out.push(i);
            }
        }
        // shift towards the origin keeping the width
        for c in lo.shrink() {
            out.push(IntervalQ::new(c.clone(), &c + &self.length()).expect("nonnegative width"));
        }
        out
    }
}

impl Shrink for usize {
    fn shrink(&self) -> Vec<Self> {
        match *self {
            0 => Vec::new(),
            n => {
                let mut out = vec![0, n / 2, n - 1];
                out.dedup();
                out.retain(|&c| c < n);
                out
            }
        }
    }
}

impl Shrink for u32 {
    fn shrink(&self) -> Vec<Self> {
        (*self as usize).shrink().into_iter().map(|v| v as u32).collect()
    }
}

impl Shrink for bool {
    fn shrink(&self) -> Vec<Self> {
        if *self {
            vec![false]
        } else {
            Vec::new()
        }
    }
}

impl<T: Shrink + Clone> Shrink for Vec<T> {
    fn shrink(&self) -> Vec<Self> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            let mut v = self.clone();
            v.remove(i);
            out.push(v);
        }
        for i in 0..self.len() {
            for c in self[i].shrink() {
                let mut v = self.clone();
                v[i] = c;
                out.push(v);
            }
        }
        out
    }
}

impl<A: Shrink + Clone, B: Shrink + Clone> Shrink for (A, B) {
    fn shrink(&self) -> Vec<Self> {
        let mut out: Vec<Self> = self.0.shrink().into_iter().map(|a| (a, self.1.clone())).collect();
        out.extend(self.1.shrink().into_iter().map(|b| (self.0.clone(), b)));
        out
    }
}

impl<A: Shrink + Clone, B: Shrink + Clone, C: Shrink + Clone> Shrink for (A, B, C) {
    fn shrink(&self) -> Vec<Self> {
        let mut out: Vec<Self> = self
            .0
            .shrink()
            .into_iter()
            .map(|a| (a, self.1.clone(), self.2.clone()))
            .collect();
        out.extend(self.1.shrink().into_iter().map(|b| (self.0.clone(), b, self.2.clone())));
        out.extend(self.2.shrink().into_iter().map(|c| (self.0.clone(), self.1.clone(), c)));
        out
    }
}

impl Shrink for ChainSpec {
    fn shrink(&self) -> Vec<Self> {
        let mut out = Vec::new();
        let mut push = |f: &dyn Fn(&mut ChainSpec)| {
            let mut c = self.clone();
            f(&mut c);
            out.push(c);
        };
        for v in self.centre.shrink() {
            push(&|c| c.centre = v.clone());
        }
        for v in self.left.shrink().into_iter().filter(|v| !v.is_negative()) {
            push(&|c| c.left = v.clone());
        }
        for v in self.right.shrink().into_iter().filter(|v| !v.is_negative()) {
            push(&|c| c.right = v.clone());
        }
        for v in self.floor.shrink().into_iter().filter(|v| !v.is_negative()) {
            push(&|c| c.floor = v.clone());
        }
        if self.rate > 1 {
            push(&|c| c.rate = 1);
        }
        out
    }
}

impl Shrink for ModulusSpec {
    fn shrink(&self) -> Vec<Self> {
        let mut out: Vec<Self> = self
            .m0
            .shrink()
            .into_iter()
            .map(|m0| ModulusSpec {
                m0,
                increments: self.increments.clone(),
            })
            .collect();
        for i in 0..self.increments.len() {
            for v in self.increments[i].shrink() {
                let mut c = self.clone();
                c.increments[i] = v;
                out.push(c);
            }
        }
        out
    }
}

impl Shrink for IntervalStep {
    fn shrink(&self) -> Vec<Self> {
        let space = StepSpace::new(IntervalBase, LiftedBase(IntervalBase));
        let pairs: Vec<(IntervalQ, IntervalQ)> = self
            .steps()
            .iter()
            .map(|s| {
                (
                    s.guard.clone(),
                    s.value.clone().unwrap_or_else(|| IntervalQ::ints(0, 0)),
                )
            })
            .collect();
        pairs
            .shrink()
            .into_iter()
            .filter_map(|ps| {
                let steps = ps.into_iter().map(|(g, v)| SingleStep::new(g, Some(v))).collect();
                space.validate(steps).ok()
            })
            .collect()
    }
}

/// Greedily replaces `value` by its first failing shrink candidate until
/// none fails or `limit` checks have been spent. Returns the final value
/// and the number of successful shrink steps.
pub fn minimize<T: Shrink + Clone>(value: T, limit: usize, mut fails: impl FnMut(&T) -> bool) -> (T, usize) {
    let mut current = value;
    let mut steps = 0;
    let mut spent = 0;
    'outer: loop {
        for c in current.shrink() {
            if spent >= limit {
                break 'outer;
            }
            spent += 1;
            if fails(&c) {
                current = c;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    (current, steps)
}

//! Randomized law checks across all modules.
//!
//! Each suite draws its cases from a generator seeded by the run seed and
//! the suite's position, so runs are reproducible. A run stops at the first
//! violation, which is shrunk greedily before it is reported.

use std::fmt::{self, Debug};

use rand::Rng;

use crate::completion::{
    basic_open_member, leq_probe, probe_equal, sup_finite, sup_increasing, Chain, ProbeResult, SupMode,
};
use crate::error::DomainError;
use crate::funcspace::{sample_grid, SingleStep, StepSpace};
use crate::gen::{self, ChainSpec, IntervalStep, ModulusSpec, Shrink, TestRng};
use crate::interval::{IntervalBase, IntervalQ, Separation};
use crate::newton;
use crate::numerics::Rational;
use crate::predomain::{
    diagonal_sup, is_prefix, Base, CoproductBase, FlatBase, LiftedBase, ProductBase, SeqBase, WayBelow,
};
use crate::reals::{
    interval_abs, interval_le, interval_neg, markov_to_total, nonneg_probe, total_to_markov, waiting_function, Real,
};

/// Shrink candidates tried per violation.
const SHRINK_LIMIT: usize = 2000;

/// Deliberate faults, used to check that the suites catch them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Interval way-below degrades to non-strict containment.
    NonStrictWayBelow,
}

struct Ctx {
    mutation: Mutation,
}

impl Ctx {
    fn way_below(&self, a: &IntervalQ, b: &IntervalQ) -> bool {
        match self.mutation {
            Mutation::None => a.way_below(b),
            Mutation::NonStrictWayBelow => a.leq(b),
        }
    }
}

struct Fail(String);

impl From<DomainError> for Fail {
    fn from(e: DomainError) -> Self {
        Fail(e.to_string())
    }
}

type Outcome = Result<(), Fail>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(Fail(format!($($arg)+)));
        }
    };
}

fn confirmed(what: &str, r: ProbeResult) -> Outcome {
    ensure!(r.is_confirmed(), "{what}: {r:?}");
    Ok(())
}

fn both_confirmed(what: &str, (a, b): (ProbeResult, ProbeResult)) -> Outcome {
    confirmed(what, a)?;
    confirmed(what, b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
}

/// The first failing case of a run, with its minimized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub suite: &'static str,
    pub case: usize,
    pub original: String,
    pub minimized: String,
    pub shrink_steps: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub cases: usize,
    pub suites: Vec<SuiteResult>,
    pub violation: Option<Violation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selftest seed={} cases={}", self.seed, self.cases)?;
        let width = self.suites.iter().map(|s| s.name.len()).max().unwrap_or(0);
        for s in &self.suites {
            writeln!(f, "  {:width$}  {}/{}", s.name, s.passed, self.cases)?;
        }
        let n = self.suites.len();
        let plural = if n == 1 { "" } else { "s" };
        match &self.violation {
            None => writeln!(f, "{n} suite{plural} run, 0 violations"),
            Some(v) => {
                writeln!(f, "{n} suite{plural} run, 1 violation")?;
                writeln!(f, "VIOLATION in {} at case {}", v.suite, v.case)?;
                writeln!(f, "  reason:    {}", v.reason)?;
                writeln!(f, "  original:  {}", v.original)?;
                writeln!(f, "  minimized: {} ({} shrink steps)", v.minimized, v.shrink_steps)
            }
        }
    }
}

trait Runnable {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &Ctx, rng: &mut TestRng, cases: usize) -> Result<usize, Violation>;
}

struct Suite<T> {
    name: &'static str,
    gen: fn(&mut TestRng) -> T,
    check: fn(&T, &Ctx) -> Outcome,
}

impl<T: Shrink + Clone + Debug> Runnable for Suite<T> {
    fn name(&self) -> &'static str {
        self.name
    }

    fn run(&self, ctx: &Ctx, rng: &mut TestRng, cases: usize) -> Result<usize, Violation> {
        for case in 0..cases {
            let value = (self.gen)(rng);
            let Err(Fail(first)) = (self.check)(&value, ctx) else {
                continue;
            };
            let (min, shrink_steps) = gen::minimize(value.clone(), SHRINK_LIMIT, |c| (self.check)(c, ctx).is_err());
            let reason = match (self.check)(&min, ctx) {
                Err(Fail(r)) => r,
                Ok(()) => first,
            };
            return Err(Violation {
                suite: self.name,
                case,
                original: format!("{value:?}"),
                minimized: format!("{min:?}"),
                shrink_steps,
                reason,
            });
        }
        Ok(cases)
    }
}

fn suite<T: Shrink + Clone + Debug + 'static>(
    name: &'static str,
    gen: fn(&mut TestRng) -> T,
    check: fn(&T, &Ctx) -> Outcome,
) -> Box<dyn Runnable> {
    Box::new(Suite { name, gen, check })
}

fn suites() -> Vec<Box<dyn Runnable>> {
    vec![
        suite("numerics.ring", gen_triple, ring),
        suite("predomain.laws", gen_laws, laws),
        suite("predomain.seq_prefix", gen_words, seq_prefix),
        suite("predomain.sup", gen_family, bounded_complete),
        suite("predomain.diagonal", gen_grid, diagonal),
        suite("interval.way_below", gen_nested, way_below),
        suite("interval.separation", gen_separation, separation),
        suite("interval.consistency_continuity", gen_family, consistency_continuity),
        suite("interval.abs_lemma", gen_nested, abs_lemma),
        suite("completion.own_sup", gen_chain, own_sup),
        suite("completion.upper_bound", gen_chain, upper_bound),
        suite("completion.embedding", gen_nested, embedding),
        suite("completion.sup_finite", gen_cocentred, finite_sup),
        suite("reals.representation", gen_total_pair, representation),
        suite("reals.abs_below", gen_abs_below, abs_below),
        suite("reals.fat_below", gen_total_pair, fat_below),
        suite("reals.ext", gen_ext, ext),
        suite("reals.well_defined", gen_chain_pair, well_defined),
        suite("reals.waiting", gen::modulus_spec, waiting),
        suite("reals.markov_round_trip", gen_total, markov_round_trip),
        suite("funcspace.order", gen_steps, step_order),
        suite("funcspace.eval_monotone", gen_eval, eval_monotone),
        suite("funcspace.approx_below", gen_approx, approx_below),
        suite("funcspace.single_step_continuity", gen_single, single_step_continuity),
        suite("newton.enclosure", gen_positive, newton_enclosure),
    ]
}

/// Names of all suites in run order.
pub fn suite_names() -> Vec<&'static str> {
    suites().iter().map(|s| s.name()).collect()
}

/// Runs every suite with `cases` cases each. `cases = 0` runs nothing.
pub fn run(cases: usize, seed: u64) -> Report {
    run_with(cases, seed, Mutation::None)
}

pub fn run_with(cases: usize, seed: u64, mutation: Mutation) -> Report {
    let ctx = Ctx { mutation };
    let mut report = Report {
        seed,
        cases,
        suites: Vec::new(),
        violation: None,
    };
    if cases == 0 {
        return report;
    }
    for (i, s) in suites().iter().enumerate() {
        let salt = (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = gen::rng(seed ^ salt);
        match s.run(&ctx, &mut rng, cases) {
            Ok(passed) => report.suites.push(SuiteResult { name: s.name(), passed }),
            Err(v) => {
                report.suites.push(SuiteResult {
                    name: s.name(),
                    passed: v.case,
                });
                report.violation = Some(v);
                break;
            }
        }
    }
    report
}

// generators

fn quarter(rng: &mut TestRng, lo: i64, hi: i64) -> Rational {
    Rational::frac(rng.gen_range(lo..=hi), 4)
}

fn gen_triple(rng: &mut TestRng) -> (Rational, Rational, Rational) {
    (
        gen::rational(rng, 50, 12),
        gen::rational(rng, 50, 12),
        gen::rational(rng, 50, 12),
    )
}

fn gen_laws(rng: &mut TestRng) -> (usize, Vec<usize>, usize) {
    let idx = (0..3).map(|_| rng.gen_range(0..400)).collect();
    (rng.gen_range(0..6), idx, rng.gen_range(0..8))
}

fn gen_words(rng: &mut TestRng) -> (Vec<bool>, Vec<bool>) {
    let v: Vec<bool> = (0..rng.gen_range(0..=5)).map(|_| rng.gen()).collect();
    let u = if rng.gen_bool(0.5) {
        v[..rng.gen_range(0..=v.len())].to_vec()
    } else {
        (0..rng.gen_range(0..=5)).map(|_| rng.gen()).collect()
    };
    (u, v)
}

/// Mostly intervals around a common point, so that many families are
/// consistent.
fn gen_family(rng: &mut TestRng) -> Vec<IntervalQ> {
    let p = quarter(rng, -8, 8);
    (0..rng.gen_range(1..=4))
        .map(|_| {
            if rng.gen_bool(0.8) {
                let lo = &p - &quarter(rng, 0, 6);
                let hi = &p + &quarter(rng, 0, 6);
                IntervalQ::new(lo, hi).expect("ordered endpoints")
            } else {
                gen::interval(rng)
            }
        })
        .collect()
}

fn gen_grid(rng: &mut TestRng) -> (Rational, Rational, Rational) {
    (gen::rational(rng, 16, 4), quarter(rng, 0, 8), quarter(rng, 0, 8))
}

/// `(a, b)` where `b` is often a subinterval of `a`, sharing endpoints
/// about as often as not.
fn gen_nested(rng: &mut TestRng) -> (IntervalQ, IntervalQ) {
    let a = gen::interval(rng);
    let b = match rng.gen_range(0..4) {
        0 => gen::interval(rng),
        1 => a.clone(),
        _ => {
            let lo = a.lo() + &quarter(rng, 0, 2);
            let hi = a.hi() - &quarter(rng, 0, 2);
            IntervalQ::new(lo, hi).unwrap_or_else(|_| IntervalQ::point(a.midpoint()))
        }
    };
    (a, b)
}

fn gen_separation(rng: &mut TestRng) -> (Vec<IntervalQ>, Vec<IntervalQ>) {
    let a = gen_family(rng);
    let d = (0..rng.gen_range(0..=4)).map(|_| gen::interval(rng)).collect();
    (a, d)
}

fn gen_chain(rng: &mut TestRng) -> ChainSpec {
    let total = rng.gen_bool(0.5);
    gen::chain_spec(rng, total)
}

fn gen_total(rng: &mut TestRng) -> ChainSpec {
    gen::chain_spec(rng, true)
}

fn gen_chain_pair(rng: &mut TestRng) -> (ChainSpec, ChainSpec) {
    (gen_chain(rng), gen_chain(rng))
}

fn gen_total_pair(rng: &mut TestRng) -> (ChainSpec, ChainSpec) {
    (gen_total(rng), gen_total(rng))
}

fn gen_cocentred(rng: &mut TestRng) -> (ChainSpec, ChainSpec) {
    let x = gen_chain(rng);
    let mut y = gen_chain(rng);
    y.centre = x.centre.clone();
    (x, y)
}

fn gen_abs_below(rng: &mut TestRng) -> (ChainSpec, ChainSpec, Rational) {
    let slack = if rng.gen_bool(0.5) {
        Rational::zero()
    } else {
        quarter(rng, 1, 4)
    };
    (gen_total(rng), gen_total(rng), slack)
}

fn gen_ext(rng: &mut TestRng) -> (ChainSpec, usize) {
    (gen_chain(rng), rng.gen_range(0..=8))
}

fn gen_steps(rng: &mut TestRng) -> (IntervalStep, IntervalStep, IntervalStep) {
    (
        gen::step_function(rng, 4),
        gen::step_function(rng, 4),
        gen::step_function(rng, 4),
    )
}

fn gen_eval(rng: &mut TestRng) -> (IntervalStep, IntervalQ, IntervalQ) {
    let s = gen::step_function(rng, 4);
    let (x, y) = gen_nested(rng);
    (s, x, y)
}

fn gen_approx(rng: &mut TestRng) -> (IntervalStep, usize) {
    (gen::step_function(rng, 4), rng.gen_range(0..=8))
}

fn gen_single(rng: &mut TestRng) -> (IntervalQ, IntervalQ, ChainSpec) {
    (gen::interval(rng), gen::interval(rng), gen_chain(rng))
}

fn gen_positive(rng: &mut TestRng) -> (usize, usize) {
    (rng.gen_range(1..=20), rng.gen_range(1..=4))
}

// numerics

fn ring((a, b, c): &(Rational, Rational, Rational), _: &Ctx) -> Outcome {
    let zero = Rational::zero();
    let one = Rational::one();
    ensure!(&(a + b) + c == a + &(b + c), "addition is not associative");
    ensure!(a + b == b + a, "addition is not commutative");
    ensure!(&(a * b) * c == a * &(b * c), "multiplication is not associative");
    ensure!(a * b == b * a, "multiplication is not commutative");
    ensure!(a * &(b + c) == &(a * b) + &(a * c), "distributivity fails");
    ensure!(a + &zero == *a && a * &one == *a, "identities fail");
    if !a.is_zero() {
        ensure!(a * &a.recip()? == one, "a · (1/a) ≠ 1");
    }
    ensure!(a <= b || b <= a, "order is not total");
    ensure!(!(a <= b && b <= a) || a == b, "order is not antisymmetric");
    ensure!(!(a <= b && b <= c) || a <= c, "order is not transitive");
    ensure!(
        (a < b) == (b - a).is_positive(),
        "order disagrees with the sign of b − a"
    );
    Ok(())
}

// predomain

fn laws(value: &(usize, Vec<usize>, usize), ctx: &Ctx) -> Outcome {
    let (which, idx, i) = value;
    let i = *i;
    match which % 6 {
        0 => base_laws(&IntervalBase, idx, i, &|a, b| ctx.way_below(a, b)),
        1 => {
            let b = FlatBase::<u64>::new();
            base_laws(&b, idx, i, &|x, y| b.way_below(x, y))
        }
        2 => {
            let b = SeqBase::<bool>::new();
            base_laws(&b, idx, i, &|x, y| b.way_below(x, y))
        }
        3 => {
            let b = ProductBase(IntervalBase, FlatBase::<bool>::new());
            base_laws(&b, idx, i, &|x, y| b.way_below(x, y))
        }
        4 => {
            let b = CoproductBase(FlatBase::<bool>::new(), SeqBase::<bool>::new());
            base_laws(&b, idx, i, &|x, y| b.way_below(x, y))
        }
        _ => {
            let b = LiftedBase(IntervalBase);
            base_laws(&b, idx, i, &|x, y| b.way_below(x, y))
        }
    }
}

/// The order laws on enumerated elements and their approximants.
fn base_laws<B: Base>(base: &B, idx: &[usize], i: usize, wb: &dyn Fn(&B::Elem, &B::Elem) -> bool) -> Outcome {
    let drawn: Vec<B::Elem> = idx.iter().map(|&k| base.enumerate(k as u64)).collect();
    let mut elems = drawn.clone();
    for b in &drawn {
        let lower = base.approx(b, i);
        ensure!(
            base.leq(&lower, &base.approx(b, i + 1)),
            "approx({b:?}, {i}) not increasing"
        );
        ensure!(wb(&lower, b), "approx({b:?}, {i}) = {lower:?} is not way-below it");
        elems.push(lower);
    }
    for a in &elems {
        ensure!(base.leq(a, a), "{a:?} ⋢ itself");
        for b in &elems {
            if wb(a, b) {
                ensure!(base.leq(a, b), "{a:?} ≪ {b:?} but not ⊑");
            }
            if base.leq(a, b) && base.leq(b, a) {
                ensure!(a == b, "{a:?} and {b:?} are ⊑ each other but differ");
            }
            for c in &elems {
                if base.leq(a, b) && base.leq(b, c) {
                    ensure!(base.leq(a, c), "⊑ not transitive on {a:?}, {b:?}, {c:?}");
                }
                if base.leq(a, b) && wb(b, c) {
                    ensure!(wb(a, c), "{a:?} ⊑ {b:?} ≪ {c:?} but not {a:?} ≪ {c:?}");
                }
                if wb(a, b) && base.leq(b, c) {
                    ensure!(wb(a, c), "{a:?} ≪ {b:?} ⊑ {c:?} but not {a:?} ≪ {c:?}");
                }
            }
        }
    }
    Ok(())
}

fn seq_prefix((u, v): &(Vec<bool>, Vec<bool>), _: &Ctx) -> Outcome {
    let oracle = u.len() <= v.len() && u.iter().zip(v).all(|(a, b)| a == b);
    let base = SeqBase::<bool>::new();
    ensure!(
        base.way_below(u, v) == oracle,
        "way_below({u:?}, {v:?}) disagrees with the prefix oracle"
    );
    ensure!(
        is_prefix(u, v) == oracle,
        "is_prefix({u:?}, {v:?}) disagrees with the prefix oracle"
    );
    Ok(())
}

fn endpoint_bounds(xs: &[IntervalQ]) -> Option<(Rational, Rational)> {
    let lo = xs.iter().map(|x| x.lo()).max()?.clone();
    let hi = xs.iter().map(|x| x.hi()).min()?.clone();
    Some((lo, hi))
}

#[allow(clippy::ptr_arg)]
fn bounded_complete(xs: &Vec<IntervalQ>, _: &Ctx) -> Outcome {
    let Some((lo, hi)) = endpoint_bounds(xs) else {
        return Ok(());
    };
    let oracle = lo <= hi;
    ensure!(
        IntervalBase.consistent(xs) == oracle,
        "consistency disagrees with max lo ≤ min hi"
    );
    if !oracle {
        return Ok(());
    }
    let s = IntervalBase.sup(xs)?;
    ensure!(
        s == IntervalQ::new(lo.clone(), hi.clone())?,
        "sup {s} is not [max lo, min hi]"
    );
    let points: Vec<Rational> = (0..10i64)
        .map(|k| &lo + &(&(&hi - &lo) * &Rational::frac(k, 9)))
        .collect();
    for (j, p) in points.iter().enumerate() {
        for q in &points[j..] {
            let u = IntervalQ::new(p.clone(), q.clone())?;
            ensure!(xs.iter().all(|x| x.leq(&u)), "sampled {u} is not an upper bound");
            ensure!(s.leq(&u), "sup {s} is not below the upper bound {u}");
        }
    }
    Ok(())
}

fn diagonal((c, a, b): &(Rational, Rational, Rational), _: &Ctx) -> Outcome {
    let (a, b) = (a.abs(), b.abs());
    let pw = |n: usize| Rational::pow2(-(n as i64));
    let f = |n: usize, m: usize| {
        let r = &(&a * &pw(n)) + &(&b * &pw(m));
        IntervalQ::new(c - &r, c + &r).expect("nonnegative radius")
    };
    ensure!(diagonal_sup(&IntervalBase, f, 5)? == f(5, 5), "symmetric grid sup");
    let g = |n: usize, m: usize| IntervalQ::new(c - &(&a * &pw(n)), c + &(&b * &pw(m))).expect("nonnegative radii");
    ensure!(diagonal_sup(&IntervalBase, g, 5)? == g(5, 5), "split grid sup");
    Ok(())
}

// interval

fn way_below((a, b): &(IntervalQ, IntervalQ), ctx: &Ctx) -> Outcome {
    let oracle = a.lo() < b.lo() && b.hi() < a.hi();
    let got = ctx.way_below(a, b);
    ensure!(
        got == oracle,
        "way_below({a}, {b}) = {got}, strict containment says {oracle}"
    );
    let mut by_padding = false;
    for i in 1..=20 {
        by_padding |= a.leq(&b.extend(&Rational::pow2(-i))?);
    }
    ensure!(
        got == by_padding,
        "way_below({a}, {b}) = {got} but padding test gives {by_padding}"
    );
    if got {
        let y = IntervalBase.interpolate(a, b)?;
        ensure!(
            ctx.way_below(a, &y) && ctx.way_below(&y, b),
            "interpolant {y} of {a} ≪ {b}"
        );
    }
    Ok(())
}

fn separation((a, d): &(Vec<IntervalQ>, Vec<IntervalQ>), ctx: &Ctx) -> Outcome {
    let Some((lo, hi)) = endpoint_bounds(a) else {
        return Ok(());
    };
    let consistent = lo <= hi;
    match IntervalBase.separation(a, d)? {
        Separation::Separated { witness: w } => {
            ensure!(
                consistent && lo < hi,
                "separated although the sup is missing or a point"
            );
            for x in a {
                ensure!(ctx.way_below(x, &w), "{x} ∈ A is not way-below the witness {w}");
            }
            for y in d {
                ensure!(!ctx.way_below(y, &w), "{y} ∈ D is way-below the witness {w}");
            }
        }
        Separation::NoSup => ensure!(!consistent, "NoSup for a consistent A"),
        Separation::SingletonSup => ensure!(consistent && lo == hi, "SingletonSup for [{lo}, {hi}]"),
        Separation::Contained { index } => {
            ensure!(consistent && lo < hi, "Contained without a proper sup");
            let s = IntervalQ::new(lo, hi)?;
            let y = d
                .get(index)
                .ok_or_else(|| Fail(format!("index {index} out of range")))?;
            ensure!(y.leq(&s), "D[{index}] = {y} is not below sup A = {s}");
        }
    }
    Ok(())
}

#[allow(clippy::ptr_arg)]
fn consistency_continuity(xs: &Vec<IntervalQ>, _: &Ctx) -> Outcome {
    let mut every_level = true;
    for j in 0..=20 {
        let level: Vec<IntervalQ> = xs.iter().map(|x| IntervalBase.approx(x, j)).collect();
        every_level &= IntervalBase.consistent(&level);
    }
    let limit = IntervalBase.consistent(xs);
    ensure!(
        !every_level || limit,
        "every level consistent but the limit family is not"
    );
    ensure!(every_level || !limit, "limit family consistent but some level is not");
    Ok(())
}

fn abs_lemma((x, y): &(IntervalQ, IntervalQ), _: &Ctx) -> Outcome {
    let lhs = interval_le(&interval_abs(x), y);
    let zero = IntervalQ::point(Rational::zero());
    let rhs = interval_le(&interval_neg(y), x) && interval_le(x, y) && interval_le(&zero, y);
    ensure!(lhs == rhs, "|{x}| ≤ {y} is {lhs}, the three-part test gives {rhs}");
    Ok(())
}

// completion

fn own_sup(spec: &ChainSpec, _: &Ctx) -> Outcome {
    let x = spec.chain();
    let src = x.clone();
    let d = sup_increasing(
        IntervalBase,
        move |n| Chain::embed(IntervalBase, src.get(n).expect("generated chain level")),
        SupMode::General,
    );
    both_confirmed("x = ⊔ embed(x_n)", probe_equal(&x, &d, 10)?)
}

fn widened(spec: &ChainSpec, n: usize) -> ChainSpec {
    ChainSpec {
        floor: &spec.floor + &Rational::pow2(-(n as i64)),
        ..spec.clone()
    }
}

fn upper_bound(spec: &ChainSpec, _: &Ctx) -> Outcome {
    let s = spec.clone();
    let d = sup_increasing(IntervalBase, move |n| widened(&s, n).chain(), SupMode::General);
    for n in 0..=8 {
        confirmed(
            &format!("chains({n}) ⊑ sup"),
            leq_probe(&widened(spec, n).chain(), &d, 10)?,
        )?;
    }
    Ok(())
}

fn embedding((b, c): &(IntervalQ, IntervalQ), ctx: &Ctx) -> Outcome {
    let eb = Chain::embed(IntervalBase, b.clone());
    let ec = Chain::embed(IntervalBase, c.clone());
    let r = leq_probe(&eb, &ec, 10)?;
    if b.leq(c) {
        confirmed(&format!("embed {b} ⊑ embed {c}"), r)?;
    } else {
        ensure!(!r.is_confirmed(), "embed {b} ⊑ embed {c} confirmed although {b} ⋢ {c}");
    }
    if ctx.way_below(b, c) {
        confirmed(&format!("{b} ≪ embed {c}"), basic_open_member(b, &ec, 0)?)?;
    }
    Ok(())
}

fn finite_sup((x, y): &(ChainSpec, ChainSpec), _: &Ctx) -> Outcome {
    let levels = |n: usize| [x.level(n), y.level(n)];
    if (0..=10).any(|n| !IntervalBase.consistent(&levels(n))) {
        return Ok(());
    }
    let s = sup_finite(&[x.chain(), y.chain()])?;
    for n in 0..=10 {
        let (lo, hi) = endpoint_bounds(&levels(n)).expect("two levels");
        ensure!(
            s.get(n)? == IntervalQ::new(lo, hi)?,
            "level {n} is not [max lo, min hi]"
        );
    }
    confirmed("x ⊑ sup", leq_probe(&x.chain(), &s, 12)?)?;
    confirmed("y ⊑ sup", leq_probe(&y.chain(), &s, 12)?)
}

// reals

fn representation((a, b): &(ChainSpec, ChainSpec), _: &Ctx) -> Outcome {
    if !a.is_total() || !b.is_total() {
        return Ok(());
    }
    let (x, z) = (a.real(), b.real());
    let lhs = x.add(&z);
    let rhs = x.pad_null().add(&z);
    both_confirmed("x + z = x' + z", probe_equal(lhs.chain(), rhs.chain(), 12)?)
}

fn abs_below((a, b, slack): &(ChainSpec, ChainSpec, Rational), _: &Ctx) -> Outcome {
    if !a.is_total() || !b.is_total() {
        return Ok(());
    }
    let eps = &(&a.centre - &b.centre).abs() + &slack.abs();
    let padded = a.real().pad(&eps)?;
    confirmed(
        &format!("x ± {eps} ⊑ y"),
        leq_probe(padded.chain(), b.real().chain(), 12)?,
    )
}

fn fat_below((a, b): &(ChainSpec, ChainSpec), _: &Ctx) -> Outcome {
    if !a.is_total() || !b.is_total() {
        return Ok(());
    }
    let lo = a.centre.clone().min(b.centre.clone());
    let hi = a.centre.clone().max(b.centre.clone());
    let w_level = move |n: usize| {
        let r = Rational::pow2(-(n as i64));
        IntervalQ::new(&lo - &r, &hi + &r).expect("ordered endpoints")
    };
    let w = Real::from_fn(w_level.clone());
    let (x, y) = (a.real(), b.real());
    confirmed("w ⊑ x", leq_probe(w.chain(), x.chain(), 12)?)?;
    confirmed("w ⊑ y", leq_probe(w.chain(), y.chain(), 12)?)?;
    let dist = x.sub(&y).abs();
    for n in 0..=8 {
        let len = Real::rational(w_level(n).length());
        confirmed(&format!("|x − y| ≤ ℓ(w_{n})"), nonneg_probe(&len.sub(&dist), 10, 40)?)?;
    }
    Ok(())
}

fn ext((spec, n): &(ChainSpec, usize), _: &Ctx) -> Outcome {
    let n = n % 9;
    let x = spec.real();
    let padded = x.pad(&x.level(n)?.length())?;
    confirmed(&format!("x ± ℓ(x_{n}) ⊑ x"), leq_probe(padded.chain(), x.chain(), 12)?)
}

fn well_defined((a, b): &(ChainSpec, ChainSpec), _: &Ctx) -> Outcome {
    let (x, y) = (a.real(), b.real());
    let (x2, y2) = (x.pad_null(), y.pad_null());
    both_confirmed(
        "x + y = x' + y'",
        probe_equal(x.add(&y).chain(), x2.add(&y2).chain(), 12)?,
    )?;
    both_confirmed("−x = −x'", probe_equal(x.neg().chain(), x2.neg().chain(), 12)?)?;
    both_confirmed("|x| = |x'|", probe_equal(x.abs().chain(), x2.abs().chain(), 12)?)
}

fn waiting(spec: &ModulusSpec, _: &Ctx) -> Outcome {
    let m = spec.function();
    let w = waiting_function(m.clone());
    ensure!(w.get(m(0)) == 0, "W(M(0)) = {}", w.get(m(0)));
    for n in m(0)..=200 {
        if n > 0 {
            ensure!(w.get(n - 1) <= w.get(n), "W decreases at {n}");
        }
        ensure!(m(w.get(n)) <= n, "M(W({n})) = {} > {n}", m(w.get(n)));
    }
    let reached: Vec<usize> = (0..=200).map(|n| w.get(n)).collect();
    for v in 0..=10 {
        ensure!(reached.contains(&v), "W never takes the value {v} on n ≤ 200");
    }
    Ok(())
}

fn markov_round_trip(spec: &ChainSpec, _: &Ctx) -> Outcome {
    if !spec.is_total() {
        return Ok(());
    }
    let x = spec.real();
    let back = markov_to_total(&total_to_markov(&x))?;
    both_confirmed("markov round trip", probe_equal(x.chain(), back.chain(), 12)?)
}

// funcspace

type IntervalSpace = StepSpace<IntervalBase, LiftedBase<IntervalBase>>;

fn space() -> IntervalSpace {
    StepSpace::new(IntervalBase, LiftedBase(IntervalBase))
}

fn pointwise_leq(sp: &IntervalSpace, s: &IntervalStep, t: &IntervalStep) -> Result<bool, Fail> {
    for x in sample_grid() {
        if !sp.cod.leq(&sp.eval_step(s, &x)?, &sp.eval_step(t, &x)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn step_order((s, t, u): &(IntervalStep, IntervalStep, IntervalStep), _: &Ctx) -> Outcome {
    let sp = space();
    ensure!(sp.step_leq(s, s)?, "s ⋢ s");
    let st = sp.step_leq(s, t)?;
    ensure!(st == sp.leq(s, t), "step_leq and the firing-floor order disagree");
    if st {
        ensure!(pointwise_leq(&sp, s, t)?, "s ⊑ t but not pointwise on the grid");
        if sp.step_leq(t, s)? {
            let eq = pointwise_leq(&sp, t, s)?;
            ensure!(eq, "s ⊑ t ⊑ s but s and t differ on the grid");
        }
        if sp.step_leq(t, u)? {
            ensure!(sp.step_leq(s, u)?, "s ⊑ t ⊑ u but s ⋢ u");
        }
    }
    Ok(())
}

fn eval_monotone((s, x, y): &(IntervalStep, IntervalQ, IntervalQ), _: &Ctx) -> Outcome {
    if !x.leq(y) {
        return Ok(());
    }
    let sp = space();
    let (fx, fy) = (sp.eval_step(s, x)?, sp.eval_step(s, y)?);
    ensure!(sp.cod.leq(&fx, &fy), "s({x}) = {fx:?} ⋢ s({y}) = {fy:?}");
    Ok(())
}

fn approx_below((s, n): &(IntervalStep, usize), _: &Ctx) -> Outcome {
    let n = n % 9;
    let sp = space();
    let a = sp.approx(s, n);
    ensure!(sp.step_leq(&a, s)?, "approx(s, {n}) ⋢ s");
    Ok(())
}

fn single_step_continuity((g, v, spec): &(IntervalQ, IntervalQ, ChainSpec), _: &Ctx) -> Outcome {
    let sp = space();
    let step = SingleStep::new(g.clone(), Some(v.clone()));
    let lifted = LiftedBase(IntervalBase);
    let s = spec.clone();
    let x = sup_increasing(IntervalBase, move |n| widened(&s, n).chain(), SupMode::General);
    let eval = {
        let (sp, step) = (sp, step.clone());
        move |a: &IntervalQ| sp.eval_single(&step, a)
    };
    let lhs = x.map(lifted, eval.clone());
    let s = spec.clone();
    let rhs = sup_increasing(
        lifted,
        move |n| widened(&s, n).chain().map(LiftedBase(IntervalBase), eval.clone()),
        SupMode::General,
    );
    both_confirmed("s(⊔ x_n) = ⊔ s(x_n)", probe_equal(&lhs, &rhs, 10)?)
}

// newton

fn newton_enclosure((num, den): &(usize, usize), _: &Ctx) -> Outcome {
    if *num == 0 || *den == 0 {
        return Ok(());
    }
    let q = Rational::frac(*num as i64, *den as i64);
    let x = newton::sqrt(&q)?;
    let mut prev = x.level(0)?;
    ensure!(
        prev.lo() * prev.lo() <= q && q <= prev.hi() * prev.hi(),
        "level 0 misses √{q}"
    );
    for n in 1..=10 {
        let cur = x.level(n)?;
        ensure!(
            cur.lo() * cur.lo() <= q && q <= cur.hi() * cur.hi(),
            "level {n} misses √{q}"
        );
        ensure!(prev.leq(&cur), "level {n} is not inside level {}", n - 1);
        ensure!(
            cur.length() <= prev.length().half(),
            "level {n} does not halve the width"
        );
        prev = cur;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let r = run(20, 1);
        assert!(r.passed(), "{r}");
        assert_eq!(r.suites.len(), suite_names().len());
        assert!(r.suites.iter().all(|s| s.passed == 20));
    }

    #[test]
    fn zero_cases_runs_nothing() {
        let r = run(0, 7);
        assert!(r.passed());
        assert!(r.suites.is_empty());
        assert!(r.to_string().contains("0 suites run"));
    }

    #[test]
    fn deterministic() {
        assert_eq!(run(5, 3).to_string(), run(5, 3).to_string());
    }

    #[test]
    fn non_strict_way_below_is_caught() {
        let r = run_with(50, 1, Mutation::NonStrictWayBelow);
        let v = r.violation.clone().expect("mutation must be detected");
        assert!(v.suite.starts_with("interval.way_below"), "{r}");
        assert!(r.to_string().contains("VIOLATION"));
        // the minimized pair has equal endpoints somewhere
        assert!(v.minimized.len() <= v.original.len());
    }

    #[test]
    fn names_are_unique() {
        let mut names = suite_names();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }
}

//! The base IQ of closed rational intervals, ordered by reverse inclusion.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::DomainError;
use crate::numerics::Rational;
use crate::predomain::{pair, unpair, unzigzag, zigzag, Base, SeparatedBase, WayBelow};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntervalQ {
    lo: Rational,
    hi: Rational,
}

impl IntervalQ {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, DomainError> {
        if lo > hi {
            return Err(DomainError::InvalidInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(IntervalQ { lo, hi })
    }

    pub fn point(q: Rational) -> Self {
        IntervalQ { lo: q.clone(), hi: q }
    }

    /// Shorthand for literal intervals `[a/b, c/d]`; panics if malformed.
    pub fn frac(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(Rational::frac(a, b), Rational::frac(c, d)).expect("malformed interval literal")
    }

    pub fn ints(lo: i64, hi: i64) -> Self {
        Self::frac(lo, 1, hi, 1)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    /// `ℓ(a) = ā − a̲`.
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi).half()
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// `a ± δ = [a̲ − δ, ā + δ]`.
    pub fn extend(&self, delta: &Rational) -> Result<IntervalQ, DomainError> {
        if delta.is_negative() {
            return Err(DomainError::NegativeDelta(delta.to_string()));
        }
        Ok(self.pad(delta))
    }

    pub(crate) fn pad(&self, delta: &Rational) -> IntervalQ {
        IntervalQ {
            lo: &self.lo - delta,
            hi: &self.hi + delta,
        }
    }

    pub fn leq(&self, other: &IntervalQ) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn way_below(&self, other: &IntervalQ) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn overlaps(&self, other: &IntervalQ) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl fmt::Display for IntervalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for IntervalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for IntervalQ {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DomainError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        IntervalQ::new(lo.parse()?, hi.parse()?)
    }
}

/// Why a pair of finite sets fails to be separated, or the witness when it is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separation {
    Separated {
        witness: IntervalQ,
    },
    /// `A` has no supremum.
    NoSup,
    /// `⊔A` is a single point, so nothing is way-above it.
    SingletonSup,
    /// The `D` element at this index lies below `⊔A`.
    Contained {
        index: usize,
    },
}

impl Separation {
    pub fn is_separated(&self) -> bool {
        matches!(self, Separation::Separated { .. })
    }
}

/// The base IQ.
///
/// The enumeration interleaves two streams: three out of every four indices
/// walk dyadic intervals `[(j−1)/2^s, (j+1)/2^s]` with centres in `[−2, 2]`,
/// stage by stage, and the remaining indices run a pairing-based enumeration
/// of every rational interval.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalBase;

fn stage_start(s: u32) -> u128 {
    (1u128 << (s + 2)) - 4 + s as u128
}

fn dyadic(t: u64) -> IntervalQ {
    let t = t as u128;
    let mut s = 0u32;
    while stage_start(s + 1) <= t {
        s += 1;
    }
    let j = (t - stage_start(s)) as i128 - (1i128 << (s + 1));
    let den = BigInt::one() << s as usize;
    let q = |n: i128| Rational::new(BigInt::from(n), den.clone()).expect("nonzero denominator");
    IntervalQ {
        lo: q(j - 1),
        hi: q(j + 1),
    }
}

fn general(k: u64) -> IntervalQ {
    let (x, y) = unpair(k);
    let (n1, d1) = unpair(x);
    let (n2, d2) = unpair(y);
    let lo = Rational::new(unzigzag(n1), d1 as i128 + 1).expect("positive denominator");
    let width = Rational::new(n2, d2 as i128 + 1).expect("positive denominator");
    IntervalQ { hi: &lo + &width, lo }
}

fn general_index(b: &IntervalQ) -> Option<u64> {
    let w = b.length();
    let n1 = zigzag(b.lo.numer().to_i64()?);
    let d1 = b.lo.denom().to_u64()? - 1;
    let n2 = w.numer().abs().to_u64()?;
    let d2 = w.denom().to_u64()? - 1;
    pair(pair(n1, d1)?, pair(n2, d2)?)
}

impl IntervalBase {
    /// Decides separatedness of `A` and `D`: this holds iff `⊔A` exists, is
    /// not a singleton and lies strictly above no element of `D`. Positive
    /// answers carry a witness `ω`.
    pub fn separation(&self, a: &[IntervalQ], d: &[IntervalQ]) -> Result<Separation, DomainError> {
        if a.is_empty() {
            return Err(DomainError::EmptyInput("separatedness needs a nonempty A"));
        }
        if !self.consistent(a) {
            return Ok(Separation::NoSup);
        }
        let s = self.sup(a)?;
        if s.is_singleton() {
            return Ok(Separation::SingletonSup);
        }
        if let Some(index) = d.iter().position(|x| x.leq(&s)) {
            return Ok(Separation::Contained { index });
        }
        let (lo, hi) = (&s.lo, &s.hi);
        let inside = |q: &&Rational| lo < *q && *q < hi;
        let c = d.iter().map(|x| &x.lo).filter(inside).min();
        let e = d.iter().map(|x| &x.hi).filter(inside).max();
        let (eps, delta) = match (c, e) {
            (Some(c), Some(e)) => (c.min(e).clone(), c.max(e).clone()),
            (Some(c), None) => (c.clone(), c.clone()),
            (None, Some(e)) => (e.clone(), e.clone()),
            (None, None) => {
                let m = s.midpoint();
                return Ok(Separation::Separated {
                    witness: IntervalQ::point(m),
                });
            }
        };
        let witness = IntervalQ::new((&eps + lo).half(), (&delta + hi).half())?;
        Ok(Separation::Separated { witness })
    }
}

impl Base for IntervalBase {
    type Elem = IntervalQ;

    fn leq(&self, a: &IntervalQ, b: &IntervalQ) -> bool {
        a.leq(b)
    }

    /// `[p − 2^{-i}, q + 2^{-i}]`.
    fn approx(&self, b: &IntervalQ, i: usize) -> IntervalQ {
        b.pad(&Rational::pow2(-(i as i64)))
    }

    fn enumerate(&self, i: u64) -> IntervalQ {
        let q = i / 4;
        match i % 4 {
            0 => general(q),
            r => dyadic(3 * q + r - 1),
        }
    }

    fn index_of(&self, b: &IntervalQ) -> Option<u64> {
        general_index(b)?.checked_mul(4)
    }

    fn consistent(&self, set: &[IntervalQ]) -> bool {
        match (set.iter().map(|x| &x.lo).max(), set.iter().map(|x| &x.hi).min()) {
            (Some(lo), Some(hi)) => lo <= hi,
            _ => true,
        }
    }

    fn sup(&self, set: &[IntervalQ]) -> Result<IntervalQ, DomainError> {
        let lo = set.iter().map(|x| &x.lo).max();
        let hi = set.iter().map(|x| &x.hi).min();
        match (lo, hi) {
            (Some(lo), Some(hi)) if lo <= hi => Ok(IntervalQ {
                lo: lo.clone(),
                hi: hi.clone(),
            }),
            (Some(_), Some(_)) => Err(DomainError::Inconsistent(format!("{set:?}"))),
            _ => Err(DomainError::EmptyInput("sup of no intervals")),
        }
    }

    fn is_helly(&self) -> bool {
        true
    }
}

impl WayBelow for IntervalBase {
    fn way_below(&self, a: &IntervalQ, b: &IntervalQ) -> bool {
        a.way_below(b)
    }

    /// `[(b̲ + c̲)/2, (c̄ + b̄)/2]`.
    fn interpolate(&self, b: &IntervalQ, c: &IntervalQ) -> Result<IntervalQ, DomainError> {
        if !b.way_below(c) {
            return Err(crate::predomain::not_way_below(b, c));
        }
        IntervalQ::new((&b.lo + &c.lo).half(), (&c.hi + &b.hi).half())
    }

    /// Lower endpoints of a chain only grow and upper endpoints only shrink,
    /// so once `probe` no longer straddles the target on both sides it never
    /// will again. A singleton target is maximal.
    fn permanently_not_way_below(&self, probe: &IntervalQ, target: &IntervalQ) -> bool {
        probe.hi <= target.lo
            || probe.lo >= target.hi
            || probe.is_singleton()
            || (target.is_singleton() && !probe.way_below(target))
    }

    /// Shrinking a non-degenerate `alpha` slightly on both sides fires
    /// exactly the guards below `alpha`.
    fn firing_floor(&self, alpha: &IntervalQ, guards: &[&IntervalQ]) -> Result<Option<Vec<usize>>, DomainError> {
        if alpha.is_singleton() {
            return Ok(None);
        }
        Ok(Some(
            guards
                .iter()
                .enumerate()
                .filter(|(_, g)| g.leq(alpha))
                .map(|(i, _)| i)
                .collect(),
        ))
    }
}

impl SeparatedBase for IntervalBase {
    fn separated(&self, a: &[IntervalQ], d: &[IntervalQ]) -> Result<bool, DomainError> {
        Ok(self.separation(a, d)?.is_separated())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predomain::{diagonal_sup, interpolate_multi, sup_preserves_waybelow_check};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn iv(a: i64, b: i64) -> IntervalQ {
        IntervalQ::ints(a, b)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn order_examples() {
        assert!(iv(0, 4).leq(&iv(1, 3)));
        assert!(iv(0, 4).leq(&iv(0, 4)));
        assert!(!iv(1, 3).leq(&iv(0, 4)));
        assert!(iv(0, 4).way_below(&iv(1, 3)));
        assert!(!iv(0, 4).way_below(&iv(0, 3)));
        assert!(iv(1, 3).way_below(&iv(2, 2)));
    }

    #[test]
    fn extend_and_length() {
        let a = iv(1, 2);
        assert_eq!(a.extend(&q(1, 2)).unwrap(), IntervalQ::frac(1, 2, 5, 2));
        assert_eq!(a.extend(&Rational::zero()).unwrap(), a);
        assert!(a.extend(&q(-1, 2)).is_err());
        for i in 0..30 {
            assert!(a.extend(&Rational::pow2(-i)).unwrap().way_below(&a));
        }
        assert_eq!(iv(1, 3).length(), q(2, 1));
        assert_eq!(IntervalQ::point(q(3, 7)).length(), Rational::zero());
        assert_eq!(IntervalQ::frac(4, 3, 3, 2).length(), q(1, 6));
        assert!(IntervalQ::new(q(2, 1), q(1, 1)).is_err());
    }

    #[test]
    fn consistency_examples() {
        let base = IntervalBase;
        assert!(base.consistent(&[iv(0, 2), iv(1, 3)]));
        assert_eq!(base.sup(&[iv(0, 2), iv(1, 3)]).unwrap(), iv(1, 2));
        assert!(!base.consistent(&[iv(0, 1), iv(2, 3)]));
        assert!(base.sup(&[iv(0, 1), iv(2, 3)]).is_err());
        for n in 0..40 {
            let e = Rational::pow2(-n);
            let alpha = IntervalQ::new(q(-1, 1), e.clone()).unwrap();
            let beta = IntervalQ::new(-e, q(1, 1)).unwrap();
            assert!(base.consistent(&[alpha, beta]));
        }
    }

    #[test]
    fn interpolation_examples() {
        let base = IntervalBase;
        let y = base.interpolate(&iv(0, 4), &iv(1, 3)).unwrap();
        assert_eq!(y, IntervalQ::frac(1, 2, 7, 2));
        assert!(iv(0, 4).way_below(&y) && y.way_below(&iv(1, 3)));
        assert!(base.interpolate(&iv(0, 1), &iv(0, 1)).is_err());

        let bs = [iv(0, 4), iv(-1, 5)];
        let y = interpolate_multi(&base, &bs, &iv(1, 3)).unwrap();
        assert!(bs.iter().all(|b| b.way_below(&y)));
        assert!(y.way_below(&iv(1, 3)));
        assert_eq!(
            interpolate_multi(&base, &[iv(0, 4)], &iv(1, 3)).unwrap(),
            base.interpolate(&iv(0, 4), &iv(1, 3)).unwrap()
        );
        assert!(interpolate_multi(&base, &[], &iv(1, 3)).is_err());
    }

    #[test]
    fn sup_preserves_waybelow_examples() {
        let base = IntervalBase;
        assert_eq!(sup_preserves_waybelow_check(&base, &[(iv(0, 4), iv(1, 3))]), Ok(true));
        let pairs = [(iv(0, 4), iv(1, 3)), (iv(1, 5), iv(2, 3))];
        assert_eq!(sup_preserves_waybelow_check(&base, &pairs), Ok(true));
        assert!(sup_preserves_waybelow_check(&base, &[]).is_err());
    }

    #[test]
    fn diagonal_sup_examples() {
        let base = IntervalBase;
        let f = |n: usize, m: usize| IntervalQ::new(-Rational::pow2(-(n as i64)), Rational::pow2(-(m as i64))).unwrap();
        assert_eq!(diagonal_sup(&base, f, 3).unwrap(), IntervalQ::frac(-1, 8, 1, 8));
        assert_eq!(diagonal_sup(&base, |_, _| iv(0, 1), 4).unwrap(), iv(0, 1));
        let bad = |n: usize, _m: usize| if n.is_multiple_of(2) { iv(0, 1) } else { iv(2, 3) };
        assert_eq!(
            diagonal_sup(&base, bad, 3),
            Err(DomainError::NonMonotoneGrid { n: 0, m: 0 })
        );
    }

    #[test]
    fn separation_examples() {
        let base = IntervalBase;
        let sep = base.separation(&[iv(0, 2)], &[iv(3, 4)]).unwrap();
        assert_eq!(sep, Separation::Separated { witness: iv(1, 1) });
        assert!(iv(0, 2).way_below(&iv(1, 1)));
        assert!(!iv(3, 4).way_below(&iv(1, 1)));
        // [1, 3/2] is not below [0, 2] in the reverse-inclusion order
        assert_eq!(
            base.separation(&[iv(0, 2)], &[IntervalQ::frac(1, 1, 3, 2)]).unwrap(),
            Separation::Separated {
                witness: IntervalQ::frac(1, 2, 7, 4)
            }
        );
        assert_eq!(
            base.separation(&[iv(0, 2)], &[iv(5, 6), iv(-1, 3)]).unwrap(),
            Separation::Contained { index: 1 }
        );
        assert_eq!(base.separation(&[iv(0, 0)], &[]).unwrap(), Separation::SingletonSup);
        assert_eq!(base.separation(&[iv(0, 1), iv(2, 3)], &[]).unwrap(), Separation::NoSup);
        assert!(base.separation(&[], &[iv(0, 1)]).is_err());
        // both endpoint sets nonempty
        let d = [IntervalQ::frac(1, 2, 3, 1), IntervalQ::frac(-1, 1, 3, 2)];
        let Separation::Separated { witness } = base.separation(&[iv(0, 2)], &d).unwrap() else {
            panic!("expected a witness");
        };
        assert_eq!(witness, IntervalQ::frac(1, 4, 7, 4));
        assert!(d.iter().all(|x| !x.way_below(&witness)));
    }

    #[test]
    fn separation_without_consistent_a_is_negative() {
        // the modified base without [0,0]: {[-1,0],[0,1]} has no sup there,
        // but in IQ its sup is the singleton [0,0]
        let base = IntervalBase;
        assert_eq!(
            base.separation(&[iv(-1, 0), iv(0, 1)], &[]).unwrap(),
            Separation::SingletonSup
        );
    }

    #[test]
    fn enumeration_is_consistent_with_index_of() {
        let base = IntervalBase;
        for i in 0..4000u64 {
            let b = base.enumerate(i);
            let j = base.index_of(&b).unwrap();
            assert_eq!(base.enumerate(j), b);
        }
        let first: Vec<IntervalQ> = (0..8).map(|i| base.enumerate(i)).collect();
        assert_eq!(first[1], iv(-3, -1));
        assert_eq!(first[2], iv(-2, 0));
        assert_eq!(first[3], iv(-1, 1));
        assert_eq!(first[0], iv(0, 0));
    }

    #[test]
    fn enumeration_reaches_small_intervals() {
        let base = IntervalBase;
        let seen: HashSet<IntervalQ> = (0..20_000u64).map(|i| base.enumerate(i)).collect();
        for b in [
            iv(0, 1),
            IntervalQ::frac(1, 3, 1, 2),
            iv(-5, 7),
            IntervalQ::frac(-1, 8, 1, 8),
        ] {
            let i = base.index_of(&b).unwrap();
            assert_eq!(base.enumerate(i), b);
        }
        assert!(seen.contains(&IntervalQ::frac(-1, 8, 1, 8)));
        assert!(seen.contains(&IntervalQ::frac(0, 1, 1, 128)));
    }

    #[test]
    fn parse_and_display() {
        let a: IntervalQ = "[1/3, 2]".parse().unwrap();
        assert_eq!(a, IntervalQ::frac(1, 3, 2, 1));
        assert_eq!(a.to_string(), "[1/3, 2]");
        assert!("[2, 1]".parse::<IntervalQ>().is_err());
        assert!("1, 2".parse::<IntervalQ>().is_err());
    }

    fn rational() -> impl Strategy<Value = Rational> {
        (-400i64..400, 1i64..40).prop_map(|(n, d)| q(n, d))
    }

    fn interval() -> impl Strategy<Value = IntervalQ> {
        (rational(), rational()).prop_map(|(a, b)| IntervalQ::new(a.clone().min(b.clone()), a.max(b)).unwrap())
    }

    proptest! {
        #[test]
        fn way_below_is_strict_containment_by_padding(a in interval(), b in interval()) {
            let by_padding = (1..=20).any(|i| a.leq(&b.pad(&Rational::pow2(-i))));
            prop_assert_eq!(a.way_below(&b), by_padding);
        }

        #[test]
        fn sup_is_least_upper_bound(xs in proptest::collection::vec(interval(), 1..5), ys in proptest::collection::vec(interval(), 1..20)) {
            let base = IntervalBase;
            if base.consistent(&xs) {
                let s = base.sup(&xs).unwrap();
                let lo = xs.iter().map(|x| x.lo().clone()).max().unwrap();
                let hi = xs.iter().map(|x| x.hi().clone()).min().unwrap();
                prop_assert_eq!(&s, &IntervalQ::new(lo, hi).unwrap());
                for y in &ys {
                    if xs.iter().all(|x| x.leq(y)) {
                        prop_assert!(s.leq(y));
                    }
                }
            }
        }

        #[test]
        fn separation_witness_is_valid(a in proptest::collection::vec(interval(), 1..4), d in proptest::collection::vec(interval(), 0..4)) {
            let base = IntervalBase;
            match base.separation(&a, &d).unwrap() {
                Separation::Separated { witness } => {
                    prop_assert!(a.iter().all(|x| x.way_below(&witness)));
                    prop_assert!(d.iter().all(|x| !x.way_below(&witness)));
                }
                Separation::NoSup => prop_assert!(!base.consistent(&a)),
                Separation::SingletonSup => prop_assert!(base.sup(&a).unwrap().is_singleton()),
                Separation::Contained { index } => {
                    prop_assert!(d[index].leq(&base.sup(&a).unwrap()));
                }
            }
        }

        #[test]
        fn consistency_is_continuous(centres in proptest::collection::vec((rational(), rational()), 1..4)) {
            // alpha_i is the sup of the chain alpha_i ± 2^-j
            let base = IntervalBase;
            let alphas: Vec<IntervalQ> = centres
                .iter()
                .map(|(a, b)| IntervalQ::new(a.clone().min(b.clone()), a.clone().max(b.clone())).unwrap())
                .collect();
            let levelwise = (0..=20).all(|j| {
                let level: Vec<IntervalQ> = alphas.iter().map(|x| base.approx(x, j)).collect();
                base.consistent(&level)
            });
            if levelwise {
                prop_assert!(base.consistent(&alphas));
            }
        }

        #[test]
        fn interpolant_sits_between(b in interval(), c in interval()) {
            let base = IntervalBase;
            match base.interpolate(&b, &c) {
                Ok(y) => prop_assert!(b.way_below(&y) && y.way_below(&c)),
                Err(_) => prop_assert!(!b.way_below(&c)),
            }
        }

        #[test]
        fn firing_floor_is_achieved(alpha in interval(), guards in proptest::collection::vec(interval(), 0..5)) {
            let base = IntervalBase;
            let refs: Vec<&IntervalQ> = guards.iter().collect();
            match base.firing_floor(&alpha, &refs).unwrap() {
                None => prop_assert!(alpha.is_singleton()),
                Some(floor) => {
                    // shrink alpha by less than every positive margin
                    let mut eps = alpha.length().half();
                    for g in &guards {
                        for m in [g.lo() - alpha.lo(), alpha.hi() - g.hi()] {
                            if m.is_positive() {
                                eps = eps.min(m);
                            }
                        }
                    }
                    let x = IntervalQ::new(alpha.lo() + &eps, alpha.hi() - &eps).unwrap();
                    prop_assert!(alpha.way_below(&x));
                    let fired: Vec<usize> = (0..guards.len()).filter(|&i| guards[i].way_below(&x)).collect();
                    prop_assert_eq!(fired, floor);
                }
            }
        }
    }
}

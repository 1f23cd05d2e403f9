//! Set algebra over time periods on an integer-millisecond grid.
//!
//! A [`TimePeriod`] is a finite union of half-open intervals `[lo, hi)` kept in
//! canonical form: sorted, pairwise disjoint and non-adjacent. Either end may be
//! unbounded, so the universe and complements are representable.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Milliseconds on the scheduling grid.
pub type Millis = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TimelineError {
    #[error("no feasible time outside the forbidden period")]
    NoFeasibleTime,
    #[error("empty or inverted interval [{0}, {1})")]
    InvalidInterval(Bound, Bound),
}

/// An interval end point, possibly at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    At(Millis),
    PosInf,
}

impl Bound {
    fn shift(self, delta: Millis) -> Bound {
        match self {
            Bound::At(t) => Bound::At(t + delta),
            inf => inf,
        }
    }

    pub fn finite(self) -> Option<Millis> {
        match self {
            Bound::At(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::At(t) => write!(f, "{t}"),
            Bound::PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::At(t) => serializer.serialize_i64(*t),
            Bound::NegInf => serializer.serialize_str("-inf"),
            Bound::PosInf => serializer.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(t) => Ok(Bound::At(t)),
            Raw::Text(s) => match s.as_str() {
                "-inf" => Ok(Bound::NegInf),
                "+inf" | "inf" => Ok(Bound::PosInf),
                other => Err(de::Error::custom(format!("bad bound {other:?}"))),
            },
        }
    }
}

/// Half-open interval `[lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    lo: Bound,
    hi: Bound,
}

impl Span {
    pub fn new(lo: Bound, hi: Bound) -> Result<Span, TimelineError> {
        if lo < hi && lo != Bound::PosInf && hi != Bound::NegInf {
            Ok(Span { lo, hi })
        } else {
            Err(TimelineError::InvalidInterval(lo, hi))
        }
    }

    pub fn lo(&self) -> Bound {
        self.lo
    }

    pub fn hi(&self) -> Bound {
        self.hi
    }

    /// Length in ms, `None` when unbounded.
    pub fn duration(&self) -> Option<Millis> {
        Some(self.hi.finite()? - self.lo.finite()?)
    }

    pub fn contains(&self, t: Millis) -> bool {
        self.lo <= Bound::At(t) && Bound::At(t) < self.hi
    }
}

/// Canonical union of disjoint, non-adjacent half-open intervals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TimePeriod {
    spans: Vec<Span>,
}

impl TimePeriod {
    pub fn empty() -> Self {
        TimePeriod { spans: Vec::new() }
    }

    pub fn universe() -> Self {
        TimePeriod {
            spans: vec![Span {
                lo: Bound::NegInf,
                hi: Bound::PosInf,
            }],
        }
    }

    /// `[lo, hi)`; empty when `lo >= hi`.
    pub fn interval(lo: Millis, hi: Millis) -> Self {
        Self::between(Bound::At(lo), Bound::At(hi))
    }

    pub fn between(lo: Bound, hi: Bound) -> Self {
        match Span::new(lo, hi) {
            Ok(span) => TimePeriod { spans: vec![span] },
            Err(_) => TimePeriod::empty(),
        }
    }

    /// Builds a canonical period from arbitrary (possibly overlapping) spans.
    pub fn from_spans<I: IntoIterator<Item = Span>>(spans: I) -> Self {
        let mut spans: Vec<Span> = spans.into_iter().collect();
        spans.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        let mut out: Vec<Span> = Vec::with_capacity(spans.len());
        for span in spans {
            match out.last_mut() {
                Some(last) if span.lo <= last.hi => {
                    if span.hi > last.hi {
                        last.hi = span.hi;
                    }
                }
                _ => out.push(span),
            }
        }
        TimePeriod { spans: out }
    }

    pub fn from_intervals<I: IntoIterator<Item = (Millis, Millis)>>(intervals: I) -> Self {
        Self::from_spans(
            intervals
                .into_iter()
                .filter_map(|(lo, hi)| Span::new(Bound::At(lo), Bound::At(hi)).ok()),
        )
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn is_universe(&self) -> bool {
        matches!(
            self.spans.as_slice(),
            [Span {
                lo: Bound::NegInf,
                hi: Bound::PosInf
            }]
        )
    }

    pub fn contains(&self, t: Millis) -> bool {
        let probe = Bound::At(t);
        // first span whose hi is beyond t
        let idx = self.spans.partition_point(|s| s.hi <= probe);
        self.spans.get(idx).is_some_and(|s| s.lo <= probe)
    }

    /// Total length in ms, `None` when unbounded.
    pub fn measure(&self) -> Option<Millis> {
        self.spans.iter().map(Span::duration).sum()
    }

    pub fn union(&self, other: &TimePeriod) -> TimePeriod {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        Self::from_spans(self.spans.iter().chain(other.spans.iter()).copied())
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a TimePeriod>>(periods: I) -> TimePeriod {
        Self::from_spans(periods.into_iter().flat_map(|p| p.spans.iter().copied()))
    }

    pub fn intersect(&self, other: &TimePeriod) -> TimePeriod {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.spans.len() && j < other.spans.len() {
            let a = self.spans[i];
            let b = other.spans[j];
            let lo = a.lo.max(b.lo);
            let hi = a.hi.min(b.hi);
            if lo < hi {
                out.push(Span { lo, hi });
            }
            match a.hi.cmp(&b.hi) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        // pieces of canonical inputs stay disjoint and non-adjacent
        TimePeriod { spans: out }
    }

    pub fn complement(&self) -> TimePeriod {
        let mut out = Vec::with_capacity(self.spans.len() + 1);
        let mut cursor = Bound::NegInf;
        for span in &self.spans {
            if cursor < span.lo {
                out.push(Span {
                    lo: cursor,
                    hi: span.lo,
                });
            }
            cursor = span.hi;
        }
        if cursor < Bound::PosInf {
            out.push(Span {
                lo: cursor,
                hi: Bound::PosInf,
            });
        }
        TimePeriod { spans: out }
    }

    pub fn difference(&self, other: &TimePeriod) -> TimePeriod {
        self.intersect(&other.complement())
    }

    /// Translates every interval by `delta` ms.
    pub fn shifted(&self, delta: Millis) -> TimePeriod {
        TimePeriod {
            spans: self
                .spans
                .iter()
                .map(|s| Span {
                    lo: s.lo.shift(delta),
                    hi: s.hi.shift(delta),
                })
                .collect(),
        }
    }

    /// Smallest `t >= 0` not in the period.
    pub fn t_earliest(&self) -> Result<Millis, TimelineError> {
        let mut t = 0;
        for span in &self.spans {
            if span.hi <= Bound::At(t) {
                continue;
            }
            if span.lo > Bound::At(t) {
                break;
            }
            match span.hi {
                Bound::At(hi) => t = hi,
                _ => return Err(TimelineError::NoFeasibleTime),
            }
        }
        Ok(t)
    }

    /// Largest `t <= -1` not in the period.
    pub fn t_latest(&self) -> Result<Millis, TimelineError> {
        let mut t = -1;
        for span in self.spans.iter().rev() {
            if span.lo > Bound::At(t) {
                continue;
            }
            if span.hi <= Bound::At(t) {
                break;
            }
            match span.lo {
                Bound::At(lo) => t = lo - 1,
                _ => return Err(TimelineError::NoFeasibleTime),
            }
        }
        Ok(t)
    }

    /// Start times whose passing window `[t + tau_pass, t + tau_ret]` meets the
    /// period: each `[a, b)` maps to `[a - tau_ret, b - tau_pass)`. The left
    /// end is kept even though the window there only touches `a`.
    pub fn shift_window(&self, tau_pass: Millis, tau_ret: Millis) -> TimePeriod {
        debug_assert!(0 <= tau_pass && tau_pass <= tau_ret);
        let spans = self.spans.iter().map(|s| Span {
            lo: s.lo.shift(-tau_ret),
            hi: s.hi.shift(-tau_pass),
        });
        Self::from_spans(spans)
    }

    /// The period together with a copy delayed by one cycle length.
    pub fn widen_cycle(&self, cycle: Millis) -> TimePeriod {
        debug_assert!(cycle >= 0);
        if cycle == 0 {
            return self.clone();
        }
        self.union(&self.shifted(cycle))
    }

    /// Times covered by at least `k` of the given periods.
    pub fn depth_at_least<'a, I>(periods: I, k: usize) -> TimePeriod
    where
        I: IntoIterator<Item = &'a TimePeriod>,
    {
        assert!(k >= 1, "depth threshold must be at least one");
        let mut events: Vec<(Bound, i32)> = Vec::new();
        for period in periods {
            for span in &period.spans {
                events.push((span.lo, 1));
                events.push((span.hi, -1));
            }
        }
        if events.len() < 2 * k {
            return TimePeriod::empty();
        }
        events.sort_unstable();
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut open: Option<Bound> = None;
        let mut idx = 0;
        while idx < events.len() {
            let at = events[idx].0;
            while idx < events.len() && events[idx].0 == at {
                depth += events[idx].1;
                idx += 1;
            }
            let covered = depth >= k as i32;
            match (open, covered) {
                (None, true) => open = Some(at),
                (Some(lo), false) => {
                    out.push(Span { lo, hi: at });
                    open = None;
                }
                _ => {}
            }
        }
        TimePeriod { spans: out }
    }
}

impl fmt::Display for TimePeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return f.write_str("∅");
        }
        for (i, s) in self.spans.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "[{}, {})", s.lo, s.hi)?;
        }
        Ok(())
    }
}

impl Serialize for TimePeriod {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.spans.iter().map(|s| (s.lo, s.hi)))
    }
}

impl<'de> Deserialize<'de> for TimePeriod {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<(Bound, Bound)> = Vec::deserialize(deserializer)?;
        let spans = pairs
            .into_iter()
            .map(|(lo, hi)| Span::new(lo, hi).map_err(de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TimePeriod::from_spans(spans))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: Millis, hi: Millis) -> TimePeriod {
        TimePeriod::interval(lo, hi)
    }

    fn set(parts: &[(Millis, Millis)]) -> TimePeriod {
        TimePeriod::from_intervals(parts.iter().copied())
    }

    #[test]
    fn union_examples() {
        assert_eq!(iv(0, 10).union(&iv(5, 20)), iv(0, 20));
        assert_eq!(TimePeriod::empty().union(&iv(3, 4)), iv(3, 4));
        assert_eq!(iv(0, 5).union(&iv(5, 9)), iv(0, 9));
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(iv(0, 10).intersect(&iv(5, 20)), iv(5, 10));
        assert!(iv(0, 5).intersect(&iv(5, 9)).is_empty());
        let p = set(&[(0, 3), (7, 9)]);
        assert_eq!(TimePeriod::universe().intersect(&p), p);
    }

    #[test]
    fn complement_examples() {
        let c = iv(0, 10).complement();
        assert_eq!(
            c,
            TimePeriod::from_spans([
                Span::new(Bound::NegInf, Bound::At(0)).unwrap(),
                Span::new(Bound::At(10), Bound::PosInf).unwrap(),
            ])
        );
        assert!(TimePeriod::empty().complement().is_universe());
        assert_eq!(c.complement(), iv(0, 10));
    }

    #[test]
    fn earliest_examples() {
        assert_eq!(TimePeriod::empty().t_earliest(), Ok(0));
        assert_eq!(iv(0, 10).t_earliest(), Ok(10));
        assert_eq!(set(&[(-5, 3), (7, 9)]).t_earliest(), Ok(3));
        assert_eq!(set(&[(0, 3), (3, 9), (12, 20)]).t_earliest(), Ok(9));
        assert_eq!(
            TimePeriod::between(Bound::At(-4), Bound::PosInf).t_earliest(),
            Err(TimelineError::NoFeasibleTime)
        );
    }

    #[test]
    fn latest_examples() {
        assert_eq!(TimePeriod::empty().t_latest(), Ok(-1));
        assert_eq!(iv(-5, 3).t_latest(), Ok(-6));
        assert_eq!(iv(-3, -1).t_latest(), Ok(-1));
        assert_eq!(set(&[(-9, -6), (-5, 2)]).t_latest(), Ok(-6));
        assert_eq!(
            TimePeriod::between(Bound::NegInf, Bound::At(0)).t_latest(),
            Err(TimelineError::NoFeasibleTime)
        );
    }

    #[test]
    fn shift_window_examples() {
        assert_eq!(iv(500, 600).shift_window(500, 600), iv(-100, 100));
        assert!(TimePeriod::empty().shift_window(500, 600).is_empty());
        assert!(TimePeriod::universe().shift_window(500, 600).is_universe());
    }

    #[test]
    fn shift_window_matches_per_ms_overlap() {
        // overlap of [t+500, t+600) with [500, 600), plus the touching start -100
        let got = iv(500, 600).shift_window(500, 600);
        for t in -400..400 {
            let hits = (t + 500..t + 600).any(|u| (500..600).contains(&u));
            assert_eq!(got.contains(t), hits || t == -100, "t = {t}");
        }
    }

    #[test]
    fn widen_cycle_examples() {
        assert_eq!(iv(-1100, 1100).widen_cycle(1200), iv(-1100, 2300));
        assert_eq!(iv(0, 10).widen_cycle(0), iv(0, 10));
        assert_eq!(iv(0, 10).widen_cycle(5000), set(&[(0, 10), (5000, 5010)]));
    }

    #[test]
    fn depth_examples() {
        let list = [iv(0, 10), iv(5, 15), iv(8, 20)];
        // per-ms counting oracle
        let expected = TimePeriod::from_intervals(
            (0..20)
                .filter(|&u| list.iter().filter(|p| p.contains(u)).count() >= 2)
                .map(|u| (u, u + 1)),
        );
        assert_eq!(expected, iv(5, 15));
        assert_eq!(TimePeriod::depth_at_least(&list, 2), expected);
        assert_eq!(
            TimePeriod::depth_at_least(&list, 1),
            TimePeriod::union_all(&list)
        );
        assert!(TimePeriod::depth_at_least(&[iv(0, 5), iv(10, 15)], 2).is_empty());
    }

    #[test]
    fn depth_counts_universe() {
        let list = [TimePeriod::universe(), iv(0, 4)];
        assert_eq!(TimePeriod::depth_at_least(&list, 2), iv(0, 4));
        assert!(TimePeriod::depth_at_least(&list, 1).is_universe());
    }

    #[test]
    fn contains_and_measure() {
        let p = set(&[(0, 3), (7, 9)]);
        assert!(p.contains(0) && p.contains(2) && !p.contains(3) && p.contains(8));
        assert_eq!(p.measure(), Some(5));
        assert_eq!(TimePeriod::universe().measure(), None);
    }

    #[test]
    fn json_round_trip_with_infinities() {
        let p = iv(0, 10).complement();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"[["-inf",0],[10,"+inf"]]"#);
        let back: TimePeriod = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<TimePeriod>("[[5,5]]").is_err());
    }

    fn arb_period() -> impl Strategy<Value = TimePeriod> {
        let span = (-60i64..60, 1i64..25).prop_map(|(lo, len)| (lo, lo + len));
        (
            prop::collection::vec(span, 0..5),
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(|(parts, neg, pos)| {
                let mut p = TimePeriod::from_intervals(parts);
                if neg {
                    p = p.union(&TimePeriod::between(Bound::NegInf, Bound::At(-70)));
                }
                if pos {
                    p = p.union(&TimePeriod::between(Bound::At(90), Bound::PosInf));
                }
                p
            })
    }

    fn is_canonical(p: &TimePeriod) -> bool {
        p.spans.iter().all(|s| s.lo < s.hi) && p.spans.windows(2).all(|w| w[0].hi < w[1].lo)
    }

    proptest! {
        #[test]
        fn normalizing_is_idempotent(p in arb_period(), q in arb_period()) {
            let u = p.union(&q);
            prop_assert!(is_canonical(&u));
            prop_assert_eq!(TimePeriod::from_spans(u.spans.clone()), u);
        }

        #[test]
        fn de_morgan(p in arb_period(), q in arb_period()) {
            prop_assert_eq!(
                p.union(&q).complement(),
                p.complement().intersect(&q.complement())
            );
        }

        #[test]
        fn shift_distributes_over_union(
            p in arb_period(), q in arb_period(), tp in 0i64..30, extra in 0i64..30
        ) {
            let tr = tp + extra;
            prop_assert_eq!(
                p.union(&q).shift_window(tp, tr),
                p.shift_window(tp, tr).union(&q.shift_window(tp, tr))
            );
        }

        #[test]
        fn shift_window_membership(
            parts in prop::collection::vec((-60i64..60, 1i64..25), 0..5),
            tp in 0i64..30, extra in 0i64..30, t in -150i64..100
        ) {
            let tr = tp + extra;
            let p = TimePeriod::from_intervals(parts.iter().map(|&(lo, len)| (lo, lo + len)));
            // closed right end: the stub still covers the point at t + tau_ret
            let brute = (t + tp..=t + tr).any(|u| p.contains(u));
            prop_assert_eq!(p.shift_window(tp, tr).contains(t), brute);
        }

        #[test]
        fn earliest_is_minimum_outside(p in arb_period()) {
            if let Ok(t) = p.t_earliest() {
                prop_assert!(t >= 0 && !p.contains(t));
                prop_assert!((0..t).all(|u| p.contains(u)));
            } else {
                prop_assert!((0..200).all(|u| p.contains(u)));
            }
        }

        #[test]
        fn latest_is_maximum_outside(p in arb_period()) {
            if let Ok(t) = p.t_latest() {
                prop_assert!(t <= -1 && !p.contains(t));
                prop_assert!((t + 1..0).all(|u| p.contains(u)));
            } else {
                prop_assert!((-200..0).all(|u| p.contains(u)));
            }
        }
    }
}

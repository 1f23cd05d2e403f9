use serde::{Deserialize, Serialize};

/// Finite union of disjoint half-open real intervals `[lo, hi)`; the ends
/// may be infinite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RealSet {
    spans: Vec<(f64, f64)>,
}

impl RealSet {
    pub fn empty() -> Self {
        RealSet::default()
    }

    pub fn universe() -> Self {
        RealSet {
            spans: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn from_intervals<I: IntoIterator<Item = (f64, f64)>>(it: I) -> Self {
        let mut v: Vec<(f64, f64)> = it.into_iter().filter(|(a, b)| a < b).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut spans: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match spans.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => spans.push((a, b)),
            }
        }
        RealSet { spans }
    }

    pub fn spans(&self) -> &[(f64, f64)] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn is_universe(&self) -> bool {
        self.spans == [(f64::NEG_INFINITY, f64::INFINITY)]
    }

    pub fn contains(&self, t: f64) -> bool {
        self.spans.iter().any(|&(a, b)| a <= t && t < b)
    }

    pub fn measure(&self) -> f64 {
        self.spans.iter().map(|(a, b)| b - a).sum()
    }

    pub fn union(&self, other: &RealSet) -> RealSet {
        RealSet::from_intervals(self.spans.iter().chain(&other.spans).copied())
    }

    pub fn intersect(&self, other: &RealSet) -> RealSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let (a0, a1) = self.spans[i];
            let (b0, b1) = other.spans[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        RealSet { spans: out }
    }

    /// Times covered by at least `k` of `sets`.
    pub fn depth_at_least<'a, I: IntoIterator<Item = &'a RealSet>>(sets: I, k: usize) -> RealSet {
        let steps = coverage(sets);
        RealSet::from_intervals(steps.into_iter().filter(|s| s.2 >= k).map(|s| (s.0, s.1)))
    }

    pub fn max_depth<'a, I: IntoIterator<Item = &'a RealSet>>(sets: I) -> usize {
        coverage(sets).into_iter().map(|s| s.2).max().unwrap_or(0)
    }
}

/// Step function of coverage counts: `(lo, hi, count)` on positive-length pieces.
pub(crate) fn coverage<'a, I: IntoIterator<Item = &'a RealSet>>(sets: I) -> Vec<(f64, f64, usize)> {
    let mut events: Vec<(f64, i32)> = Vec::new();
    for s in sets {
        for &(a, b) in &s.spans {
            events.push((a, 1));
            events.push((b, -1));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    let mut depth = 0i32;
    for w in 0..events.len() {
        depth += events[w].1;
        if let Some(next) = events.get(w + 1) {
            if next.0 > events[w].0 && depth > 0 {
                out.push((events[w].0, next.0, depth as usize));
            }
        }
    }
    out
}

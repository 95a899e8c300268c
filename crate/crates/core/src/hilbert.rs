//! Finite Hilbert vectors `(n_0, ..., n_T)` with per-vector provenance.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Computed by linear algebra from the curve equation.
    Oracle,
    /// Evaluated from a closed-form description.
    Formula,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Oracle => "oracle",
            Source::Formula => "formula",
        }
    }
}

/// Values on `0..=t`; `None` where the producer makes no claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertVector {
    t: usize,
    values: Vec<Option<i64>>,
    source: Source,
}

impl HilbertVector {
    pub fn unknown(t: usize, source: Source) -> Self {
        Self {
            t,
            values: vec![None; t + 1],
            source,
        }
    }

    pub fn from_values(values: Vec<i64>, source: Source) -> Self {
        assert!(!values.is_empty(), "a Hilbert vector covers at least degree 0");
        Self {
            t: values.len() - 1,
            values: values.into_iter().map(Some).collect(),
            source,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Value in degree `k`; degrees outside `0..=t` are zero.
    pub fn get(&self, k: i64) -> Option<i64> {
        if k < 0 || k > self.t as i64 {
            Some(0)
        } else {
            self.values[k as usize]
        }
    }

    /// Sets `k` when it lies in `0..=t`; other degrees are ignored.
    pub fn set(&mut self, k: i64, value: i64) {
        if (0..=self.t as i64).contains(&k) {
            self.values[k as usize] = Some(value);
        }
    }

    pub fn values(&self) -> &[Option<i64>] {
        &self.values
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// All values, if every degree is known.
    pub fn complete_values(&self) -> Option<Vec<i64>> {
        self.values.iter().copied().collect()
    }

    /// Degrees carrying a value.
    pub fn known_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|_| k))
    }

    /// Copies each known value in `0..=t/2` onto `t - k`.
    pub fn mirror_left_half(&mut self) {
        for k in 0..=self.t / 2 {
            if let Some(v) = self.values[k] {
                self.values[self.t - k] = Some(v);
            }
        }
    }

    /// Degrees where both vectors claim a value and the values differ.
    pub fn disagreements(&self, other: &HilbertVector) -> Vec<(usize, i64, i64)> {
        let t = self.t.max(other.t);
        (0..=t)
            .filter_map(|k| match (self.get(k as i64), other.get(k as i64)) {
                (Some(a), Some(b)) if a != b => Some((k, a, b)),
                _ => None,
            })
            .collect()
    }

    /// Number of degrees where both vectors claim a value.
    pub fn overlap(&self, other: &HilbertVector) -> usize {
        let t = self.t.max(other.t);
        (0..=t)
            .filter(|&k| {
                let inside = |h: &HilbertVector| k <= h.t && h.values[k].is_some();
                inside(self) && inside(other)
            })
            .count()
    }
}

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exposure::{Assignment, Label};

/// What a statistic sees for one assignment of the randomization set: the
/// assignment, the focal units, their exposures and their outcomes (both
/// aligned with `units`).
pub struct StatInput<'a> {
    pub assignment: &'a Assignment,
    pub units: &'a [usize],
    pub labels: &'a [Label],
    pub outcomes: &'a [f64],
}

pub type CustomStatistic = Arc<dyn Fn(&StatInput<'_>) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub enum TestStatistic {
    /// Mean outcome of `b`-exposed focal units minus that of `a`-exposed ones.
    DiffInMeans { a: Label, b: Label },
    Custom { name: String, f: CustomStatistic },
}

impl fmt::Debug for TestStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl TestStatistic {
    pub fn diff_in_means(a: Label, b: Label) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidParameter("difference in means needs two distinct labels".into()));
        }
        Ok(TestStatistic::DiffInMeans { a, b })
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(&StatInput<'_>) -> Result<f64> + Send + Sync + 'static) -> Self {
        TestStatistic::Custom { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> String {
        match self {
            TestStatistic::DiffInMeans { a, b } => format!("diff_in_means({b} - {a})"),
            TestStatistic::Custom { name, .. } => name.clone(),
        }
    }

    /// Value on one assignment; `index` is only used in error reports.
    pub fn evaluate(&self, input: &StatInput<'_>, index: usize) -> Result<f64> {
        match self {
            TestStatistic::DiffInMeans { a, b } => Ok(diff_in_means(input.labels, input.outcomes, a, b, index)?.value),
            TestStatistic::Custom { f, .. } => f(input),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffInMeans {
    pub value: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Difference in means between `b`- and `a`-exposed entries; other labels
/// are ignored. An empty group is an error, never a zero.
pub fn diff_in_means(labels: &[Label], y: &[f64], a: &Label, b: &Label, index: usize) -> Result<DiffInMeans> {
    let (mut sa, mut sb, mut na, mut nb) = (0.0, 0.0, 0usize, 0usize);
    for (l, &v) in labels.iter().zip(y) {
        if l == a {
            sa += v;
            na += 1;
        } else if l == b {
            sb += v;
            nb += 1;
        }
    }
    if na == 0 {
        return Err(Error::EmptyGroup { label: a.to_string(), assignment: index });
    }
    if nb == 0 {
        return Err(Error::EmptyGroup { label: b.to_string(), assignment: index });
    }
    Ok(DiffInMeans { value: sb / nb as f64 - sa / na as f64, n_a: na, n_b: nb })
}

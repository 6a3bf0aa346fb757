use std::sync::Arc;

use crate::error::{Error, Result};
use crate::example::{format_rational, Example, Label, Rational};

use super::{FiniteTable, Hypothesis};

/// Hypotheses consistent with every labeled pair absorbed so far.
#[derive(Debug, Clone, PartialEq)]
pub enum VersionSpace {
    /// Surviving rows of a finite table.
    FiniteSubset {
        table: Arc<FiniteTable>,
        members: Vec<bool>,
    },
    /// Threshold parameters `a` with `lo ≤ a < hi`; `None` is the matching
    /// infinity. `star_violated` records a `(⋆, 1)` constraint, which no
    /// threshold satisfies.
    ThresholdInterval {
        lo: Option<Rational>,
        hi: Option<Rational>,
        star_violated: bool,
    },
}

impl VersionSpace {
    pub fn full(table: Arc<FiniteTable>) -> Self {
        let members = vec![true; table.len()];
        VersionSpace::FiniteSubset { table, members }
    }

    pub fn all_thresholds() -> Self {
        VersionSpace::ThresholdInterval {
            lo: None,
            hi: None,
            star_violated: false,
        }
    }

    /// `lo ≤ a < hi` with both ends finite.
    pub fn threshold_interval(lo: Rational, hi: Rational) -> Self {
        VersionSpace::ThresholdInterval {
            lo: Some(lo),
            hi: Some(hi),
            star_violated: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            VersionSpace::FiniteSubset { members, .. } => !members.iter().any(|&m| m),
            VersionSpace::ThresholdInterval {
                lo,
                hi,
                star_violated,
            } => *star_violated || matches!((lo, hi), (Some(l), Some(h)) if l >= h),
        }
    }

    /// Member count for finite subsets; `None` for intervals.
    pub fn size(&self) -> Option<usize> {
        match self {
            VersionSpace::FiniteSubset { members, .. } => Some(members.iter().filter(|&&m| m).count()),
            VersionSpace::ThresholdInterval { .. } => None,
        }
    }

    pub fn member_rows(&self) -> Vec<usize> {
        match self {
            VersionSpace::FiniteSubset { members, .. } => members
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| i)
                .collect(),
            VersionSpace::ThresholdInterval { .. } => Vec::new(),
        }
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        match (self, h) {
            (VersionSpace::FiniteSubset { members, .. }, Hypothesis::Row(i)) => {
                members.get(*i).copied().unwrap_or(false)
            }
            (
                VersionSpace::ThresholdInterval {
                    lo,
                    hi,
                    star_violated,
                },
                Hypothesis::Threshold(a),
            ) => {
                !star_violated
                    && lo.as_ref().is_none_or(|l| l <= a)
                    && hi.as_ref().is_none_or(|h| a < h)
            }
            _ => false,
        }
    }

    /// Whether some member labels `x` as `y`.
    pub fn exists(&self, x: &Example, y: Label) -> Result<bool> {
        Ok(!self.restrict(x, y)?.is_empty())
    }

    /// Members labeling `x` as `y`. Restricting by an inconsistent pair
    /// yields the empty space.
    pub fn restrict(&self, x: &Example, y: Label) -> Result<VersionSpace> {
        match self {
            VersionSpace::FiniteSubset { table, members } => {
                let col = table.column_of(x)?;
                let members = members
                    .iter()
                    .zip(table.rows())
                    .map(|(&m, row)| m && row[col] == y)
                    .collect();
                Ok(VersionSpace::FiniteSubset {
                    table: table.clone(),
                    members,
                })
            }
            VersionSpace::ThresholdInterval {
                lo,
                hi,
                star_violated,
            } => {
                let (mut lo, mut hi, mut violated) = (lo.clone(), hi.clone(), *star_violated);
                match (x, y) {
                    (Example::Atom(k), _) => {
                        return Err(Error::DomainMismatch(format!(
                            "threshold version space cannot absorb atom {k}"
                        )))
                    }
                    (_, l) if l.0 > 1 => {
                        violated = true;
                    }
                    (Example::Star, l) => violated |= l == Label::ONE,
                    // x ≤ a
                    (Example::Point(v), Label::ONE) => {
                        if lo.as_ref().is_none_or(|l| l < v) {
                            lo = Some(v.clone());
                        }
                    }
                    // a < x
                    (Example::Point(v), _) => {
                        if hi.as_ref().is_none_or(|h| v < h) {
                            hi = Some(v.clone());
                        }
                    }
                }
                Ok(VersionSpace::ThresholdInterval {
                    lo,
                    hi,
                    star_violated: violated,
                })
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            VersionSpace::FiniteSubset { members, .. } => {
                format!("{} rows", members.iter().filter(|&&m| m).count())
            }
            VersionSpace::ThresholdInterval {
                lo,
                hi,
                star_violated,
            } => format!(
                "[{}, {}){}",
                lo.as_ref().map_or("-inf".into(), format_rational),
                hi.as_ref().map_or("+inf".into(), format_rational),
                if *star_violated { " (star violated)" } else { "" }
            ),
        }
    }
}

/// Whether `v` threshold-shatters `xs`: for each `i` some member labels
/// `x_j ↦ 1{j ≤ i}` for all `j`. `xs` must be strictly increasing points.
pub fn threshold_shatter_check(v: &VersionSpace, xs: &[Example]) -> Result<bool> {
    let pts = xs
        .iter()
        .map(|x| {
            x.as_point()
                .cloned()
                .ok_or_else(|| Error::Structural(format!("{x} is not a point")))
        })
        .collect::<Result<Vec<_>>>()?;
    if pts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Structural("sequence is not strictly increasing".into()));
    }
    if v.is_empty() {
        return Ok(false);
    }
    match v {
        VersionSpace::ThresholdInterval { lo, hi, .. } => {
            // h_i needs x_i ≤ a < x_{i+1}; intersect with lo ≤ a < hi.
            Ok((0..pts.len()).all(|i| {
                let left = match lo {
                    Some(l) if l > &pts[i] => l,
                    _ => &pts[i],
                };
                let right = match (pts.get(i + 1), hi) {
                    (Some(p), Some(h)) => Some(if p < h { p } else { h }),
                    (Some(p), None) => Some(p),
                    (None, h) => h.as_ref(),
                };
                right.is_none_or(|r| left < r)
            }))
        }
        VersionSpace::FiniteSubset { table, members } => {
            let cols = xs.iter().map(|x| table.column_of(x)).collect::<Result<Vec<_>>>()?;
            Ok((0..cols.len()).all(|i| {
                table.rows().iter().zip(members).any(|(row, &m)| {
                    m && cols
                        .iter()
                        .enumerate()
                        .all(|(j, &c)| row[c] == Label::from(j <= i))
                })
            }))
        }
    }
}

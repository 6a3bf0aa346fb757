//! Hypothesis classes, their projections onto finite example sequences, and
//! version spaces.
//!
//! Two representations are supported. A [`FiniteTable`] lists every
//! hypothesis' behavior on an explicit domain. The threshold family
//! `h_a(x) = 1{x ≤ a}·1{x ≠ ⋆}` is kept parametric; its version spaces are
//! parameter intervals, so consistency queries cost O(1) no matter how many
//! constraints have been absorbed.

mod dims;
mod table;
mod version;

pub use dims::{
    littlestone_dimension, natarajan_dimension, threshold_chain_ldim, vc_dimension, LdimOracle,
    LDIM_MAX_DOMAIN, LDIM_MAX_HYPOTHESES, NATARAJAN_MAX_DOMAIN, VC_MAX_DOMAIN,
};
pub use table::FiniteTable;
pub use version::{threshold_shatter_check, VersionSpace};

use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::example::{Example, Label, Rational};

/// A hypothesis class over binary or multiclass labels.
#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisClass {
    Table(Arc<FiniteTable>),
    /// `x ↦ 1{x ≤ a}·1{x ≠ ⋆}` for rational `a`.
    Threshold,
}

/// Handle naming one member of a class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Row index of a finite table.
    Row(usize),
    /// Threshold parameter `a`.
    Threshold(Rational),
}

impl HypothesisClass {
    pub fn table(table: FiniteTable) -> Self {
        HypothesisClass::Table(Arc::new(table))
    }

    /// Size of the label alphabet.
    pub fn label_count(&self) -> usize {
        match self {
            HypothesisClass::Table(t) => t.label_count(),
            HypothesisClass::Threshold => 2,
        }
    }

    pub fn as_table(&self) -> Option<&Arc<FiniteTable>> {
        match self {
            HypothesisClass::Table(t) => Some(t),
            HypothesisClass::Threshold => None,
        }
    }

    /// The full version space of the class.
    pub fn version_space(&self) -> VersionSpace {
        match self {
            HypothesisClass::Table(t) => VersionSpace::full(t.clone()),
            HypothesisClass::Threshold => VersionSpace::all_thresholds(),
        }
    }
}

/// `h(x)` for a hypothesis of class `class`.
pub fn evaluate(class: &HypothesisClass, h: &Hypothesis, x: &Example) -> Result<Label> {
    match (class, h) {
        (HypothesisClass::Table(t), Hypothesis::Row(i)) => {
            let row = t
                .rows()
                .get(*i)
                .ok_or_else(|| Error::Structural(format!("row {i} out of range")))?;
            let col = t.column_of(x)?;
            Ok(row[col])
        }
        (HypothesisClass::Threshold, Hypothesis::Threshold(a)) => threshold_label(a, x),
        _ => Err(Error::Structural("hypothesis handle does not belong to this class".into())),
    }
}

/// `1{x ≤ a}·1{x ≠ ⋆}`.
pub fn threshold_label(a: &Rational, x: &Example) -> Result<Label> {
    match x {
        Example::Point(v) => Ok(Label::from(v <= a)),
        Example::Star => Ok(Label::ZERO),
        Example::Atom(k) => Err(Error::DomainMismatch(format!(
            "threshold class cannot evaluate atom {k}"
        ))),
    }
}

/// Distinct points of `xs` in increasing order. Errors on atoms.
pub fn sorted_distinct_points(xs: &[Example]) -> Result<Vec<Rational>> {
    let mut pts = Vec::new();
    for x in xs {
        match x {
            Example::Point(q) => pts.push(q.clone()),
            Example::Star => {}
            Example::Atom(k) => {
                return Err(Error::DomainMismatch(format!(
                    "threshold class cannot evaluate atom {k}"
                )))
            }
        }
    }
    pts.sort();
    pts.dedup();
    Ok(pts)
}

/// One representative threshold parameter per behavior gap of `points`
/// (sorted, distinct), ordered by decreasing parameter. Interior gaps use the
/// midpoint of their endpoints; the outer gaps extend one unit past the
/// extreme points.
pub fn threshold_representatives(points: &[Rational]) -> Vec<Rational> {
    let k = points.len();
    if k == 0 {
        return vec![-Rational::one()];
    }
    let two = Rational::from_integer(2.into());
    let mut reps = Vec::with_capacity(k + 1);
    reps.push(&points[k - 1] + Rational::one());
    for g in (1..k).rev() {
        reps.push((&points[g - 1] + &points[g]) / &two);
    }
    reps.push(&points[0] - Rational::one());
    reps
}

/// The deduplicated behavior table of `class` restricted to `xs`, with one
/// column per entry of `xs` in stream order.
pub fn project(class: &HypothesisClass, xs: &[Example]) -> Result<FiniteTable> {
    project_with_handles(class, xs).map(|(t, _)| t)
}

/// Like [`project`], also returning one hypothesis handle per row.
pub fn project_with_handles(
    class: &HypothesisClass,
    xs: &[Example],
) -> Result<(FiniteTable, Vec<Hypothesis>)> {
    if xs.is_empty() {
        return Err(Error::Structural("cannot project onto an empty sequence".into()));
    }
    match class {
        HypothesisClass::Table(t) => {
            let cols = xs.iter().map(|x| t.column_of(x)).collect::<Result<Vec<_>>>()?;
            let mut rows: Vec<Vec<Label>> = Vec::new();
            let mut handles = Vec::new();
            for (i, row) in t.rows().iter().enumerate() {
                let projected: Vec<Label> = cols.iter().map(|&c| row[c]).collect();
                if !rows.contains(&projected) {
                    rows.push(projected);
                    handles.push(Hypothesis::Row(i));
                }
            }
            let table = FiniteTable::with_label_count(xs.to_vec(), rows, t.label_count())?;
            Ok((table, handles))
        }
        HypothesisClass::Threshold => {
            let points = sorted_distinct_points(xs)?;
            let reps = threshold_representatives(&points);
            let rows = reps
                .iter()
                .map(|a| xs.iter().map(|x| threshold_label(a, x)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let handles = reps.into_iter().map(Hypothesis::Threshold).collect();
            let table = FiniteTable::with_label_count(xs.to_vec(), rows, 2)?;
            Ok((table, handles))
        }
    }
}

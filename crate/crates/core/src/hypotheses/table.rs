use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::example::{Example, Label};

/// Explicit behavior table: one row per hypothesis, one column per domain entry.
///
/// Rows are pairwise distinct. The domain may repeat an example (projections
/// onto streams keep one column per round), in which case the repeated
/// columns must agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct FiniteTable {
    domain: Vec<Example>,
    rows: Vec<Vec<Label>>,
    label_count: usize,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    domain: Vec<Example>,
    table: Vec<Vec<Label>>,
}

impl TryFrom<RawTable> for FiniteTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        FiniteTable::new(raw.domain, raw.table)
    }
}

impl From<FiniteTable> for RawTable {
    fn from(t: FiniteTable) -> Self {
        RawTable {
            domain: t.domain,
            table: t.rows,
        }
    }
}

impl FiniteTable {
    /// Label alphabet inferred as `{0, ..., max label}`, at least binary.
    pub fn new(domain: Vec<Example>, rows: Vec<Vec<Label>>) -> Result<Self> {
        let max = rows.iter().flatten().map(|l| l.index() + 1).max().unwrap_or(0);
        Self::with_label_count(domain, rows, max.max(2))
    }

    pub fn with_label_count(
        domain: Vec<Example>,
        rows: Vec<Vec<Label>>,
        label_count: usize,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Structural("a finite table needs at least one row".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != domain.len() {
                return Err(Error::Structural(format!(
                    "row {i} has {} entries for a domain of {}",
                    row.len(),
                    domain.len()
                )));
            }
            if let Some(l) = row.iter().find(|l| l.index() >= label_count) {
                return Err(Error::Structural(format!(
                    "label {l} outside an alphabet of {label_count}"
                )));
            }
        }
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if rows[i] == rows[j] {
                    return Err(Error::Structural(format!("rows {i} and {j} are identical")));
                }
            }
        }
        for (c, x) in domain.iter().enumerate() {
            let first = domain.iter().position(|d| d == x).unwrap_or(c);
            if first != c && rows.iter().any(|r| r[first] != r[c]) {
                return Err(Error::Structural(format!(
                    "repeated domain entry {x} has conflicting columns"
                )));
            }
        }
        Ok(Self {
            domain,
            rows,
            label_count,
        })
    }

    pub fn domain(&self) -> &[Example] {
        &self.domain
    }

    pub fn rows(&self) -> &[Vec<Label>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    /// Column index of `x` (its first occurrence in the domain).
    pub fn column_of(&self, x: &Example) -> Result<usize> {
        self.domain
            .iter()
            .position(|d| d == x)
            .ok_or_else(|| Error::DomainMismatch(format!("{x} is not in the table's domain")))
    }

    /// Indices of the distinct domain entries, in first-occurrence order.
    pub fn distinct_columns(&self) -> Vec<usize> {
        (0..self.domain.len())
            .filter(|&c| self.domain[..c].iter().all(|d| d != &self.domain[c]))
            .collect()
    }

    /// The table restricted to its distinct domain entries.
    pub fn dedup_columns(&self) -> FiniteTable {
        let cols = self.distinct_columns();
        let domain = cols.iter().map(|&c| self.domain[c].clone()).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        FiniteTable {
            domain,
            rows,
            label_count: self.label_count,
        }
    }
}

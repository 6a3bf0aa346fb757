//! Exhaustive VC, Littlestone and Natarajan dimensions of finite tables.
//!
//! All three are exact brute-force searches behind hard size guards.
//! Dimensions feed bound formulas, so an over-sized input is an error rather
//! than a silently truncated answer.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::example::Label;

use super::FiniteTable;

pub const VC_MAX_DOMAIN: usize = 20;
pub const LDIM_MAX_HYPOTHESES: usize = 64;
pub const LDIM_MAX_DOMAIN: usize = 16;
pub const NATARAJAN_MAX_DOMAIN: usize = 12;

fn guard(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::Capability { what, size, limit })
    } else {
        Ok(())
    }
}

fn floor_log2(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

/// Littlestone dimension of a chain of `behaviors` nested threshold behaviors:
/// `⌊log2 m⌋`, or `None` for the empty set.
pub fn threshold_chain_ldim(behaviors: usize) -> Option<u32> {
    (behaviors > 0).then(|| floor_log2(behaviors) as u32)
}

/// Calls `visit` on every `size`-subset of `0..n` (as index lists) until it
/// returns true.
fn any_subset(n: usize, size: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == size {
            return visit(cur);
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            if rec(i + 1, n, size, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, size, &mut Vec::with_capacity(size), visit)
}

/// Size of the largest subset of the domain on which the table realises all
/// `2^d` binary patterns.
pub fn vc_dimension(table: &FiniteTable) -> Result<usize> {
    let t = table.dedup_columns();
    guard("vc_dimension domain", t.domain().len(), VC_MAX_DOMAIN)?;
    let rows = t.rows();
    let n = t.domain().len();
    let cap = floor_log2(rows.len()).min(n);
    let mut best = 0;
    // Shattering is hereditary, so the first size with no shattered subset ends the search.
    for d in 1..=cap {
        let shattered = any_subset(n, d, &mut |cols| {
            let mut seen = HashSet::new();
            for row in rows {
                let mut pattern = 0u32;
                let mut binary = true;
                for (b, &c) in cols.iter().enumerate() {
                    match row[c].0 {
                        0 => {}
                        1 => pattern |= 1 << b,
                        _ => binary = false,
                    }
                }
                if binary {
                    seen.insert(pattern);
                }
            }
            seen.len() == 1 << d
        });
        if !shattered {
            break;
        }
        best = d;
    }
    Ok(best)
}

/// Memoized Littlestone-dimension oracle over subsets of a table's rows.
///
/// Subsets are bitmasks over at most 64 rows. `ldim(V)` is 0 when no domain
/// point splits `V`; otherwise the max, over points `x` and label pairs
/// `y ≠ y'` with both restrictions nonempty, of `1 + min(ldim(V_y), ldim(V_y'))`.
#[derive(Debug, Clone)]
pub struct LdimOracle {
    /// `column_masks[c][y]`: rows labeling column `c` as `y`.
    column_masks: Vec<Vec<u64>>,
    full: u64,
    memo: HashMap<u64, u32>,
}

impl LdimOracle {
    pub fn new(table: &FiniteTable) -> Result<Self> {
        let t = table.dedup_columns();
        guard("littlestone_dimension hypotheses", t.len(), LDIM_MAX_HYPOTHESES)?;
        guard("littlestone_dimension domain", t.domain().len(), LDIM_MAX_DOMAIN)?;
        let labels = t.label_count();
        let column_masks = (0..t.domain().len())
            .map(|c| {
                let mut masks = vec![0u64; labels];
                for (r, row) in t.rows().iter().enumerate() {
                    masks[row[c].index()] |= 1 << r;
                }
                masks
            })
            .collect();
        let full = if t.len() == 64 { u64::MAX } else { (1u64 << t.len()) - 1 };
        Ok(Self {
            column_masks,
            full,
            memo: HashMap::new(),
        })
    }

    pub fn full_mask(&self) -> u64 {
        self.full
    }

    /// Rows of `mask` that label the (deduplicated) column `col` as `y`.
    pub fn restrict(&self, mask: u64, col: usize, y: Label) -> u64 {
        self.column_masks[col]
            .get(y.index())
            .map_or(0, |m| mask & m)
    }

    /// Littlestone dimension of the rows in `mask`; `None` when empty.
    pub fn ldim(&mut self, mask: u64) -> Option<u32> {
        if mask == 0 {
            return None;
        }
        Some(self.ldim_nonempty(mask))
    }

    fn ldim_nonempty(&mut self, mask: u64) -> u32 {
        if mask.count_ones() <= 1 {
            return 0;
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let cap = floor_log2(mask.count_ones() as usize) as u32;
        let mut best = 0;
        'outer: for c in 0..self.column_masks.len() {
            let parts: Vec<u64> = self.column_masks[c]
                .iter()
                .map(|m| mask & m)
                .filter(|&m| m != 0)
                .collect();
            for i in 0..parts.len() {
                for j in i + 1..parts.len() {
                    let lo = self.ldim_nonempty(parts[i]).min(self.ldim_nonempty(parts[j]));
                    best = best.max(1 + lo);
                    if best >= cap {
                        break 'outer;
                    }
                }
            }
        }
        self.memo.insert(mask, best);
        best
    }
}

/// Depth of the deepest Littlestone tree the table shatters.
pub fn littlestone_dimension(table: &FiniteTable) -> Result<usize> {
    let mut oracle = LdimOracle::new(table)?;
    let full = oracle.full_mask();
    Ok(oracle.ldim(full).unwrap_or(0) as usize)
}

/// Size of the largest Natarajan-shattered subset of the domain.
pub fn natarajan_dimension(table: &FiniteTable) -> Result<usize> {
    let t = table.dedup_columns();
    guard("natarajan_dimension domain", t.domain().len(), NATARAJAN_MAX_DOMAIN)?;
    let rows = t.rows();
    let n = t.domain().len();
    let cap = floor_log2(rows.len()).min(n);
    // Unordered witness pairs per column; swapping f and g in a coordinate
    // just relabels sigma, so unordered pairs suffice.
    let pairs: Vec<Vec<(Label, Label)>> = (0..n)
        .map(|c| {
            let mut present: Vec<Label> = rows.iter().map(|r| r[c]).collect();
            present.sort();
            present.dedup();
            let mut out = Vec::new();
            for i in 0..present.len() {
                for j in i + 1..present.len() {
                    out.push((present[i], present[j]));
                }
            }
            out
        })
        .collect();
    let mut best = 0;
    for d in 1..=cap {
        let shattered = any_subset(n, d, &mut |cols| {
            if cols.iter().any(|&c| pairs[c].is_empty()) {
                return false;
            }
            let mut choice = vec![0usize; d];
            loop {
                let mut seen = HashSet::new();
                for row in rows {
                    let mut pattern = 0u32;
                    let ok = cols.iter().enumerate().all(|(b, &c)| {
                        let (f, g) = pairs[c][choice[b]];
                        if row[c] == f {
                            pattern |= 1 << b;
                            true
                        } else {
                            row[c] == g
                        }
                    });
                    if ok {
                        seen.insert(pattern);
                    }
                }
                if seen.len() == 1 << d {
                    return true;
                }
                // next witness combination
                let mut k = 0;
                loop {
                    if k == d {
                        return false;
                    }
                    choice[k] += 1;
                    if choice[k] < pairs[cols[k]].len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
            }
        });
        if !shattered {
            break;
        }
        best = d;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::Example;
    use crate::hypotheses::{project, HypothesisClass};

    fn atoms(n: u64) -> Vec<Example> {
        (0..n).map(Example::Atom).collect()
    }

    fn complete_binary(n: usize) -> FiniteTable {
        let rows = (0..1u32 << n)
            .map(|m| (0..n).map(|i| Label((m >> i) & 1)).collect())
            .collect();
        FiniteTable::new(atoms(n as u64), rows).unwrap()
    }

    fn thresholds_on(k: i64) -> FiniteTable {
        let xs: Vec<Example> = (1..=k).map(|i| Example::frac(i, k + 1).unwrap()).collect();
        project(&HypothesisClass::Threshold, &xs).unwrap()
    }

    #[test]
    fn thresholds_on_three_points() {
        let t = thresholds_on(3);
        assert_eq!(t.len(), 4);
        assert_eq!(vc_dimension(&t).unwrap(), 1);
        assert_eq!(littlestone_dimension(&t).unwrap(), 2);
        assert_eq!(natarajan_dimension(&t).unwrap(), 1);
    }

    #[test]
    fn thresholds_ldim_matches_chain_formula() {
        for k in 1..=12 {
            let t = thresholds_on(k);
            assert_eq!(
                littlestone_dimension(&t).unwrap() as u32,
                threshold_chain_ldim(k as usize + 1).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn complete_table_is_fully_shattered() {
        let t = complete_binary(3);
        assert_eq!(vc_dimension(&t).unwrap(), 3);
        assert_eq!(littlestone_dimension(&t).unwrap(), 3);
        assert_eq!(natarajan_dimension(&t).unwrap(), 3);
    }

    #[test]
    fn single_hypothesis_has_zero_dimensions() {
        let t = FiniteTable::new(atoms(3), vec![vec![Label(0), Label(1), Label(0)]]).unwrap();
        assert_eq!(vc_dimension(&t).unwrap(), 0);
        assert_eq!(littlestone_dimension(&t).unwrap(), 0);
        assert_eq!(natarajan_dimension(&t).unwrap(), 0);
    }

    #[test]
    fn two_distinct_hypotheses_have_ldim_one() {
        let t = FiniteTable::new(
            atoms(3),
            vec![vec![Label(0), Label(1), Label(0)], vec![Label(0), Label(1), Label(1)]],
        )
        .unwrap();
        assert_eq!(littlestone_dimension(&t).unwrap(), 1);
    }

    #[test]
    fn three_labels_on_one_point() {
        let t = FiniteTable::new(atoms(1), vec![vec![Label(0)], vec![Label(1)], vec![Label(2)]]).unwrap();
        assert_eq!(natarajan_dimension(&t).unwrap(), 1);
        assert_eq!(littlestone_dimension(&t).unwrap(), 1);
    }

    #[test]
    fn guards_are_hard_errors() {
        let big = FiniteTable::new(atoms(21), vec![vec![Label(0); 21]]).unwrap();
        assert!(matches!(vc_dimension(&big), Err(Error::Capability { .. })));
        assert!(matches!(littlestone_dimension(&big), Err(Error::Capability { .. })));
        assert!(matches!(natarajan_dimension(&big), Err(Error::Capability { .. })));
        let wide = FiniteTable::new(
            atoms(7),
            (0..65u32).map(|m| (0..7).map(|i| Label((m >> i) & 1)).collect()).collect(),
        )
        .unwrap();
        assert!(matches!(littlestone_dimension(&wide), Err(Error::Capability { .. })));
    }

    #[test]
    fn repeated_domain_entries_do_not_count_twice() {
        let t = FiniteTable::new(
            vec![Example::Atom(0), Example::Atom(0)],
            vec![vec![Label(0), Label(0)], vec![Label(1), Label(1)]],
        )
        .unwrap();
        assert_eq!(vc_dimension(&t).unwrap(), 1);
    }
}

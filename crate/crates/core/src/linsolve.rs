//! Exact Gaussian elimination over rational functions of the parameters.

use std::collections::{BTreeMap, BTreeSet};

use crate::expr::RatFunc;

/// Row-reduces `rows` in place and returns the pivot column of each nonzero row.
pub fn rref(rows: &mut Vec<Vec<RatFunc>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip().expect("nonzero pivot");
        for v in &mut rows[r][c..ncols] {
            *v = v.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for k in c..ncols {
                if !pivot_row[k].is_zero() {
                    row[k] = row[k].sub(&f.mul(&pivot_row[k]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

fn to_rows<K: Ord + Clone>(cols: &[&BTreeMap<K, RatFunc>], extra: Option<&BTreeMap<K, RatFunc>>) -> Vec<Vec<RatFunc>> {
    let mut keys: BTreeSet<K> = BTreeSet::new();
    for c in cols {
        keys.extend(c.keys().cloned());
    }
    if let Some(e) = extra {
        keys.extend(e.keys().cloned());
    }
    let width = cols.len() + usize::from(extra.is_some());
    keys.into_iter()
        .map(|k| {
            let mut row = Vec::with_capacity(width);
            for c in cols {
                row.push(c.get(&k).cloned().unwrap_or_default());
            }
            if let Some(e) = extra {
                row.push(e.get(&k).cloned().unwrap_or_default());
            }
            row
        })
        .collect()
}

/// Finds `c` with `sum_j c_j * cols[j] = rhs`; free unknowns are set to zero.
pub fn solve<K: Ord + Clone>(cols: &[&BTreeMap<K, RatFunc>], rhs: &BTreeMap<K, RatFunc>) -> Option<Vec<RatFunc>> {
    let n = cols.len();
    let mut rows = to_rows(cols, Some(rhs));
    let pivots = rref(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut out = vec![RatFunc::zero(); n];
    for (row, &p) in rows.iter().zip(&pivots) {
        out[p] = row[n].clone();
    }
    Some(out)
}

/// A basis of `{c : sum_j c_j * cols[j] = 0}`.
pub fn nullspace<K: Ord + Clone>(cols: &[&BTreeMap<K, RatFunc>]) -> Vec<Vec<RatFunc>> {
    let n = cols.len();
    let mut rows = to_rows(cols, None);
    let pivots = rref(&mut rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![RatFunc::zero(); n];
            v[f] = RatFunc::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = row[f].neg();
            }
            v
        })
        .collect()
}

pub fn rank<K: Ord + Clone>(cols: &[&BTreeMap<K, RatFunc>]) -> usize {
    let mut rows = to_rows(cols, None);
    rref(&mut rows, cols.len()).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[(u32, i64)]) -> BTreeMap<u32, RatFunc> {
        v.iter().map(|(k, x)| (*k, RatFunc::int(*x))).collect()
    }

    #[test]
    fn solves_consistent_system() {
        let a = col(&[(0, 1), (1, 1)]);
        let b = col(&[(1, 1), (2, 1)]);
        let rhs = col(&[(0, 2), (1, 5), (2, 3)]);
        let c = solve(&[&a, &b], &rhs).unwrap();
        assert_eq!(c, vec![RatFunc::int(2), RatFunc::int(3)]);
        assert!(solve(&[&a, &b], &col(&[(0, 1)])).is_none());
    }

    #[test]
    fn nullspace_of_dependent_columns() {
        let a = col(&[(0, 1), (1, 2)]);
        let b = col(&[(0, 2), (1, 4)]);
        let ns = nullspace(&[&a, &b]);
        assert_eq!(ns, vec![vec![RatFunc::int(-2), RatFunc::int(1)]]);
        assert_eq!(rank(&[&a, &b]), 1);
    }

    #[test]
    fn symbolic_pivots() {
        let y = RatFunc::param("y");
        let a: BTreeMap<u32, RatFunc> = [(0, y.clone())].into_iter().collect();
        let rhs: BTreeMap<u32, RatFunc> = [(0, RatFunc::one())].into_iter().collect();
        assert_eq!(solve(&[&a], &rhs).unwrap(), vec![y.recip().unwrap()]);
    }
}

//! Sparse incremental elimination for the large structured systems behind
//! hom-space and fill-in computations.

use super::Rational;

/// A sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow = Vec<(usize, Rational)>;

/// Linear system `A x = b` assembled one equation at a time and kept in
/// echelon form as it grows.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    unknowns: usize,
    // pivot column -> (row without pivot entry is kept normalized to 1, rhs)
    pivot_rows: Vec<Option<(SparseRow, Rational)>>,
    inconsistent: bool,
}

/// General solution of a consistent system: `particular + span(nullspace)`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub particular: Vec<Rational>,
    pub nullspace: Vec<Vec<Rational>>,
}

fn axpy(row: &SparseRow, factor: &Rational, other: &SparseRow) -> SparseRow {
    // row - factor * other, merged on sorted column indices
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < other.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = other.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ci < cj {
            out.push(row[i].clone());
            i += 1;
        } else if cj < ci {
            out.push((cj, -(factor * &other[j].1)));
            j += 1;
        } else {
            let v = &row[i].1 - &(factor * &other[j].1);
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl LinearSystem {
    pub fn new(unknowns: usize) -> Self {
        LinearSystem {
            unknowns,
            pivot_rows: vec![None; unknowns],
            inconsistent: false,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Adds the equation `sum(coeffs) = rhs`. Duplicate columns are summed.
    pub fn add_equation(&mut self, coeffs: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) {
        let mut row: SparseRow = coeffs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        row.sort_by_key(|e| e.0);
        row.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += &b.1;
                true
            } else {
                false
            }
        });
        row.retain(|(_, v)| !v.is_zero());
        let mut rhs = rhs;
        let mut start = 0;
        loop {
            let next = row[start..]
                .iter()
                .position(|(c, _)| self.pivot_rows[*c].is_some())
                .map(|p| p + start);
            let Some(pos) = next else { break };
            let (col, factor) = row[pos].clone();
            let (prow, prhs) = self.pivot_rows[col].as_ref().expect("pivot");
            rhs -= &(&factor * prhs);
            row = axpy(&row, &factor, prow);
            start = row.partition_point(|(c, _)| *c <= col);
        }
        match row.first() {
            None => {
                if !rhs.is_zero() {
                    self.inconsistent = true;
                }
            }
            Some((col, lead)) => {
                let col = *col;
                let inv = lead.recip().expect("nonzero lead");
                let row: SparseRow = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
                self.pivot_rows[col] = Some((row, &rhs * &inv));
            }
        }
    }

    /// Adds the homogeneous equation `sum(coeffs) = 0`.
    pub fn add_homogeneous(&mut self, coeffs: impl IntoIterator<Item = (usize, Rational)>) {
        self.add_equation(coeffs, Rational::zero());
    }

    /// One solution (free variables zero), or `None` when inconsistent.
    pub fn particular(&self) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let n = self.unknowns;
        let mut x = vec![Rational::zero(); n];
        // rows are in echelon form keyed by pivot; solve from the last pivot up
        for col in (0..n).rev() {
            let Some((row, rhs)) = &self.pivot_rows[col] else { continue };
            let mut v = rhs.clone();
            for (c, a) in row.iter().skip(1) {
                if !x[*c].is_zero() {
                    v -= &(a * &x[*c]);
                }
            }
            x[col] = v;
        }
        Some(x)
    }

    /// Fully reduces the echelon form and reads off the general solution,
    /// or `None` when the system is inconsistent.
    pub fn solve(&self) -> Option<Solution> {
        if self.inconsistent {
            return None;
        }
        let n = self.unknowns;
        let mut reduced: Vec<Option<(SparseRow, Rational)>> = self.pivot_rows.clone();
        // Back substitution, eliminating pivot columns from rows above them.
        for col in (0..n).rev() {
            let Some((row, rhs)) = reduced[col].clone() else { continue };
            for other in 0..col {
                let Some((orow, orhs)) = reduced[other].as_mut() else { continue };
                let Ok(idx) = orow.binary_search_by_key(&col, |e| e.0) else { continue };
                let factor = orow[idx].1.clone();
                *orhs -= &(&factor * &rhs);
                *orow = axpy(orow, &factor, &row);
            }
        }
        let mut particular = vec![Rational::zero(); n];
        for (col, entry) in reduced.iter().enumerate() {
            if let Some((_, rhs)) = entry {
                particular[col] = rhs.clone();
            }
        }
        let free: Vec<usize> = (0..n).filter(|&c| reduced[c].is_none()).collect();
        let mut nullspace = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (col, entry) in reduced.iter().enumerate() {
                if let Some((row, _)) = entry {
                    if let Ok(idx) = row.binary_search_by_key(&f, |e| e.0) {
                        v[col] = -&row[idx].1;
                    }
                }
            }
            nullspace.push(v);
        }
        Some(Solution {
            particular,
            nullspace,
        })
    }
}

/// Rank of a family of vectors given sparsely.
pub fn rank_of(vectors: &[Vec<Rational>], len: usize) -> usize {
    let mut sys = LinearSystem::new(len);
    for v in vectors {
        sys.add_homogeneous(v.iter().cloned().enumerate());
    }
    sys.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn solves_small_system() {
        // x + y = 3, x - y = 1
        let mut s = LinearSystem::new(2);
        s.add_equation([(0, r(1)), (1, r(1))], r(3));
        s.add_equation([(0, r(1)), (1, r(-1))], r(1));
        let sol = s.solve().unwrap();
        assert_eq!(sol.particular, vec![r(2), r(1)]);
        assert!(sol.nullspace.is_empty());
    }

    #[test]
    fn particular_matches_full_solve() {
        let mut s = LinearSystem::new(3);
        s.add_equation([(0, r(1)), (1, r(2)), (2, r(1))], r(4));
        s.add_equation([(1, r(1)), (2, r(-1))], r(1));
        let p = s.particular().unwrap();
        assert_eq!(&(&p[0] + &(&r(2) * &p[1])) + &p[2], r(4));
        assert_eq!(&p[1] - &p[2], r(1));
    }

    #[test]
    fn detects_inconsistency() {
        let mut s = LinearSystem::new(1);
        s.add_equation([(0, r(1))], r(1));
        s.add_equation([(0, r(2))], r(3));
        assert!(s.solve().is_none());
    }

    #[test]
    fn nullspace_of_underdetermined() {
        let mut s = LinearSystem::new(3);
        s.add_homogeneous([(0, r(1)), (1, r(1)), (2, r(1))]);
        let sol = s.solve().unwrap();
        assert_eq!(sol.nullspace.len(), 2);
        for v in &sol.nullspace {
            let sum = v.iter().fold(Rational::zero(), |a, b| a + b);
            assert!(sum.is_zero());
        }
    }
}

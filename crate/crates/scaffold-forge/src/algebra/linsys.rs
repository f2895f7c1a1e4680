//! Dense linear algebra over F_p.
//!
//! Besides plain solving, the cohomology solvers need two extras:
//! a certificate of inconsistency (a left combination of rows that is
//! zero but pairs nontrivially with the right-hand side), and the
//! lexicographically least solution with respect to a caller-chosen
//! significance order on the unknowns.

use super::fp::{inv_mod, require_prime};
use super::AlgebraError;

/// A system of linear equations over F_p.
#[derive(Clone, Debug)]
pub struct LinearSystemFp {
    p: u64,
    ncols: usize,
    rows: Vec<Vec<u64>>,
    rhs: Vec<u64>,
}

/// Outcome of solving: either a witness vector or a certificate that
/// no solution exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A vector satisfying every equation exactly.
    Solution(Vec<u64>),
    /// Coefficients `y` with `y * A = 0` but `y * b != 0`.
    Inconsistent { certificate: Vec<u64> },
}

impl LinearSystemFp {
    pub fn new(p: u64, ncols: usize) -> Result<Self, AlgebraError> {
        require_prime(p)?;
        Ok(LinearSystemFp {
            p,
            ncols,
            rows: Vec::new(),
            rhs: Vec::new(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, coeffs: Vec<u64>, rhs: u64) {
        assert_eq!(coeffs.len(), self.ncols);
        self.rows.push(coeffs.iter().map(|c| c % self.p).collect());
        self.rhs.push(rhs % self.p);
    }

    /// Evaluates `row . x - rhs` for each equation; all-zero means `x`
    /// satisfies the system.
    pub fn residuals(&self, x: &[u64]) -> Vec<u64> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, &b)| {
                let mut acc = 0u64;
                for (a, v) in row.iter().zip(x) {
                    acc = (acc + a * v) % self.p;
                }
                (self.p + acc - b) % self.p
            })
            .collect()
    }

    /// Pairs an inconsistency certificate against the system:
    /// returns (y*A, y*b).  A valid certificate has y*A = 0, y*b != 0.
    pub fn pair_certificate(&self, y: &[u64]) -> (Vec<u64>, u64) {
        let mut combo = vec![0u64; self.ncols];
        let mut pairing = 0u64;
        for (i, &c) in y.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, &a) in self.rows[i].iter().enumerate() {
                combo[j] = (combo[j] + c * a) % self.p;
            }
            pairing = (pairing + c * self.rhs[i]) % self.p;
        }
        (combo, pairing)
    }

    /// Gaussian elimination.  Returns one solution (free unknowns set
    /// to zero) or an inconsistency certificate.
    pub fn solve(&self) -> SolveOutcome {
        let p = self.p;
        let nrows = self.rows.len();
        let mut mat = self.rows.clone();
        let mut rhs = self.rhs.clone();
        // Row-operation history, so a zero row with nonzero rhs yields
        // a certificate in terms of the original equations.
        let mut history: Vec<Vec<u64>> = (0..nrows)
            .map(|i| {
                let mut e = vec![0u64; nrows];
                e[i] = 1;
                e
            })
            .collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.ncols];
        let mut rank = 0usize;
        for col in 0..self.ncols {
            let Some(pivot) = (rank..nrows).find(|&r| mat[r][col] != 0) else {
                continue;
            };
            mat.swap(rank, pivot);
            rhs.swap(rank, pivot);
            history.swap(rank, pivot);
            let inv = inv_mod(mat[rank][col], p);
            scale_row(&mut mat[rank], inv, p);
            rhs[rank] = rhs[rank] * inv % p;
            scale_row(&mut history[rank], inv, p);
            for r in 0..nrows {
                if r != rank && mat[r][col] != 0 {
                    let factor = mat[r][col];
                    let (head, tail) = split_two(&mut mat, r, rank);
                    sub_scaled(head, tail, factor, p);
                    rhs[r] = (p + rhs[r] - factor * rhs[rank] % p) % p;
                    let (head, tail) = split_two(&mut history, r, rank);
                    sub_scaled(head, tail, factor, p);
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
            if rank == nrows {
                break;
            }
        }
        for r in rank..nrows {
            if rhs[r] != 0 {
                return SolveOutcome::Inconsistent {
                    certificate: history[r].clone(),
                };
            }
        }
        let mut x = vec![0u64; self.ncols];
        for (col, pivot) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pivot {
                x[col] = rhs[*r];
            }
        }
        SolveOutcome::Solution(x)
    }

    /// Returns the full affine solution set as (particular, null-space
    /// basis), or `None` if inconsistent.
    pub fn solve_affine(&self) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
        let p = self.p;
        let nrows = self.rows.len();
        let mut mat = self.rows.clone();
        let mut rhs = self.rhs.clone();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.ncols];
        let mut rank = 0usize;
        for col in 0..self.ncols {
            let Some(pivot) = (rank..nrows).find(|&r| mat[r][col] != 0) else {
                continue;
            };
            mat.swap(rank, pivot);
            rhs.swap(rank, pivot);
            let inv = inv_mod(mat[rank][col], p);
            scale_row(&mut mat[rank], inv, p);
            rhs[rank] = rhs[rank] * inv % p;
            for r in 0..nrows {
                if r != rank && mat[r][col] != 0 {
                    let factor = mat[r][col];
                    let (head, tail) = split_two(&mut mat, r, rank);
                    sub_scaled(head, tail, factor, p);
                    rhs[r] = (p + rhs[r] - factor * rhs[rank] % p) % p;
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
            if rank == nrows {
                break;
            }
        }
        if (rank..nrows).any(|r| rhs[r] != 0) {
            return None;
        }
        let mut particular = vec![0u64; self.ncols];
        for (col, pivot) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pivot {
                particular[col] = rhs[*r];
            }
        }
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![0u64; self.ncols];
            v[free] = 1;
            for (col, pivot) in pivot_of_col.iter().enumerate() {
                if let Some(r) = pivot {
                    v[col] = (p - mat[*r][free] % p) % p;
                }
            }
            basis.push(v);
        }
        Some((particular, basis))
    }

    /// The solution that is lexicographically least when its entries
    /// are read in the order given by `significance` (a permutation of
    /// the column indices, most significant first), comparing residues
    /// as 0 < 1 < ... < p-1.
    pub fn solve_lex_min(&self, significance: &[usize]) -> Option<Vec<u64>> {
        assert_eq!(significance.len(), self.ncols);
        let p = self.p;
        let (mut x, mut basis) = self.solve_affine()?;
        // Reduce the null basis to echelon form along the significance
        // order, then clear the particular solution at each pivot.
        let mut used = vec![false; basis.len()];
        for &coord in significance {
            let Some(k) = (0..basis.len()).find(|&k| !used[k] && basis[k][coord] != 0) else {
                continue;
            };
            used[k] = true;
            let inv = inv_mod(basis[k][coord], p);
            scale_row(&mut basis[k], inv, p);
            for j in 0..basis.len() {
                if j != k && basis[j][coord] != 0 {
                    let factor = basis[j][coord];
                    let (head, tail) = split_two(&mut basis, j, k);
                    sub_scaled(head, tail, factor, p);
                }
            }
            if x[coord] != 0 {
                let factor = x[coord];
                sub_scaled(&mut x, &basis[k], factor, p);
            }
        }
        Some(x)
    }
}

fn scale_row(row: &mut [u64], factor: u64, p: u64) {
    for c in row.iter_mut() {
        *c = *c * factor % p;
    }
}

fn sub_scaled(target: &mut [u64], source: &[u64], factor: u64, p: u64) {
    for (t, &s) in target.iter_mut().zip(source) {
        *t = (*t + (p - factor * s % p)) % p;
    }
}

/// Mutable references to two distinct rows.
fn split_two<'a>(rows: &'a mut [Vec<u64>], a: usize, b: usize) -> (&'a mut [u64], &'a [u64]) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = rows.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

//! Sparse symmetric positive definite solves on a fixed pattern.
//!
//! Every pressure system of a reservoir has the same sparsity (the five-point
//! stencil; wells only touch the diagonal), so the fill-reducing ordering and
//! symbolic Cholesky factorization are computed once and reused.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, SymbolicCholesky};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::{Conj, MatMut, Par, Side};

use crate::error::{Error, Result};

/// Lower-triangular sparsity pattern of an SPD matrix with its symbolic
/// factorization.
#[derive(Debug)]
pub struct SpdPattern {
    n: usize,
    lower: SymbolicSparseColMat<u32>,
    cholesky: SymbolicCholesky<u32>,
    diagonal: Vec<usize>,
}

impl SpdPattern {
    /// Builds the pattern of an `n x n` matrix whose off-diagonal nonzeros
    /// are the given pairs. Returns the pattern and, for every pair, the slot
    /// of its lower-triangle entry in the value array.
    pub fn new(n: usize, off_diagonal: &[(usize, usize)]) -> Result<(Self, Vec<usize>)> {
        let mut columns: Vec<Vec<usize>> = (0..n).map(|c| vec![c]).collect();
        for &(a, b) in off_diagonal {
            let (lo, hi) = (a.min(b), a.max(b));
            if hi >= n || lo == hi {
                return Err(Error::Validation(format!(
                    "bad off-diagonal entry ({a}, {b})"
                )));
            }
            columns[lo].push(hi);
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0u32);
        for col in &mut columns {
            col.sort_unstable();
            col.dedup();
            row_idx.extend(col.iter().map(|&r| r as u32));
            col_ptr.push(row_idx.len() as u32);
        }
        let slot = |row: usize, col: usize| {
            let start = col_ptr[col] as usize;
            let rows = &row_idx[start..col_ptr[col + 1] as usize];
            start
                + rows
                    .binary_search(&(row as u32))
                    .expect("entry is in the pattern")
        };
        let diagonal = (0..n).map(|c| slot(c, c)).collect();
        let slots = off_diagonal
            .iter()
            .map(|&(a, b)| slot(a.max(b), a.min(b)))
            .collect();
        let lower = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        let cholesky = factorize_symbolic_cholesky(
            lower.as_ref(),
            Side::Lower,
            Default::default(),
            Default::default(),
        )
        .map_err(|e| Error::Validation(format!("symbolic factorization failed: {e:?}")))?;
        Ok((
            SpdPattern {
                n,
                lower,
                cholesky,
                diagonal,
            },
            slots,
        ))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of stored lower-triangle entries.
    pub fn nnz(&self) -> usize {
        self.lower.row_idx().len()
    }

    /// Slot of diagonal entry `i` in the value array.
    pub fn diagonal_slot(&self, i: usize) -> usize {
        self.diagonal[i]
    }

    /// Factors the matrix with lower-triangle `values` and overwrites `rhs`
    /// with the solution. Sequential, so the result depends only on the
    /// inputs.
    pub fn solve(&self, values: &[f64], rhs: &mut [f64]) -> Result<()> {
        assert_eq!(
            values.len(),
            self.nnz(),
            "value array does not match the pattern"
        );
        assert_eq!(
            rhs.len(),
            self.n,
            "right-hand side does not match the pattern"
        );
        let par = Par::Seq;
        let scratch = self
            .cholesky
            .factorize_numeric_llt_scratch::<f64>(par, Default::default())
            .or(self.cholesky.solve_in_place_scratch::<f64>(1, par));
        let mut buffer = MemBuffer::new(scratch);
        let stack = MemStack::new(&mut buffer);
        let mut factor = vec![0.0; self.cholesky.len_val()];
        let matrix = SparseColMatRef::new(self.lower.as_ref(), values);
        let llt = self
            .cholesky
            .factorize_numeric_llt(
                &mut factor,
                matrix,
                Side::Lower,
                Default::default(),
                par,
                stack,
                Default::default(),
            )
            .map_err(|_| Error::SingularSystem)?;
        llt.solve_in_place_with_conj(
            Conj::No,
            MatMut::from_column_major_slice_mut(rhs, self.n, 1),
            par,
            stack,
        );
        if rhs.iter().any(|x| !x.is_finite()) {
            return Err(Error::SingularSystem);
        }
        Ok(())
    }
}

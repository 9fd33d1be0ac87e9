//! Compressed sparse row matrices and linear solvers.
//!
//! Every accepted solve is checked against its residual contract: iterative
//! solves must reach `||b - Ax|| <= tol ||b||`, direct solves `1e-10 ||b||`.

use std::io::Write;
use std::ops::Range;
use std::sync::Arc;

use faer::linalg::solvers::SolveCore;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Residual bound enforced on direct solves.
pub const DIRECT_RESIDUAL_TOL: f64 = 1e-10;
/// Krylov restarts from the current iterate when the true residual misses the tolerance.
const KRYLOV_RESTARTS: usize = 3;

/// Square or rectangular CSR matrix. Column indices are sorted and unique per row.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Arc<[usize]>,
    col_idx: Arc<[usize]>,
    values: Vec<f64>,
}

/// Coordinate-format accumulator; duplicates are summed on compression.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: row_ptr.into(),
            col_idx: col_idx.into(),
            values,
        }
    }
}

impl CsrMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect::<Vec<_>>().into(),
            col_idx: (0..n).collect::<Vec<_>>().into(),
            values: vec![1.0; n],
        }
    }

    /// Zero matrix whose pattern holds a dense `block x block` block at every
    /// `(b, c)` with `c` in `couplings[b]`. Each list must contain `b` itself.
    pub fn block_pattern(block: usize, couplings: &[Vec<usize>]) -> Self {
        let n = block * couplings.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for list in couplings {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            sorted.dedup();
            for _ in 0..block {
                for &c in &sorted {
                    col_idx.extend(c * block..(c + 1) * block);
                }
                row_ptr.push(col_idx.len());
            }
        }
        let nnz = col_idx.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: row_ptr.into(),
            col_idx: col_idx.into(),
            values: vec![0.0; nnz],
        }
    }

    /// Same pattern, all values zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![0.0; self.values.len()],
            ..self.clone()
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && (Arc::ptr_eq(&self.row_ptr, &other.row_ptr) || self.row_ptr == other.row_ptr)
            && (Arc::ptr_eq(&self.col_idx, &other.col_idx) || self.col_idx == other.col_idx)
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.col_idx[start..self.row_ptr[i + 1]]
            .binary_search(&j)
            .ok()
            .map(|k| start + k)
    }

    /// Entry `(i, j)`, zero outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds a dense row-major block into rows `rows` and columns starting at `col0`.
    /// The target columns must be contiguous in the pattern.
    pub fn add_block(&mut self, rows: Range<usize>, col0: usize, ncols: usize, local: &[f64]) {
        debug_assert_eq!(local.len(), rows.len() * ncols);
        for (r, i) in rows.enumerate() {
            let k = self
                .position(i, col0)
                .unwrap_or_else(|| panic!("block ({i}, {col0}) outside the pattern"));
            debug_assert_eq!(self.col_idx[k + ncols - 1], col0 + ncols - 1);
            for (c, v) in local[r * ncols..(r + 1) * ncols].iter().enumerate() {
                self.values[k + c] += v;
            }
        }
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols {
            return Err(Error::Dimension {
                expected: self.ncols,
                found: x.len(),
            });
        }
        if y.len() != self.nrows {
            return Err(Error::Dimension {
                expected: self.nrows,
                found: y.len(),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.col_idx[r.clone()]
                .iter()
                .zip(&self.values[r])
                .map(|(&j, v)| v * x[j])
                .sum();
        }
        Ok(())
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.nrows {
            return Err(Error::Dimension {
                expected: self.nrows,
                found: x.len(),
            });
        }
        Ok(dot(x, &self.spmv(y)?))
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        self.bilinear(x, x)
    }

    pub fn transpose(&self) -> Self {
        let mut b = TripletBuilder::new(self.ncols, self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                b.push(j, i, v);
            }
        }
        b.build()
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `self + s * other`. Shares the pattern when both patterns agree.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::Dimension {
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
            });
        }
        if self.same_pattern(other) {
            let mut out = self.clone();
            out.values
                .iter_mut()
                .zip(&other.values)
                .for_each(|(a, b)| *a += s * b);
            return Ok(out);
        }
        let mut b = TripletBuilder::new(self.nrows, self.ncols);
        for (m, f) in [(self, 1.0), (other, s)] {
            for i in 0..m.nrows {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    b.push(i, j, f * v);
                }
            }
        }
        Ok(b.build())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A - A^T|` over all entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[(i, j)] += v;
            }
        }
        d
    }

    /// MatrixMarket coordinate dump (1-based indices).
    pub fn write_matrix_market(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// How a linear system is solved.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolverSpec {
    /// Sparse LU factorization.
    #[default]
    Direct,
    /// Preconditioned Krylov iteration (CG for SPD systems, BiCGSTAB otherwise).
    Iterative { max_iter: usize, rel_tol: f64 },
}

impl SolverSpec {
    pub fn iterative() -> Self {
        SolverSpec::Iterative {
            max_iter: 2000,
            rel_tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SolverSpec::Iterative { max_iter, rel_tol } = *self {
            if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
                return Err(Error::Config(format!(
                    "iterative tolerance {rel_tol} outside (0, 1e-6]"
                )));
            }
            if max_iter == 0 {
                return Err(Error::Config("max_iter must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Matrix structure hint used to pick the Krylov method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Spd,
    General,
}

/// Outcome of an accepted solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Row pointers and column indices of a pattern with its symbolic LU.
type CachedSymbolic = (Arc<[usize]>, Arc<[usize]>, SymbolicLu<usize>);

/// Stateful solver; caches the symbolic LU of the last pattern it factorized.
pub struct LinearSolver {
    spec: SolverSpec,
    block_size: usize,
    symbolic: Option<CachedSymbolic>,
}

impl std::fmt::Debug for LinearSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearSolver")
            .field("spec", &self.spec)
            .field("block_size", &self.block_size)
            .field("symbolic_cached", &self.symbolic.is_some())
            .finish()
    }
}

impl LinearSolver {
    /// `block_size` sets the block-Jacobi preconditioner of iterative solves
    /// (1 gives plain diagonal scaling).
    pub fn new(spec: SolverSpec, block_size: usize) -> Result<Self> {
        spec.validate()?;
        if block_size == 0 {
            return Err(Error::Config("block size must be positive".into()));
        }
        Ok(Self {
            spec,
            block_size,
            symbolic: None,
        })
    }

    pub fn spec(&self) -> SolverSpec {
        self.spec
    }

    /// Solves `A x = b`. `x` holds the initial guess for iterative solves and the solution on return.
    pub fn solve(
        &mut self,
        a: &CsrMatrix,
        b: &[f64],
        x: &mut [f64],
        structure: Structure,
    ) -> Result<SolveReport> {
        if a.nrows != a.ncols {
            return Err(Error::Dimension {
                expected: a.nrows,
                found: a.ncols,
            });
        }
        for v in [b.len(), x.len()] {
            if v != a.nrows {
                return Err(Error::Dimension {
                    expected: a.nrows,
                    found: v,
                });
            }
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver {
                message: "non-finite right-hand side".into(),
                residual: f64::NAN,
            });
        }
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(SolveReport {
                iterations: 0,
                relative_residual: 0.0,
            });
        }
        match self.spec {
            SolverSpec::Direct => self.solve_direct(a, b, x, bnorm),
            SolverSpec::Iterative { max_iter, rel_tol } => {
                let pre = BlockJacobi::new(a, self.block_size)?;
                let mut iterations = 0;
                let mut rel = f64::INFINITY;
                // Recurrence residuals drift from the true one; restart from the iterate until it agrees.
                for _ in 0..=KRYLOV_RESTARTS {
                    iterations += match structure {
                        Structure::Spd => pcg(a, b, x, &pre, max_iter, rel_tol, bnorm)?,
                        Structure::General => bicgstab(a, b, x, &pre, max_iter, rel_tol, bnorm)?,
                    };
                    rel = relative_residual(a, b, x, bnorm);
                    if rel <= rel_tol {
                        break;
                    }
                }
                if !(rel <= rel_tol * 1.0001) {
                    return Err(Error::Solver {
                        message: format!(
                            "residual contract violated after {iterations} iterations"
                        ),
                        residual: rel,
                    });
                }
                Ok(SolveReport {
                    iterations,
                    relative_residual: rel,
                })
            }
        }
    }

    fn solve_direct(
        &mut self,
        a: &CsrMatrix,
        b: &[f64],
        x: &mut [f64],
        bnorm: f64,
    ) -> Result<SolveReport> {
        let n = a.nrows;
        // The CSR arrays of A read as CSC are A^T; factor that and solve transposed.
        let sym = SymbolicSparseColMatRef::new_checked(n, n, &a.row_ptr[..], None, &a.col_idx[..]);
        let cached = matches!(&self.symbolic, Some((rp, ci, _))
            if Arc::ptr_eq(rp, &a.row_ptr) && Arc::ptr_eq(ci, &a.col_idx));
        if !cached {
            let symbolic = SymbolicLu::try_new(sym).map_err(|e| Error::Solver {
                message: format!("symbolic factorization failed: {e:?}"),
                residual: f64::NAN,
            })?;
            self.symbolic = Some((a.row_ptr.clone(), a.col_idx.clone(), symbolic));
        }
        let symbolic = self.symbolic.as_ref().expect("cached above").2.clone();
        let mat = SparseColMatRef::new(sym, &a.values);
        let lu = Lu::try_new_with_symbolic(symbolic, mat).map_err(|e| Error::Solver {
            message: format!("singular factorization: {e}"),
            residual: f64::NAN,
        })?;
        let lu_solve = |rhs: &mut [f64]| {
            let len = rhs.len();
            lu.solve_transpose_in_place_with_conj(
                Conj::No,
                MatMut::from_column_major_slice_mut(rhs, len, 1),
            );
        };
        x.copy_from_slice(b);
        lu_solve(x);
        let mut rel = relative_residual(a, b, x, bnorm);
        let mut refinements = 0;
        // A couple of refinement sweeps recover accuracy lost to pivoting.
        while !(rel <= DIRECT_RESIDUAL_TOL) && refinements < 3 && rel.is_finite() {
            let mut r = a.spmv(x)?;
            r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
            lu_solve(&mut r);
            axpy(x, 1.0, &r);
            rel = relative_residual(a, b, x, bnorm);
            refinements += 1;
        }
        if !(rel <= DIRECT_RESIDUAL_TOL) {
            return Err(Error::Solver {
                message: "direct solve residual above contract".into(),
                residual: rel,
            });
        }
        Ok(SolveReport {
            iterations: 1 + refinements,
            relative_residual: rel,
        })
    }
}

fn relative_residual(a: &CsrMatrix, b: &[f64], x: &[f64], bnorm: f64) -> f64 {
    let ax = a.spmv(x).expect("dimensions checked by caller");
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum();
    r.sqrt() / bnorm
}

/// Inverses of the diagonal blocks, stored row-major.
struct BlockJacobi {
    block: usize,
    inverses: Vec<f64>,
}

impl BlockJacobi {
    fn new(a: &CsrMatrix, block: usize) -> Result<Self> {
        let n = a.nrows;
        let block = if n.is_multiple_of(block) { block } else { 1 };
        let mut inverses = Vec::with_capacity(n * block);
        for b0 in (0..n).step_by(block) {
            let local = DMatrix::from_fn(block, block, |i, j| a.get(b0 + i, b0 + j));
            let inv = local.try_inverse().ok_or_else(|| Error::Solver {
                message: format!("singular preconditioner block at row {b0}"),
                residual: f64::NAN,
            })?;
            for i in 0..block {
                for j in 0..block {
                    inverses.push(inv[(i, j)]);
                }
            }
        }
        Ok(Self { block, inverses })
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let b = self.block;
        for (k, (rb, zb)) in r.chunks(b).zip(z.chunks_mut(b)).enumerate() {
            let inv = &self.inverses[k * b * b..(k + 1) * b * b];
            for i in 0..b {
                zb[i] = dot(&inv[i * b..(i + 1) * b], rb);
            }
        }
    }
}

fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    pre: &BlockJacobi,
    max_iter: usize,
    tol: f64,
    bnorm: f64,
) -> Result<usize> {
    let n = b.len();
    let mut r = a.spmv(x)?;
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let mut z = vec![0.0; n];
    pre.apply(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..=max_iter {
        let rnorm = norm2(&r);
        if rnorm <= tol * bnorm {
            return Ok(it);
        }
        if it == max_iter {
            return Err(Error::Solver {
                message: format!("CG did not converge in {max_iter} iterations"),
                residual: rnorm / bnorm,
            });
        }
        a.spmv_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Solver {
                message: "CG breakdown: matrix not positive definite".into(),
                residual: rnorm / bnorm,
            });
        }
        let alpha = rz / pap;
        axpy(x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        pre.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut()
            .zip(&z)
            .for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    unreachable!("loop returns on its last iteration")
}

fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    pre: &BlockJacobi,
    max_iter: usize,
    tol: f64,
    bnorm: f64,
) -> Result<usize> {
    let n = b.len();
    let mut r = a.spmv(x)?;
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut zs = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 0..max_iter {
        let rnorm = norm2(&r);
        if rnorm <= tol * bnorm {
            return Ok(it);
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(Error::Solver {
                message: "BiCGSTAB breakdown".into(),
                residual: rnorm / bnorm,
            });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        pre.apply(&p, &mut y);
        a.spmv_into(&y, &mut v)?;
        alpha = rho / dot(&r_hat, &v);
        let mut s = r.clone();
        axpy(&mut s, -alpha, &v);
        if norm2(&s) <= tol * bnorm {
            axpy(x, alpha, &y);
            r = s;
            continue;
        }
        pre.apply(&s, &mut zs);
        a.spmv_into(&zs, &mut t)?;
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        axpy(x, alpha, &y);
        axpy(x, omega, &zs);
        r = s;
        axpy(&mut r, -omega, &t);
    }
    let rel = norm2(&r) / bnorm;
    if rel <= tol {
        return Ok(max_iter);
    }
    Err(Error::Solver {
        message: format!("BiCGSTAB did not converge in {max_iter} iterations"),
        residual: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> CsrMatrix {
        let mut b = TripletBuilder::new(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
    }

    #[test]
    fn spmv_small_cases() {
        let a = dense(&[&[2.0, 1.0], &[0.0, 3.0]]);
        assert_eq!(a.spmv(&[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
        let x = [0.3, -1.7, 4.0];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x.to_vec());
        assert!(matches!(a.spmv(&x), Err(Error::Dimension { .. })));
    }

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let mut b = TripletBuilder::new(2, 3);
        b.push(1, 2, 1.0);
        b.push(0, 1, 2.0);
        b.push(1, 0, 4.0);
        b.push(0, 1, 0.5);
        let a = b.build();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 1), 2.5);
        assert_eq!(a.row(1).0, &[0, 2]);
        let t = a.transpose();
        assert_eq!((t.nrows(), t.ncols()), (3, 2));
        assert_eq!(t.get(2, 1), 1.0);
    }

    #[test]
    fn add_scaled_and_asymmetry() {
        let a = dense(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let s = a.add_scaled(1.0, &a.transpose()).unwrap();
        assert_eq!(s.asymmetry(), 0.0);
        assert_eq!(a.asymmetry(), 1.0);
        let d = a.add_scaled(-1.0, &a).unwrap();
        assert_eq!(d.max_abs(), 0.0);
        let i = CsrMatrix::identity(2);
        let m = a.add_scaled(2.0, &i).unwrap();
        assert_eq!(m.get(1, 1), 6.0);
        assert_eq!(m.get(0, 1), 2.0);
    }

    #[test]
    fn block_pattern_blocks() {
        let mut a = CsrMatrix::block_pattern(2, &[vec![0, 1], vec![1]]);
        assert_eq!(a.nnz(), 4 + 4 + 4);
        a.add_block(0..2, 2, 2, &[1.0, 2.0, 3.0, 4.0]);
        a.add_block(0..2, 2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(a.get(0, 2), 2.0);
        assert_eq!(a.get(1, 3), 4.0);
        assert_eq!(a.get(2, 0), 0.0);
    }

    fn spd_test_matrix(n: usize) -> CsrMatrix {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, 4.0 + i as f64 * 0.01);
            if i + 1 < n {
                b.push(i, i + 1, -1.0);
                b.push(i + 1, i, -1.0);
            }
            if i + 7 < n {
                b.push(i, i + 7, -0.5);
                b.push(i + 7, i, -0.5);
            }
        }
        b.build()
    }

    #[test]
    fn all_methods_recover_manufactured_solution() {
        let n = 60;
        let spd = spd_test_matrix(n);
        let mut nb = TripletBuilder::new(n, n);
        for i in 0..n {
            nb.push(i, i, 3.0);
            if i > 0 {
                nb.push(i, i - 1, -1.5);
            }
            if i + 3 < n {
                nb.push(i, i + 3, 0.7);
            }
        }
        let general = nb.build();
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        for (a, structure) in [(&spd, Structure::Spd), (&general, Structure::General)] {
            let b = a.spmv(&xs).unwrap();
            for spec in [SolverSpec::Direct, SolverSpec::iterative()] {
                let mut solver = LinearSolver::new(spec, 3).unwrap();
                let mut x = vec![0.0; n];
                let rep = solver.solve(a, &b, &mut x, structure).unwrap();
                assert!(rep.relative_residual <= 1e-10);
                for (p, q) in x.iter().zip(&xs) {
                    assert!((p - q).abs() < 1e-9, "{spec:?} {structure:?}");
                }
            }
        }
    }

    #[test]
    fn symbolic_factorization_is_reused() {
        let a = spd_test_matrix(20);
        let mut b2 = a.clone();
        b2.scale(2.0);
        let mut solver = LinearSolver::new(SolverSpec::Direct, 1).unwrap();
        let rhs = vec![1.0; 20];
        let mut x1 = vec![0.0; 20];
        let mut x2 = vec![0.0; 20];
        solver.solve(&a, &rhs, &mut x1, Structure::General).unwrap();
        solver
            .solve(&b2, &rhs, &mut x2, Structure::General)
            .unwrap();
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - 2.0 * q).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_and_nonconvergent_systems_error() {
        let a = dense(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let mut solver = LinearSolver::new(SolverSpec::Direct, 1).unwrap();
        let mut x = vec![0.0; 2];
        assert!(matches!(
            solver.solve(&a, &[1.0, 0.0], &mut x, Structure::General),
            Err(Error::Solver { .. })
        ));
        let spd = spd_test_matrix(40);
        let mut it = LinearSolver::new(
            SolverSpec::Iterative {
                max_iter: 2,
                rel_tol: 1e-12,
            },
            1,
        )
        .unwrap();
        let mut x = vec![0.0; 40];
        match it.solve(&spd, &vec![1.0; 40], &mut x, Structure::Spd) {
            Err(Error::Solver { residual, .. }) => assert!(residual > 1e-12),
            other => panic!("expected solver error, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SolverSpec::Iterative {
            max_iter: 10,
            rel_tol: 1e-3
        }
        .validate()
        .is_err());
        assert!(SolverSpec::Iterative {
            max_iter: 10,
            rel_tol: 0.0
        }
        .validate()
        .is_err());
        assert!(SolverSpec::iterative().validate().is_ok());
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = spd_test_matrix(5);
        let mut s = LinearSolver::new(SolverSpec::Direct, 1).unwrap();
        let mut x = vec![3.0; 5];
        s.solve(&a, &[0.0; 5], &mut x, Structure::Spd).unwrap();
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn matrix_market_dump() {
        let a = dense(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 "));
    }
}

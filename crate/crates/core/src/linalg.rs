//! Dense complex linear algebra: just enough to solve the scattering system.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexVector = Vec<Complex64>;

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a perfect square.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<ComplexVector> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn norm_inf(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖m·x − rhs‖∞`
pub fn residual_inf(m: &ComplexMatrix, x: &[Complex64], rhs: &[Complex64]) -> Result<f64> {
    if rhs.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: rhs.len(),
        });
    }
    let mx = m.mul_vec(x)?;
    Ok(mx
        .iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// LU factorisation `P·A = L·U` with partial (row) pivoting.
///
/// L is unit lower triangular and shares storage with U.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuDecomposition {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        let threshold = SINGULAR_PIVOT_RTOL * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            let (pivot_row, pivot_mag) =
                (col..n)
                    .map(|r| (r, lu[(r, col)].norm()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_mag < threshold || pivot_mag == 0.0 {
                return Err(Error::SingularMatrix {
                    column: col,
                    pivot: pivot_mag,
                    threshold,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / pivot;
                lu[(r, col)] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col + 1..n {
                    let u = lu[(col, j)];
                    lu[(r, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<ComplexVector> {
        let n = self.lu.dim();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        // forward substitution on the permuted rhs
        let mut y: ComplexVector = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let dot: Complex64 = row[..i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= dot;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let dot: Complex64 = row[i + 1..]
                .iter()
                .zip(&y[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            y[i] = (y[i] - dot) / row[i];
        }
        Ok(y)
    }
}

/// Result of a dense solve together with its infinity-norm residual.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolve {
    pub x: ComplexVector,
    pub residual: f64,
}

pub fn lu_solve(m: &ComplexMatrix, rhs: &[Complex64]) -> Result<LinearSolve> {
    if rhs.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: rhs.len(),
        });
    }
    let x = LuDecomposition::factor(m)?.solve(rhs)?;
    let residual = residual_inf(m, &x, rhs)?;
    Ok(LinearSolve { x, residual })
}

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// Density matrix over `n_modes` modes in the integer-ordered Fock basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_modes: usize,
    matrix: Mat<c64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_modes: usize, matrix: Mat<c64>) -> Result<Self> {
        let d = 1usize << n_modes;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected {d}x{d}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = Self { n_modes, matrix };
        let herm = rho.hermiticity_defect();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("Hermiticity defect {herm:e}")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min = rho.min_eigenvalue()?;
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Symmetrizes and trace-normalizes before validating.
    pub fn from_unnormalized(n_modes: usize, matrix: Mat<c64>) -> Result<Self> {
        let d = matrix.nrows();
        let mut h = Mat::from_fn(d, d, |i, j| (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5);
        let tr: f64 = (0..d).map(|i| h[(i, i)].re).sum();
        if !(tr.abs() > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidDensityMatrix(format!("cannot normalize trace {tr}")));
        }
        for j in 0..d {
            for i in 0..d {
                h[(i, j)] /= tr;
            }
        }
        Self::new(n_modes, h)
    }

    pub fn maximally_mixed(n_modes: usize) -> Self {
        let d = 1usize << n_modes;
        let w = 1.0 / d as f64;
        Self { n_modes, matrix: Mat::from_fn(d, d, |i, j| c64::new(if i == j { w } else { 0.0 }, 0.0)) }
    }

    /// `|s⟩⟨s|` for a configuration `s`.
    pub fn pure_configuration(n_modes: usize, s: u64) -> Self {
        let d = 1usize << n_modes;
        let s = s as usize;
        Self {
            n_modes,
            matrix: Mat::from_fn(d, d, |i, j| c64::new((i == s && j == s) as u8 as f64, 0.0)),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, i: u64, j: u64) -> c64 {
        self.matrix[(i as usize, j as usize)]
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::InvalidDensityMatrix(format!("eigendecomposition failed: {e:?}")))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min))
    }
}

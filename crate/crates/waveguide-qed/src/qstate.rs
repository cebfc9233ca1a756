//! Density matrices for the emitter pair and the photon polarization
//! qubit: Bell states, fidelities, partial traces, validity checks.
//!
//! Two-qubit basis order is |00>, |01>, |10>, |11> with emitter A first.

use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Dense complex density matrix of small fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    elems: Vec<Complex64>,
}

impl DensityMatrix {
    /// All-zero matrix, ready to accumulate outer products.
    pub fn zeros(dim: usize) -> Self {
        DensityMatrix {
            dim,
            elems: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Maximally mixed state 1/dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = DensityMatrix::zeros(dim);
        let p = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            *m.elem_mut(i, i) = p;
        }
        m
    }

    /// Projector |ket><ket| of a normalized state vector.
    pub fn from_pure(ket: &[Complex64]) -> Self {
        let mut m = DensityMatrix::zeros(ket.len());
        m.add_outer(ket, 1.0);
        m
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Element at row `i`, column `j`.
    pub fn elem(&self, i: usize, j: usize) -> Complex64 {
        self.elems[i * self.dim + j]
    }

    fn elem_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.elems[i * self.dim + j]
    }

    /// Writes the element at row `i`, column `j`.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        *self.elem_mut(i, j) = value;
    }

    /// Adds `weight * |ket><ket|` in place.
    pub fn add_outer(&mut self, ket: &[Complex64], weight: f64) {
        assert_eq!(ket.len(), self.dim, "outer product dimension");
        for i in 0..self.dim {
            for j in 0..self.dim {
                *self.elem_mut(i, j) += ket[i] * ket[j].conj() * weight;
            }
        }
    }

    /// Multiplies every element by a real factor.
    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.elems {
            *z *= factor;
        }
    }

    /// Real part of the trace (the imaginary part of a physical state's
    /// trace is numerical dust).
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.elem(i, i).re).sum()
    }

    /// Copy rescaled to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(SimError::ZeroReference);
        }
        let mut out = self.clone();
        out.scale(1.0 / tr);
        Ok(out)
    }

    /// Overlap <ref| rho |ref> with a pure reference vector.
    pub fn fidelity(&self, reference: &[Complex64]) -> Result<f64> {
        if reference.len() != self.dim {
            return Err(SimError::DimensionMismatch(format!(
                "reference vector of length {} against a {}x{} matrix",
                reference.len(),
                self.dim,
                self.dim
            )));
        }
        let norm2: f64 = reference.iter().map(|z| z.norm_sqr()).sum();
        if norm2 < 1e-300 {
            return Err(SimError::ZeroReference);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += reference[i].conj() * self.elem(i, j) * reference[j];
            }
        }
        Ok(acc.re / norm2)
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.elem(i, j) - self.elem(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order, through the real symmetric
    /// embedding [[X, -Y], [Y, X]] of rho = X + iY (each eigenvalue of
    /// rho appears twice in the embedding; duplicates are dropped).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim;
        let mut a = vec![vec![0.0f64; 2 * d]; 2 * d];
        for i in 0..d {
            for j in 0..d {
                let z = 0.5 * (self.elem(i, j) + self.elem(j, i).conj());
                a[i][j] = z.re;
                a[i + d][j + d] = z.re;
                a[i + d][j] = z.im;
                a[i][j + d] = -z.im;
            }
        }
        let mut evs = symmetric_eigenvalues(&mut a);
        evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // Doubled spectrum: keep every second entry.
        evs.into_iter().step_by(2).collect()
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the three physical-state conditions: unit trace within
    /// 1e-10, Hermitian within 1e-12, eigenvalues above -1e-10.
    pub fn validate(&self) -> Result<()> {
        if (self.trace() - 1.0).abs() > 1e-10 {
            return Err(SimError::DimensionMismatch(format!(
                "density matrix trace {} is not 1",
                self.trace()
            )));
        }
        if self.hermiticity_error() > 1e-12 {
            return Err(SimError::DimensionMismatch(format!(
                "density matrix is not Hermitian (error {:.3e})",
                self.hermiticity_error()
            )));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(SimError::DimensionMismatch(format!(
                "density matrix has a negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Matrix as nested rows of [re, im] pairs for JSON output.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let z = self.elem(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
fn symmetric_eigenvalues(a: &mut [Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Which emitter to keep when tracing a pair state down to one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// The three Bell states used by the heralding schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    /// (|00> + |11>)/sqrt(2)
    PhiPlus,
    /// (|01> + |10>)/sqrt(2)
    PsiPlus,
    /// (|01> - |10>)/sqrt(2)
    PsiMinus,
}

impl BellKind {
    /// The state vector in the |00>, |01>, |10>, |11> basis.
    pub fn ket(&self) -> [Complex64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let p = Complex64::new(h, 0.0);
        let m = Complex64::new(-h, 0.0);
        match self {
            BellKind::PhiPlus => [p, z, z, p],
            BellKind::PsiPlus => [z, p, p, z],
            BellKind::PsiMinus => [z, p, m, z],
        }
    }
}

/// A two-emitter state: a validated 4x4 density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: DensityMatrix,
}

impl TwoQubitState {
    /// Wraps a 4x4 density matrix.
    pub fn from_density(rho: DensityMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(SimError::DimensionMismatch(format!(
                "two-qubit state needs a 4x4 matrix, got {}x{}",
                rho.dim(),
                rho.dim()
            )));
        }
        Ok(TwoQubitState { rho })
    }

    /// Pure state from a (normalized) 4-component vector.
    pub fn from_ket(ket: &[Complex64; 4]) -> Self {
        TwoQubitState {
            rho: DensityMatrix::from_pure(ket),
        }
    }

    /// Maximally mixed pair state.
    pub fn maximally_mixed() -> Self {
        TwoQubitState {
            rho: DensityMatrix::maximally_mixed(4),
        }
    }

    /// The underlying matrix.
    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    /// Overlap with a pure reference vector.
    pub fn fidelity(&self, reference: &[Complex64; 4]) -> Result<f64> {
        self.rho.fidelity(reference)
    }

    /// Overlap with a Bell state.
    pub fn bell_fidelity(&self, kind: BellKind) -> f64 {
        self.rho
            .fidelity(&kind.ket())
            .expect("bell kets always match the two-qubit dimension")
    }

    /// Reduced single-emitter state.
    pub fn partial_trace(&self, keep: Subsystem) -> DensityMatrix {
        let mut out = DensityMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    let (row, col) = match keep {
                        Subsystem::A => (2 * i + k, 2 * j + k),
                        Subsystem::B => (2 * k + i, 2 * k + j),
                    };
                    acc += self.rho.elem(row, col);
                }
                *out.elem_mut(i, j) = acc;
            }
        }
        out
    }

    /// Checks trace, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        self.rho.validate()
    }
}

/// Pure projector onto a Bell state.
pub fn bell_state(kind: BellKind) -> TwoQubitState {
    TwoQubitState::from_ket(&kind.ket())
}

/// Polarization state of the incoming photon, alpha |sigma+> +
/// beta |sigma->.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonQubit {
    alpha: Complex64,
    beta: Complex64,
}

impl PhotonQubit {
    /// Builds the qubit, requiring |alpha|^2 + |beta|^2 = 1 within 1e-12.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm2 = alpha.norm_sqr() + beta.norm_sqr();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(SimError::InvalidConfig(format!(
                "photon qubit must be normalized, |alpha|^2 + |beta|^2 = {norm2}"
            )));
        }
        Ok(PhotonQubit { alpha, beta })
    }

    /// Builds the qubit from possibly unnormalized coefficients.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm < 1e-150 {
            return Err(SimError::InvalidConfig(
                "photon qubit coefficients are both zero".into(),
            ));
        }
        Ok(PhotonQubit {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    /// Qubit from Bloch-sphere angles: alpha = cos(theta/2),
    /// beta = sin(theta/2) e^{i phi}.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        PhotonQubit {
            alpha: Complex64::new((0.5 * theta).cos(), 0.0),
            beta: Complex64::from_polar((0.5 * theta).sin(), phi),
        }
    }

    /// Coefficient of sigma+.
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Coefficient of sigma-.
    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// The single-emitter state a perfect transfer would prepare:
    /// alpha |1> - beta |0>, as components [(-beta), alpha] in the
    /// (|0>, |1>) basis.
    pub fn reference_state(&self) -> [Complex64; 2] {
        [-self.beta, self.alpha]
    }

    /// The input-dependence parameter m = |alpha beta|^2.
    pub fn bloch_m(&self) -> f64 {
        (self.alpha * self.beta).norm_sqr()
    }
}

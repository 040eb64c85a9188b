//! Finite-difference spectra of unit-measure operators −A·D² + C(z) on a
//! uniform grid with Dirichlet ends.

mod tridiag;

pub use tridiag::SymTriMatrix;

use num_traits::Zero;
use serde::Serialize;

use crate::susy::{ladder_product, EffectiveHamiltonianZ, LadderSign, SusyError};
use crate::symbolic::{qi, Coeff, DiffOp, DomainError, OrderingParam, PowerLawMass};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("operator has a first-derivative term; restore unit measure first (unit_measure_restore)")]
    FirstDerivative,
    #[error("operator order {0} exceeds 2")]
    OrderTooHigh(u32),
    #[error("second-derivative coefficient must be a nonzero constant")]
    NonConstantLeading,
    #[error("operator coefficients must be real")]
    Complex,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("count must lie in 1..={n}, got {count}")]
    Count { count: usize, n: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Susy(#[from] SusyError),
}

/// Interior nodes z_i = z_min + (i+1)h, i < N, with h = (z_max − z_min)/(N+1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    pub h: f64,
}

impl Grid {
    /// The interval may include negative z; singular coefficients are caught
    /// at assembly time.
    pub fn new(z_min: f64, z_max: f64, points: usize) -> Result<Self, SpectralError> {
        if !(z_min.is_finite() && z_max.is_finite() && z_max > z_min) {
            return Err(SpectralError::Grid(format!("need finite z_min < z_max, got [{z_min}, {z_max}]")));
        }
        if points < 3 {
            return Err(SpectralError::Grid(format!("need at least 3 points, got {points}")));
        }
        Ok(Self { z_min, z_max, points, h: (z_max - z_min) / (points + 1) as f64 })
    }

    pub fn node(&self, i: usize) -> f64 {
        self.z_min + (i + 1) as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Same interval with half the spacing.
    pub fn refined(&self) -> Self {
        Self { points: 2 * self.points + 1, h: self.h / 2.0, ..*self }
    }
}

/// diag_i = −2A/h² + C(z_i), off_i = A/h².
pub fn assemble(op: &DiffOp, grid: &Grid) -> Result<SymTriMatrix, SpectralError> {
    if op.order() > 2 {
        return Err(SpectralError::OrderTooHigh(op.order()));
    }
    if !op.coeff(1).is_zero() {
        return Err(SpectralError::FirstDerivative);
    }
    let a = op.coeff(2).as_constant().filter(|c| !c.is_zero()).ok_or(SpectralError::NonConstantLeading)?;
    let c = op.coeff(0);
    if !a.is_real() || !c.is_real() {
        return Err(SpectralError::Complex);
    }
    let a = a.to_complex64().re;
    let h2 = grid.h * grid.h;
    let diag = grid
        .nodes()
        .into_iter()
        .map(|z| Ok(-2.0 * a / h2 + c.eval(z)?.re))
        .collect::<Result<Vec<_>, DomainError>>()?;
    Ok(SymTriMatrix::new(diag, vec![a / h2; grid.points - 1]))
}

/// The `count` smallest eigenvalues of `m`, ascending.
pub fn eigenvalues(m: &SymTriMatrix, count: usize) -> Result<Vec<f64>, SpectralError> {
    if count == 0 || count > m.dim() {
        return Err(SpectralError::Count { count, n: m.dim() });
    }
    Ok(m.lowest(count))
}

/// Eigenvalues from h and h/2 combined as (4λ(h/2) − λ(h))/3, which cancels
/// the leading O(h²) stencil error.
pub fn richardson_eigenvalues<F>(build: F, grid: &Grid, count: usize) -> Result<Vec<f64>, SpectralError>
where
    F: Fn(&Grid) -> Result<SymTriMatrix, SpectralError> + Sync,
{
    let fine = grid.refined();
    let (coarse, fine) = rayon::join(|| build(grid), || build(&fine));
    let (coarse, fine) = (eigenvalues(&coarse?, count)?, eigenvalues(&fine?, count)?);
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub grid: Grid,
    /// Display form of the discretized operator.
    pub fingerprint: String,
}

pub fn solve(op: &DiffOp, grid: &Grid, count: usize) -> Result<SpectralResult, SpectralError> {
    let m = assemble(op, grid)?;
    Ok(SpectralResult { eigenvalues: eigenvalues(&m, count)?, grid: *grid, fingerprint: op.to_string() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumComparison {
    pub matrix_distance: f64,
    pub eigenvalue_distance: f64,
}

pub fn compare_matrices(m1: &SymTriMatrix, m2: &SymTriMatrix, count: usize) -> Result<SpectrumComparison, SpectralError> {
    let e1 = eigenvalues(m1, count)?;
    let e2 = eigenvalues(m2, count)?;
    Ok(SpectrumComparison {
        matrix_distance: m1.max_abs_diff(m2),
        eigenvalue_distance: e1.iter().zip(&e2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    })
}

pub fn compare_spectra(op1: &DiffOp, op2: &DiffOp, grid: &Grid, count: usize) -> Result<SpectrumComparison, SpectralError> {
    compare_matrices(&assemble(op1, grid)?, &assemble(op2, grid)?, count)
}

/// Matrix of the effective Hamiltonian in joules: 2k·(kinetic_op) + V_sys(z_i).
pub fn effective_matrix(h: &EffectiveHamiltonianZ, grid: &Grid) -> Result<SymTriMatrix, SpectralError> {
    if grid.z_min < 0.0 {
        return Err(SpectralError::Grid(format!("z_min must be positive for the bubble radius, got {}", grid.z_min)));
    }
    let mut m = assemble(&h.kinetic_op(), grid)?.scaled(h.energy_scale());
    let v: Vec<f64> = grid.nodes().into_iter().map(|z| h.v_sys(z)).collect();
    m.add_diagonal(&v);
    Ok(m)
}

/// Σψᵢ² over the outer `fraction` of nodes at each end, for unit ψ.
pub fn boundary_mass(psi: &[f64], fraction: f64) -> f64 {
    let n = psi.len();
    let w = ((n as f64 * fraction).ceil() as usize).clamp(1, n / 2);
    psi[..w].iter().chain(&psi[n - w..]).map(|x| x * x).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftRow {
    pub index: usize,
    /// Eigenvalue of A⁺A⁻.
    pub lower: f64,
    /// Eigenvalue of A⁻A⁺.
    pub upper: f64,
    pub boundary_mass: f64,
}

impl ShiftRow {
    pub fn shift(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Low-lying eigenvalues of A⁺A⁻ and A⁻A⁺ for the constant unit mass, with
/// the boundary weight (outer 10% per side) of each A⁺A⁻ eigenvector.
pub fn susy_shift(grid: &Grid, count: usize) -> Result<Vec<ShiftRow>, SpectralError> {
    let mass = PowerLawMass::new(qi(0)).expect("n = 0 is valid");
    let ord = OrderingParam::new(qi(0));
    let lower_m = assemble(&ladder_product(&mass, &ord, LadderSign::Raising)?, grid)?;
    let upper_m = assemble(&ladder_product(&mass, &ord, LadderSign::Lowering)?, grid)?;
    let lower = eigenvalues(&lower_m, count)?;
    let upper = eigenvalues(&upper_m, count)?;
    Ok(lower
        .iter()
        .zip(&upper)
        .enumerate()
        .map(|(index, (&l, &u))| ShiftRow {
            index,
            lower: l,
            upper: u,
            boundary_mass: boundary_mass(&lower_m.eigenvector(l), 0.1),
        })
        .collect())
}

/// −½D² + ½z².
pub fn oscillator() -> DiffOp {
    use crate::symbolic::PolyX;
    DiffOp::from_terms([
        (PolyX::constant(Coeff::ratio(-1, 2)), 2),
        (PolyX::monomial(Coeff::ratio(1, 2), qi(2)), 0),
    ])
}

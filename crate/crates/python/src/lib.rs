//! Python bindings. Rationals cross the boundary as strings such as "-1/3".

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pdmq_core::helium::{barrier_info, derived_params, PhysicalParams};
use pdmq_core::ordering::{match_orderings, weyl_kinetic};
use pdmq_core::parser::{parse_hamiltonian, unit_bindings};
use pdmq_core::pointmass::{measure_of_map, pm_map, transform_diffop, unit_measure_restore};
use pdmq_core::spectral::{assemble, effective_matrix, eigenvalues, oscillator, richardson_eigenvalues, Grid};
use pdmq_core::susy::{
    commutator_check, effective_hamiltonian_z, inverse_square_coefficient, partner_potential, LadderSign,
    PartnerSource,
};
use pdmq_core::symbolic::{expand_sandwich, fmt_q, parse_q, Coeff, DiffOp, OrderingParam, PowerLawMass, Q};
use pdmq_core::weyl::{hermiticity_check, weyl_order, Weight};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Q> {
    parse_q(s).ok_or_else(|| err(format!("expected a rational like \"-1/3\", got {s:?}")))
}

fn source(s: &str) -> PyResult<PartnerSource> {
    s.parse().map_err(err)
}

fn mass(n: &str) -> PyResult<PowerLawMass> {
    PowerLawMass::new(rational(n)?).map_err(err)
}

/// Differential operator Σ f_k(x) D^k with exact coefficients.
#[pyclass(eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct Operator {
    op: DiffOp,
}

#[pymethods]
impl Operator {
    fn __str__(&self) -> String {
        self.op.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Operator({})", self.op)
    }

    #[getter]
    fn order(&self) -> u32 {
        self.op.order()
    }

    /// [(coefficient, exponent), ...] of the D^k coefficient.
    fn coefficient(&self, k: u32) -> Vec<(String, String)> {
        self.op.coeff(k).terms().map(|(e, c)| (c.to_string(), fmt_q(e))).collect()
    }

    /// Common prefactor and bracket, as in the CLI display.
    fn factored(&self) -> (String, Operator) {
        let f = self.op.factored();
        (f.prefactor.to_string(), Operator { op: f.bracket })
    }

    fn is_zero(&self) -> bool {
        self.op.is_zero()
    }

    fn is_hermitian(&self) -> bool {
        hermiticity_check(&self.op, &Weight::Unit).passed()
    }

    fn scale(&self, r: &str) -> PyResult<Operator> {
        Ok(Operator { op: self.op.scale(&Coeff::rational(rational(r)?)) })
    }

    /// Applies the operator at x given ψ, ψ′, ψ″, ...
    fn apply_at(&self, x: f64, derivs: Vec<f64>) -> PyResult<(f64, f64)> {
        let v = self.op.apply_at(x, &derivs).map_err(err)?;
        Ok((v.re, v.im))
    }

    fn compose(&self, other: &Operator) -> Operator {
        Operator { op: self.op.compose(&other.op) }
    }

    fn __matmul__(&self, other: &Operator) -> Operator {
        self.compose(other)
    }

    fn __add__(&self, other: &Operator) -> Operator {
        Operator { op: &self.op + &other.op }
    }

    fn __sub__(&self, other: &Operator) -> Operator {
        Operator { op: &self.op - &other.op }
    }

    fn __neg__(&self) -> Operator {
        Operator { op: -&self.op }
    }
}

/// Weyl ordering of a classical Hamiltonian written in the DSL.
#[pyfunction]
fn weyl(hamiltonian: &str) -> PyResult<Operator> {
    let sym = parse_hamiltonian(hamiltonian, &unit_bindings()).map_err(err)?;
    Ok(Operator { op: weyl_order(&sym) })
}

/// Weyl ordering of x^(-n) p^2 / 2.
#[pyfunction]
#[pyo3(signature = (n = "3"))]
fn weyl_kinetic_operator(n: &str) -> PyResult<Operator> {
    Ok(Operator { op: weyl_kinetic(&rational(n)?) })
}

/// -1/2 m^a D m^(2b) D m^a with a + b = -1/2 and m = x^n.
#[pyfunction]
#[pyo3(signature = (a, n = "3"))]
fn sandwich(a: &str, n: &str) -> PyResult<Operator> {
    Ok(Operator { op: expand_sandwich(&mass(n)?, &OrderingParam::new(rational(a)?)) })
}

/// Maps an operator in x to z for mass x^n; returns (transformed, unit-measure restored).
#[pyfunction]
#[pyo3(signature = (op, n = "3"))]
fn point_mass(op: &Operator, n: &str) -> PyResult<(Operator, Operator)> {
    let map = pm_map(&rational(n)?).map_err(err)?;
    let z = transform_diffop(&op.op, &map).map_err(err)?;
    let mu = measure_of_map(&map).map_err(err)?;
    let r = unit_measure_restore(&z, &mu).map_err(err)?;
    Ok((Operator { op: z }, Operator { op: r }))
}

/// [A-, A+] - 1 for the cubic mass; zero for every ordering.
#[pyfunction]
fn commutator_residual(a: &str) -> PyResult<Operator> {
    let op = commutator_check(&PowerLawMass::cubic(), &OrderingParam::new(rational(a)?)).map_err(err)?;
    Ok(Operator { op })
}

/// Partner potential V+ or V- for the cubic mass as a multiplication operator.
#[pyfunction]
#[pyo3(signature = (a, source = "expanded", sign = "+"))]
fn partner(a: &str, source: &str, sign: &str) -> PyResult<Operator> {
    let sign = match sign {
        "+" => LadderSign::Raising,
        "-" => LadderSign::Lowering,
        other => return Err(err(format!("sign must be \"+\" or \"-\", got {other:?}"))),
    };
    let p = partner_potential(&PowerLawMass::cubic(), &OrderingParam::new(rational(a)?), sign, self::source(source)?)
        .map_err(err)?;
    Ok(Operator { op: DiffOp::multiply(p.v) })
}

/// c_a in the effective z-Hamiltonian -1/2 D^2 + 1/2 c_a z^-2.
#[pyfunction]
#[pyo3(signature = (a, source = "expanded"))]
fn inverse_square(a: &str, source: &str) -> PyResult<String> {
    let c = inverse_square_coefficient(&OrderingParam::new(rational(a)?), self::source(source)?).map_err(err)?;
    Ok(fmt_q(&c))
}

/// Orderings whose sandwich reproduces the Weyl kinetic operator: [(a, verified), ...].
#[pyfunction]
#[pyo3(signature = (source = "expanded", n = "3"))]
fn ordering_roots(source: &str, n: &str) -> PyResult<Vec<(String, bool)>> {
    let n = rational(n)?;
    let sol = match_orderings(&n, &weyl_kinetic(&n), self::source(source)?).map_err(err)?;
    Ok(sol.roots.iter().map(|r| (r.a.to_string(), r.verified)).collect())
}

/// Derived helium scales (SI) at applied pressure ratio P/P_v.
#[pyfunction]
#[pyo3(signature = (pressure_ratio = 0.0, c0 = 0.0))]
fn helium(pressure_ratio: f64, c0: f64) -> PyResult<BTreeMap<&'static str, f64>> {
    let d = derived_params(&PhysicalParams::helium4().at_pressure_ratio(pressure_ratio)).map_err(err)?;
    let b = barrier_info(&d, c0);
    Ok(BTreeMap::from([
        ("R_c", d.r_c),
        ("U0", d.u0),
        ("M0", d.m0),
        ("k", d.k),
        ("Lambda", d.lambda),
        ("p_Th", d.p_th),
        ("P_i_at_Rc", d.p_i_at_rc),
        ("sqrt_U0_M0", d.sqrt_u0_m0()),
        ("z_star", b.z_star),
        ("V_star", b.v_star),
    ]))
}

/// Lowest eigenvalues (J) of the effective bubble Hamiltonian on [zmin, zmax].
#[pyfunction]
#[pyo3(signature = (a = "-1/3", source = "expanded", c0 = 0.0, zmin = 0.05, zmax = 3.0, points = 2000, count = 10, pressure_ratio = 0.0))]
#[allow(clippy::too_many_arguments)]
fn spectrum(
    a: &str,
    source: &str,
    c0: f64,
    zmin: f64,
    zmax: f64,
    points: usize,
    count: usize,
    pressure_ratio: f64,
) -> PyResult<Vec<f64>> {
    let d = derived_params(&PhysicalParams::helium4().at_pressure_ratio(pressure_ratio)).map_err(err)?;
    let h = effective_hamiltonian_z(&OrderingParam::new(rational(a)?), &d, self::source(source)?, c0).map_err(err)?;
    let grid = Grid::new(zmin, zmax, points).map_err(err)?;
    eigenvalues(&effective_matrix(&h, &grid).map_err(err)?, count).map_err(err)
}

/// Harmonic oscillator levels, optionally Richardson-extrapolated.
#[pyfunction]
#[pyo3(signature = (count = 5, zmin = -10.0, zmax = 10.0, points = 2000, extrapolate = true))]
fn oscillator_levels(count: usize, zmin: f64, zmax: f64, points: usize, extrapolate: bool) -> PyResult<Vec<f64>> {
    let grid = Grid::new(zmin, zmax, points).map_err(err)?;
    let op = oscillator();
    if extrapolate {
        richardson_eigenvalues(|g| assemble(&op, g), &grid, count).map_err(err)
    } else {
        eigenvalues(&assemble(&op, &grid).map_err(err)?, count).map_err(err)
    }
}

/// Runs the command-line interface in-process: (exit code, stdout, stderr).
#[pyfunction]
fn cli(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut e = Vec::new();
    let code = pdmq_core::cli::run(std::iter::once("pdmq".to_string()).chain(args), &mut out, &mut e);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&e).into_owned())
}

#[pymodule]
fn pdmq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Operator>()?;
    m.add_function(wrap_pyfunction!(weyl, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_kinetic_operator, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich, m)?)?;
    m.add_function(wrap_pyfunction!(point_mass, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_residual, m)?)?;
    m.add_function(wrap_pyfunction!(partner, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_square, m)?)?;
    m.add_function(wrap_pyfunction!(ordering_roots, m)?)?;
    m.add_function(wrap_pyfunction!(helium, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(oscillator_levels, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}

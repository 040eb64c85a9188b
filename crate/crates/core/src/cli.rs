//! Command-line front end. [`run`] never panics on bad input and never exits
//! the process; it returns the exit code (0 ok, 1 usage, 2 domain error).

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::helium::{barrier_info, derived_params, joules_to_ev, profile_of, HeliumError, PhysicalParams};
use crate::ordering::{match_orderings, named_orderings, weyl_kinetic, OrderingError};
use crate::parser::{parse_hamiltonian, parse_params, unit_bindings, ParseError, ParamsError};
use crate::pointmass::{measure_of_map, pm_map, transform_diffop, unit_measure_restore, MeasureJson, PointMassError};
use crate::spectral::{effective_matrix, eigenvalues, Grid, SpectralError};
use crate::susy::{
    commutator_check, effective_hamiltonian_z, ladder_operator, ladder_product, ladder_sum, partner_potential,
    superpotential, LadderSign, PartnerSource, SusyError,
};
use crate::symbolic::{
    expand_sandwich, fmt_q, poly_json, qi, sandwich_gamma, DiffOp, MassError, OrderingParam, PowerLawMass, Q,
};
use crate::weyl::{hermiticity_check, weyl_order, Weight};

#[derive(Parser, Debug)]
#[command(name = "pdmq", version, about = "Position-dependent-mass quantization workbench")]
struct Cli {
    /// key=value file with sigma, P_v, rho_L, rho_v, T, P (SI units)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceArg {
    #[value(name = "paper", alias = "paper-eq12")]
    ClosedForm,
    Expanded,
}

impl From<SourceArg> for PartnerSource {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::ClosedForm => PartnerSource::ClosedForm,
            SourceArg::Expanded => PartnerSource::Expanded,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Pipeline {
    QuantizeFirst,
    TransformFirst,
}

#[derive(Args, Debug)]
struct Ordering {
    /// Ordering parameter a (rational, e.g. -1/3 or 0.5)
    #[arg(long, allow_hyphen_values = true, default_value = "-1/3")]
    a: String,
    #[arg(long, value_enum, default_value = "expanded")]
    source: SourceArg,
    /// Constant offset c0 added to V_sys, J
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    c0: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Physical and derived parameters as JSON
    Params,
    /// Weyl-order a classical Hamiltonian and check Hermiticity
    Weyl {
        #[arg(long, allow_hyphen_values = true)]
        hamiltonian: String,
    },
    /// Superpotential, ladder operators and partner potentials
    Susy {
        #[arg(long, allow_hyphen_values = true, default_value = "-1/3")]
        a: String,
        #[arg(long, value_enum, default_value = "expanded")]
        source: SourceArg,
        /// Mass exponent n in m(x) = x^n
        #[arg(long, allow_hyphen_values = true, default_value = "3")]
        n: String,
    },
    /// Point-mass transform and unit-measure restoration
    Transform {
        /// Sandwich ordering parameter; the Weyl operator is used when absent
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "3")]
        n: String,
        #[arg(long, value_enum, default_value = "quantize-first")]
        pipeline: Pipeline,
    },
    /// Orderings that reproduce the Weyl kinetic operator
    Match {
        #[arg(long, value_enum, default_value = "expanded")]
        source: SourceArg,
        #[arg(long, allow_hyphen_values = true, default_value = "3")]
        n: String,
    },
    /// Lowest eigenvalues of the effective z-space Hamiltonian (CSV)
    Spectrum {
        #[command(flatten)]
        ord: Ordering,
        #[arg(long, default_value_t = 0.05)]
        zmin: f64,
        #[arg(long, default_value_t = 3.0)]
        zmax: f64,
        #[arg(long, default_value_t = 2000)]
        points: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Override the applied pressure as a fraction of P_v
        #[arg(long)]
        pressure_ratio: Option<f64>,
    },
    /// Potential curves for several pressures (CSV)
    Scan {
        /// Comma-separated pressure ratios P/P_v
        #[arg(long, value_delimiter = ',', required = true)]
        pressures: Vec<f64>,
        #[command(flatten)]
        ord: Ordering,
        #[arg(long, default_value_t = 0.05)]
        zmin: f64,
        #[arg(long, default_value_t = 3.0)]
        zmax: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value = "linear")]
        spacing: Spacing,
    },
}

/// A reportable failure: `error: <code>: <message>`.
#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
    exit: i32,
}

impl Failure {
    fn usage(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), exit: 1 }
    }

    fn domain(code: &'static str, message: impl ToString) -> Self {
        Self { code, message: message.to_string(), exit: 2 }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Self::domain(e.kind.code(), e)
    }
}

impl From<ParamsError> for Failure {
    fn from(e: ParamsError) -> Self {
        Self::domain("config", e)
    }
}

impl From<HeliumError> for Failure {
    fn from(e: HeliumError) -> Self {
        match e {
            HeliumError::NoCriticalRadius { .. } => Self::domain("no-critical-radius", e),
            HeliumError::Params(p) => p.into(),
            HeliumError::Susy(s) => s.into(),
        }
    }
}

impl From<SusyError> for Failure {
    fn from(e: SusyError) -> Self {
        Self::domain("susy", e)
    }
}

impl From<PointMassError> for Failure {
    fn from(e: PointMassError) -> Self {
        let code = match e {
            PointMassError::UnsupportedExponent(_) => "unsupported-exponent",
            PointMassError::OutsideField(..) => "outside-field",
            _ => "transform",
        };
        Self::domain(code, e)
    }
}

impl From<OrderingError> for Failure {
    fn from(e: OrderingError) -> Self {
        Self::domain("ordering", e)
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        Self::domain("spectral", e)
    }
}

impl From<MassError> for Failure {
    fn from(e: MassError) -> Self {
        Self::domain("mass", e)
    }
}

/// Entry point; `argv[0]` is the program name.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            let _ = writeln!(err, "error: usage: {first}");
            for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
                let _ = writeln!(err, "  {}", line.trim_end());
            }
            return 1;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 2;
            }
            0
        }
        Err(f) => {
            let msg = f.message.replace('\n', " ");
            let _ = writeln!(err, "error: {}: {}", f.code, msg);
            f.exit
        }
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let params = load_params(cli.config.as_deref())?;
    match &cli.command {
        Command::Params => cmd_params(&params),
        Command::Weyl { hamiltonian } => cmd_weyl(hamiltonian),
        Command::Susy { a, source, n } => cmd_susy(&rational(a, "a")?, (*source).into(), &rational(n, "n")?),
        Command::Transform { a, n, pipeline } => {
            let a = a.as_deref().map(|s| rational(s, "a")).transpose()?;
            cmd_transform(a, &rational(n, "n")?, *pipeline)
        }
        Command::Match { source, n } => cmd_match((*source).into(), &rational(n, "n")?),
        Command::Spectrum { ord, zmin, zmax, points, count, pressure_ratio } => {
            let p = match pressure_ratio {
                Some(r) => params.at_pressure_ratio(*r),
                None => params,
            };
            cmd_spectrum(&p, ord, *zmin, *zmax, *points, *count)
        }
        Command::Scan { pressures, ord, zmin, zmax, points, spacing } => {
            cmd_scan(&params, pressures, ord, (*zmin, *zmax, *points), *spacing)
        }
    }
}

fn load_params(path: Option<&str>) -> Result<PhysicalParams, Failure> {
    match path {
        None => Ok(PhysicalParams::helium4()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::domain("io", format!("{p}: {e}")))?;
            Ok(parse_params(&text)?)
        }
    }
}

/// Accepts anything the Hamiltonian DSL reduces to a rational constant.
fn rational(s: &str, flag: &'static str) -> Result<Q, Failure> {
    let bad = || Failure::usage("bad-rational", format!("--{flag} expects a rational number, got {s:?}"));
    let sym = parse_hamiltonian(s, &Default::default()).map_err(|_| bad())?;
    if sym.max_p_power() > 0 {
        return Err(bad());
    }
    let c = sym.coeff(0);
    if c.is_zero() {
        return Ok(Q::from_integer(0.into()));
    }
    let (k, e) = c.as_monomial().ok_or_else(bad)?;
    if !num_traits::Zero::is_zero(e) {
        return Err(bad());
    }
    k.as_rational().cloned().ok_or_else(bad)
}

// ---------------------------------------------------------------------------
// JSON / CSV formatting
// ---------------------------------------------------------------------------

/// Twelve significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.11e}")
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, item) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, item)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with sorted keys and fixed float formatting, newline-terminated.
pub fn render_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("output types serialize");
    let mut s = String::new();
    write_json(&value, 0, &mut s);
    s.push('\n');
    s
}

fn op_json(op: &DiffOp) -> Value {
    json!({ "operator": op.to_json(), "display": op.factored().to_string() })
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_params(p: &PhysicalParams) -> Result<String, Failure> {
    let d = derived_params(p)?;
    let b = barrier_info(&d, 0.0);
    Ok(render_json(&json!({
        "params": p,
        "derived": d,
        "U0_eV": joules_to_ev(d.u0),
        "sqrt_U0_M0": d.sqrt_u0_m0(),
        "p_Th": d.p_th,
        "barrier": { "z_star": b.z_star, "V_star_J": b.v_star, "V_star_eV": joules_to_ev(b.v_star) },
    })))
}

fn cmd_weyl(text: &str) -> Result<String, Failure> {
    let sym = parse_hamiltonian(text, &unit_bindings())?;
    let op = weyl_order(&sym);
    let herm = hermiticity_check(&op, &Weight::Unit);
    Ok(render_json(&json!({
        "input": text,
        "symbol": sym.to_dsl(),
        "units": "hbar = M0 = U0 = 1",
        "weyl": op_json(&op),
        "hermiticity": herm.to_json(),
    })))
}

fn cmd_susy(a: &Q, source: PartnerSource, n: &Q) -> Result<String, Failure> {
    let mass = PowerLawMass::new(n.clone())?;
    let ord = OrderingParam::new(a.clone());
    let w = superpotential(&mass, &ord)?;
    let lower = ladder_operator(&mass, &ord, LadderSign::Lowering)?;
    let raise = ladder_operator(&mass, &ord, LadderSign::Raising)?;
    let sum = ladder_sum(&mass, &ord)?;
    let plus = partner_potential(&mass, &ord, LadderSign::Raising, source)?;
    let minus = partner_potential(&mass, &ord, LadderSign::Lowering, source)?;
    let other = match source {
        PartnerSource::Expanded => PartnerSource::ClosedForm,
        PartnerSource::ClosedForm => PartnerSource::Expanded,
    };
    let plus_other = partner_potential(&mass, &ord, LadderSign::Raising, other)?;
    let h_plus = ladder_product(&mass, &ord, LadderSign::Raising)?;
    let h_minus = ladder_product(&mass, &ord, LadderSign::Lowering)?;
    let c_a = if *n == qi(3) {
        let h = effective_hamiltonian_z(&ord, &derived_params(&PhysicalParams::helium4())?, source, 0.0)?;
        json!({ "exact": fmt_q(&h.c_a), "value": h.c_a_f64() })
    } else {
        Value::Null
    };
    Ok(render_json(&json!({
        "n": fmt_q(n),
        "a": fmt_q(a),
        "b": fmt_q(&ord.b()),
        "source": source,
        "paper_source_available": true,
        "superpotential": poly_json(&w.w),
        "superpotential_display": w.w.to_string(),
        "lowering": op_json(&lower.op),
        "raising": op_json(&raise.op),
        "ladder_sum": op_json(&sum),
        "partner_plus": poly_json(&plus.v),
        "partner_minus": poly_json(&minus.v),
        "partner_plus_display": plus.v.to_string(),
        "partner_minus_display": minus.v.to_string(),
        "partner_plus_other_source_minus_this": poly_json(&(&plus_other.v - &plus.v)),
        "c_a": c_a,
        "checks": {
            "commutator_is_identity": commutator_check(&mass, &ord)?.is_zero(),
            "lowering_product_minus_raising_product_is_identity": (&h_minus - &h_plus) == DiffOp::identity(),
            "ladder_sum_is_multiplication": sum.order() == 0,
            "sources_agree": plus_other.v == plus.v,
        },
    })))
}

fn cmd_transform(a: Option<Q>, n: &Q, pipeline: Pipeline) -> Result<String, Failure> {
    if let Pipeline::TransformFirst = pipeline {
        return Err(Failure::domain(
            "transform-first-refused",
            "transforming the classical Hamiltonian before quantizing drops the inverse-square term; quantize first",
        ));
    }
    let mass = PowerLawMass::new(n.clone())?;
    let (label, x_op, gamma) = match &a {
        Some(a) => {
            let ord = OrderingParam::new(a.clone());
            ("sandwich", expand_sandwich(&mass, &ord), Some(fmt_q(&sandwich_gamma(&mass, &ord))))
        }
        None => ("weyl", weyl_kinetic(n), None),
    };
    let map = pm_map(n)?;
    let mu = measure_of_map(&map)?;
    let z_op = transform_diffop(&x_op, &map)?;
    let restored = unit_measure_restore(&z_op, &mu)?;
    Ok(render_json(&json!({
        "n": fmt_q(n),
        "a": a.as_ref().map(fmt_q),
        "operator_source": label,
        "gamma": gamma,
        "map": {
            "alpha": fmt_q(&map.alpha),
            "c_factors": map.c.factors().map(|(p, e)| (p, fmt_q(e))).collect::<Vec<_>>(),
            "c_value": map.c.to_f64(),
        },
        "measure": MeasureJson::from(&mu),
        "x_space": op_json(&x_op),
        "z_space": op_json(&z_op),
        "restored": op_json(&restored),
        "checks": {
            "first_derivative_removed": restored.coeff(1).is_zero(),
            "leading_preserved": restored.coeff(2) == z_op.coeff(2),
            "hermitian_with_measure": hermiticity_check(&z_op, &Weight::Measure(mu.clone())).passed(),
            "restored_hermitian": hermiticity_check(&restored, &Weight::Unit).passed(),
        },
    })))
}

fn cmd_match(source: PartnerSource, n: &Q) -> Result<String, Failure> {
    let target = weyl_kinetic(n);
    let sol = match_orderings(n, &target, source)?;
    let named = if *n == qi(3) {
        named_orderings(n)?
            .into_iter()
            .map(|o| {
                json!({
                    "label": o.label,
                    "operator": op_json(&o.op),
                    "equals_weyl": o.residual_vs_weyl.is_zero(),
                    "residual_vs_weyl": o.residual_vs_weyl.to_json(),
                })
            })
            .collect::<Vec<_>>()
    } else {
        Vec::new()
    };
    let mut v = serde_json::to_value(sol.to_json()).expect("serializes");
    let obj = v.as_object_mut().expect("object");
    obj.insert("paper_source_available".into(), Value::Bool(true));
    obj.insert("target".into(), op_json(&target));
    obj.insert("named_orderings".into(), Value::Array(named));
    Ok(render_json(&v))
}

fn cmd_spectrum(
    p: &PhysicalParams,
    ord: &Ordering,
    zmin: f64,
    zmax: f64,
    points: usize,
    count: usize,
) -> Result<String, Failure> {
    if zmin <= 0.0 {
        return Err(Failure::domain("spectral", format!("zmin must be positive, got {zmin}")));
    }
    let a = rational(&ord.a, "a")?;
    let d = derived_params(p)?;
    let h = effective_hamiltonian_z(&OrderingParam::new(a), &d, ord.source.into(), ord.c0)?;
    let grid = Grid::new(zmin, zmax, points)?;
    let m = effective_matrix(&h, &grid)?;
    let ev = eigenvalues(&m, count)?;
    let mut s = String::from("index,eigenvalue_J,eigenvalue_eV\n");
    for (i, e) in ev.iter().enumerate() {
        s.push_str(&format!("{i},{},{}\n", fmt_f64(*e), fmt_f64(joules_to_ev(*e))));
    }
    Ok(s)
}

fn cmd_scan(
    base: &PhysicalParams,
    pressures: &[f64],
    ord: &Ordering,
    (zmin, zmax, points): (f64, f64, usize),
    spacing: Spacing,
) -> Result<String, Failure> {
    if !(zmin > 0.0 && zmax > zmin && zmin.is_finite() && zmax.is_finite()) {
        return Err(Failure::domain("scan", format!("need 0 < zmin < zmax, got [{zmin}, {zmax}]")));
    }
    if points < 2 {
        return Err(Failure::domain("scan", format!("need at least 2 points, got {points}")));
    }
    let a = rational(&ord.a, "a")?;
    let t = |i: usize| i as f64 / (points - 1) as f64;
    let zs: Vec<f64> = match spacing {
        Spacing::Linear => (0..points).map(|i| zmin + (zmax - zmin) * t(i)).collect(),
        Spacing::Log => (0..points).map(|i| zmin * (zmax / zmin).powf(t(i))).collect(),
    };
    let blocks: Vec<Result<String, Failure>> = pressures
        .par_iter()
        .map(|&r| {
            let d = derived_params(&base.at_pressure_ratio(r))?;
            let h = effective_hamiltonian_z(&OrderingParam::new(a.clone()), &d, ord.source.into(), ord.c0)?;
            let mut s = String::new();
            for pt in profile_of(&h, &zs) {
                let (va, vs, vt) = pt.in_ev();
                s.push_str(&format!("{},{},{},{},{}\n", fmt_f64(r), fmt_f64(pt.z), fmt_f64(va), fmt_f64(vs), fmt_f64(vt)));
            }
            Ok(s)
        })
        .collect();
    let mut s = String::from("pressure_ratio,z,V_a_eV,V_sys_eV,V_total_eV\n");
    for b in blocks {
        s.push_str(&b?);
    }
    Ok(s)
}

//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fails.
//!
//! Run with `cargo test -p pdmq-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use num_traits::Zero;
use serde_json::Value;

use pdmq_core::cli::run;
use pdmq_core::helium::{barrier_info, derived_params, PhysicalParams};
use pdmq_core::ordering::{named_orderings, weyl_kinetic};
use pdmq_core::parser::{parse_hamiltonian, unit_bindings};
use pdmq_core::pointmass::{measure_of_map, pm_map, transform_diffop, unit_measure_restore};
use pdmq_core::spectral::{assemble, oscillator, richardson_eigenvalues, solve, susy_shift, effective_matrix, Grid};
use pdmq_core::susy::{
    commutator_check, effective_hamiltonian_z, partner_potential, superpotential, LadderSign, PartnerSource,
};
use pdmq_core::symbolic::{
    expand_sandwich, q, qi, Coeff, DiffOp, DiffOpJson, OrderingParam, PolyX, PowerLawMass, QSqrt2, Radical, Q,
};
use pdmq_core::weyl::weyl_order;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("pdmq").chain(args.iter().copied()), &mut out, &mut err);
    if code != 0 {
        return Err(format!("pdmq {args:?} exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn cli_text(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("pdmq").chain(args.iter().copied()), &mut out, &mut err);
    if code != 0 {
        return Err(format!("pdmq {args:?} exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn x(e: Q) -> PolyX {
    PolyX::power(e)
}

fn mono(c: Coeff, e: Q) -> PolyX {
    PolyX::monomial(c, e)
}

fn bracket3(c0: i64) -> DiffOp {
    DiffOp::from_terms([
        (x(qi(-3)), 2),
        (mono(Coeff::int(-3), qi(-4)), 1),
        (mono(Coeff::int(c0), qi(-5)), 0),
    ])
}

fn c1_weyl() -> Outcome {
    let v = cli_json(&["weyl", "--hamiltonian", "p^2/(2*M0*x^3)"])?;
    let op: DiffOpJson = serde_json::from_value(v["weyl"]["operator"].clone()).map_err(|e| e.to_string())?;
    let op = op.to_diffop().ok_or("unreadable operator JSON")?;
    let f = op.factored();
    check(f.prefactor == Coeff::ratio(-1, 2), || format!("prefactor {}", f.prefactor))?;
    check(f.bracket == bracket3(3), || format!("bracket {}", f.bracket))?;
    check(v["hermiticity"]["passed"] == Value::Bool(true), || "not Hermitian".into())?;
    Ok("(-1/2)[x^-3 D^2 - 3x^-4 D + 3x^-5]".into())
}

fn c2_pointmass() -> Outcome {
    let map = pm_map(&qi(3)).map_err(|e| e.to_string())?;
    check(map.alpha == q(2, 5), || format!("alpha {}", map.alpha))?;
    let c = Radical::power_of(&q(5, 2), &q(2, 5)).unwrap();
    check(map.c == c, || format!("c {}", map.c))?;
    let weyl = weyl_kinetic(&qi(3));
    let z = transform_diffop(&weyl, &map).map_err(|e| e.to_string())?;
    let want = DiffOp::from_terms([
        (PolyX::one(), 2),
        (mono(Coeff::ratio(-3, 5), qi(-1)), 1),
        (mono(Coeff::ratio(12, 25), qi(-2)), 0),
    ])
    .scale(&Coeff::ratio(-1, 2));
    check(z == want, || format!("transformed {z}"))?;
    let mu = measure_of_map(&map).map_err(|e| e.to_string())?;
    check(mu.constant == Radical::power_of(&q(2, 5), &q(3, 5)).unwrap() && mu.exponent == q(-3, 5), || {
        format!("measure {mu}")
    })?;
    let r = unit_measure_restore(&z, &mu).map_err(|e| e.to_string())?;
    let want = DiffOp::from_terms([(PolyX::one(), 2), (mono(Coeff::ratio(9, 100), qi(-2)), 0)]).scale(&Coeff::ratio(-1, 2));
    check(r == want && r.coeff(1).is_zero(), || format!("restored {r}"))?;
    Ok("alpha = 2/5, c = (5/2)^(2/5), mu = (2/(5z))^(3/5), restored (-1/2)[D^2 + 9/(100 z^2)]".into())
}

fn random_rationals(count: usize) -> Vec<Q> {
    let mut runner = TestRunner::deterministic();
    let strat = (-60i64..=60, 1i64..=37);
    (0..count)
        .map(|_| {
            let (n, d) = strat.new_tree(&mut runner).expect("strategy").current();
            q(n, d)
        })
        .collect()
}

fn c3_superpotential() -> Outcome {
    let m = PowerLawMass::cubic();
    let sqrt2 = |r: Q| Coeff::real(QSqrt2::new(qi(0), r));
    for a in [q(-1, 4), qi(0), q(1, 2)] {
        let w = superpotential(&m, &OrderingParam::new(a.clone())).map_err(|e| e.to_string())?;
        check(w.growing_coeff(&m) == sqrt2(q(1, 5)), || format!("growing coefficient at a = {a}"))?;
        // −3(4a+1)/(4√2) = −3(4a+1)√2/8
        let want = sqrt2(qi(-3) * (qi(4) * &a + qi(1)) / qi(8));
        check(w.singular_coeff(&m) == want, || format!("singular coefficient at a = {a}"))?;
    }
    let rs = random_rationals(10);
    for a in &rs {
        let r = commutator_check(&m, &OrderingParam::new(a.clone())).map_err(|e| e.to_string())?;
        check(r.is_zero(), || format!("[A-, A+] - 1 = {r} at a = {a}"))?;
    }
    let shown: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
    Ok(format!("coefficients exact; commutator zero at a in {{{}}}", shown.join(", ")))
}

fn roots_of(v: &Value) -> Result<Vec<(String, bool)>, String> {
    v["roots"]
        .as_array()
        .ok_or("no roots array")?
        .iter()
        .map(|r| Ok((r["a"].as_str().ok_or("root without a")?.to_string(), r["verified"].as_bool().unwrap_or(false))))
        .collect()
}

fn c4_closed_form_roots() -> Outcome {
    let v = cli_json(&["match", "--source", "paper"])?;
    let roots = roots_of(&v)?;
    let a: Vec<&str> = roots.iter().map(|r| r.0.as_str()).collect();
    check(a == ["-1/6", "1/2"], || format!("roots {a:?}"))?;
    Ok(format!("roots {a:?}"))
}

fn c5_expanded_roots() -> Outcome {
    let v = cli_json(&["match", "--source", "expanded"])?;
    let roots = roots_of(&v)?;
    check(roots == [("-1".to_string(), true), ("-1/3".to_string(), true)], || format!("roots {roots:?}"))?;
    let weyl = weyl_kinetic(&qi(3));
    for a in [qi(-1), q(-1, 3)] {
        let s = expand_sandwich(&PowerLawMass::cubic(), &OrderingParam::new(a.clone()));
        check(s == weyl, || format!("sandwich({a}) = {s}"))?;
    }
    let named = named_orderings(&qi(3)).map_err(|e| e.to_string())?;
    check(named[0].residual_vs_weyl.is_zero(), || format!("{} differs from Weyl", named[0].label))?;
    let x5 = |c: i64| DiffOp::multiply(mono(Coeff::int(c), qi(-5)));
    // residuals −3x⁻⁵ and +3x⁻⁵ in units of −ħ²
    check(named[1].residual_vs_weyl == x5(-3).scale(&Coeff::int(-1)), || format!("{}", named[1].residual_vs_weyl))?;
    check(named[2].residual_vs_weyl == x5(3).scale(&Coeff::int(-1)), || format!("{}", named[2].residual_vs_weyl))?;
    Ok("roots [-1, -1/3] verified; (1/x)p(1/x)p(1/x) = Weyl; p(1/x^3)p and the anticommutator differ from it by +3x^-5 and -3x^-5".into())
}

fn c6_source_divergence() -> Outcome {
    let m = PowerLawMass::cubic();
    let pp = |a: &Q, s| partner_potential(&m, &OrderingParam::new(a.clone()), LadderSign::Raising, s).map(|p| p.v);
    let a = q(-1, 4);
    let (p, e) = (pp(&a, PartnerSource::ClosedForm).unwrap(), pp(&a, PartnerSource::Expanded).unwrap());
    check(p == e, || "sources differ at a = -1/4".into())?;
    for a in [qi(0), q(1, 2), q(-1, 6)] {
        let d = &pp(&a, PartnerSource::ClosedForm).unwrap() - &pp(&a, PartnerSource::Expanded).unwrap();
        let pure = d.as_monomial().is_some_and(|(c, k)| *k == qi(-5) && !c.is_zero());
        check(pure, || format!("difference at a = {a} is {d}"))?;
    }
    let e0 = pp(&qi(0), PartnerSource::Expanded).unwrap().coeff(&qi(-5));
    check(e0 == Coeff::ratio(-39, 32), || format!("a = 0 coefficient {e0}"))?;
    Ok("agree at a = -1/4, pure x^-5 difference at 0, 1/2, -1/6; expanded a = 0 coefficient -39/32".into())
}

fn c7_route_independence() -> Outcome {
    let d = derived_params(&PhysicalParams::helium4()).map_err(|e| e.to_string())?;
    let susy = effective_hamiltonian_z(&OrderingParam::new(q(-1, 3)), &d, PartnerSource::Expanded, 0.0)
        .map_err(|e| e.to_string())?;
    let map = pm_map(&qi(3)).unwrap();
    let restored = unit_measure_restore(
        &transform_diffop(&weyl_kinetic(&qi(3)), &map).unwrap(),
        &measure_of_map(&map).unwrap(),
    )
    .unwrap();
    let grid = Grid::new(0.05, 3.0, 2000).map_err(|e| e.to_string())?;
    let m_susy = effective_matrix(&susy, &grid).map_err(|e| e.to_string())?;
    let mut m_weyl = assemble(&restored, &grid).map_err(|e| e.to_string())?.scaled(2.0 * d.k);
    let vsys: Vec<f64> = grid.nodes().into_iter().map(|z| susy.v_sys(z)).collect();
    m_weyl.add_diagonal(&vsys);
    let dist = m_susy.max_abs_diff(&m_weyl);
    check(dist == 0.0, || format!("matrix distance {dist:e}"))?;
    let closed = effective_hamiltonian_z(&OrderingParam::new(q(-1, 6)), &d, PartnerSource::ClosedForm, 0.0)
        .map_err(|e| e.to_string())?;
    check(closed.kinetic_op() == restored, || format!("closed-form operator {}", closed.kinetic_op()))?;
    Ok("matrix distance 0 on [0.05, 3.0], N = 2000; closed-form a = -1/6 operator equals restored Weyl operator".into())
}

fn c8_helium() -> Outcome {
    let d = derived_params(&PhysicalParams::helium4()).map_err(|e| e.to_string())?;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    check(rel(d.r_c, 29.5e-10) <= 5e-3, || format!("R_c = {:e}", d.r_c))?;
    check(rel(d.lambda, 4.36e-10) <= 1e-2, || format!("Lambda = {:e}", d.lambda))?;
    check(rel(d.p_th, 1.52e-24) <= 1e-2, || format!("p_Th = {:e}", d.p_th))?;
    let pv = PhysicalParams::helium4().p_v;
    check((d.p_i_at_rc - pv).abs() <= 2.0 * f64::EPSILON * pv, || format!("P_i = {}", d.p_i_at_rc))?;
    Ok(format!("R_c = {:.4e} m, Lambda = {:.4e} m, p_Th = {:.4e} kg m/s, P_i(R_c) = P_v", d.r_c, d.lambda, d.p_th))
}

fn c9_barrier() -> Outcome {
    let d = derived_params(&PhysicalParams::helium4().at_pressure_ratio(0.8)).map_err(|e| e.to_string())?;
    let c0 = 1.0e-21;
    let b = barrier_info(&d, c0);
    let h = effective_hamiltonian_z(&OrderingParam::new(q(-1, 3)), &d, PartnerSource::Expanded, c0)
        .map_err(|e| e.to_string())?;
    let z = b.z_star;
    // dV_sys/dz ∝ (4/5)z^(−1/5) − (6/5)z^(1/5)
    let slope = 0.8 * z.powf(-0.2) - 1.2 * z.powf(0.2);
    check(slope.abs() < 1e-12, || format!("slope {slope:e} at z*"))?;
    check(((z - (2.0f64 / 3.0).powf(2.5)) / z).abs() < 1e-12, || format!("z* = {z}"))?;
    let height = h.v_sys(z) - c0;
    let want = 4.0 / 27.0 * d.u0;
    check(((height - want) / want).abs() < 1e-12, || format!("V_sys(z*) - c0 = {height:e}, want {want:e}"))?;
    check(((b.v_star - c0 - want) / want).abs() < 1e-12, || "barrier_info height".into())?;
    Ok(format!("z* = {z:.12}, V* - c0 = (4/27) U0 to 1e-12"))
}

fn c10_eigensolver() -> Outcome {
    let grid = Grid::new(-10.0, 10.0, 8000).map_err(|e| e.to_string())?;
    let plain = solve(&oscillator(), &grid, 5).map_err(|e| e.to_string())?.eigenvalues;
    let rich = richardson_eigenvalues(|g| assemble(&oscillator(), g), &grid, 5).map_err(|e| e.to_string())?;
    let err = |v: &[f64]| v.iter().enumerate().map(|(k, l)| (l - (k as f64 + 0.5)).abs()).fold(0.0, f64::max);
    let (e_plain, e_rich) = (err(&plain), err(&rich));
    check(e_rich < 1e-6, || format!("extrapolated error {e_rich:e}"))?;
    let shift = susy_shift(&Grid::new(-10.0, 10.0, 2000).unwrap(), 6).map_err(|e| e.to_string())?;
    let interior: Vec<_> = shift.iter().filter(|r| r.boundary_mass < 1e-8).collect();
    check(!interior.is_empty(), || "no interior states".into())?;
    for r in &interior {
        check((r.shift() - 1.0).abs() < 1e-3, || format!("shift {} at state {}", r.shift(), r.index))?;
    }
    Ok(format!(
        "oscillator max error {e_rich:.1e} (h, h/2 extrapolated; single grid {e_plain:.1e}); SUSY shift 1 on {} interior states",
        interior.len()
    ))
}

fn scan_rows(text: &str) -> Result<Vec<[f64; 5]>, String> {
    text.lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
            v.try_into().map_err(|_| format!("bad row {l}"))
        })
        .collect()
}

fn c11_scan() -> Outcome {
    let near = scan_rows(&cli_text(&[
        "scan", "--pressures", "0.8,0.95", "--source", "paper", "--a", "-1/6", "--zmin", "1e-9", "--zmax", "1e-8",
        "--points", "40", "--spacing", "log",
    ])?)?;
    let wide = scan_rows(&cli_text(&[
        "scan", "--pressures", "0.8,0.95", "--source", "paper", "--a", "-1/6", "--zmin", "0.01", "--zmax", "3",
        "--points", "600",
    ])?)?;
    let mut heights = Vec::new();
    for ratio in [0.8, 0.95] {
        let small: Vec<_> = near.iter().filter(|r| r[0] == ratio).collect();
        // V_total strictly decreasing toward z → 0 and growing like 1/z²
        let monotone = small.windows(2).all(|w| w[0][4] < w[1][4]);
        let (first, last) = (small[0], small[small.len() - 1]);
        let growth = first[4] / last[4];
        let expected = (last[1] / first[1]).powi(2);
        check(first[4] < 0.0 && monotone && (growth / expected - 1.0).abs() < 0.05, || {
            format!("no negative divergence at P/P_v = {ratio}: V(z_min) = {}", first[4])
        })?;
        let curve: Vec<_> = wide.iter().filter(|r| r[0] == ratio).collect();
        let maxima = curve.windows(3).filter(|w| w[1][3] > w[0][3] && w[1][3] > w[2][3]).count();
        check(maxima == 1, || format!("{maxima} interior maxima of V_sys at P/P_v = {ratio}"))?;
        heights.push(curve.iter().map(|r| r[3]).fold(f64::NEG_INFINITY, f64::max));
    }
    check(heights[1] > heights[0], || format!("barrier heights {heights:?}"))?;
    Ok(format!("V_total -> -inf as z -> 0+, one V_sys maximum, heights {:.4} eV < {:.4} eV", heights[0], heights[1]))
}

fn c12_parser() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let tokens = [
        "x", "p", "sqrt2", "M0", "U0", "hbar", "k", "+", "-", "*", "/", "^", "(", ")", "1", "2", "3/4", "0.5", "1e-3",
        "2.5e10", " ", "^(", "-1/2)", "p^2", "x^(-3)", "((", "))", "9999999999", "é", "\t", "e", ".", "0",
    ];
    let strat = proptest::collection::vec(0..tokens.len(), 0..24);
    let bindings = unit_bindings();
    let mut ok = 0usize;
    for _ in 0..10_000 {
        let idx = strat.new_tree(&mut runner).expect("strategy").current();
        let text: String = idx.iter().map(|&i| tokens[i]).collect();
        let res = catch_unwind(AssertUnwindSafe(|| parse_hamiltonian(&text, &bindings)));
        match res {
            Err(_) => return Err(format!("parser panicked on {text:?}")),
            Ok(Ok(sym)) => {
                ok += 1;
                let again = parse_hamiltonian(&sym.to_dsl(), &bindings).map_err(|e| format!("{text:?}: {e}"))?;
                check(again == sym, || format!("round trip failed for {text:?}"))?;
            }
            Ok(Err(e)) => check(e.offset <= text.len(), || format!("offset {} beyond {text:?}", e.offset))?,
        }
    }
    for g in ["p^2/(2*M0*x^3) + U0*x^2*(1-x)", "p^2/2"] {
        let s = parse_hamiltonian(g, &bindings).map_err(|e| e.to_string())?;
        check(parse_hamiltonian(&s.to_dsl(), &bindings).as_ref() == Ok(&s), || format!("{g} does not round-trip"))?;
    }
    let e = parse_hamiltonian("x^(1/2", &bindings).err().ok_or("unclosed parenthesis accepted")?;
    check(e.offset == 2, || format!("unclosed parenthesis reported at {}", e.offset))?;
    let kinetic = weyl_order(&parse_hamiltonian("p^2/(2*M0*x^3)", &bindings).unwrap());
    check(kinetic == bracket3(3).scale(&Coeff::ratio(-1, 2)), || "grammar example changed meaning".into())?;
    Ok(format!("10000 fuzz inputs, no panics ({ok} parsed and round-tripped); grammar examples round-trip"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Weyl kinetic operator", c1_weyl),
        ("point-mass chain", c2_pointmass),
        ("superpotential and commutator", c3_superpotential),
        ("ordering roots, closed-form source", c4_closed_form_roots),
        ("ordering roots, expanded source", c5_expanded_roots),
        ("partner-source divergence", c6_source_divergence),
        ("route independence", c7_route_independence),
        ("helium numerics", c8_helium),
        ("barrier analytics", c9_barrier),
        ("eigensolver oracle", c10_eigensolver),
        ("potential curves", c11_scan),
        ("parser totality", c12_parser),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = std::time::Instant::now();
        let outcome = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Acceptance criteria with pinned tolerances. Runs without the libtest
//! harness so that every criterion prints its own line.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use voa_cli::lab::{decay_bumps, CONTROL_FACTOR, DECAY_RATIO};
use voa_cli::suites::{build, l1_closure_all, run_suite};
use voa_cli::Suite;
use voa_core::fields::{
    borcherds_oracle_check, locality_order, n_product, virasoro_bracket_check, LocalityOrder, Window,
};
use voa_core::models::{ModelDescriptor, NullVectors};
use voa_core::reconstruct::{axiom_suite, build_y, state_of_field};
use voa_core::smear::{
    commutator_decay_table, disjoint_commutator_decay, infinitesimal_covariance_check, mode_growth_probe,
    sobolev_summability_diagnostic, summability_summand, CVec, NumCommutator, NumField, NumSpace, TrigPoly,
};
use voa_core::space::Vector;
use voa_core::Scalar;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Partitions of `n` into parts `≥ min`, by the standard recurrence.
fn partition_count(n: usize, min: usize) -> usize {
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for part in min..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

fn half() -> Scalar {
    Scalar::new(1, 2)
}

fn heis(d: usize) -> ModelDescriptor {
    ModelDescriptor::heisenberg(d)
}

fn vir(d: usize, nv: NullVectors) -> ModelDescriptor {
    ModelDescriptor::virasoro(half(), d).with_null_vectors(nv)
}

fn c1_axioms_heisenberg() -> Outcome {
    let t = Instant::now();
    let b = build(&heis(4)).map_err(|e| e.to_string())?;
    let r = axiom_suite(&b.va, &b.name());
    let elapsed = t.elapsed();
    let oracle: Vec<usize> = (0..=4).map(|n| partition_count(n, 1)).collect();
    ensure(b.va.dims() == oracle.as_slice(), || format!("dims {:?} vs {oracle:?}", b.va.dims()))?;
    ensure(r.passed(), || format!("{:?}", r.first_failure()))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("dims {oracle:?}, {} checks, {elapsed:.2?}", r.checks.len()))
}

fn c2_axioms_virasoro() -> Outcome {
    let t = Instant::now();
    let b = build(&vir(6, NullVectors::Keep)).map_err(|e| e.to_string())?;
    let r = axiom_suite(&b.va, &b.name());
    let elapsed = t.elapsed();
    let oracle: Vec<usize> = (0..=6).map(|n| partition_count(n, 2)).collect();
    ensure(b.va.dims() == oracle.as_slice(), || format!("dims {:?} vs {oracle:?}", b.va.dims()))?;
    ensure(r.passed(), || format!("{:?}", r.first_failure()))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("dims {oracle:?}, {elapsed:.2?}"))
}

fn c3_locality_orders() -> Outcome {
    let mut found = Vec::new();
    for (desc, expect) in [(heis(4), 2usize), (vir(6, NullVectors::Keep), 4)] {
        let m = desc.build().map_err(|e| e.to_string())?;
        let g = &m.generator;
        // Oracle: one more than the largest s with a nonzero product a_(s)a.
        let top = (0..2 * g.weight()).rev().find(|&s| !n_product(g, g, s).unwrap().is_zero()).unwrap() as usize + 1;
        ensure(top == expect, || format!("product oracle gives {top}, expected {expect}"))?;
        let r = locality_order(&m.space, g, g, 8, m.depth());
        ensure(r.order == LocalityOrder::Local(expect), || format!("{}: {:?}", desc.name(), r.order))?;
        found.push(format!("{}: N = {expect}", desc.name()));
    }
    Ok(found.join(", "))
}

fn c4_borcherds_oracle() -> Outcome {
    let mut found = Vec::new();
    for desc in [heis(4), vir(6, NullVectors::Keep)] {
        let m = desc.build().map_err(|e| e.to_string())?;
        let g = &m.generator;
        let c = borcherds_oracle_check(&m.space, g, g, m.depth(), m.working_depth() as i64).map_err(|e| e.to_string())?;
        ensure(c.passed() && c.failures == 0 && c.checked > 0, || format!("{}: {:?}", desc.name(), c.witnesses))?;
        found.push(format!("{}: {} triples", desc.name(), c.checked));
    }
    Ok(found.join(", "))
}

fn c5_sugawara() -> Outcome {
    let m = heis(6).build().map_err(|e| e.to_string())?;
    let g = &m.generator;
    let t = n_product(g, g, -1).map_err(|e| e.to_string())?.scale(&half());
    let c = virasoro_bracket_check(&m.space, &t, &Scalar::one(), 6, m.working_depth() as i64);
    ensure(c.passed() && c.checked > 0, || format!("{:?}", c.witnesses))?;
    Ok(format!("{} entries with c = 1", c.checked))
}

fn c6_round_trip() -> Outcome {
    let mut found = Vec::new();
    for desc in [heis(4), vir(6, NullVectors::Keep)] {
        let m = desc.build().map_err(|e| e.to_string())?;
        let va = build_y(&m.space, &[m.generator.clone()], m.depth()).map_err(|e| e.to_string())?;
        let s = state_of_field(&m.generator).map_err(|e| e.to_string())?;
        let y = va.field_of(&s).map_err(|e| e.to_string())?;
        let (checked, bad) = y.components()[0].compare(&m.generator, Window::square(va.depth));
        ensure(checked > 0 && bad.is_empty(), || format!("{}: generator differs at {bad:?}", desc.name()))?;
        let mut states = 0;
        for (d, i) in va.basis() {
            let back = state_of_field(va.y_basis(d, i)).map_err(|e| e.to_string())?;
            ensure(back.same_coefficients(&Vector::basis(&m.space, d, i)), || format!("state(Y({}))", m.space.label(d, i)))?;
            states += 1;
        }
        found.push(format!("{}: {checked} blocks, {states} states", desc.name()));
    }
    Ok(found.join(", "))
}

fn c7_l1_closure() -> Outcome {
    let b = build(&heis(4)).map_err(|e| e.to_string())?;
    let c = l1_closure_all(&b.va).map_err(|e| e.to_string())?;
    ensure(c.passed(), || format!("{:?}", c.witnesses))?;
    Ok(format!("{} identities over {}", c.checked, c.notes.join("; ")))
}

fn c8_unitarity() -> Outcome {
    let mut found = Vec::new();
    for desc in [heis(4), vir(6, NullVectors::Quotient)] {
        let b = build(&desc).map_err(|e| e.to_string())?;
        let r = run_suite(&b, Suite::Unitarity).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{}: {:?}", desc.name(), r.first_failure()))?;
        found.push(format!("{} passes", desc.name()));
    }
    let c = Scalar::int(-1);
    let b = build(&ModelDescriptor::virasoro(c.clone(), 4)).map_err(|e| e.to_string())?;
    let r = run_suite(&b, Suite::Unitarity).map_err(|e| e.to_string())?;
    let (check, witness) = r.first_failure().ok_or("c = -1 passed")?;
    let w = witness.ok_or("no witness")?;
    let expect = &c * &half();
    ensure(check.name == "positivity" && w.location.starts_with("level 2") && w.found == expect.to_string(), || {
        format!("{}: {w}", check.name)
    })?;
    found.push(format!("c = -1 fails: {w}"));
    Ok(found.join(", "))
}

fn c9_infinitesimal_covariance() -> Outcome {
    let tol = 1e-10;
    let mut found = Vec::new();
    for desc in [heis(6), vir(6, NullVectors::Quotient)] {
        let m = desc.build().map_err(|e| e.to_string())?;
        let ns = NumSpace::new(&m.space);
        let a = NumField::new(&m.generator);
        let mut worst = 0.0f64;
        let mut count = 0;
        for (p, i) in m.space.basis_indices(4) {
            let u = CVec::from_vector(&Vector::basis(&m.space, p, i));
            for k in -1..=1 {
                for n in -6..=6 {
                    let r = infinitesimal_covariance_check(&ns, &a, m.generator.weight(), k, &TrigPoly::monomial(n), &u);
                    ensure(!r.truncated, || format!("{}: k={k} n={n} truncated", desc.name()))?;
                    ensure(r.within(tol), || format!("{}: k={k} n={n} residual {:e}", desc.name(), r.residual))?;
                    worst = worst.max(r.residual / r.scale);
                    count += 1;
                }
            }
        }
        found.push(format!("{}: {count} cases, max {worst:.1e}", desc.name()));
    }
    Ok(found.join(", "))
}

fn c10_decay() -> Outcome {
    let m = heis(8).build().map_err(|e| e.to_string())?;
    let ns = NumSpace::new(&m.space);
    let comm = NumCommutator::new(&m.generator, &m.generator).map_err(|e| e.to_string())?;
    let (f, g, overlap) = decay_bumps();
    let mut worst = 0.0f64;
    for (p, i) in m.space.basis_indices(m.depth()) {
        let u = CVec::from_vector(&Vector::basis(&m.space, p, i));
        let t = disjoint_commutator_decay(&ns, &comm, &f, &g, &u, &[16, 64]).map_err(|e| e.to_string())?;
        let c = commutator_decay_table(&ns, &comm, &f, &overlap, &u, &[64]);
        ensure(t.iter().chain(&c).all(|r| !r.truncated), || "truncated".into())?;
        let ratio = t[1].residual / t[0].residual;
        ensure(ratio < DECAY_RATIO, || format!("u={}: r64/r16 = {ratio:e}", m.space.label(p, i)))?;
        ensure(c[0].residual > CONTROL_FACTOR * t[1].residual, || {
            format!("u={}: control {:e} vs {:e}", m.space.label(p, i), c[0].residual, t[1].residual)
        })?;
        worst = worst.max(ratio);
    }
    Ok(format!("max r64/r16 = {worst:.2e} over all basis u of degree ≤ 8"))
}

fn c11_growth() -> Outcome {
    let m = heis(8).build().map_err(|e| e.to_string())?;
    let w = m.working_depth() as i64;
    let states: Vec<Vector> = m.space.basis_indices(4).map(|(p, i)| Vector::basis(&m.space, p, i)).collect();
    let mut degrees = Vec::new();
    for u in &states {
        for v in &states {
            let g = mode_growth_probe(&m.space, &m.generator, u, v, -w..=w).map_err(|e| e.to_string())?;
            degrees.extend(g.degree);
            if u.homogeneous_degree() == Some(0) && v.homogeneous_degree() == Some(0) {
                // ⟨Ω, J_m J_{−m} Ω⟩ = m for m > 0.
                let exact = g.points.iter().filter(|(k, _)| *k > 0).all(|(k, e)| *e == *k as f64);
                ensure(exact, || "vacuum elements differ from m".into())?;
            }
        }
    }
    ensure(!degrees.is_empty() && degrees.iter().all(|&d| d == degrees[0]), || format!("{degrees:?}"))?;
    Ok(format!("degree {} on {} of {} pairs (others vanish on the tail)", degrees[0], degrees.len(), states.len().pow(2)))
}

fn c12_summability() -> Outcome {
    ensure((summability_summand(0, 1, 1) - 1.0 / 6.0).abs() < 1e-15, || "summand(0; 1, 1) ≠ 1/6".into())?;
    let mut found = Vec::new();
    for n in [0, 1] {
        let d = sobolev_summability_diagnostic(n, 100);
        ensure(d.origin_value == 1.0 && d.max_bound_ratio <= 1.0 && d.monotone, || format!("N={n}: {d:?}"))?;
        ensure(d.tail < d.tail_bound, || format!("N={n}: tail {:e} ≥ {:e}", d.tail, d.tail_bound))?;
        found.push(format!("N={n}: tail {:.2e} < {:.2e}", d.tail, d.tail_bound));
    }
    Ok(found.join(", "))
}

fn c13_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_voa"))
            .args(["verify", "--model", "heisenberg", "--depth", "4", "--json", "--csv", "--out-dir"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.code() == Some(0), || format!("exit {:?}", status.status.code()))?;
        let json = std::fs::read(out.join("report.json")).map_err(|e| e.to_string())?;
        let csv = std::fs::read(out.join("report.csv")).map_err(|e| e.to_string())?;
        bodies.push((json, csv));
    }
    ensure(bodies[0] == bodies[1], || "reports differ between runs".into())?;
    Ok(format!("{} + {} identical bytes", bodies[0].0.len(), bodies[0].1.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("1 axiom suite, heisenberg D=4", c1_axioms_heisenberg),
        ("2 axiom suite, virasoro c=1/2 D=6", c2_axioms_virasoro),
        ("3 locality orders", c3_locality_orders),
        ("4 borcherds oracle equivalence", c4_borcherds_oracle),
        ("5 sugawara bracket", c5_sugawara),
        ("6 reconstruction round trip", c6_round_trip),
        ("7 l1 closure", c7_l1_closure),
        ("8 unitarity", c8_unitarity),
        ("9 infinitesimal covariance", c9_infinitesimal_covariance),
        ("10 disjoint-support decay", c10_decay),
        ("11 mode-growth probe", c11_growth),
        ("12 summability diagnostic", c12_summability),
        ("13 determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.2?}]", t.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{:.2?}]", t.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

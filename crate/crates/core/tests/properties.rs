use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use voa_core::fields::{commutator_via_borcherds, direct_commutator, locality_order, n_product, LocalityOrder};
use voa_core::models::{heisenberg, virasoro, Model, NullVectors};
use voa_core::reconstruct::{build_y, state_of_field, VAStructure};
use voa_core::smear::{beta_action, smear_apply, sobolev_norm, CVec, Moebius, NumField, NumSpace, TrigPoly};
use voa_core::space::{apply_sl2, inner, Vector};
use voa_core::Scalar;

fn heis() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(|| heisenberg(5).unwrap())
}

fn vir() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(|| virasoro(Scalar::new(7, 10), 5, NullVectors::Reject).unwrap())
}

fn heis_va() -> &'static VAStructure {
    static V: OnceLock<VAStructure> = OnceLock::new();
    V.get_or_init(|| build_y(&heis().space, &[heis().generator.clone()], 4).unwrap())
}

fn model(which: bool) -> &'static Model {
    if which {
        vir()
    } else {
        heis()
    }
}

/// A basis vector of degree at most `max_deg`, chosen by two raw indices.
fn basis(m: &Model, max_deg: usize, a: usize, b: usize) -> Vector {
    let all: Vec<_> = m.space.basis_indices(max_deg).collect();
    let (d, i) = all[(a + b) % all.len()];
    Vector::basis(&m.space, d, i)
}

fn trig(cutoff: usize) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * cutoff + 1)
        .prop_map(move |v| TrigPoly::new(cutoff, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

fn close(a: &CVec, b: &CVec, ns: &NumSpace, tol: f64) -> bool {
    let scale = (ns.norm(a) + ns.norm(b)).max(1.0);
    ns.norm(&a.sub(b)) <= tol * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sl2_is_adjoint_for_gram(which: bool, a in 0usize..64, b in 0usize..64, k in -1i32..=1) {
        let m = model(which);
        let top = m.working_depth() - 1;
        let u = basis(m, top, a, 0);
        let v = basis(m, top, b, 0);
        let lhs = inner(&m.space, &apply_sl2(&m.space, -k, &u).unwrap(), &v).unwrap();
        let rhs = inner(&m.space, &u, &apply_sl2(&m.space, k, &v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sl2_bracket(which: bool, a in 0usize..64) {
        let m = model(which);
        let u = basis(m, m.working_depth() - 1, a, 0);
        let up = apply_sl2(&m.space, 1, &apply_sl2(&m.space, -1, &u).unwrap()).unwrap();
        let down = apply_sl2(&m.space, -1, &apply_sl2(&m.space, 1, &u).unwrap()).unwrap();
        let two_l0 = apply_sl2(&m.space, 0, &u).unwrap().scale(&Scalar::from(2));
        prop_assert!(up.sub(&down).same_coefficients(&two_l0));
    }

    #[test]
    fn borcherds_matches_direct(which: bool, a in 0usize..64, mm in -4i64..=4, nn in -4i64..=4) {
        let m = model(which);
        let g = &m.generator;
        let v = basis(m, 3, a, 0);
        if let Some(direct) = direct_commutator(g, g, mm, nn, &v) {
            let via = commutator_via_borcherds(g, g, mm, nn, &v).unwrap();
            if !via.is_truncated() {
                prop_assert!(via.same_coefficients(&direct));
            }
        }
    }

    #[test]
    fn annihilation(which: bool, a in 0usize..64, extra in 1i64..4) {
        let m = model(which);
        let g = &m.generator;
        let v = basis(m, m.depth(), a, 0);
        let deg = v.homogeneous_degree().unwrap() as i64;
        prop_assert!(g.mode_apply(deg + g.weight() - 1 + extra, &v).is_zero());
    }

    #[test]
    fn n_product_states_are_graded(which: bool, n in -3i64..=3) {
        let m = model(which);
        let g = &m.generator;
        let p = n_product(g, g, n).unwrap();
        let s = state_of_field(&p).unwrap();
        let expect = 2 * g.weight() - n - 1;
        if s.is_zero() {
            prop_assert!(expect >= 0 || p.is_zero());
        } else {
            prop_assert_eq!(s.homogeneous_degree().map(|d| d as i64), Some(expect));
        }
    }

    #[test]
    fn smear_is_linear(f in trig(4), g in trig(4), re in -2.0..2.0f64, im in -2.0..2.0f64, a in 0usize..64) {
        let m = heis();
        let ns = NumSpace::new(&m.space);
        let j = NumField::new(&m.generator);
        let u = CVec::from_vector(&basis(m, 3, a, 0));
        let alpha = Complex64::new(re, im);
        let lhs = smear_apply(&j, &f.scale(alpha).add(&g), &u);
        let mut rhs = smear_apply(&j, &f, &u).scale(alpha);
        rhs.axpy(Complex64::new(1.0, 0.0), &smear_apply(&j, &g, &u));
        prop_assert!(close(&lhs, &rhs, &ns, 1e-12));
    }

    #[test]
    fn smear_rotation_covariance(which: bool, f in trig(3), theta in -PI..PI, a in 0usize..64) {
        let m = model(which);
        let ns = NumSpace::new(&m.space);
        let y = NumField::new(&m.generator);
        let u = CVec::from_vector(&basis(m, 3, a, 0));
        let rot = |v: &CVec, t: f64| {
            let comps = (0..ns.dims().len())
                .map(|n| v.component(n).iter().map(|z| z * Complex64::from_polar(1.0, t * n as f64)).collect())
                .collect();
            CVec::from_components(comps)
        };
        let lhs = rot(&smear_apply(&y, &f, &rot(&u, -theta)), theta);
        let rhs = smear_apply(&y, &f.rotate(theta), &u);
        prop_assert!(close(&lhs, &rhs, &ns, 1e-10));
    }

    #[test]
    fn sobolev_monotone(f in trig(6)) {
        let norms: Vec<f64> = (0..=2).map(|n| sobolev_norm(&f, n as f64)).collect();
        prop_assert!(norms[0] <= norms[1] && norms[1] <= norms[2]);
    }

    #[test]
    fn beta_of_rotation(f in trig(5), theta in -PI..PI, d in 0i64..4) {
        let out = beta_action(&Moebius::rotation(theta), d, &f, 10).unwrap();
        prop_assert!(out.max_abs_diff(&f.rotate(theta)) < 1e-12);
    }
}

#[test]
fn locality_of_derivative_is_at_most_one_more() {
    for m in [heis(), vir()] {
        let g = &m.generator;
        let depth = m.working_depth() - 2;
        let base = locality_order(&m.space, g, g, 6, depth).order;
        let der = locality_order(&m.space, &g.derivative(), g, 7, depth).order;
        match (base, der) {
            (LocalityOrder::Local(a), LocalityOrder::Local(b)) => assert!(b <= a + 1, "{a} {b}"),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn round_trip_and_quasi_primary_generators() {
    let va = heis_va();
    let m = heis();
    let s = state_of_field(&m.generator).unwrap();
    assert!(apply_sl2(&m.space, 1, &s).unwrap().is_zero());
    let y = va.field_of(&s).unwrap();
    let y = &y.components()[0];
    let window = voa_core::fields::Window::square(va.depth);
    let (checked, bad) = y.compare(&m.generator, window);
    assert!(checked > 0 && bad.is_empty());
    for (d, i) in va.basis() {
        let b = Vector::basis(&m.space, d, i);
        assert!(state_of_field(va.y_basis(d, i)).unwrap().same_coefficients(&b));
    }
}

#[test]
fn theta_squares_to_identity() {
    for m in [heis(), vir()] {
        for (d, i) in m.space.basis_indices(m.depth()) {
            let v = Vector::basis(&m.space, d, i);
            assert!(m.theta.apply(&m.theta.apply(&v)).same_coefficients(&v));
        }
    }
}

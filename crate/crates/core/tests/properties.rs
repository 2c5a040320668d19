//! Property suites for the library invariants that are naturally statements
//! over random inputs, plus a few exhaustive structural checks.

use delta_dp3::config::builtins;
use delta_dp3::delta::DeltaEngine;
use delta_dp3::lattice::{rat, rint, DivisorClass, Rat};
use delta_dp3::zariski::{PiecewiseFunc, QuadPoly};
use num_traits::Signed;
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn divisor_class() -> impl Strategy<Value = DivisorClass> {
    proptest::array::uniform7(-6i64..=6).prop_map(DivisorClass::from_ints)
}

proptest! {
    #[test]
    fn pairing_is_bilinear(a in divisor_class(), b in divisor_class(), c in divisor_class(),
                           x in small_rat(), y in small_rat()) {
        let lhs = a.scale(&x).add(&b.scale(&y)).intersect(&c);
        let rhs = &x * a.intersect(&c) + &y * b.intersect(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pairing_is_symmetric(a in divisor_class(), b in divisor_class()) {
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
    }

    #[test]
    fn rational_identities_are_bit_exact(n in -10_000i64..10_000, d in 1i64..10_000) {
        let a = rat(n, d);
        prop_assert_eq!(&a * rint(d), rint(n));
        if n != 0 {
            prop_assert_eq!(&a * (rint(1) / &a), rint(1));
        }
    }

    #[test]
    fn integration_is_additive_over_splits(c0 in small_rat(), c1 in small_rat(), c2 in small_rat(),
                                           t in 1i64..999) {
        let f = PiecewiseFunc::new(
            vec![rint(0), rint(1)],
            vec![QuadPoly::new(c0, c1, c2)],
        ).unwrap();
        let mid = rat(t, 1000);
        let whole = f.integrate(&rint(0), &rint(1)).unwrap();
        let split = f.integrate(&rint(0), &mid).unwrap() + f.integrate(&mid, &rint(1)).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn enumerate_lines_is_antitone(take in proptest::collection::vec(any::<bool>(), 4)) {
        // root pool: a 4A1 system; any subset is a valid root set
        let pool = [
            DivisorClass::from_ints([1, -1, -1, -1, 0, 0, 0]),
            DivisorClass::from_ints([1, -1, 0, 0, -1, -1, 0]),
            DivisorClass::from_ints([1, 0, -1, 0, -1, 0, -1]),
            DivisorClass::from_ints([1, 0, 0, -1, 0, -1, -1]),
        ];
        let subset: Vec<DivisorClass> = pool.iter().zip(&take)
            .filter(|(_, &t)| t).map(|(r, _)| r.clone()).collect();
        let sub_lines = delta_dp3::enumerate_lines(&subset).unwrap();
        let all_lines = delta_dp3::enumerate_lines(&pool).unwrap();
        prop_assert!(all_lines.len() <= sub_lines.len());
        prop_assert!(all_lines.iter().all(|l| sub_lines.contains(l)));
    }
}

#[test]
fn s_values_positive_and_below_tau() {
    for cfg in builtins() {
        let engine = DeltaEngine::for_builtin(&cfg.name).unwrap();
        for c in cfg.curves() {
            let s = engine.s_curve(&c.id).unwrap();
            let tau = &engine.decomposition(&c.id).unwrap().tau;
            assert!(s.is_positive(), "{}/{}", cfg.name, c.id);
            assert!(tau.is_positive(), "{}/{}", cfg.name, c.id);
            assert!(s < tau, "{}/{}: S = {s}, tau = {tau}", cfg.name, c.id);
        }
    }
}

#[test]
fn flag_functional_dominates_generic_point() {
    // adding the non-negative (N.A)_P term can only increase S(W^A;P)
    for name in ["A1", "A3A1", "D5", "E6"] {
        let engine = DeltaEngine::for_builtin(name).unwrap();
        let cfg = engine.cfg;
        let strata = cfg.strata();
        for c in cfg.curves() {
            let generic = strata
                .iter()
                .find(|s| s.kind == delta_dp3::config::StratumKind::CurveGeneric(c.id.clone()))
                .unwrap();
            let base = engine.s_flag(&c.id, generic).unwrap();
            for p in cfg.points() {
                if p.multiplicity_of(&c.id).is_none() {
                    continue;
                }
                let st = strata
                    .iter()
                    .find(|s| s.kind == delta_dp3::config::StratumKind::AtPoint(p.id.clone()))
                    .unwrap();
                let refined = engine.s_flag(&c.id, st).unwrap();
                assert!(
                    refined >= base,
                    "{name}/{} at {}: {refined} < {base}",
                    c.id,
                    p.id
                );
            }
        }
    }
}

#[test]
fn estimation_one_internal_consistency() {
    // whenever 1/S_S(A) <= 1/S(W^A;P) for some curve through the stratum,
    // the stratum is exact with value 1/S_S(A)
    for cfg in builtins() {
        let engine = DeltaEngine::for_builtin(&cfg.name).unwrap();
        let cert = engine.global_delta().unwrap();
        for b in &cert.strata {
            if b.imported {
                continue;
            }
            let upper = b.upper.as_ref().unwrap();
            assert!(&b.lower <= upper, "{}: sandwich violated", cfg.name);
            // witness curve attains the upper bound
            let w = b.witness_curve.as_ref().unwrap();
            let s = engine.s_curve(w).unwrap();
            assert_eq!(&(rint(1) / s), upper, "{}: witness mismatch", cfg.name);
        }
        // every stratum attaining the global minimum is exact
        if let Some(g) = cert.global() {
            for b in &cert.strata {
                if !b.imported && b.upper.as_ref() == Some(g) && &b.lower == g {
                    assert!(b.exact);
                }
            }
        }
    }
}

#[test]
fn flag_dominated_curve_strata_are_exact() {
    // whenever S(W^A;P) <= S_S(A) at the generic point of A, estimation (1)
    // closes and the stratum value is exactly 1/S_S(A)
    for cfg in builtins() {
        let engine = DeltaEngine::for_builtin(&cfg.name).unwrap();
        for st in cfg.strata() {
            let curve = match &st.kind {
                delta_dp3::config::StratumKind::CurveGeneric(c) => c.clone(),
                _ => continue,
            };
            let s = engine.s_curve(&curve).unwrap().clone();
            let flag = engine.s_flag(&curve, &st).unwrap();
            let bound = engine.delta_bounds(&st).unwrap();
            if flag <= s {
                assert!(bound.exact, "{}/{curve}", cfg.name);
                assert_eq!(bound.lower, rint(1) / &s, "{}/{curve}", cfg.name);
            } else {
                assert!(!bound.exact, "{}/{curve}", cfg.name);
            }
        }
    }
}

#[test]
fn certificates_mark_all_attaining_strata() {
    for cfg in builtins() {
        let engine = DeltaEngine::for_builtin(&cfg.name).unwrap();
        let cert = engine.global_delta().unwrap();
        assert!(cert.exact, "{}", cfg.name);
        let g = cert.global().unwrap().clone();
        let want: Vec<String> = cert
            .strata
            .iter()
            .filter(|b| b.exact && b.lower == g)
            .map(|b| b.stratum.label())
            .collect();
        assert_eq!(cert.attaining, want, "{}", cfg.name);
        assert!(!cert.attaining.is_empty(), "{}", cfg.name);
    }
}

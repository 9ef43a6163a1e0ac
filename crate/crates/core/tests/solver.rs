use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use abcd_cnoidal::cn_expr::{build_h_system, Constants};
use abcd_cnoidal::families::*;
use abcd_cnoidal::poly::{parse_rational, Var};
use abcd_cnoidal::residual::ode_residual;
use abcd_cnoidal::solver::*;

fn fig2a_pins() -> BTreeMap<Var, f64> {
    BTreeMap::from([(Var::M, FRAC_1_SQRT_2), (Var::Lambda, 1.0), (Var::Sigma, 1.0)])
}

fn numeric(p: &ParameterSet) -> Constants {
    Constants::numeric(p.a.clone(), p.b.clone(), p.c.clone(), p.d.clone())
}

#[test]
fn rediscovers_both_sign_branches() {
    let p = ParameterSet::parse("1", "-8/3", "1", "1").unwrap();
    let sys = quadratic_system(&p, &fig2a_pins()).unwrap();
    let set = multistart(&sys, 2000, &SamplerRanges::default(), 42, &NewtonOptions::default());
    for pm in [Pm::Top, Pm::Bottom] {
        let want = build_4_1_2(&p, 1.0, 1.0, FRAC_1_SQRT_2, pm).unwrap();
        let hit = set.non_trivial().any(|r| sys.solution(&r.values).unwrap().coefficient_distance(&want) <= 1e-8);
        assert!(hit, "{pm:?} branch missing from {set:?}");
    }
    for r in set.non_trivial() {
        let s = sys.solution(&r.values).unwrap();
        assert!(ode_residual(&s, &p, 1024).unwrap().relative <= 1e-9, "{r:?}");
    }
}

#[test]
fn reduced_quartic_system_contains_the_closed_form() {
    let p = ParameterSet::parse("0", "1/6", "0", "1/6").unwrap();
    let sys = build_h_system(4, 2, &numeric(&p)).unwrap().restrict_zero(&[Var::J(1), Var::J(3), Var::K(1)]);
    let pins = BTreeMap::from([(Var::M, 0.9), (Var::Lambda, 1.0), (Var::Sigma, 1.0)]);
    let num = pin_and_square(&sys, &pins).unwrap();
    assert_eq!((num.n_equations(), num.unknowns().len()), (5, 5));
    let set = multistart(&num, 500, &SamplerRanges::default(), 1, &NewtonOptions::default());
    let want = figure("3b").unwrap().build().unwrap();
    assert!(set.non_trivial().any(|r| num.solution(&r.values).unwrap().coefficient_distance(&want) <= 1e-8), "{set:?}");
}

#[test]
fn no_branches_when_the_radicand_is_negative() {
    let p = ParameterSet::parse("-10", "2", "10", "1").unwrap();
    assert!(build_4_1_2(&p, 1.0, 0.1, 0.5, Pm::Top).is_err());
    let sys = build_h_system(2, 2, &numeric(&p)).unwrap().restrict_zero(&[Var::J(1), Var::K(1)]);
    let pins = BTreeMap::from([(Var::M, 0.5), (Var::Lambda, 1.0), (Var::Sigma, 0.1)]);
    let num = pin_and_square(&sys, &pins).unwrap();
    let set = multistart(&num, 500, &SamplerRanges::default(), 5, &NewtonOptions::default());
    assert_eq!(set.non_trivial().count(), 0, "{set:?}");
}

#[test]
fn newton_converges_quadratically_near_a_root() {
    let p = ParameterSet::parse("1", "-8/3", "1", "1").unwrap();
    let sys = quadratic_system(&p, &fig2a_pins()).unwrap();
    let exact = sys.seed_from(&build_4_1_2(&p, 1.0, 1.0, FRAC_1_SQRT_2, Pm::Bottom).unwrap());
    let seed: Vec<f64> = exact.iter().map(|x| x * 1.05 + 0.01).collect();
    let opts = NewtonOptions { record_history: true, ..NewtonOptions::default() };
    let root = solve_newton(&sys, &seed, &opts).unwrap();
    let errors: Vec<f64> = root
        .history
        .iter()
        .map(|x| x.iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
        .filter(|e| *e > 1e-13)
        .collect();
    assert!(errors.len() >= 4, "{errors:?}");
    for w in errors[errors.len() - 4..].windows(2) {
        assert!(w[1] / (w[0] * w[0]) < 10.0, "{errors:?}");
    }
}

#[test]
fn multistart_is_reproducible() {
    let p = ParameterSet::parse("1", "-8/3", "1", "1").unwrap();
    let sys = quadratic_system(&p, &fig2a_pins()).unwrap();
    let a = multistart(&sys, 300, &SamplerRanges::default(), 9, &NewtonOptions::default());
    let b = multistart(&sys, 300, &SamplerRanges::default(), 9, &NewtonOptions::default());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let back: BranchSet = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn pinning_j1_to_zero_finds_verified_roots() {
    let q = |s: &str| parse_rational(s).unwrap();
    let p = ParameterSet::new(q("1"), q("-1"), q("0"), q("1/3"));
    let sys = build_h_system(4, 2, &numeric(&p)).unwrap();
    let num = pin_and_square(&sys, &BTreeMap::from([(Var::J(1), 0.0)])).unwrap();
    let set = multistart(&num, 300, &SamplerRanges::default(), 3, &NewtonOptions::default());
    let mut verified = 0;
    for r in set.non_trivial() {
        let s = num.solution(&r.values).unwrap();
        if s.sigma.abs() > 1e-6 && s.m > 1e-3 && s.m <= 1.0 && s.lambda > 1e-3 && num.confirm_root(&r.values).confirmed {
            assert!(ode_residual(&s, &p, 1024).unwrap().relative <= 1e-9, "{s:?}");
            verified += 1;
        }
    }
    assert!(verified > 0, "{set:?}");
}

#[test]
fn anchor_point_has_no_odd_eta_solution() {
    let mut cfg = NonexistenceConfig::standard(Var::J(1));
    cfg.grid_a = vec![parse_rational("1").unwrap()];
    cfg.grid_b = vec![parse_rational("-1").unwrap()];
    cfg.grid_d = vec![parse_rational("1/3").unwrap()];
    let report = reproduce_nonexistence(&cfg).unwrap();
    assert_eq!(report.grid_points, 1);
    assert!(report.counterexamples.is_empty() && report.inadmissible.is_empty(), "{report:?}");
    for near in &report.unconfirmed {
        assert!(near.residual <= 1e-12);
    }
    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<NonexistenceReport>(&json).unwrap(), report);
}

#[test]
fn underdetermined_systems_are_rejected() {
    let sys = build_h_system(2, 2, &Constants::numeric(parse_rational("1").unwrap(), parse_rational("2").unwrap(), parse_rational("3").unwrap(), parse_rational("4").unwrap())).unwrap();
    assert!(matches!(pin_and_square(&sys, &BTreeMap::new()), Err(abcd_cnoidal::Error::Underdetermined { deficit: 1 })));
}

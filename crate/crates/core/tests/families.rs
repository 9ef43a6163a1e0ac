mod common;

use abcd_cnoidal::families::*;
use abcd_cnoidal::poly::{parse_rational, rat};
use abcd_cnoidal::residual::{ode_residual, periodicity_check};
use abcd_cnoidal::Error;
use approx::assert_abs_diff_eq;
use common::{accepted, is_constant, perturbations, scaled_perturbations, FAMILIES};

fn relative(s: &SolutionParams, p: &ParameterSet) -> f64 {
    ode_residual(s, p, 1024).unwrap().relative
}

#[test]
fn every_figure_solves_the_system() {
    for f in figures() {
        let s = f.build().unwrap();
        let r = relative(&s, &f.inputs.parameters());
        assert!(r <= 1e-9, "figure {}: {r:e}", f.name);
    }
}

#[test]
fn random_accepted_inputs_solve_the_system() {
    for (i, tag) in FAMILIES.iter().enumerate() {
        for (inputs, s) in accepted(*tag, 200, 100 + i as u64) {
            let r = relative(&s, &inputs.parameters());
            assert!(r <= 1e-9, "{inputs:?} m={}: {r:e}", s.m);
        }
    }
}

#[test]
fn perturbed_figure_coefficients_are_detected() {
    for f in figures() {
        let s = f.build().unwrap();
        for (name, t) in perturbations(&s, 1e-4) {
            let r = relative(&t, &f.inputs.parameters());
            assert!(r > 1e-6, "figure {}, {name}: {r:e}", f.name);
        }
    }
}

#[test]
fn perturbed_random_coefficients_are_detected() {
    for (i, tag) in FAMILIES.iter().enumerate() {
        for (inputs, s) in accepted(*tag, 40, 200 + i as u64).into_iter().filter(|(_, s)| !is_constant(s)) {
            for (name, t) in scaled_perturbations(&s, 1e-4) {
                let r = relative(&t, &inputs.parameters());
                assert!(r > 1e-6, "{inputs:?}, {name}: {r:e}");
            }
        }
    }
}

#[test]
fn small_coefficients_escape_relative_perturbation() {
    // j0 is four orders below the other coefficients, so moving it by 1e-4 of
    // itself barely registers against the largest term.
    let p = ParameterSet::parse("4/5", "-5/6", "10", "2").unwrap();
    let s = build_4_1_2(&p, 1.1734811781029533, 1.8096440168656576, 0.48560053282673377, Pm::Top).unwrap();
    assert!(s.j[0].abs() < 1e-3 && s.k[0].abs() > 10.0);
    let (_, t) = perturbations(&s, 1e-4).into_iter().next().unwrap();
    let weak = relative(&t, &p);
    let (_, t) = scaled_perturbations(&s, 1e-4).into_iter().next().unwrap();
    assert!(weak < 1e-8, "{weak:e}");
    assert!(relative(&t, &p) > 1e-6);
}

#[test]
fn mixing_sign_branches_fails() {
    let f = figure("2a").unwrap();
    let p = f.inputs.parameters();
    let top = build_4_1_2(&p, 1.0, 1.0, f.m, Pm::Top).unwrap();
    let bottom = build_4_1_2(&p, 1.0, 1.0, f.m, Pm::Bottom).unwrap();
    assert!(relative(&bottom, &p) <= 1e-9);
    let mixed = SolutionParams { k: bottom.k, ..top };
    assert!(relative(&mixed, &p) > 1e-3);
}

#[test]
fn s411_sign_choices_all_pass() {
    let p = ParameterSet::parse("-5/6", "1", "-5/6", "1").unwrap();
    for s in build_4_1_1_all(&p, 0.75).unwrap() {
        assert!(relative(&s, &p) <= 1e-9, "{:?}", s.branch);
    }
    let p = ParameterSet::parse("-7", "2", "4/3", "4").unwrap();
    for s in build_4_1_1_all(&p, 0.25).unwrap() {
        assert!(relative(&s, &p) <= 1e-9, "{:?}", s.branch);
    }
}

#[test]
fn domain_errors() {
    let any = ParameterSet::parse("-5/6", "1", "-5/6", "1").unwrap();
    let e = build_4_1_1(&any, std::f64::consts::FRAC_1_SQRT_2, Sign::Plus, Sign::Plus).unwrap_err();
    assert!(matches!(e, Error::Domain(ref msg) if msg.contains("2m^2 - 1")), "{e}");
    let neg = ParameterSet::parse("-10", "2", "10", "1").unwrap();
    assert!(matches!(build_4_1_2(&neg, 1.0, 0.1, 0.5, Pm::Top), Err(Error::Domain(_))));
    let q = ParameterSet::parse("1", "1/4", "0", "1").unwrap();
    assert!(matches!(build_4_2_1(&q, 1.0, 1.0, 0.5), Err(Error::Domain(_))));
    let r = ParameterSet::parse("1", "2", "0", "1").unwrap();
    assert!(matches!(build_4_2_2(&r, 1.0, 1.0, 0.5), Err(Error::Domain(_))));
    for m in [0.0, -0.5, 1.5, f64::NAN] {
        assert!(build_4_3(&rat(2, 1), 1.0, 1.0, m).is_err(), "m = {m}");
    }
    assert!(build_4_3(&rat(2, 1), 0.0, 1.0, 0.5).is_err());
    assert!(build_4_3(&rat(2, 1), 1.0, 0.0, 0.5).is_err());
}

#[test]
fn flat_eta_members_coincide() {
    let fig2b = figure("2b").unwrap().build().unwrap();
    let s43 = build_4_3(&rat(2, 1), 0.5, -1.0 / 3.0, 0.25).unwrap();
    assert!(fig2b.coefficient_distance(&s43) <= 1e-14);

    let fig4b = figure("4b").unwrap().build().unwrap();
    assert_eq!(fig4b.j[2], 0.0);
    let s43 = build_4_3(&rat(2, 1), 2.0, 0.125, 0.75).unwrap();
    assert!(fig4b.coefficient_distance(&s43) <= 1e-12);
    assert_abs_diff_eq!(s43.k[0], -0.375, epsilon = 1e-15);
    assert_abs_diff_eq!(s43.k[2], 6.75, epsilon = 1e-15);

    let flat = build_4_3(&rat(0, 1), 1.3, 0.7, 0.4).unwrap();
    assert_eq!((flat.k[0], flat.k[2]), (0.7, 0.0));
}

#[test]
fn quartic_family_at_figure_3a() {
    let s = figure("3a").unwrap().build().unwrap();
    assert_abs_diff_eq!(s.j[4], -15.0 / 4.0, epsilon = 1e-14);
    assert_abs_diff_eq!(s.k[2], 2.5, epsilon = 1e-14);
}

#[test]
fn periodicity_follows_odd_terms() {
    let s = figure("1b").unwrap().build().unwrap();
    let r = periodicity_check(&s).unwrap();
    assert!(r.defect <= 1e-10 && !r.half_periodic, "{r:?}");
    let s = figure("4b").unwrap().build().unwrap();
    let r = periodicity_check(&s).unwrap();
    assert!(r.defect <= 1e-10 && r.half_periodic, "{r:?}");
}

#[test]
fn solitary_limits_are_sech_waves() {
    for name in ["5a", "6a", "6b"] {
        let f = figure(name).unwrap();
        let sol = m1_limit(&f.inputs).unwrap();
        let r = relative(&sol.as_solution(), &f.inputs.parameters());
        assert!(r <= 1e-9, "{name}: {r:e}");
        let (eta, w) = sol.profile(0.3);
        let (e2, w2) = sol.as_solution().profile(0.3).unwrap();
        assert_abs_diff_eq!(eta, e2, epsilon = 1e-12);
        assert_abs_diff_eq!(w, w2, epsilon = 1e-12);
    }
    let mixed = m1_limit(&figure("6b").unwrap().inputs).unwrap();
    assert!(mixed.j_bar[1] != 0.0 && mixed.j_bar[2] != 0.0);
}

#[test]
fn physical_constraint_is_informational() {
    let fig1a = figure("1a").unwrap();
    assert!(check_physical_constraint(&fig1a.inputs.parameters()).is_ok());
    let fig2a = figure("2a").unwrap();
    assert!(matches!(check_physical_constraint(&fig2a.inputs.parameters()), Err(Error::Constraint(_))));
    assert!(fig2a.build().is_ok());
}

#[test]
fn solution_json_round_trip() {
    for f in figures() {
        let s = f.build().unwrap();
        let back: SolutionParams = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let inputs: FamilyInputs = serde_json::from_str(&serde_json::to_string(&f.inputs).unwrap()).unwrap();
        assert_eq!(inputs, f.inputs);
    }
    assert_eq!(parse_rational("-8/3").unwrap(), rat(-8, 3));
}

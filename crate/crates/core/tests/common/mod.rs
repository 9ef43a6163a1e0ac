//! Shared fixtures: random accepted family inputs and the classification grid.
#![allow(dead_code)]

use abcd_cnoidal::families::{FamilyInputs, FamilyTag, ParameterSet, Pm, Sign, SolutionParams};
use abcd_cnoidal::poly::rat;
use abcd_cnoidal::reduction::ShapeKind;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FAMILIES: [FamilyTag; 5] = [FamilyTag::S411, FamilyTag::S412, FamilyTag::S421, FamilyTag::S422, FamilyTag::S43];

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.gen_range(-12..=12), rng.gen_range(1..=6))
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let q = small_rational(rng);
        if q != rat(0, 1) {
            return q;
        }
    }
}

fn wave(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let lambda = rng.gen_range(0.2..3.0);
    let sigma = rng.gen_range(0.1..3.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let m = rng.gen_range(0.05..=1.0);
    (lambda, sigma, m)
}

fn sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen::<bool>() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// One candidate draw; may violate the family's validity predicate.
pub fn draw(tag: FamilyTag, rng: &mut ChaCha8Rng) -> (FamilyInputs, f64) {
    let (lambda, sigma, m) = wave(rng);
    let zero = rat(0, 1);
    match tag {
        FamilyTag::S411 => {
            let params = ParameterSet::new(small_rational(rng), small_rational(rng), nonzero_rational(rng), small_rational(rng));
            (FamilyInputs::S411 { params, tau1: sign(rng), tau2: sign(rng) }, m)
        }
        FamilyTag::S412 => {
            let params = ParameterSet::new(small_rational(rng), small_rational(rng), nonzero_rational(rng), small_rational(rng));
            let pm = if rng.gen::<bool>() { Pm::Top } else { Pm::Bottom };
            (FamilyInputs::S412 { params, lambda, sigma, pm }, m)
        }
        FamilyTag::S421 => {
            let params = ParameterSet::new(small_rational(rng), small_rational(rng), zero, small_rational(rng));
            (FamilyInputs::S421 { params, lambda, sigma }, m)
        }
        FamilyTag::S422 => {
            let params = ParameterSet::new(small_rational(rng), small_rational(rng), zero, small_rational(rng));
            (FamilyInputs::S422 { params, lambda, sigma }, m)
        }
        _ => (FamilyInputs::S43 { d: small_rational(rng), lambda, sigma }, m),
    }
}

/// `n` inputs accepted by the family constructor, by rejection sampling.
pub fn accepted(tag: FamilyTag, n: usize, seed: u64) -> Vec<(FamilyInputs, SolutionParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut draws = 0;
    while out.len() < n {
        draws += 1;
        assert!(draws < 1000 * n, "acceptance rate too low for {tag:?}");
        let (inputs, m) = draw(tag, &mut rng);
        if let Ok(s) = inputs.build(m) {
            out.push((inputs, s));
        }
    }
    out
}

/// Both profiles constant: every perturbation of it is still a solution.
pub fn is_constant(s: &SolutionParams) -> bool {
    s.j[1..].iter().chain(&s.k[1..]).all(|v| *v == 0.0)
}

fn perturb_each(s: &SolutionParams, step: impl Fn(f64) -> f64) -> Vec<(String, SolutionParams)> {
    let mut out = Vec::new();
    for r in 0..s.j.len() {
        if s.j[r] != 0.0 {
            let mut t = s.clone();
            t.j[r] += step(s.j[r]);
            out.push((format!("j{r}"), t));
        }
    }
    for r in 0..s.k.len() {
        if s.k[r] != 0.0 {
            let mut t = s.clone();
            t.k[r] += step(s.k[r]);
            out.push((format!("k{r}"), t));
        }
    }
    out
}

/// A copy of `s` with each nonzero coefficient in turn scaled by `1 + rel`.
pub fn perturbations(s: &SolutionParams, rel: f64) -> Vec<(String, SolutionParams)> {
    perturb_each(s, |c| rel * c)
}

/// Like [`perturbations`], but each coefficient moves by `rel` times the
/// largest coefficient magnitude of `s`.
pub fn scaled_perturbations(s: &SolutionParams, rel: f64) -> Vec<(String, SolutionParams)> {
    let scale = s.coefficients().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    perturb_each(s, |c| rel * scale * c.signum())
}

/// 20 rational points covering the four regions of the shape table, with
/// the shape each must get.
pub fn classification_grid() -> Vec<(ParameterSet, ShapeKind)> {
    let p = |a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)| {
        ParameterSet::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1))
    };
    use ShapeKind::*;
    vec![
        (p((1, 1), (-8, 3), (1, 1), (1, 1)), GenericQuadratic),
        (p((-5, 6), (1, 1), (-5, 6), (1, 1)), GenericQuadratic),
        (p((-7, 1), (2, 1), (4, 3), (4, 1)), GenericQuadratic),
        (p((0, 1), (-1, 1), (-2, 3), (2, 1)), GenericQuadratic),
        (p((1, 3), (0, 1), (1, 6), (0, 1)), GenericQuadratic),
        (p((0, 1), (0, 1), (1, 2), (-1, 6)), SemiTrivialEtaConstant),
        (p((0, 1), (0, 1), (-2, 3), (2, 1)), SemiTrivialEtaConstant),
        (p((0, 1), (0, 1), (1, 7), (0, 1)), SemiTrivialEtaConstant),
        (p((0, 1), (0, 1), (-1, 1), (5, 3)), SemiTrivialEtaConstant),
        (p((0, 1), (0, 1), (3, 1), (1, 3)), SemiTrivialEtaConstant),
        (p((1, 1), (-1, 1), (0, 1), (1, 3)), QuarticEtaQuadraticW),
        (p((0, 1), (1, 6), (0, 1), (1, 6)), QuarticEtaQuadraticW),
        (p((-11, 3), (2, 1), (0, 1), (2, 1)), QuarticEtaQuadraticW),
        (p((0, 1), (0, 1), (0, 1), (1, 3)), QuarticEtaQuadraticW),
        (p((2, 5), (-1, 15), (0, 1), (0, 1)), QuarticEtaQuadraticW),
        (p((1, 3), (0, 1), (0, 1), (0, 1)), TrivialOnly),
        (p((0, 1), (0, 1), (0, 1), (0, 1)), TrivialOnly),
        (p((1, 1), (0, 1), (0, 1), (0, 1)), TrivialOnly),
        (p((5, 2), (0, 1), (0, 1), (0, 1)), TrivialOnly),
        (p((1, 9), (0, 1), (0, 1), (0, 1)), TrivialOnly),
    ]
}

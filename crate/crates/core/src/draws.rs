//! Seeded random ensembles for verification oracles and tests: positive
//! definite invariant coefficient sets with a controlled spectral gap.

use rand::Rng;

use crate::invariant::InvariantCoefficients;
use crate::model::{derive_params, PhysicalParams, Schedule};
use crate::spectral::{characteristic_invariants, omega_from_coefficients};

fn physical_near(rng: &mut impl Rng) -> InvariantCoefficients {
    let p = PhysicalParams {
        mu1: Schedule::constant(rng.random_range(0.3..3.0)),
        mu2: Schedule::constant(rng.random_range(0.3..3.0)),
        k1: Schedule::constant(rng.random_range(0.1..4.0)),
        k2: Schedule::constant(rng.random_range(0.1..4.0)),
        alpha01: Schedule::constant(rng.random_range(-2.0..2.0)),
        alpha02: Schedule::constant(rng.random_range(-2.0..2.0)),
        e: 1.0,
    };
    let f = 2.0 * derive_params(&p, 0.0).unwrap().hamiltonian_display();
    InvariantCoefficients::from_quadratic_form(&f).unwrap()
}

fn gapped(c: &InvariantCoefficients, rel_gap: f64) -> bool {
    if !c.is_positive_definite() {
        return false;
    }
    match characteristic_invariants(&omega_from_coefficients(c)) {
        Ok(ci) => ci.sigma1 - ci.sigma2 > rel_gap * ci.sigma1,
        Err(_) => false,
    }
}

/// Positive definite coefficients near a physical Hamiltonian form, all
/// ten entries perturbed, nondegenerate.
pub fn random_invariant(rng: &mut impl Rng) -> InvariantCoefficients {
    loop {
        let mut a = physical_near(rng).as_array();
        for x in &mut a {
            *x += rng.random_range(-0.05..0.05);
        }
        let c = InvariantCoefficients::from_array(a);
        if gapped(&c, 0.05) {
            return c;
        }
    }
}

/// No cross-mode couplings: u12 = v12 = w21 = w12 = 0 (the per-mode w11,
/// w22 stay free).
pub fn random_decoupled_invariant(rng: &mut impl Rng) -> InvariantCoefficients {
    loop {
        let c = InvariantCoefficients {
            u11: rng.random_range(0.5..3.0),
            u22: rng.random_range(0.5..3.0),
            v11: rng.random_range(0.5..3.0),
            v22: rng.random_range(0.5..3.0),
            w11: rng.random_range(-0.4..0.4),
            w22: rng.random_range(-0.4..0.4),
            u12: 0.0,
            v12: 0.0,
            w21: 0.0,
            w12: 0.0,
        };
        if gapped(&c, 0.05) {
            return c;
        }
    }
}

/// Cross-mode couplings at least `floor` in magnitude.
pub fn random_coupled_invariant(rng: &mut impl Rng, floor: f64) -> InvariantCoefficients {
    loop {
        let mut c = random_decoupled_invariant(rng);
        let s1 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        c.u12 = s1 * rng.random_range(floor..2.0 * floor);
        let s2 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        c.v12 = s2 * rng.random_range(floor..2.0 * floor);
        if gapped(&c, 0.05) {
            return c;
        }
    }
}

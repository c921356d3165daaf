//! Seeded random real forms for property suites.

use rand::seq::IteratorRandom;
use rand::Rng;

use crate::scalar::rat;

use super::coefficient::{gaussian, Coefficient, Monomial};
use super::{Ambient, BaseKind, Form};

pub const MAX_TERMS: usize = 6;
pub const MAX_X_DEGREE: u32 = 2;
pub const MAX_FREQ: i64 = 2;

fn random_legs<R: Rng>(rng: &mut R, coords: usize, k: usize) -> u64 {
    (0..coords)
        .choose_multiple(rng, k)
        .into_iter()
        .fold(0, |m, c| m | 1 << c)
}

fn random_monomial<R: Rng>(rng: &mut R, amb: Ambient) -> Monomial {
    let n = amb.n;
    let mut m = Monomial::one(n);
    let freq_from = match amb.base {
        BaseKind::Open => {
            for p in &mut m.x_pow {
                *p = rng.random_range(0..=MAX_X_DEGREE);
            }
            n
        }
        BaseKind::Torus => 0,
    };
    for k in &mut m.freq[freq_from..] {
        *k = rng.random_range(-MAX_FREQ..=MAX_FREQ);
    }
    m
}

/// A real coefficient: random terms together with their conjugate partners.
pub fn random_coefficient<R: Rng>(rng: &mut R, amb: Ambient, terms: usize) -> Coefficient {
    let mut c = Coefficient::zero();
    for _ in 0..terms {
        let m = random_monomial(rng, amb);
        let a = gaussian(
            rat(rng.random_range(-4..=4), rng.random_range(1..=3)),
            rat(rng.random_range(-4..=4), rng.random_range(1..=3)),
        );
        let mut partner = m.clone();
        partner.freq.iter_mut().for_each(|k| *k = -*k);
        c.add_term(partner, a.conj());
        c.add_term(m, a);
    }
    c
}

/// Random real `k`-form with at most [`MAX_TERMS`] terms before conjugate pairing.
pub fn random_form<R: Rng>(rng: &mut R, amb: Ambient, k: usize) -> Form {
    let mut f = Form::zero(amb);
    let terms = rng.random_range(1..=MAX_TERMS);
    for _ in 0..terms {
        let legs = random_legs(rng, amb.coords(), k);
        f.add_term(legs, random_coefficient(rng, amb, 1))
            .expect("generated within the ambient");
    }
    f
}

/// Random form of random degree `0..=2n`.
pub fn random_form_any_degree<R: Rng>(rng: &mut R, amb: Ambient) -> Form {
    let k = rng.random_range(0..=amb.coords());
    random_form(rng, amb, k)
}

/// `d(random (k-1)-form) + Σ c_I dz_I` with random constants `c_I`.
pub fn random_closed_form<R: Rng>(rng: &mut R, amb: Ambient, k: usize) -> Form {
    let mut f = if k == 0 {
        Form::zero(amb)
    } else {
        random_form(rng, amb, k - 1).d()
    };
    for _ in 0..rng.random_range(1..=3) {
        let legs = random_legs(rng, amb.coords(), k);
        let c = rat(rng.random_range(-5..=5), rng.random_range(1..=4));
        f = f.add(&Form::constant(amb, legs, super::real(c)));
    }
    f
}

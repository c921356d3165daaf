//! Seeded property suites over random forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::al_models::random_transition;
use crate::scalar::rat;

use super::integrate::{period, poincare_pairing_check, Cycle};
use super::pullback::transition_pullback_symplectic;
use super::random::{random_closed_form, random_form, random_form_any_degree};
use super::{real, Ambient, Form};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    pub max_dim: usize,
    pub forms: usize,
    pub closed_forms: usize,
    pub pairs: usize,
    pub transitions: usize,
    /// Runs the suites against a wedge product with the reordering sign dropped.
    pub mutate_wedge: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_dim: 3,
            forms: 500,
            closed_forms: 100,
            pairs: 200,
            transitions: 200,
            mutate_wedge: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Text of the first failing input.
    pub counterexample: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

pub const D_SQUARED: &str = "d∘d = 0";
pub const AVERAGE_COMMUTES: &str = "average∘d = d∘average";
pub const AVERAGE_PROJECTION: &str = "average is a projection onto invariant forms";
pub const LEIBNIZ: &str = "Leibniz rule";
pub const GRADED_COMMUTATIVITY: &str = "graded commutativity";
pub const PERIODS: &str = "periods of closed forms survive averaging";
pub const POINCARE: &str = "zero-section pairing with dy_n";
pub const SYMPLECTIC: &str = "symplectic pullback matches classification";

fn run_suite(
    name: &'static str,
    salt: u64,
    cfg: &SelftestConfig,
    cases: usize,
    check: impl Fn(&mut ChaCha8Rng) -> Option<String> + Sync,
) -> SuiteResult {
    let failures: Vec<(usize, String)> = (0..cases)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            rng.set_stream(i as u64);
            check(&mut rng).map(|c| (i, c))
        })
        .collect();
    SuiteResult {
        name,
        cases,
        failures: failures.len(),
        counterexample: failures.into_iter().min_by_key(|(i, _)| *i).map(|(_, c)| c),
    }
}

fn random_ambient(rng: &mut ChaCha8Rng, max_dim: usize) -> Ambient {
    let n = rng.random_range(1..=max_dim.max(1));
    if rng.random_bool(0.5) {
        Ambient::open(n)
    } else {
        Ambient::torus(n)
    }
}

fn quarter_point(rng: &mut ChaCha8Rng, coords: usize) -> Vec<crate::Rational> {
    (0..coords).map(|_| rat(rng.random_range(0..4), 4)).collect()
}

fn sign(k: usize) -> num_complex::Complex<crate::Rational> {
    real(rat(if k.is_multiple_of(2) { 1 } else { -1 }, 1))
}

/// Runs every suite; deterministic in `cfg`.
pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    let signed = !cfg.mutate_wedge;
    let wedge = move |a: &Form, b: &Form| a.wedge_with(b, signed).expect("same ambient");
    let max_dim = cfg.max_dim;
    let mut suites = Vec::new();

    suites.push(run_suite(D_SQUARED, 1, cfg, cfg.forms, |rng: &mut ChaCha8Rng| {
        let amb = random_ambient(rng, max_dim);
        let f = random_form_any_degree(rng, amb);
        (!f.d().d().is_zero()).then(|| f.to_string())
    }));

    suites.push(run_suite(
        AVERAGE_COMMUTES,
        2,
        cfg,
        cfg.forms,
        |rng: &mut ChaCha8Rng| {
            let amb = random_ambient(rng, max_dim);
            let f = random_form_any_degree(rng, amb);
            (f.d().average() != f.average().d()).then(|| f.to_string())
        },
    ));

    suites.push(run_suite(
        AVERAGE_PROJECTION,
        3,
        cfg,
        cfg.forms,
        |rng: &mut ChaCha8Rng| {
            let amb = random_ambient(rng, max_dim);
            let f = random_form_any_degree(rng, amb);
            let av = f.average();
            let ok = av.average() == av && av.is_invariant() && (av == f) == f.is_invariant();
            (!ok).then(|| f.to_string())
        },
    ));

    suites.push(run_suite(LEIBNIZ, 4, cfg, cfg.pairs, |rng: &mut ChaCha8Rng| {
        let amb = random_ambient(rng, max_dim);
        let p = rng.random_range(0..=amb.coords());
        let f = random_form(rng, amb, p);
        let g = random_form_any_degree(rng, amb);
        let lhs = wedge(&f, &g).d();
        let rhs = wedge(&f.d(), &g).add(&wedge(&f, &g.d()).scale(&sign(p)));
        (lhs != rhs).then(|| format!("f = {f}; g = {g}"))
    }));

    suites.push(run_suite(
        GRADED_COMMUTATIVITY,
        5,
        cfg,
        cfg.pairs,
        |rng: &mut ChaCha8Rng| {
            let amb = random_ambient(rng, max_dim);
            let p = rng.random_range(0..=amb.coords());
            let q = rng.random_range(0..=amb.coords());
            let f = random_form(rng, amb, p);
            let g = random_form(rng, amb, q);
            (wedge(&f, &g) != wedge(&g, &f).scale(&sign(p * q))).then(|| format!("f = {f}; g = {g}"))
        },
    ));

    suites.push(run_suite(PERIODS, 6, cfg, cfg.closed_forms, |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(1..=max_dim.max(1));
        let amb = Ambient::torus(n);
        let k = rng.random_range(0..=n);
        let alpha = random_closed_form(rng, amb, k);
        let av = alpha.average();
        let base = quarter_point(rng, amb.coords());
        let bad = Cycle::all(amb.coords(), k, &base)
            .iter()
            .any(|c| !matches!((period(&alpha, c), period(&av, c)), (Ok(a), Ok(b)) if a == b));
        bad.then(|| alpha.to_string())
    }));

    suites.push(run_suite(POINCARE, 7, cfg, cfg.closed_forms, |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(1..=max_dim.max(1));
        let alpha = random_closed_form(rng, Ambient::torus(n), n).average();
        let ok = poincare_pairing_check(&alpha).is_ok_and(|c| c.equal);
        (!ok).then(|| alpha.to_string())
    }));

    suites.push(run_suite(
        SYMPLECTIC,
        8,
        cfg,
        cfg.transitions,
        |rng: &mut ChaCha8Rng| {
            let n = rng.random_range(1..=max_dim.max(1));
            let tr = random_transition(rng, n);
            let pulled = match transition_pullback_symplectic(&tr) {
                Ok(p) => p,
                Err(e) => return Some(format!("{tr:?}: {e}")),
            };
            let preserved = pulled == Form::symplectic(Ambient::open(n));
            (preserved != tr.is_symplectomorphism()).then(|| format!("{tr:?}; pullback = {pulled}"))
        },
    ));

    SelftestReport { suites }
}

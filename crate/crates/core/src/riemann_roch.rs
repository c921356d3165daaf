//! The equality chain `RR(M) = vol(M) = vol(B) = |B_Z| = |BS|` as one report.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::affine::AffineTier;
use crate::al_models::bohr_sommerfeld_set;
use crate::dual_bundle::{intersection_count, intersection_number, BundleSection, SectionKind, TorusBundleChart};
use crate::error::Result;
use crate::quotient::{McEstimate, QuotientPresentation};
use crate::scalar::Scalar;
use crate::Rational;

/// Tiling samples drawn by [`verify_all`].
pub const TILING_SAMPLES: usize = 2048;

pub const RR_METHOD: &str = "RR via trivial Todd class: RR(M) = vol(M) = vol(B)";

/// `RR(M)`, which for these manifolds reduces to the base volume.
pub fn riemann_roch_number(q: &QuotientPresentation) -> Result<Rational> {
    q.require_tier(AffineTier::IntegralAffine)?;
    Ok(q.volume())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passes {
    /// `vol(B) = |B_Z|`.
    pub downstairs: bool,
    /// `BS = B_Z` as point sets.
    pub bs_equals_lattice: bool,
    /// `RR(M) = |BS|`.
    pub upstairs: bool,
    /// `(−1)^n · (Λ^aff · Z_0) = vol(B)`, unsigned for non-orientable bases.
    pub intersection: bool,
}

impl Passes {
    pub fn all(&self) -> bool {
        self.downstairs && self.bs_equals_lattice && self.upstairs && self.intersection
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingSummary {
    pub samples: usize,
    pub uncovered: usize,
    pub overcovered: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub seed: u64,
    #[serde(flatten)]
    pub estimate: McEstimate,
    pub contains_exact: bool,
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub volume_ms: f64,
    pub integral_points_ms: f64,
    pub bohr_sommerfeld_ms: f64,
    pub intersection_ms: f64,
    pub monte_carlo_ms: f64,
    pub tiling_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub label: String,
    pub n: usize,
    pub word_bound: usize,
    #[serde(rename = "vol_B", with = "crate::io::rational_str")]
    pub vol_b: Rational,
    #[serde(rename = "count_BZ")]
    pub count_bz: usize,
    #[serde(rename = "count_BS")]
    pub count_bs: usize,
    #[serde(with = "crate::io::rational_str")]
    pub rr: Rational,
    pub rr_method: String,
    pub orientable: bool,
    pub intersection_signed: Option<i64>,
    pub intersection_unsigned: usize,
    pub monte_carlo: Option<MonteCarloSummary>,
    pub tiling: TilingSummary,
    pub passes: Passes,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub timings: Timings,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.passes.all()
    }
}

fn timed<T>(slot: &mut f64, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed().as_secs_f64() * 1e3;
    out
}

/// Runs every stage on `q`. `mc_samples = 0` skips the Monte Carlo cross-check.
pub fn verify_all(
    q: &QuotientPresentation,
    word_bound: usize,
    mc_samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    q.require_tier(AffineTier::IntegralIntegralAffine)?;
    let n = q.dim();
    let mut t = Timings::default();
    let mut warnings = Vec::new();

    let vol_b = timed(&mut t.volume_ms, || q.volume());
    let rr = riemann_roch_number(q)?;
    assert_eq!(rr, vol_b, "RR is defined as the base volume");

    let lattice = timed(&mut t.integral_points_ms, || q.integral_points(word_bound))?;
    let bs = timed(&mut t.bohr_sommerfeld_ms, || bohr_sommerfeld_set(q, word_bound))?;

    let orientable = q.is_orientable();
    let (signed, unsigned) = timed(&mut t.intersection_ms, || -> Result<_> {
        let chart = TorusBundleChart::over(q);
        let d = BundleSection::of_kind(SectionKind::AffineLattice, n);
        let z = BundleSection::of_kind(SectionKind::Zero, n);
        let signed = if orientable {
            Some(intersection_number(&d, &z, &chart, q, word_bound)?)
        } else {
            None
        };
        Ok((signed, intersection_count(&d, &z, &chart, q, word_bound)?))
    })?;

    let monte_carlo = (mc_samples > 0).then(|| {
        timed(&mut t.monte_carlo_ms, || {
            let estimate = q.monte_carlo_volume(mc_samples, seed);
            let contains_exact = estimate.contains(vol_b.approx_f64());
            MonteCarloSummary {
                seed,
                estimate,
                contains_exact,
            }
        })
    });
    if let Some(mc) = &monte_carlo {
        if !mc.contains_exact {
            warnings.push(format!(
                "Monte Carlo interval [{}, {}] misses the exact volume {}",
                mc.estimate.lower, mc.estimate.upper, vol_b
            ));
        }
    }

    let tiling = timed(&mut t.tiling_ms, || q.validate_tiling(TILING_SAMPLES, word_bound, seed))?;
    if !tiling.is_clean() {
        warnings.push(format!(
            "tiling validation: {} of {} samples uncovered, {} covered more than once",
            tiling.uncovered(),
            tiling.samples,
            tiling.overcovered()
        ));
    }

    let count = |k: usize| Rational::from_integer(k.into());
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let intersection = match signed {
        Some(s) => Rational::from_integer((sign * s).into()) == vol_b,
        None => count(unsigned) == vol_b,
    };
    let passes = Passes {
        downstairs: count(lattice.len()) == vol_b,
        bs_equals_lattice: bs == lattice,
        upstairs: count(bs.len()) == rr,
        intersection,
    };
    if !orientable {
        warnings.push("base is not orientable: intersection reported as an unsigned count".into());
    }

    Ok(VerificationReport {
        label: q.label().to_string(),
        n,
        word_bound,
        vol_b,
        count_bz: lattice.len(),
        count_bs: bs.len(),
        rr,
        rr_method: RR_METHOD.into(),
        orientable,
        intersection_signed: signed,
        intersection_unsigned: unsigned,
        monte_carlo,
        tiling: TilingSummary {
            samples: tiling.samples,
            uncovered: tiling.uncovered(),
            overcovered: tiling.overcovered(),
        },
        passes,
        warnings,
        notes: vec![
            "independence of the Bohr-Sommerfeld count from the choice of fibration, line bundle and magnetic term is implied by bs_equals_lattice".into(),
        ],
        timings: t,
    })
}

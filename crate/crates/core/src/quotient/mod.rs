//! Quotients `B = R^n / Γ` presented by generators and a half-open fundamental domain.

mod builtin;
mod io;
mod polytope;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use builtin::{builtin_presentation, BUILTIN_NAMES};
pub use io::PresentationFile;
pub use polytope::{Halfspace, McEstimate, Polytope};

use crate::affine::{group_ball, AffineTier};
use crate::error::{Error, Result};
use crate::{RAffineMap, RVector, Rational};

/// Integer points of `B`, one canonical representative per Γ-orbit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LatticePointSet {
    points: BTreeSet<RVector>,
}

impl LatticePointSet {
    pub fn new(points: BTreeSet<RVector>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &RVector) -> bool {
        self.points.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &RVector> {
        self.points.iter()
    }

    pub fn points(&self) -> &BTreeSet<RVector> {
        &self.points
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TilingFailure {
    #[serde(serialize_with = "crate::io::ser_rvector")]
    pub point: RVector,
    /// Orbit points found inside the domain (should be exactly one).
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TilingReport {
    pub samples: usize,
    pub word_bound: usize,
    pub failures: Vec<TilingFailure>,
}

impl TilingReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn uncovered(&self) -> usize {
        self.failures.iter().filter(|f| f.hits == 0).count()
    }

    pub fn overcovered(&self) -> usize {
        self.failures.iter().filter(|f| f.hits > 1).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPresentation {
    dim: usize,
    label: String,
    generators: Vec<RAffineMap>,
    domain: Polytope,
}

impl QuotientPresentation {
    pub fn new(label: impl Into<String>, generators: Vec<RAffineMap>, domain: Polytope) -> Result<Self> {
        let dim = domain.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::Shape(format!(
                "generator of dim {} for a domain of dim {dim}",
                g.dim()
            )));
        }
        Ok(Self {
            dim,
            label: label.into(),
            generators,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[RAffineMap] {
        &self.generators
    }

    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    /// Weakest tier among the generators (IIA for the trivial group).
    pub fn tier(&self) -> AffineTier {
        self.generators
            .iter()
            .map(RAffineMap::classify)
            .min()
            .unwrap_or(AffineTier::IntegralIntegralAffine)
    }

    pub fn require_tier(&self, expected: AffineTier) -> Result<()> {
        let found = self.tier();
        if found < expected {
            return Err(Error::Tier { found, expected });
        }
        Ok(())
    }

    /// All generators preserve orientation.
    pub fn is_orientable(&self) -> bool {
        self.generators.iter().all(|g| g.orientation() == 1)
    }

    /// Group elements of word length at most `word_bound` that can carry some
    /// point of the box `[lo, hi]` into the closure of the domain.
    fn reaching_elements(&self, lo: &[Rational], hi: &[Rational], word_bound: usize) -> Result<Vec<RAffineMap>> {
        let (dlo, dhi) = self.domain.bounding_box();
        let corners: Vec<RVector> = (0..1usize << self.dim)
            .map(|mask| {
                RVector::new(
                    (0..self.dim)
                        .map(|i| {
                            if mask >> i & 1 == 1 {
                                hi[i].clone()
                            } else {
                                lo[i].clone()
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        let mut out = Vec::new();
        for g in group_ball(&self.generators, word_bound)? {
            let images = corners.iter().map(|c| g.apply(c)).collect::<Result<Vec<_>>>()?;
            let meets = (0..self.dim).all(|i| {
                let lo_i = images.iter().map(|p| &p[i]).min().expect("at least one corner");
                let hi_i = images.iter().map(|p| &p[i]).max().expect("at least one corner");
                *lo_i <= dhi[i] && *hi_i >= dlo[i]
            });
            if meets {
                out.push(g);
            }
        }
        if out.is_empty() {
            out.push(RAffineMap::identity(self.dim));
        }
        Ok(out)
    }

    fn representative_among(&self, elements: &[RAffineMap], x: &RVector) -> Result<Option<RVector>> {
        let mut best: Option<RVector> = None;
        for g in elements {
            let p = g.apply(x)?;
            if self.domain.contains(&p) && best.as_ref().is_none_or(|b| p < *b) {
                best = Some(p);
            }
        }
        Ok(best)
    }

    /// Lexicographically smallest point of the (bounded) orbit of `x` inside the domain.
    pub fn canonical_representative(&self, x: &RVector, word_bound: usize) -> Result<Option<RVector>> {
        if x.dim() != self.dim {
            return Err(Error::Shape(format!(
                "point of dim {} in a {}-manifold",
                x.dim(),
                self.dim
            )));
        }
        let elements = self.reaching_elements(x.entries(), x.entries(), word_bound)?;
        self.representative_among(&elements, x)
    }

    /// Points `(m + shift) / denom`, `m ∈ Z^n`, inside the half-open domain.
    pub(crate) fn coset_points(&self, denom: &BigInt, shift: &RVector) -> Result<Vec<RVector>> {
        if denom.is_zero() {
            return Err(Error::Invalid("zero grid denominator".into()));
        }
        if shift.dim() != self.dim {
            return Err(Error::Shape("grid shift dimension".into()));
        }
        let d = Rational::from_integer(denom.clone());
        let (lo, hi) = self.domain.bounding_box();
        // m ranges over [lo·d − shift, hi·d − shift] (swapped when d < 0).
        let ranges: Vec<(BigInt, BigInt)> = (0..self.dim)
            .map(|i| {
                let a = &lo[i] * &d - &shift[i];
                let b = &hi[i] * &d - &shift[i];
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                (a.ceil().to_integer(), b.floor().to_integer())
            })
            .collect();
        let mut out = Vec::new();
        let mut m: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
        if ranges.iter().any(|(a, b)| a > b) {
            return Ok(out);
        }
        loop {
            let x = RVector::new(
                m.iter()
                    .zip(shift.entries())
                    .map(|(mi, s)| (Rational::from_integer(mi.clone()) + s) / &d)
                    .collect(),
            );
            if self.domain.contains(&x) {
                out.push(x);
            }
            let mut k = 0;
            loop {
                if k == self.dim {
                    return Ok(out);
                }
                if m[k] < ranges[k].1 {
                    m[k] += 1;
                    break;
                }
                m[k] = ranges[k].0.clone();
                k += 1;
            }
        }
    }

    /// Canonical representatives of the Γ-classes met by `candidates`.
    pub(crate) fn orbit_classes(&self, candidates: Vec<RVector>, word_bound: usize) -> Result<LatticePointSet> {
        let (lo, hi) = self.domain.bounding_box();
        let elements = self.reaching_elements(&lo, &hi, word_bound)?;
        let reps: Vec<RVector> = candidates
            .into_par_iter()
            .map(|p| self.representative_among(&elements, &p).map(|r| r.unwrap_or(p)))
            .collect::<Result<_>>()?;
        Ok(LatticePointSet::new(reps.into_iter().collect()))
    }

    /// The integral points `B_Z`.
    pub fn integral_points(&self, word_bound: usize) -> Result<LatticePointSet> {
        self.require_tier(AffineTier::IntegralIntegralAffine)?;
        let candidates = self.coset_points(&BigInt::from(1), &RVector::zeros(self.dim))?;
        self.orbit_classes(candidates, word_bound)
    }

    /// Exact volume of `B`, measured on the fundamental domain.
    pub fn volume(&self) -> Rational {
        self.domain.volume()
    }

    /// Statistical check that each orbit meets the half-open domain exactly once.
    ///
    /// Samples are rational points with denominator 2^16, uniform in the box
    /// of twice the domain's bounding-box width around the same centre.
    pub fn validate_tiling(&self, samples: usize, word_bound: usize, seed: u64) -> Result<TilingReport> {
        const CHUNK: usize = 64;
        const DENOM: i64 = 1 << 16;
        let (lo, hi) = self.domain.bounding_box();
        let lo2: Vec<Rational> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| l - (h - l) / Rational::from_integer(2.into()))
            .collect();
        let width: Vec<Rational> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (h - l) * Rational::from_integer(2.into()))
            .collect();
        let hi2: Vec<Rational> = lo2.iter().zip(&width).map(|(l, w)| l + w).collect();
        let elements = self.reaching_elements(&lo2, &hi2, word_bound)?;

        let chunks = samples.div_ceil(CHUNK);
        let per_chunk: Vec<Vec<TilingFailure>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let count = CHUNK.min(samples - c * CHUNK);
                let mut failures = Vec::new();
                for _ in 0..count {
                    let x = RVector::new(
                        (0..self.dim)
                            .map(|i| {
                                let k: i64 = rng.random_range(0..DENOM);
                                &lo2[i] + &width[i] * crate::scalar::rat(k, DENOM)
                            })
                            .collect(),
                    );
                    let mut inside = BTreeSet::new();
                    for g in &elements {
                        let p = g.apply(&x)?;
                        if self.domain.contains(&p) {
                            inside.insert(p);
                        }
                    }
                    let hits = inside.len();
                    if hits != 1 {
                        failures.push(TilingFailure { point: x, hits });
                    }
                }
                Ok(failures)
            })
            .collect::<Result<_>>()?;
        Ok(TilingReport {
            samples,
            word_bound,
            failures: per_chunk.into_iter().flatten().collect(),
        })
    }

    /// Hit-or-miss volume of the fundamental domain.
    pub fn monte_carlo_volume(&self, samples: u64, seed: u64) -> McEstimate {
        self.domain.monte_carlo_volume(samples, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn v(xs: &[i64]) -> RVector {
        RVector::from_i64(xs)
    }

    /// Brute-force oracle: integer points in the half-open box, no orbit logic.
    fn box_integer_points(lower: &[i64], upper: &[i64]) -> usize {
        lower.iter().zip(upper).map(|(l, u)| (u - l) as usize).product()
    }

    #[test]
    fn torus_points_match_enumeration_oracle() {
        let q = builtin_presentation("torus-2", 3).unwrap();
        let pts = q.integral_points(8).unwrap();
        assert_eq!(pts.len(), box_integer_points(&[0, 0], &[3, 3]));
        for i in 0..3 {
            for j in 0..3 {
                assert!(pts.contains(&v(&[i, j])));
            }
        }
    }

    #[test]
    fn klein_and_kt_single_point() {
        let k = builtin_presentation("klein", 1).unwrap();
        let pts: Vec<_> = k.integral_points(8).unwrap().iter().cloned().collect();
        assert_eq!(pts, vec![v(&[0, 0])]);
        let kt = builtin_presentation("kodaira-thurston", 1).unwrap();
        let pts: Vec<_> = kt.integral_points(8).unwrap().iter().cloned().collect();
        assert_eq!(pts, vec![v(&[0, 0, 0])]);
    }

    #[test]
    fn non_iia_generator_is_a_tier_error() {
        let domain = Polytope::half_open_box(&[int(0)], &[int(1)]).unwrap();
        let half = RAffineMap::translation_by(RVector::new(vec![rat(1, 2)]));
        let q = QuotientPresentation::new("half", vec![half], domain).unwrap();
        assert_eq!(
            q.integral_points(8),
            Err(Error::Tier {
                found: AffineTier::IntegralAffine,
                expected: AffineTier::IntegralIntegralAffine
            })
        );
    }

    #[test]
    fn broken_domain_identifies_points() {
        let q = broken_torus();
        assert_eq!(q.volume(), int(2));
        assert_eq!(q.integral_points(8).unwrap().len(), 1);
    }

    fn broken_torus() -> QuotientPresentation {
        let torus = builtin_presentation("torus-2", 1).unwrap();
        let domain = Polytope::half_open_box(&[int(0), int(0)], &[int(2), int(1)]).unwrap();
        QuotientPresentation::new("broken", torus.generators().to_vec(), domain).unwrap()
    }

    #[test]
    fn tiling_validation() {
        let torus = builtin_presentation("torus-2", 1).unwrap();
        assert!(torus.validate_tiling(200, 8, 0).unwrap().is_clean());
        let klein = builtin_presentation("klein", 1).unwrap();
        assert!(klein.validate_tiling(1000, 8, 0).unwrap().is_clean());
        let report = broken_torus().validate_tiling(200, 8, 0).unwrap();
        assert!(report.overcovered() > 0);
        assert_eq!(report.uncovered(), 0);
    }

    #[test]
    fn coset_points_for_half_grid() {
        let q = builtin_presentation("torus-1", 1).unwrap();
        let pts = q.coset_points(&BigInt::from(2), &RVector::zeros(1)).unwrap();
        assert_eq!(pts, vec![RVector::new(vec![int(0)]), RVector::new(vec![rat(1, 2)])]);
    }

    #[test]
    fn orientability() {
        assert!(builtin_presentation("kodaira-thurston", 2).unwrap().is_orientable());
        assert!(!builtin_presentation("klein", 2).unwrap().is_orientable());
    }
}

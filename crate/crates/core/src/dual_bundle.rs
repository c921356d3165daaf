//! The torus bundle `TB/Λ` with fibre coordinates `y` taken mod 1, and its
//! sections in the affine family `x ↦ (x, [S x + v])`, `S ∈ {0, ±I}`.
//!
//! Charts are oriented by `(x_1, …, x_n, y_1, …, y_n)`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::al_models::{holonomy_phase, EnhancedALModel, FibreLoop};
use crate::error::{Error, Result};
use crate::quotient::{LatticePointSet, Polytope, QuotientPresentation};
use crate::scalar::{frac, int, rat};
use crate::{RVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusBundleChart {
    base_domain: Polytope,
}

impl TorusBundleChart {
    pub fn new(base_domain: Polytope) -> Self {
        Self { base_domain }
    }

    pub fn over(q: &QuotientPresentation) -> Self {
        Self::new(q.domain().clone())
    }

    pub fn dim(&self) -> usize {
        self.base_domain.dim()
    }

    pub fn base_domain(&self) -> &Polytope {
        &self.base_domain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SectionKind {
    /// `s_0(x) = (x, [0])`.
    Zero,
    /// `s(x) = (x, [−x])`.
    AffineLattice,
    /// `s_L(x) = (x, [x])`, read off from the prequantum holonomy.
    Prequantization,
}

impl SectionKind {
    pub const ALL: [SectionKind; 3] = [Self::Zero, Self::AffineLattice, Self::Prequantization];

    pub fn name(self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::AffineLattice => "affine-lattice",
            Self::Prequantization => "prequantization",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// `x ↦ (x, [slope · x + shift])` with a scalar slope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleSection {
    slope: i64,
    shift: RVector,
}

impl BundleSection {
    pub fn new(slope: i64, shift: RVector) -> Result<Self> {
        if !(-1..=1).contains(&slope) {
            return Err(Error::Invalid(format!("section slope {slope} outside {{-1, 0, 1}}")));
        }
        Ok(Self { slope, shift })
    }

    pub fn of_kind(kind: SectionKind, n: usize) -> Self {
        let slope = match kind {
            SectionKind::Zero => 0,
            SectionKind::AffineLattice => -1,
            SectionKind::Prequantization => 1,
        };
        Self {
            slope,
            shift: RVector::zeros(n),
        }
    }

    pub fn slope(&self) -> i64 {
        self.slope
    }

    pub fn shift(&self) -> &RVector {
        &self.shift
    }

    pub fn kind(&self) -> Option<SectionKind> {
        if !self.shift.is_zero() {
            return None;
        }
        SectionKind::ALL
            .into_iter()
            .find(|k| Self::of_kind(*k, self.shift.dim()).slope == self.slope)
    }

    /// Fibre value `[S x + v]` in `[0, 1)^n`.
    pub fn fibre_value(&self, x: &RVector) -> Result<RVector> {
        let y = x.scale(&int(self.slope)).add(&self.shift)?;
        Ok(RVector::new(y.entries().iter().map(frac).collect()))
    }
}

fn check_dims(a: &BundleSection, b: &BundleSection, chart: &TorusBundleChart, q: &QuotientPresentation) -> Result<()> {
    let n = q.dim();
    if a.shift.dim() != n || b.shift.dim() != n || chart.dim() != n {
        return Err(Error::Shape(format!(
            "sections, chart and presentation must share dimension {n}"
        )));
    }
    Ok(())
}

/// Points of `B` over which the two sections meet, one per Γ-class.
pub fn section_coincidence_points(
    a: &BundleSection,
    b: &BundleSection,
    chart: &TorusBundleChart,
    q: &QuotientPresentation,
    word_bound: usize,
) -> Result<LatticePointSet> {
    check_dims(a, b, chart, q)?;
    let d = a.slope - b.slope;
    let w = a.shift.sub(&b.shift)?;
    if d == 0 {
        if w.is_integral() {
            return Err(Error::NonTransverse);
        }
        return Ok(LatticePointSet::default());
    }
    // d x + w ∈ Z^n  ⟺  x = (m − w) / d
    let candidates = q.coset_points(&BigInt::from(d), &w.neg())?;
    q.orbit_classes(candidates, word_bound)
}

/// Local sign of every intersection: the sign of `det(S_a − S_b) = d^n`.
pub fn local_sign(a: &BundleSection, b: &BundleSection) -> Result<i64> {
    let d = a.slope - b.slope;
    if d == 0 {
        return Err(Error::NonTransverse);
    }
    let n = a.shift.dim();
    Ok(if d < 0 && n % 2 == 1 { -1 } else { 1 })
}

/// Signed count of coincidences; requires an orientable base.
pub fn intersection_number(
    a: &BundleSection,
    b: &BundleSection,
    chart: &TorusBundleChart,
    q: &QuotientPresentation,
    word_bound: usize,
) -> Result<i64> {
    if !q.is_orientable() {
        return Err(Error::NonOrientable);
    }
    let sign = local_sign(a, b)?;
    let count = section_coincidence_points(a, b, chart, q, word_bound)?.len();
    Ok(sign * i64::try_from(count).map_err(|_| Error::Invalid("count overflow".into()))?)
}

/// Unsigned coincidence count, defined for every presentation.
pub fn intersection_count(
    a: &BundleSection,
    b: &BundleSection,
    chart: &TorusBundleChart,
    q: &QuotientPresentation,
    word_bound: usize,
) -> Result<usize> {
    Ok(section_coincidence_points(a, b, chart, q, word_bound)?.len())
}

/// Checks at `samples` random rational points of the model's domain that the
/// holonomy section `x ↦ [x]` is the fibrewise negative of `x ↦ [−x]`.
pub fn prequantization_section_check(model: &EnhancedALModel, samples: usize, seed: u64) -> Result<bool> {
    let n = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = model.omega_domain().bounding_box();
    let lattice = BundleSection::of_kind(SectionKind::AffineLattice, n);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < samples {
        attempts += 1;
        if attempts > 1000 * samples.max(1) {
            return Err(Error::Invalid("could not sample points inside the chart domain".into()));
        }
        let x = random_point(&mut rng, &lo, &hi);
        if !model.omega_domain().contains(&x) {
            continue;
        }
        checked += 1;
        let holonomy_section: Vec<Rational> = (0..n)
            .map(|j| holonomy_phase(model, &FibreLoop::generator(x.clone(), j)))
            .collect::<Result<_>>()?;
        let negated: Vec<Rational> = lattice.fibre_value(&x)?.entries().iter().map(|y| frac(&-y)).collect();
        if holonomy_section != negated {
            return Ok(false);
        }
    }
    Ok(true)
}

fn random_point(rng: &mut ChaCha8Rng, lo: &[Rational], hi: &[Rational]) -> RVector {
    RVector::new(
        lo.iter()
            .zip(hi)
            .map(|(a, b)| {
                let t = rat(rng.random_range(0..=60), 60);
                let jitter = rat(rng.random_range(0..7), 7 * 60 * 61);
                a + (b - a) * (t + jitter)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::DEFAULT_WORD_BOUND;
    use crate::quotient::builtin_presentation;

    fn sec(kind: SectionKind, n: usize) -> BundleSection {
        BundleSection::of_kind(kind, n)
    }

    fn count(a: SectionKind, b: SectionKind, name: &str, scale: u32) -> Result<i64> {
        let q = builtin_presentation(name, scale).unwrap();
        let n = q.dim();
        intersection_number(
            &sec(a, n),
            &sec(b, n),
            &TorusBundleChart::over(&q),
            &q,
            DEFAULT_WORD_BOUND,
        )
    }

    #[test]
    fn documented_intersections() {
        use SectionKind::*;
        assert_eq!(count(AffineLattice, Zero, "torus-2", 3), Ok(9));
        assert_eq!(count(AffineLattice, Zero, "torus-1", 5), Ok(-5));
        assert_eq!(count(AffineLattice, Zero, "kodaira-thurston", 1), Ok(-1));
        assert_eq!(count(Zero, Zero, "torus-2", 1), Err(Error::NonTransverse));
        assert_eq!(count(AffineLattice, Zero, "klein", 1), Err(Error::NonOrientable));
    }

    #[test]
    fn coincidences_match_integral_points() {
        for name in ["torus-1", "torus-2", "klein", "kodaira-thurston"] {
            let q = builtin_presentation(name, 2).unwrap();
            let n = q.dim();
            let pts = section_coincidence_points(
                &sec(SectionKind::AffineLattice, n),
                &sec(SectionKind::Zero, n),
                &TorusBundleChart::over(&q),
                &q,
                DEFAULT_WORD_BOUND,
            )
            .unwrap();
            assert_eq!(pts, q.integral_points(DEFAULT_WORD_BOUND).unwrap(), "{name}");
        }
    }

    #[test]
    fn prequantization_meets_lattice_at_half_points() {
        let q = builtin_presentation("torus-1", 1).unwrap();
        let pts = section_coincidence_points(
            &sec(SectionKind::Prequantization, 1),
            &sec(SectionKind::AffineLattice, 1),
            &TorusBundleChart::over(&q),
            &q,
            DEFAULT_WORD_BOUND,
        )
        .unwrap();
        let want: Vec<RVector> = vec![RVector::new(vec![int(0)]), RVector::new(vec![rat(1, 2)])];
        assert_eq!(pts.iter().cloned().collect::<Vec<_>>(), want);
    }

    #[test]
    fn parallel_shifted_sections() {
        let q = builtin_presentation("torus-1", 1).unwrap();
        let chart = TorusBundleChart::over(&q);
        let a = BundleSection::new(0, RVector::new(vec![rat(1, 2)])).unwrap();
        let b = sec(SectionKind::Zero, 1);
        assert!(section_coincidence_points(&a, &b, &chart, &q, 8).unwrap().is_empty());
        let c = BundleSection::new(0, RVector::new(vec![int(3)])).unwrap();
        assert_eq!(
            section_coincidence_points(&c, &b, &chart, &q, 8),
            Err(Error::NonTransverse)
        );
        assert_eq!(a.kind(), None);
        assert_eq!(
            sec(SectionKind::Prequantization, 2).kind(),
            Some(SectionKind::Prequantization)
        );
    }

    #[test]
    fn swapping_sections() {
        use SectionKind::*;
        for (name, n) in [("torus-1", 1), ("torus-2", 2), ("kodaira-thurston", 3)] {
            let ab = count(AffineLattice, Zero, name, 2).unwrap();
            let ba = count(Zero, AffineLattice, name, 2).unwrap();
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(ab, sign * ba, "{name}");
        }
    }

    #[test]
    fn prequantization_check() {
        let model = EnhancedALModel::new(builtin_presentation("torus-2", 1).unwrap().domain().clone());
        assert!(prequantization_section_check(&model, 100, 0).unwrap());
        let third = RVector::new(vec![rat(1, 3)]);
        let lattice = sec(SectionKind::AffineLattice, 1);
        assert_eq!(lattice.fibre_value(&third).unwrap(), RVector::new(vec![rat(2, 3)]));
        assert_eq!(sec(SectionKind::Prequantization, 1).fibre_value(&third).unwrap(), third);
    }
}

//! Enhanced action-angle charts `Ω × T^n × C` with connection `d − 2πi Σ x_j dt_j`.
//!
//! Holonomy around a fibre loop of winding `m` at base point `x` is
//! `exp(2πi ⟨m, x⟩)`. Phases are kept as exact rationals mod 1; complex
//! numbers only appear at the edges.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Float, FloatConst, One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::affine::AffineTier;
use crate::error::{Error, Result};
use crate::quotient::{LatticePointSet, Polytope, QuotientPresentation};
use crate::scalar::{frac, int, rat};
use crate::{RAffineMap, RMatrix, RVector, Rational};

/// Default RK4 step count for [`holonomy_numeric`].
pub const DEFAULT_RK4_STEPS: usize = 10_000;

/// Chart change `x' = Ax + b`, `t' = A^{-T} t + Gx + c (mod Z^n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ALTransition {
    linear: RMatrix,
    translation: RVector,
    fibre_shear: RMatrix,
    fibre_shift: RVector,
}

impl ALTransition {
    pub fn new(linear: RMatrix, translation: RVector, fibre_shear: RMatrix, fibre_shift: RVector) -> Result<Self> {
        let n = translation.dim();
        let shapes_ok = linear.rows() == n
            && linear.cols() == n
            && fibre_shear.rows() == n
            && fibre_shear.cols() == n
            && fibre_shift.dim() == n;
        if !shapes_ok {
            return Err(Error::Shape("transition blocks must all be n x n / length n".into()));
        }
        if linear.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self {
            linear,
            translation,
            fibre_shear,
            fibre_shift,
        })
    }

    /// Transition with `G = 0`, `c = 0`.
    pub fn base_only(base: &RAffineMap) -> Self {
        let n = base.dim();
        Self {
            linear: base.linear().clone(),
            translation: base.translation().clone(),
            fibre_shear: RMatrix::zeros(n, n),
            fibre_shift: RVector::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::base_only(&RAffineMap::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn linear(&self) -> &RMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &RVector {
        &self.translation
    }

    pub fn fibre_shear(&self) -> &RMatrix {
        &self.fibre_shear
    }

    pub fn fibre_shift(&self) -> &RVector {
        &self.fibre_shift
    }

    /// The induced map on the base, `x ↦ Ax + b`.
    pub fn base(&self) -> RAffineMap {
        RAffineMap::new(self.linear.clone(), self.translation.clone()).expect("linear part checked nonsingular")
    }

    /// `A^{-T}`.
    pub fn fibre_linear(&self) -> RMatrix {
        self.linear
            .inverse()
            .expect("linear part checked nonsingular")
            .transpose()
    }

    /// `self ∘ other` on `(x, t)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        // t'' = A1^{-T}(A2^{-T} t + G2 x + c2) + G1 (A2 x + b2) + c1
        let a1_it = self.fibre_linear();
        let shear = a1_it
            .matmul(&other.fibre_shear)?
            .add(&self.fibre_shear.matmul(&other.linear)?)?;
        let shift = a1_it
            .mul_vec(&other.fibre_shift)?
            .add(&self.fibre_shear.mul_vec(&other.translation)?)?
            .add(&self.fibre_shift)?;
        let base = self.base().compose(&other.base())?;
        Self::new(base.linear().clone(), base.translation().clone(), shear, shift)
    }

    /// Fibre-preserving symplectomorphism test: `A ∈ GL_n(Z)` and `AᵀG` symmetric.
    pub fn is_symplectomorphism(&self) -> bool {
        self.linear.is_gl_n_z()
            && self
                .linear
                .transpose()
                .matmul(&self.fibre_shear)
                .is_ok_and(|m| m.is_symmetric())
    }

    /// Symplectomorphism that also lifts to the prequantum line bundle: `b ∈ Z^n`.
    pub fn is_enhanced_isomorphism(&self) -> bool {
        self.is_symplectomorphism() && self.translation.is_integral()
    }

    /// Holonomy phase of the image of the loop `γ_j` at `x`, read in the target
    /// chart: `Σ_k (A^{-1})_{jk} x'_k mod 1`.
    pub fn transported_phase(&self, x: &RVector, j: usize) -> Result<Rational> {
        let x_target = self.base().apply(x)?;
        let inv = self.linear.inverse()?;
        let row = RVector::new(inv.row(j).to_vec());
        Ok(frac(&row.dot(&x_target)?))
    }
}

/// A fibre where the Bohr–Sommerfeld condition disagrees across a chart change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BsMismatch {
    #[serde(serialize_with = "crate::io::ser_rvector")]
    pub source: RVector,
    #[serde(serialize_with = "crate::io::ser_rvector")]
    pub target: RVector,
    pub source_bs: bool,
    pub target_bs: bool,
}

/// Constructs a fibre whose Bohr–Sommerfeld status flips under `tr`, if one exists.
///
/// Within the affine family this happens exactly when `b ∉ Z^n`; the witness
/// is the origin, which is integral while its image `b` is not.
pub fn bs_mismatch_witness(tr: &ALTransition) -> Result<Option<BsMismatch>> {
    let source = RVector::zeros(tr.dim());
    let target = tr.base().apply(&source)?;
    let source_bs = trivial_holonomy(&source);
    let target_bs = trivial_holonomy(&target);
    if source_bs == target_bs {
        return Ok(None);
    }
    Ok(Some(BsMismatch {
        source,
        target,
        source_bs,
        target_bs,
    }))
}

/// The standard enhanced model over a polytopal chart domain `Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnhancedALModel {
    omega_domain: Polytope,
}

impl EnhancedALModel {
    pub fn new(omega_domain: Polytope) -> Self {
        Self { omega_domain }
    }

    /// Model over the open box `x ± 1` around a base point.
    pub fn around(x: &RVector) -> Result<Self> {
        let lo: Vec<Rational> = x.entries().iter().map(|e| e - int(1)).collect();
        let hi: Vec<Rational> = x.entries().iter().map(|e| e + int(1)).collect();
        Ok(Self::new(Polytope::half_open_box(&lo, &hi)?))
    }

    pub fn dim(&self) -> usize {
        self.omega_domain.dim()
    }

    pub fn omega_domain(&self) -> &Polytope {
        &self.omega_domain
    }

    fn check(&self, x: &RVector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "base point of dim {} in a model of dim {}",
                x.dim(),
                self.dim()
            )));
        }
        if !self.omega_domain.contains(x) {
            return Err(Error::OutsideDomain);
        }
        Ok(())
    }
}

/// Loop in the fibre over `basepoint` with homology class `Σ m_k [γ_k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreLoop {
    pub basepoint: RVector,
    pub winding: Vec<i64>,
}

impl FibreLoop {
    pub fn new(basepoint: RVector, winding: Vec<i64>) -> Result<Self> {
        if basepoint.dim() != winding.len() {
            return Err(Error::Shape(format!(
                "winding of length {} at a base point of dim {}",
                winding.len(),
                basepoint.dim()
            )));
        }
        Ok(Self { basepoint, winding })
    }

    /// One turn around the `k`-th angle coordinate.
    pub fn generator(basepoint: RVector, k: usize) -> Self {
        let mut winding = vec![0; basepoint.dim()];
        winding[k] = 1;
        Self { basepoint, winding }
    }

    fn winding_vector(&self) -> RVector {
        RVector::new(
            self.winding
                .iter()
                .map(|&m| Rational::from_integer(BigInt::from(m)))
                .collect(),
        )
    }
}

fn phase_of(lp: &FibreLoop) -> Rational {
    frac(&lp.winding_vector().dot(&lp.basepoint).expect("checked dims"))
}

/// Holonomy exponent `⟨m, x⟩ mod 1`, exact.
pub fn holonomy_phase(model: &EnhancedALModel, lp: &FibreLoop) -> Result<Rational> {
    model.check(&lp.basepoint)?;
    Ok(phase_of(lp))
}

/// `exp(2πi ⟨m, x⟩)`.
pub fn holonomy(model: &EnhancedALModel, lp: &FibreLoop) -> Result<Complex<f64>> {
    let phase = holonomy_phase(model, lp)?;
    Ok(unit_complex(&phase))
}

pub fn unit_complex(phase: &Rational) -> Complex<f64> {
    if phase.is_zero() {
        return Complex::one();
    }
    if *phase == rat(1, 2) {
        return Complex::new(-1.0, 0.0);
    }
    let theta = 2.0 * std::f64::consts::PI * crate::scalar::Scalar::approx_f64(phase);
    Complex::from_polar(1.0, theta)
}

/// Parallel transport by RK4 along the straight loop `s ↦ (x, s·m)`, `s ∈ [0, 1]`.
///
/// The horizontal lift solves `z' = 2πi ⟨x, m⟩ z`; the returned value is `z(1)`
/// for `z(0) = 1`. Independent of the closed-form phase.
pub fn holonomy_numeric<F: Float + FloatConst>(
    model: &EnhancedALModel,
    lp: &FibreLoop,
    steps: usize,
) -> Result<Complex<F>> {
    if steps < 2 {
        return Err(Error::Invalid("RK4 needs at least 2 steps".into()));
    }
    model.check(&lp.basepoint)?;
    let n = lp.basepoint.dim();
    // The connection form −Σ x_j dt_j evaluated on the loop velocity m.
    let pairing: F = (0..n).fold(F::zero(), |acc, j| {
        let x = F::from(crate::scalar::Scalar::approx_f64(&lp.basepoint[j])).expect("finite");
        let m = F::from(lp.winding[j]).expect("finite");
        acc + x * m
    });
    let two = F::one() + F::one();
    let rate = Complex::new(F::zero(), two * F::PI() * pairing);
    let h = F::one() / F::from(steps).expect("finite");
    let half = h / two;
    let six = F::from(6.0).expect("finite");
    let mut z = Complex::new(F::one(), F::zero());
    for _ in 0..steps {
        let k1 = rate * z;
        let k2 = rate * (z + k1 * half);
        let k3 = rate * (z + k2 * half);
        let k4 = rate * (z + k3 * h);
        z = z + (k1 + (k2 + k3) * two + k4) * (h / six);
    }
    Ok(z)
}

/// Trivial holonomy around every generator loop, i.e. all `x_j ∈ Z`.
fn trivial_holonomy(x: &RVector) -> bool {
    (0..x.dim()).all(|k| phase_of(&FibreLoop::generator(x.clone(), k)).is_zero())
}

/// Bohr–Sommerfeld fibre test at `x ∈ Ω`.
pub fn is_bohr_sommerfeld(model: &EnhancedALModel, x: &RVector) -> Result<bool> {
    model.check(x)?;
    Ok(trivial_holonomy(x))
}

/// Bohr–Sommerfeld fibres of the fibration glued over `q`, one per Γ-orbit.
///
/// Candidates are scanned on the half-integer grid over the fundamental
/// domain (so the holonomy test has points to reject) and classified by the
/// chart's holonomy.
pub fn bohr_sommerfeld_set(q: &QuotientPresentation, word_bound: usize) -> Result<LatticePointSet> {
    q.require_tier(AffineTier::IntegralIntegralAffine)?;
    let model = EnhancedALModel::new(q.domain().clone());
    let grid = q.coset_points(&BigInt::from(2), &RVector::zeros(q.dim()))?;
    let mut bs = Vec::new();
    for x in grid {
        if is_bohr_sommerfeld(&model, &x)? {
            bs.push(x);
        }
    }
    q.orbit_classes(bs, word_bound)
}

/// Uniformly random element of GL_n(Z) from a short word in elementary moves.
pub fn random_gl_n_z<R: Rng>(rng: &mut R, n: usize) -> RMatrix {
    let mut m = RMatrix::identity(n);
    for _ in 0..rng.random_range(0..=3 * n) {
        let i = rng.random_range(0..n);
        match rng.random_range(0..3) {
            0 if n > 1 => {
                let j = (i + rng.random_range(1..n)) % n;
                let k = int(rng.random_range(-2..=2));
                // row_i += k · row_j
                for c in 0..n {
                    let v = m.get(i, c).clone() + k.clone() * m.get(j, c).clone();
                    m.set(i, c, v);
                }
            }
            1 => {
                for c in 0..n {
                    let v = -m.get(i, c).clone();
                    m.set(i, c, v);
                }
            }
            _ => {}
        }
    }
    m
}

/// Random transition in the affine family. About half of them have `AᵀG`
/// symmetric, and about half have integer `b`.
pub fn random_transition<R: Rng>(rng: &mut R, n: usize) -> ALTransition {
    let linear = random_gl_n_z(rng, n);
    let small = |rng: &mut R| rat(rng.random_range(-4..=4), rng.random_range(1..=2));
    let translation = if rng.random_bool(0.5) {
        RVector::new((0..n).map(|_| int(rng.random_range(-3..=3))).collect())
    } else {
        RVector::new((0..n).map(|_| small(rng)).collect())
    };
    let fibre_shear = if rng.random_bool(0.5) {
        // G = A^{-T} S with S symmetric makes AᵀG = S.
        let mut s = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = small(rng);
                s.set(i, j, v.clone());
                s.set(j, i, v);
            }
        }
        linear
            .inverse()
            .expect("GL_n(Z)")
            .transpose()
            .matmul(&s)
            .expect("square")
    } else {
        let mut g = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, small(rng));
            }
        }
        g
    };
    let fibre_shift = RVector::new((0..n).map(|_| small(rng)).collect());
    ALTransition::new(linear, translation, fibre_shear, fibre_shift).expect("valid blocks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::builtin_presentation;

    fn unit_model(n: usize) -> EnhancedALModel {
        EnhancedALModel::new(Polytope::half_open_box(&vec![int(-5); n], &vec![int(5); n]).unwrap())
    }

    fn tr(a: &[&[i64]], b: RVector, g: &[&[i64]]) -> ALTransition {
        let n = b.dim();
        ALTransition::new(
            RMatrix::from_i64(a).unwrap(),
            b,
            RMatrix::from_i64(g).unwrap(),
            RVector::zeros(n),
        )
        .unwrap()
    }

    #[test]
    fn symplectomorphism_examples() {
        assert!(ALTransition::identity(2).is_symplectomorphism());
        let asym = tr(&[&[1, 0], &[0, 1]], RVector::zeros(2), &[&[0, 1], &[0, 0]]);
        assert!(!asym.is_symplectomorphism());
        let shear = ALTransition::new(
            RMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap(),
            RVector::new(vec![rat(1, 3), int(7)]),
            RMatrix::zeros(2, 2),
            RVector::new(vec![rat(2, 5), int(0)]),
        )
        .unwrap();
        assert!(shear.is_symplectomorphism());
    }

    #[test]
    fn enhanced_isomorphism_examples() {
        assert!(ALTransition::identity(2).is_enhanced_isomorphism());
        let half = tr(
            &[&[1, 0], &[0, 1]],
            RVector::new(vec![rat(1, 2), int(0)]),
            &[&[0, 0], &[0, 0]],
        );
        assert!(half.is_symplectomorphism());
        assert!(!half.is_enhanced_isomorphism());
        let klein = tr(&[&[-1, 0], &[0, 1]], RVector::from_i64(&[0, 1]), &[&[0, 0], &[0, 0]]);
        assert!(klein.is_enhanced_isomorphism());
    }

    #[test]
    fn half_translation_flips_bs_status() {
        let half = tr(
            &[&[1, 0], &[0, 1]],
            RVector::new(vec![rat(1, 2), int(0)]),
            &[&[0, 0], &[0, 0]],
        );
        let w = bs_mismatch_witness(&half).unwrap().unwrap();
        assert!(w.source_bs);
        assert!(!w.target_bs);
        assert_eq!(w.target, RVector::new(vec![rat(1, 2), int(0)]));
        // The transported holonomy of γ_1 picks up the phase (A^{-1} b)_1 = 1/2.
        assert_eq!(half.transported_phase(&w.source, 0).unwrap(), rat(1, 2));
        assert!(bs_mismatch_witness(&ALTransition::identity(2)).unwrap().is_none());
    }

    #[test]
    fn holonomy_examples() {
        let m1 = unit_model(1);
        let x = RVector::new(vec![rat(1, 2)]);
        let zero = holonomy(&m1, &FibreLoop::new(x.clone(), vec![0]).unwrap()).unwrap();
        assert_eq!(zero, Complex::one());
        let h = holonomy(&m1, &FibreLoop::new(x, vec![1]).unwrap()).unwrap();
        assert_eq!(h, Complex::new(-1.0, 0.0));

        let m2 = unit_model(2);
        let lp = FibreLoop::new(RVector::new(vec![rat(1, 3), rat(1, 4)]), vec![1, 2]).unwrap();
        assert_eq!(holonomy_phase(&m2, &lp).unwrap(), rat(5, 6));
        let h = holonomy(&m2, &lp).unwrap();
        let want = Complex::from_polar(1.0, 5.0 * std::f64::consts::PI / 3.0);
        assert!((h - want).norm() < 1e-12);
    }

    #[test]
    fn numeric_holonomy_matches_closed_form_lift() {
        let m1 = unit_model(1);
        let lp = FibreLoop::new(RVector::new(vec![rat(1, 2)]), vec![1]).unwrap();
        let z: Complex<f64> = holonomy_numeric(&m1, &lp, DEFAULT_RK4_STEPS).unwrap();
        assert!((z - Complex::new(-1.0, 0.0)).norm() < 1e-8);

        let still = FibreLoop::new(RVector::new(vec![rat(3, 7)]), vec![0]).unwrap();
        let z: Complex<f64> = holonomy_numeric(&m1, &still, 10).unwrap();
        assert_eq!(z, Complex::one());

        let z32: Complex<f32> = holonomy_numeric(&m1, &lp, 1000).unwrap();
        assert!((z32 - Complex::new(-1.0f32, 0.0)).norm() < 1e-4);
        assert!(holonomy_numeric::<f64>(&m1, &lp, 1).is_err());
    }

    #[test]
    fn basepoint_outside_domain() {
        let m = unit_model(1);
        let lp = FibreLoop::new(RVector::from_i64(&[9]), vec![1]).unwrap();
        assert_eq!(holonomy(&m, &lp), Err(Error::OutsideDomain));
        assert_eq!(
            is_bohr_sommerfeld(&m, &RVector::from_i64(&[9])),
            Err(Error::OutsideDomain)
        );
    }

    #[test]
    fn bohr_sommerfeld_predicate() {
        let m = unit_model(2);
        assert!(is_bohr_sommerfeld(&m, &RVector::zeros(2)).unwrap());
        assert!(!is_bohr_sommerfeld(&m, &RVector::new(vec![rat(1, 2), int(0)])).unwrap());
        assert!(is_bohr_sommerfeld(&m, &RVector::from_i64(&[2, -3])).unwrap());
    }

    #[test]
    fn bohr_sommerfeld_sets_equal_integral_points() {
        for (name, scale, count) in [("torus-2", 3, 9), ("klein", 1, 1), ("torus-1", 5, 5)] {
            let q = builtin_presentation(name, scale).unwrap();
            let bs = bohr_sommerfeld_set(&q, 8).unwrap();
            assert_eq!(bs.len(), count, "{name}");
            assert_eq!(bs, q.integral_points(8).unwrap(), "{name}");
        }
    }

    #[test]
    fn composition_of_enhanced_isomorphisms() {
        let a = tr(&[&[1, 1], &[0, 1]], RVector::from_i64(&[2, -1]), &[&[0, 0], &[0, 0]]);
        let b = tr(&[&[-1, 0], &[0, 1]], RVector::from_i64(&[0, 1]), &[&[1, 0], &[0, 0]]);
        assert!(a.is_enhanced_isomorphism() && b.is_enhanced_isomorphism());
        let ab = a.compose(&b).unwrap();
        assert!(ab.is_enhanced_isomorphism());
        assert_eq!(ab.base(), a.base().compose(&b.base()).unwrap());
    }
}

//! Compiled-in presentations: tori, the Klein bottle, Kodaira–Thurston.

use crate::error::{Error, Result};
use crate::scalar::int;
use crate::{RAffineMap, RMatrix, RVector};

use super::{Polytope, QuotientPresentation};

/// Accepted names; `torus-<n>` takes any `n ≥ 1`.
pub const BUILTIN_NAMES: &[&str] = &["torus-<n>", "klein", "kodaira-thurston"];

/// Builds a named presentation with its translation step set to `scale`.
///
/// * `torus-n`: `x_j ↦ x_j + scale` for every `j`; domain `[0, scale)^n`.
/// * `klein`: `x_1 ↦ x_1 + scale` and the glide `(x_1, x_2) ↦ (−x_1, x_2 + 1)`;
///   domain `[0, scale) × [0, 1)`.
/// * `kodaira-thurston`: the shear `(x_1 + x_2, x_2, x_3 + scale)` and unit
///   translations in `x_1`, `x_2`; domain `[0, 1)^2 × [0, scale)`.
pub fn builtin_presentation(name: &str, scale: u32) -> Result<QuotientPresentation> {
    if scale == 0 {
        return Err(Error::Invalid("scale must be at least 1".into()));
    }
    let s = i64::from(scale);
    match name {
        "klein" => {
            let gens = vec![
                RAffineMap::translation_by(RVector::from_i64(&[s, 0])),
                RAffineMap::new(RMatrix::from_i64(&[&[-1, 0], &[0, 1]])?, RVector::from_i64(&[0, 1]))?,
            ];
            let domain = Polytope::half_open_box(&[int(0), int(0)], &[int(s), int(1)])?;
            QuotientPresentation::new("klein", gens, domain)
        }
        "kodaira-thurston" => {
            let gens = vec![
                RAffineMap::new(
                    RMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]])?,
                    RVector::from_i64(&[0, 0, s]),
                )?,
                RAffineMap::translation_by(RVector::from_i64(&[1, 0, 0])),
                RAffineMap::translation_by(RVector::from_i64(&[0, 1, 0])),
            ];
            let domain = Polytope::half_open_box(&[int(0), int(0), int(0)], &[int(1), int(1), int(s)])?;
            QuotientPresentation::new("kodaira-thurston", gens, domain)
        }
        _ => {
            let n: usize = name
                .strip_prefix("torus-")
                .and_then(|d| d.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
            let gens = (0..n)
                .map(|j| RAffineMap::translation_by(RVector::unit(n, j).scale(&int(s))))
                .collect();
            let domain = Polytope::half_open_box(&vec![int(0); n], &vec![int(s); n])?;
            QuotientPresentation::new(name, gens, domain)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffineTier;

    #[test]
    fn torus_generators() {
        let q = builtin_presentation("torus-2", 1).unwrap();
        assert_eq!(q.generators().len(), 2);
        assert_eq!(
            q.generators()[0],
            RAffineMap::translation_by(RVector::from_i64(&[1, 0]))
        );
        assert_eq!(
            q.generators()[1],
            RAffineMap::translation_by(RVector::from_i64(&[0, 1]))
        );
        assert_eq!(q.volume(), int(1));
    }

    #[test]
    fn klein_generators_follow_the_glide() {
        let q = builtin_presentation("klein", 1).unwrap();
        let glide = &q.generators()[1];
        assert_eq!(
            glide.apply(&RVector::from_i64(&[3, 4])).unwrap(),
            RVector::from_i64(&[-3, 5])
        );
        assert_eq!(q.tier(), AffineTier::IntegralIntegralAffine);
    }

    #[test]
    fn kt_generators() {
        let q = builtin_presentation("kodaira-thurston", 1).unwrap();
        assert_eq!(
            q.generators()[0].apply(&RVector::from_i64(&[1, 2, 0])).unwrap(),
            RVector::from_i64(&[3, 2, 1])
        );
        assert_eq!(q.dim(), 3);
        assert_eq!(q.tier(), AffineTier::IntegralIntegralAffine);
    }

    #[test]
    fn unknown_names_and_zero_scale() {
        assert!(matches!(
            builtin_presentation("sphere", 1),
            Err(Error::UnknownBuiltin(_))
        ));
        assert!(matches!(
            builtin_presentation("torus-0", 1),
            Err(Error::UnknownBuiltin(_))
        ));
        assert!(matches!(builtin_presentation("torus-2", 0), Err(Error::Invalid(_))));
    }
}

//! Affine transformations `x ↦ Ax + b` and the three-level lattice classification.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// Word length used for orbit exploration when callers do not choose one.
pub const DEFAULT_WORD_BOUND: usize = 8;

/// How much of the lattice `Z^n` an affine map respects.
///
/// Ordered so that a stronger tier compares greater.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AffineTier {
    /// Any invertible affine map.
    Affine,
    /// Linear part in GL_n(Z).
    IntegralAffine,
    /// Linear part in GL_n(Z) and integer translation: preserves `Z^n`.
    IntegralIntegralAffine,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap<T> {
    linear: Matrix<T>,
    translation: Vector<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(linear: Matrix<T>, translation: Vector<T>) -> Result<Self> {
        if !linear.is_square() || linear.rows() != translation.dim() {
            return Err(Error::Shape(format!(
                "linear part {}x{} with translation of dim {}",
                linear.rows(),
                linear.cols(),
                translation.dim()
            )));
        }
        if linear.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            linear: Matrix::identity(n),
            translation: Vector::zeros(n),
        }
    }

    pub fn translation_by(b: Vector<T>) -> Self {
        Self {
            linear: Matrix::identity(b.dim()),
            translation: b,
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn linear(&self) -> &Matrix<T> {
        &self.linear
    }

    pub fn translation(&self) -> &Vector<T> {
        &self.translation
    }

    pub fn apply(&self, x: &Vector<T>) -> Result<Vector<T>> {
        self.linear.mul_vec(x)?.add(&self.translation)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "composing dim {} with dim {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            linear: self.linear.matmul(&other.linear)?,
            translation: self.linear.mul_vec(&other.translation)?.add(&self.translation)?,
        })
    }

    pub fn invert(&self) -> Result<Self> {
        let inv = self.linear.inverse()?;
        let translation = inv.mul_vec(&self.translation)?.neg();
        Ok(Self {
            linear: inv,
            translation,
        })
    }

    pub fn classify(&self) -> AffineTier {
        if !self.linear.is_gl_n_z() {
            AffineTier::Affine
        } else if self.translation.is_integral() {
            AffineTier::IntegralIntegralAffine
        } else {
            AffineTier::IntegralAffine
        }
    }

    /// `sign(det A)`; +1 for orientation-preserving maps.
    pub fn orientation(&self) -> i8 {
        match self.linear.det() {
            Ok(d) if d.is_positive() => 1,
            Ok(d) if d.is_negative() => -1,
            _ => 0,
        }
    }
}

impl<T: fmt::Display> fmt::Display for AffineMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x ↦ {}·x + {}", self.linear, self.translation)
    }
}

/// The generators together with their inverses, in a fixed order.
pub fn symmetric_generators<T: Scalar>(gens: &[AffineMap<T>]) -> Result<Vec<AffineMap<T>>> {
    let mut out = Vec::with_capacity(2 * gens.len());
    for g in gens {
        out.push(g.clone());
        out.push(g.invert()?);
    }
    Ok(out)
}

/// All images of `seed` under group words of length at most `word_bound`
/// in `gens` and their inverses.
///
/// Breadth-first over word length; the result is exact and deduplicated.
pub fn orbit_reps<T>(gens: &[AffineMap<T>], seed: &Vector<T>, word_bound: usize) -> Result<BTreeSet<Vector<T>>>
where
    T: Scalar + Ord + Hash,
{
    let moves = symmetric_generators(gens)?;
    for g in &moves {
        if g.dim() != seed.dim() {
            return Err(Error::Shape(format!(
                "generator of dim {} acting on point of dim {}",
                g.dim(),
                seed.dim()
            )));
        }
    }
    let mut seen: HashSet<Vector<T>> = HashSet::new();
    seen.insert(seed.clone());
    let mut frontier = vec![seed.clone()];
    for _ in 0..word_bound {
        let mut next = Vec::new();
        for p in &frontier {
            for g in &moves {
                let q = g.apply(p)?;
                if seen.insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

/// Distinct group elements given by words of length at most `word_bound` in
/// `gens` and their inverses, identity included.
pub fn group_ball<T>(gens: &[AffineMap<T>], word_bound: usize) -> Result<Vec<AffineMap<T>>>
where
    T: Scalar + Hash + Eq,
{
    let moves = symmetric_generators(gens)?;
    let Some(first) = moves.first() else {
        return Ok(Vec::new());
    };
    let identity = AffineMap::identity(first.dim());
    let mut seen: HashSet<AffineMap<T>> = HashSet::new();
    seen.insert(identity.clone());
    let mut ball = vec![identity.clone()];
    let mut frontier = vec![identity];
    for _ in 0..word_bound {
        let mut next = Vec::new();
        for h in &frontier {
            for g in &moves {
                let w = g.compose(h)?;
                if seen.insert(w.clone()) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        ball.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(ball)
}

//! Convex polytopes in V-representation with derived, flagged facets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::scalar::int;
use crate::{RMatrix, RVector, Rational};

/// Two-sided 99% normal quantile.
const Z_99: f64 = 2.575_829_303_548_901;

const MC_CHUNK: u64 = 1 << 16;

/// Supporting halfspace `normal · x ≤ offset` (strict when `closed` is false).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    /// Primitive integer outward normal.
    pub normal: RVector,
    pub offset: Rational,
    pub closed: bool,
    /// Indices of the vertices lying on this facet, ascending.
    pub incident: Vec<usize>,
}

impl Halfspace {
    fn admits(&self, x: &RVector) -> bool {
        let lhs = self.normal.dot(x).expect("dimension checked by caller");
        if self.closed {
            lhs <= self.offset
        } else {
            lhs < self.offset
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<RVector>,
    facets: Vec<Halfspace>,
}

/// Hit-or-miss volume estimate with a 99% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub hits: u64,
    pub samples: u64,
}

impl McEstimate {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

impl Polytope {
    /// Builds the polytope spanned by `vertices`; facets listed in `open_facets`
    /// (indices into the canonical facet order) are open, all others closed.
    ///
    /// The canonical facet order sorts facets by their ascending lists of
    /// incident vertex indices.
    pub fn new(vertices: Vec<RVector>, open_facets: &[usize]) -> Result<Self> {
        let dim = vertices.first().map_or(0, RVector::dim);
        if dim == 0 || vertices.iter().any(|v| v.dim() != dim) {
            return Err(Error::Shape("vertices must share a positive dimension".into()));
        }
        let found = affine_dim(&vertices, &(0..vertices.len()).collect::<Vec<_>>());
        if found != dim {
            return Err(Error::Degenerate { found, expected: dim });
        }
        let mut facets = hull_facets(&vertices, dim);
        for &k in open_facets {
            let f = facets
                .get_mut(k)
                .ok_or_else(|| Error::Invalid(format!("open facet index {k} out of range")))?;
            f.closed = false;
        }
        Ok(Self { dim, vertices, facets })
    }

    /// `[lower, upper)` box: closed on lower faces, open on upper faces.
    pub fn half_open_box(lower: &[Rational], upper: &[Rational]) -> Result<Self> {
        let n = lower.len();
        if n == 0 || upper.len() != n {
            return Err(Error::Shape("box bounds must have equal positive length".into()));
        }
        if lower.iter().zip(upper).any(|(l, u)| l >= u) {
            return Err(Error::Degenerate { found: 0, expected: n });
        }
        let vertices: Vec<RVector> = (0..1usize << n)
            .map(|mask| {
                RVector::new(
                    (0..n)
                        .map(|i| {
                            if mask >> i & 1 == 1 {
                                upper[i].clone()
                            } else {
                                lower[i].clone()
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        // Facets are known in closed form; skip the hull search.
        let mut facets: Vec<Halfspace> = (0..n)
            .flat_map(|i| {
                let low = Halfspace {
                    normal: RVector::unit(n, i).neg(),
                    offset: -lower[i].clone(),
                    closed: true,
                    incident: (0..1usize << n).filter(|m| m >> i & 1 == 0).collect(),
                };
                let high = Halfspace {
                    normal: RVector::unit(n, i),
                    offset: upper[i].clone(),
                    closed: false,
                    incident: (0..1usize << n).filter(|m| m >> i & 1 == 1).collect(),
                };
                [low, high]
            })
            .collect();
        facets.sort_by(|a, b| a.incident.cmp(&b.incident));
        Ok(Self {
            dim: n,
            vertices,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn open_facet_indices(&self) -> Vec<usize> {
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.closed)
            .map(|(i, _)| i)
            .collect()
    }

    /// Membership in the half-open polytope.
    pub fn contains(&self, x: &RVector) -> bool {
        x.dim() == self.dim && self.facets.iter().all(|f| f.admits(x))
    }

    /// Membership in the closed polytope.
    pub fn contains_closure(&self, x: &RVector) -> bool {
        x.dim() == self.dim
            && self
                .facets
                .iter()
                .all(|f| f.normal.dot(x).expect("dims agree") <= f.offset)
    }

    /// Coordinate-wise bounds of the vertices.
    pub fn bounding_box(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mut lo = self.vertices[0].entries().to_vec();
        let mut hi = lo.clone();
        for v in &self.vertices[1..] {
            for (i, e) in v.entries().iter().enumerate() {
                if *e < lo[i] {
                    lo[i] = e.clone();
                }
                if *e > hi[i] {
                    hi[i] = e.clone();
                }
            }
        }
        (lo, hi)
    }

    /// Image under an affine map; every facet of the image is closed.
    pub fn image(&self, map: &AffineMap<Rational>) -> Result<Self> {
        let vertices = self.vertices.iter().map(|v| map.apply(v)).collect::<Result<Vec<_>>>()?;
        Self::new(vertices, &[])
    }

    /// Simplices of a fan triangulation, as vertex index lists.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.triangulate_face(&all, self.dim)
    }

    fn triangulate_face(&self, face: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![face[0]]];
        }
        let apex = face[0];
        let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for facet in &self.facets {
            let sub: Vec<usize> = face
                .iter()
                .copied()
                .filter(|i| facet.incident.binary_search(i).is_ok())
                .collect();
            if sub.is_empty() || sub.contains(&apex) {
                continue;
            }
            if affine_dim(&self.vertices, &sub) == k - 1 {
                subfaces.insert(sub);
            }
        }
        let mut out = Vec::new();
        for sub in subfaces {
            for mut simplex in self.triangulate_face(&sub, k - 1) {
                simplex.push(apex);
                out.push(simplex);
            }
        }
        out
    }

    /// Exact Lebesgue volume: sum of `|det|/n!` over the fan triangulation.
    pub fn volume(&self) -> Rational {
        let n = self.dim;
        let mut total = int(0);
        for simplex in self.triangulation() {
            let base = &self.vertices[simplex[0]];
            let rows: Vec<Vec<Rational>> = simplex[1..]
                .iter()
                .map(|&i| {
                    self.vertices[i]
                        .sub(base)
                        .expect("vertices share dimension")
                        .into_entries()
                })
                .collect();
            let det = RMatrix::from_rows(rows)
                .and_then(|m| m.det())
                .expect("simplex matrix is square");
            total += det.abs();
        }
        let factorial: BigInt = (1..=n).map(BigInt::from).product();
        total / Rational::from_integer(factorial)
    }

    /// Hit-or-miss estimate over the bounding box.
    ///
    /// Samples are drawn in fixed-size chunks, each from its own ChaCha stream
    /// keyed by `(seed, chunk index)`, so the result does not depend on how
    /// chunks are scheduled.
    pub fn monte_carlo_volume(&self, samples: u64, seed: u64) -> McEstimate {
        let samples = samples.max(1);
        let (lo, hi) = self.bounding_box();
        let lo: Vec<f64> = lo.iter().map(to_f64).collect();
        let width: Vec<f64> = hi.iter().zip(&lo).map(|(h, l)| to_f64(h) - l).collect();
        let box_volume: f64 = width.iter().product();
        let facets: Vec<(Vec<f64>, f64, bool)> = self
            .facets
            .iter()
            .map(|f| {
                (
                    f.normal.entries().iter().map(to_f64).collect(),
                    to_f64(&f.offset),
                    f.closed,
                )
            })
            .collect();

        let chunks = samples.div_ceil(MC_CHUNK);
        let hits: u64 = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk);
                let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
                let mut x = vec![0.0; self.dim];
                let mut hits = 0u64;
                for _ in 0..count {
                    for (i, xi) in x.iter_mut().enumerate() {
                        *xi = lo[i] + width[i] * rng.random::<f64>();
                    }
                    let inside = facets.iter().all(|(a, c, closed)| {
                        let s: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
                        if *closed {
                            s <= *c
                        } else {
                            s < *c
                        }
                    });
                    hits += u64::from(inside);
                }
                hits
            })
            .sum();

        let nf = samples as f64;
        let p = hits as f64 / nf;
        let z2 = Z_99 * Z_99;
        let denom = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / denom;
        let half = Z_99 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
        McEstimate {
            estimate: box_volume * p,
            lower: box_volume * (centre - half).max(0.0),
            upper: box_volume * (centre + half).min(1.0),
            hits,
            samples,
        }
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Dimension of the affine hull of the selected vertices.
fn affine_dim(vertices: &[RVector], idx: &[usize]) -> usize {
    if idx.len() <= 1 {
        return 0;
    }
    let base = &vertices[idx[0]];
    let rows: Vec<Vec<Rational>> = idx[1..]
        .iter()
        .map(|&i| vertices[i].sub(base).expect("same dim").into_entries())
        .collect();
    RMatrix::from_rows(rows).map_or(0, |m| m.rank())
}

/// Scales a rational vector to the primitive integer vector on the same ray.
fn primitive(v: Vec<Rational>) -> RVector {
    let lcm = v.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = v.iter().map(|r| (r * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g };
    RVector::new(ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect())
}

/// Normal to the hyperplane through `n` points, via signed maximal minors.
fn hyperplane_normal(points: &[&RVector]) -> Option<RVector> {
    let n = points[0].dim();
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.sub(points[0]).expect("same dim").into_entries())
        .collect();
    let mut normal = Vec::with_capacity(n);
    for j in 0..n {
        let minor: Vec<Vec<Rational>> = diffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let d = if minor.is_empty() {
            int(1)
        } else {
            RMatrix::from_rows(minor).ok()?.det().ok()?
        };
        normal.push(if j % 2 == 0 { d } else { -d });
    }
    if normal.iter().all(Zero::is_zero) {
        None
    } else {
        Some(primitive(normal))
    }
}

/// Facets by brute force over `n`-subsets of vertices; fine for the small
/// vertex counts this crate works with.
fn hull_facets(vertices: &[RVector], n: usize) -> Vec<Halfspace> {
    let m = vertices.len();
    let mut facets: Vec<Halfspace> = Vec::new();
    let mut subset: Vec<usize> = (0..n).collect();
    if m < n {
        return facets;
    }
    loop {
        let covered = facets
            .iter()
            .any(|f| subset.iter().all(|i| f.incident.binary_search(i).is_ok()));
        if !covered {
            let pts: Vec<&RVector> = subset.iter().map(|&i| &vertices[i]).collect();
            if let Some(mut normal) = hyperplane_normal(&pts) {
                let mut offset = normal.dot(pts[0]).expect("same dim");
                let values: Vec<Rational> = vertices.iter().map(|v| normal.dot(v).expect("same dim")).collect();
                let below = values.iter().all(|v| *v <= offset);
                let above = values.iter().all(|v| *v >= offset);
                if below || above {
                    let incident: Vec<usize> = values
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v == offset)
                        .map(|(i, _)| i)
                        .collect();
                    if !below {
                        normal = normal.neg();
                        offset = -offset;
                    }
                    facets.push(Halfspace {
                        normal,
                        offset,
                        closed: true,
                        incident,
                    });
                }
            }
        }
        // Next n-combination in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                facets.sort_by(|a, b| a.incident.cmp(&b.incident));
                return facets;
            }
            i -= 1;
            if subset[i] != i + m - n {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..n {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

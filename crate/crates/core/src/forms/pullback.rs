use crate::al_models::ALTransition;
use crate::error::{Error, Result};
use crate::scalar::int;
use num_traits::ToPrimitive;

use crate::{RMatrix, RVector};

use super::coefficient::{exact_root_of_unity, real, Coefficient, Monomial};
use super::{Ambient, Form};

/// The map `z ↦ M z + shift` on the `2n` coordinates of an ambient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSubstitution {
    pub matrix: RMatrix,
    pub shift: RVector,
}

impl LinearSubstitution {
    pub fn new(matrix: RMatrix, shift: RVector) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != shift.dim() || !matrix.rows().is_multiple_of(2) {
            return Err(Error::Shape(format!(
                "substitution needs a square 2n×2n matrix and a 2n shift, got {}×{} and {}",
                matrix.rows(),
                matrix.cols(),
                shift.dim()
            )));
        }
        Ok(Self { matrix, shift })
    }
}

/// Builds the `2n × 2n` block matrix `[[a, b], [c, d]]`.
fn blocks(a: &RMatrix, b: &RMatrix, c: &RMatrix, d: &RMatrix) -> RMatrix {
    let n = a.rows();
    let mut m = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, a.get(i, j).clone());
            m.set(i, n + j, b.get(i, j).clone());
            m.set(n + i, j, c.get(i, j).clone());
            m.set(n + i, n + j, d.get(i, j).clone());
        }
    }
    m
}

fn concat(a: &RVector, b: &RVector) -> RVector {
    RVector::new(a.entries().iter().chain(b.entries()).cloned().collect())
}

/// `x_row ∘ (M z + shift)` as a degree-one polynomial coefficient.
fn linear_coordinate(sub: &LinearSubstitution, n: usize, row: usize) -> Result<Coefficient> {
    let mut c = Coefficient::constant(n, real(sub.shift[row].clone()));
    for j in 0..2 * n {
        let a = sub.matrix.get(row, j);
        if *a == int(0) {
            continue;
        }
        if j >= n {
            return Err(Error::Ambient(
                "polynomial coefficient would pick up a fibre coordinate".into(),
            ));
        }
        let mut m = Monomial::one(n);
        m.x_pow[j] = 1;
        c.add_term(m, real(a.clone()));
    }
    Ok(c)
}

fn substitute_coefficient(c: &Coefficient, sub: &LinearSubstitution, n: usize) -> Result<Coefficient> {
    let mt = sub.matrix.transpose();
    let mut out = Coefficient::zero();
    for (m, a) in c.terms() {
        let k = RVector::from_i64(&m.freq);
        let phase_arg = k.dot(&sub.shift)?;
        let phase = exact_root_of_unity(&phase_arg)
            .ok_or_else(|| Error::InexactPhase(format!("e^(2πi·{phase_arg}) is not a Gaussian rational")))?;
        let new_k = mt.mul_vec(&k)?;
        let mut freq = Vec::with_capacity(2 * n);
        for q in new_k.entries() {
            if !q.is_integer() {
                return Err(Error::Ambient(format!("pulled-back frequency {q} is not an integer")));
            }
            freq.push(
                q.to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::Ambient("frequency overflow".into()))?,
            );
        }
        let mut head = Monomial::one(n);
        head.freq = freq;
        head.tau = m.tau;
        let mut term = Coefficient::term(head, a * phase);
        for (i, &p) in m.x_pow.iter().enumerate() {
            if p == 0 {
                continue;
            }
            let lin = linear_coordinate(sub, n, i)?;
            for _ in 0..p {
                term = term.mul(&lin);
            }
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// Pullback of `f` along `z ↦ M z + shift`, landing on the `target` ambient.
pub fn pullback(f: &Form, sub: &LinearSubstitution, target: Ambient) -> Result<Form> {
    let n = f.ambient().n;
    if target.n != n || sub.matrix.rows() != 2 * n {
        return Err(Error::Ambient(
            "substitution does not match the ambient dimension".into(),
        ));
    }
    let images: Vec<Form> = (0..2 * n)
        .map(|i| {
            let mut img = Form::zero(target);
            for j in 0..2 * n {
                let a = sub.matrix.get(i, j);
                if *a != int(0) {
                    img.add_term(1 << j, Coefficient::constant(n, real(a.clone())))?;
                }
            }
            Ok(img)
        })
        .collect::<Result<_>>()?;
    let mut out = Form::zero(target);
    for (legs, c) in f.terms() {
        let mut piece = Form::basis(target, 0, substitute_coefficient(c, sub, n)?)?;
        for (i, img) in images.iter().enumerate() {
            if legs >> i & 1 == 1 {
                piece = piece.wedge(img)?;
            }
        }
        out = out.add(&piece);
    }
    Ok(out)
}

/// Pullback along the section `x ↦ (x, S x)`.
pub fn pullback_section(alpha: &Form, s: &RMatrix) -> Result<Form> {
    let n = alpha.ambient().n;
    pullback_section_shifted(alpha, s, &RVector::zeros(n))
}

/// Pullback along the section `x ↦ (x, S x + v)`.
pub fn pullback_section_shifted(alpha: &Form, s: &RMatrix, v: &RVector) -> Result<Form> {
    let n = alpha.ambient().n;
    if s.rows() != n || s.cols() != n || v.dim() != n {
        return Err(Error::Shape(format!("section data must be {n}×{n} and {n}")));
    }
    let zero = RMatrix::zeros(n, n);
    let sub = LinearSubstitution::new(
        blocks(&RMatrix::identity(n), &zero, s, &zero),
        concat(&RVector::zeros(n), v),
    )?;
    pullback(alpha, &sub, alpha.ambient())
}

/// Pullback of `Σ dx'_j ∧ dt'_j` under `(x, t) ↦ (Ax + b, A^{-T} t + G x + c)`.
pub fn transition_pullback_symplectic(tr: &ALTransition) -> Result<Form> {
    let n = tr.dim();
    let amb = Ambient::open(n);
    let sub = LinearSubstitution::new(
        blocks(tr.linear(), &RMatrix::zeros(n, n), tr.fibre_shear(), &tr.fibre_linear()),
        concat(tr.translation(), tr.fibre_shift()),
    )?;
    pullback(&Form::symplectic(amb), &sub, amb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn m(rows: &[&[i64]]) -> RMatrix {
        RMatrix::from_i64(rows).unwrap()
    }

    fn transition(a: RMatrix, g: RMatrix) -> ALTransition {
        let n = a.rows();
        ALTransition::new(a, RVector::zeros(n), g, RVector::zeros(n)).unwrap()
    }

    #[test]
    fn section_of_dy_n() {
        for n in 1..=3 {
            let amb = Ambient::torus(n);
            let minus = RMatrix::identity(n).scale(&int(-1));
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let want = Form::base_volume(amb).scale(&real(int(sign)));
            assert_eq!(pullback_section(&Form::dy_n(amb), &minus).unwrap(), want);
            assert!(pullback_section(&Form::dy_n(amb), &RMatrix::zeros(n, n))
                .unwrap()
                .is_zero());
            let dx = Form::dx(amb, 0);
            assert_eq!(pullback_section(&dx, &minus).unwrap(), dx);
        }
    }

    #[test]
    fn fibre_modes_become_base_modes() {
        // e^{2πi y1} dy1 along y = -x + 1/2 gives -(-1) e^{-2πi x1} dx1
        let amb = Ambient::torus(1);
        let mut mono = Monomial::one(1);
        mono.freq[1] = 1;
        let f = Form::basis(amb, 0b10, Coefficient::term(mono, real(int(1)))).unwrap();
        let got = pullback_section_shifted(&f, &m(&[&[-1]]), &RVector::new(vec![rat(1, 2)])).unwrap();
        let mut want_m = Monomial::one(1);
        want_m.freq[0] = -1;
        assert_eq!(
            got,
            Form::basis(amb, 0b01, Coefficient::term(want_m, real(int(1)))).unwrap()
        );
        let third = pullback_section_shifted(&f, &m(&[&[-1]]), &RVector::new(vec![rat(1, 3)]));
        assert!(matches!(third, Err(Error::InexactPhase(_))));
    }

    #[test]
    fn dy_n_invariant_under_unimodular_fibre_maps() {
        let amb = Ambient::open(2);
        let a = m(&[&[2, 1], &[1, 1]]);
        let sub = LinearSubstitution::new(
            blocks(&RMatrix::identity(2), &RMatrix::zeros(2, 2), &RMatrix::zeros(2, 2), &a),
            RVector::zeros(4),
        )
        .unwrap();
        assert_eq!(pullback(&Form::dy_n(amb), &sub, amb).unwrap(), Form::dy_n(amb));
    }

    #[test]
    fn symplectic_pullback_examples() {
        let omega = Form::symplectic(Ambient::open(2));
        assert_eq!(
            transition_pullback_symplectic(&ALTransition::identity(2)).unwrap(),
            omega
        );
        let shear = transition(RMatrix::identity(2), m(&[&[0, 1], &[0, 0]]));
        let got = transition_pullback_symplectic(&shear).unwrap();
        let extra = Form::dx(Ambient::open(2), 0)
            .wedge(&Form::dx(Ambient::open(2), 1))
            .unwrap();
        assert_eq!(got, omega.add(&extra));
        assert!(!shear.is_symplectomorphism());
        let unipotent = transition(m(&[&[1, 1], &[0, 1]]), RMatrix::zeros(2, 2));
        assert_eq!(transition_pullback_symplectic(&unipotent).unwrap(), omega);
    }

    #[test]
    fn polynomial_substitution() {
        // x1^2 under x ↦ 2x + 1 is 4x^2 + 4x + 1
        let amb = Ambient::open(1);
        let mut sq = Monomial::one(1);
        sq.x_pow[0] = 2;
        let f = Form::basis(amb, 0, Coefficient::term(sq.clone(), real(int(1)))).unwrap();
        let sub = LinearSubstitution::new(m(&[&[2, 0], &[0, 1]]), RVector::from_i64(&[1, 0])).unwrap();
        let got = pullback(&f, &sub, amb).unwrap();
        let mut lin = Monomial::one(1);
        lin.x_pow[0] = 1;
        let mut want = Coefficient::term(sq, real(int(4)));
        want.add_term(lin, real(int(4)));
        want.add_term(Monomial::one(1), real(int(1)));
        assert_eq!(got, Form::basis(amb, 0, want).unwrap());
    }
}

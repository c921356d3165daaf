//! Differential forms on `Ω × T^n` or `T^n × T^n` with polynomial-Fourier coefficients.
//!
//! Coordinates are `z_0..z_{n-1} = x_1..x_n` (base) followed by
//! `z_n..z_{2n-1} = y_1..y_n` (fibre angles, mod 1). A basis form
//! `dz_I` is stored as a bitmask of its legs; legs are always kept in
//! increasing coordinate order, so every base leg precedes every fibre leg.
//! The fibre torus acts by translating the `y` coordinates.

mod coefficient;
mod integrate;
mod pullback;
pub mod random;
pub mod selftest;
mod text;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

pub use coefficient::{exact_root_of_unity, gaussian, real, Coefficient, FormalNumber, Gaussian, Monomial};
pub use integrate::{integrate_top, period, poincare_pairing_check, zero_section_integral, Cycle, PairingCheck};
pub use pullback::{
    pullback, pullback_section, pullback_section_shifted, transition_pullback_symplectic, LinearSubstitution,
};

use crate::error::{Error, Result};
use crate::scalar::int;

/// What the base coordinates range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    /// An open chart `Ω ⊂ R^n`; coefficients may be polynomial in `x`.
    Open,
    /// The torus `R^n / Z^n`; coefficients must be periodic in `x`.
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ambient {
    pub n: usize,
    pub base: BaseKind,
}

impl Ambient {
    pub fn open(n: usize) -> Self {
        Self {
            n,
            base: BaseKind::Open,
        }
    }

    pub fn torus(n: usize) -> Self {
        Self {
            n,
            base: BaseKind::Torus,
        }
    }

    pub fn coords(&self) -> usize {
        2 * self.n
    }

    pub fn base_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn fibre_mask(&self) -> u64 {
        self.base_mask() << self.n
    }

    pub fn all_mask(&self) -> u64 {
        (1u64 << self.coords()) - 1
    }
}

/// Sign of `dz_a ∧ dz_b` relative to `dz_{a ∪ b}`, or `None` when legs repeat.
pub fn wedge_sign(a: u64, b: u64) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    ambient: Ambient,
    terms: BTreeMap<u64, Coefficient>,
}

impl Form {
    pub fn zero(ambient: Ambient) -> Self {
        Self {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    /// `c · dz_legs`.
    pub fn basis(ambient: Ambient, legs: u64, c: Coefficient) -> Result<Self> {
        let mut f = Self::zero(ambient);
        f.add_term(legs, c)?;
        Ok(f)
    }

    /// Constant multiple of `dz_legs`.
    pub fn constant(ambient: Ambient, legs: u64, a: Gaussian) -> Self {
        Self::basis(ambient, legs, Coefficient::constant(ambient.n, a)).expect("legs in range")
    }

    pub fn one(ambient: Ambient) -> Self {
        Self::constant(ambient, 0, real(int(1)))
    }

    /// `dx_i` for a zero-based base index `i`.
    pub fn dx(ambient: Ambient, i: usize) -> Self {
        Self::constant(ambient, 1 << i, real(int(1)))
    }

    /// `dy_j` for a zero-based fibre index `j`.
    pub fn dy(ambient: Ambient, j: usize) -> Self {
        Self::constant(ambient, 1 << (ambient.n + j), real(int(1)))
    }

    /// Top fibre form `dy_1 ∧ … ∧ dy_n`.
    pub fn dy_n(ambient: Ambient) -> Self {
        Self::constant(ambient, ambient.fibre_mask(), real(int(1)))
    }

    /// `dx_1 ∧ … ∧ dx_n`.
    pub fn base_volume(ambient: Ambient) -> Self {
        Self::constant(ambient, ambient.base_mask(), real(int(1)))
    }

    /// `Σ_j dx_j ∧ dy_j`.
    pub fn symplectic(ambient: Ambient) -> Self {
        let mut f = Self::zero(ambient);
        for j in 0..ambient.n {
            f = f.add(&Self::dx(ambient, j).wedge(&Self::dy(ambient, j)).expect("same ambient"));
        }
        f
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Coefficient)> {
        self.terms.iter().map(|(&l, c)| (l, c))
    }

    pub fn coefficient(&self, legs: u64) -> Coefficient {
        self.terms.get(&legs).cloned().unwrap_or_default()
    }

    /// Number of monomial terms across all legs.
    pub fn term_count(&self) -> usize {
        self.terms.values().map(Coefficient::len).sum()
    }

    /// Common degree of all terms; `None` for the zero form or mixed degrees.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|l| l.count_ones() as usize);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    fn check_monomial(&self, m: &Monomial) -> Result<()> {
        let n = self.ambient.n;
        if m.x_pow.len() != n || m.freq.len() != 2 * n {
            return Err(Error::Ambient(format!("monomial sized for the wrong n (expected {n})")));
        }
        if self.ambient.base == BaseKind::Torus && !m.is_polynomial_free() {
            return Err(Error::Ambient("polynomial coefficient on a torus base".into()));
        }
        Ok(())
    }

    pub fn add_term(&mut self, legs: u64, c: Coefficient) -> Result<()> {
        if legs & !self.ambient.all_mask() != 0 {
            return Err(Error::Ambient(format!("legs {legs:#b} out of range")));
        }
        for (m, _) in c.terms() {
            self.check_monomial(m)?;
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.entry(legs) {
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
        Ok(())
    }

    fn add_unchecked(&mut self, legs: u64, c: Coefficient) {
        self.add_term(legs, c).expect("terms built from a valid form");
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "adding forms on different ambients");
        let mut out = self.clone();
        for (&l, c) in &other.terms {
            out.add_unchecked(l, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&real(int(-1)))
    }

    pub fn scale(&self, s: &Gaussian) -> Self {
        let mut out = Self::zero(self.ambient);
        for (&l, c) in &self.terms {
            out.add_unchecked(l, c.scale(s));
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = Self::zero(self.ambient);
        for (&legs, c) in &self.terms {
            for coord in 0..self.ambient.coords() {
                let leg = 1u64 << coord;
                if legs & leg != 0 {
                    continue;
                }
                let dc = c.partial(coord);
                if dc.is_zero() {
                    continue;
                }
                let sign = wedge_sign(leg, legs).expect("disjoint legs");
                out.add_unchecked(legs | leg, dc.scale(&real(int(sign))));
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.wedge_with(other, true)
    }

    /// Wedge product; `signed = false` drops the reordering sign (used only as
    /// a deliberately broken variant for negative controls).
    pub(crate) fn wedge_with(&self, other: &Self, signed: bool) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::Ambient("wedge of forms on different ambients".into()));
        }
        let mut out = Self::zero(self.ambient);
        for (&la, ca) in &self.terms {
            for (&lb, cb) in &other.terms {
                let Some(sign) = wedge_sign(la, lb) else {
                    continue;
                };
                let sign = if signed { sign } else { 1 };
                out.add_unchecked(la | lb, ca.mul(cb).scale(&real(int(sign))));
            }
        }
        Ok(out)
    }

    /// Average over the fibre torus action: keep the fibre zero modes.
    pub fn average(&self) -> Self {
        let mut out = Self::zero(self.ambient);
        for (&l, c) in &self.terms {
            out.add_unchecked(l, c.zero_mode(self.ambient.fibre_mask()));
        }
        out
    }

    /// No coefficient depends on the fibre coordinates.
    pub fn is_invariant(&self) -> bool {
        let fibre = self.ambient.fibre_mask();
        self.terms.values().all(|c| c.independent_of(fibre))
    }

    pub fn is_closed(&self) -> bool {
        self.d().is_zero()
    }

    /// Integration over the fibre torus: keeps terms carrying every `dy` leg,
    /// takes their fibre zero mode and strips the `dy` legs.
    pub fn integrate_fibre(&self) -> Self {
        let fibre = self.ambient.fibre_mask();
        let mut out = Self::zero(self.ambient);
        for (&l, c) in &self.terms {
            if l & fibre != fibre {
                continue;
            }
            out.add_unchecked(l & !fibre, c.zero_mode(fibre));
        }
        out
    }

    /// Every coefficient satisfies the conjugate-symmetry condition.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coefficient::is_real)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb1() -> Ambient {
        Ambient::open(1)
    }

    fn mono(n: usize, x: &[u32], k: &[i64], tau: u32) -> Monomial {
        let mut m = Monomial::one(n);
        m.x_pow[..x.len()].copy_from_slice(x);
        m.freq[..k.len()].copy_from_slice(k);
        m.tau = tau;
        m
    }

    #[test]
    fn d_of_constant_is_zero() {
        assert!(Form::one(Ambient::open(2)).d().is_zero());
    }

    #[test]
    fn d_of_x_dt() {
        // d(x1 dy1) = dx1 ∧ dy1
        let f = Form::basis(amb1(), 0b10, Coefficient::term(mono(1, &[1], &[], 0), real(int(1)))).unwrap();
        assert_eq!(f.d(), Form::dx(amb1(), 0).wedge(&Form::dy(amb1(), 0)).unwrap());
    }

    #[test]
    fn d_of_fourier_mode() {
        // d e^{2πi y1} = 2πi e^{2πi y1} dy1
        let f = Form::basis(amb1(), 0, Coefficient::term(mono(1, &[0], &[0, 1], 0), real(int(1)))).unwrap();
        let want = Form::basis(amb1(), 0b10, Coefficient::term(mono(1, &[0], &[0, 1], 1), real(int(1)))).unwrap();
        assert_eq!(f.d(), want);
    }

    #[test]
    fn wedge_sign_rules() {
        let a = Ambient::open(1);
        let dx = Form::dx(a, 0);
        let dy = Form::dy(a, 0);
        assert_eq!(dx.wedge(&Form::one(a)).unwrap(), dx);
        assert!(dx.wedge(&dx).unwrap().is_zero());
        assert_eq!(dx.wedge(&dy).unwrap(), dy.wedge(&dx).unwrap().neg());
        assert_eq!(wedge_sign(0b10, 0b01), Some(-1));
        assert_eq!(wedge_sign(0b01, 0b10), Some(1));
        assert_eq!(wedge_sign(0b11, 0b01), None);
    }

    #[test]
    fn average_examples() {
        let a = Ambient::open(2);
        let inv = Form::basis(a, 0b0001, Coefficient::term(mono(2, &[2, 0], &[], 0), real(int(1)))).unwrap();
        assert_eq!(inv.average(), inv);
        // e^{2πi y1} dx1 → 0
        let osc = Form::basis(
            a,
            0b0001,
            Coefficient::term(mono(2, &[], &[0, 0, 1, 0], 0), real(int(1))),
        )
        .unwrap();
        assert!(osc.average().is_zero());
        // (3 + e^{2πi y2}) dy1 → 3 dy1
        let mut c = Coefficient::constant(2, real(int(3)));
        c.add_term(mono(2, &[], &[0, 0, 0, 1], 0), real(int(1)));
        let f = Form::basis(a, 0b0100, c).unwrap();
        assert_eq!(f.average(), Form::constant(a, 0b0100, real(int(3))));
    }

    #[test]
    fn integrate_fibre_examples() {
        for n in 1..=3 {
            let a = Ambient::open(n);
            assert_eq!(Form::dy_n(a).integrate_fibre(), Form::one(a));
        }
        let a = amb1();
        let c = Coefficient::term(mono(1, &[2], &[], 0), real(int(5)));
        let f = Form::basis(a, 0b11, c.clone()).unwrap();
        assert_eq!(f.integrate_fibre(), Form::basis(a, 0b01, c).unwrap());
        let osc = Form::basis(a, 0b10, Coefficient::term(mono(1, &[0], &[0, 1], 0), real(int(1)))).unwrap();
        assert!(osc.integrate_fibre().is_zero());
    }

    #[test]
    fn dy_n_is_closed() {
        for n in 1..=3 {
            assert!(Form::dy_n(Ambient::torus(n)).is_closed());
        }
        assert_eq!(
            Form::dy_n(Ambient::open(2)),
            Form::dy(Ambient::open(2), 0)
                .wedge(&Form::dy(Ambient::open(2), 1))
                .unwrap()
        );
    }

    #[test]
    fn torus_base_rejects_polynomials() {
        let err = Form::basis(
            Ambient::torus(1),
            0,
            Coefficient::term(mono(1, &[1], &[], 0), real(int(1))),
        );
        assert!(matches!(err, Err(Error::Ambient(_))));
    }
}

use crate::error::{Error, Result};
use crate::scalar::int;
use crate::{RMatrix, Rational};

use super::coefficient::{exact_root_of_unity, FormalNumber};
use super::pullback::pullback_section;
use super::{BaseKind, Form};

/// A coordinate subtorus of `T^n × T^n`: the coordinates in `mask` run over
/// `[0, 1)`, the rest are frozen at `basepoint`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub mask: u64,
    pub basepoint: Vec<Rational>,
}

impl Cycle {
    pub fn new(mask: u64, basepoint: Vec<Rational>) -> Self {
        Self { mask, basepoint }
    }

    pub fn dim(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// All cycles of the given dimension through `basepoint`.
    pub fn all(coords: usize, k: usize, basepoint: &[Rational]) -> Vec<Self> {
        (0u64..1 << coords)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| Self::new(m, basepoint.to_vec()))
            .collect()
    }
}

fn require_torus(alpha: &Form) -> Result<()> {
    if alpha.ambient().base != BaseKind::Torus {
        return Err(Error::Ambient("integration needs a compact torus base".into()));
    }
    Ok(())
}

/// `∫_cycle alpha`, exact in `Q(i)[2πi]`.
pub fn period(alpha: &Form, cycle: &Cycle) -> Result<FormalNumber> {
    require_torus(alpha)?;
    let amb = alpha.ambient();
    if cycle.basepoint.len() != amb.coords() || cycle.mask & !amb.all_mask() != 0 {
        return Err(Error::Shape(format!("cycle does not live in a {}-torus", amb.coords())));
    }
    let mut out = FormalNumber::zero();
    for (m, a) in alpha.coefficient(cycle.mask).zero_mode(cycle.mask).terms() {
        let mut arg = int(0);
        for (c, &k) in m.freq.iter().enumerate() {
            if cycle.mask >> c & 1 == 0 && k != 0 {
                arg += &cycle.basepoint[c] * int(k);
            }
        }
        let phase = exact_root_of_unity(&arg)
            .ok_or_else(|| Error::InexactPhase(format!("e^(2πi·{arg}) is not a Gaussian rational")))?;
        out.add(m.tau, a * phase);
    }
    Ok(out)
}

/// `∫_{T^n × T^n} alpha` with the orientation `dx_1 … dx_n dy_1 … dy_n`.
pub fn integrate_top(alpha: &Form) -> Result<FormalNumber> {
    require_torus(alpha)?;
    let all = alpha.ambient().all_mask();
    Ok(FormalNumber::constant_part(&alpha.coefficient(all).zero_mode(all)))
}

/// `∫_{Z_0} alpha`: integral of the pullback along the zero section.
pub fn zero_section_integral(alpha: &Form) -> Result<FormalNumber> {
    require_torus(alpha)?;
    let amb = alpha.ambient();
    let base = pullback_section(alpha, &RMatrix::zeros(amb.n, amb.n))?;
    let mask = amb.base_mask();
    Ok(FormalNumber::constant_part(&base.coefficient(mask).zero_mode(mask)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingCheck {
    pub lhs: FormalNumber,
    pub rhs: FormalNumber,
    pub equal: bool,
}

/// Compares `∫_{Z_0} alpha` with `∫ alpha ∧ dy_n` for a closed invariant `n`-form.
pub fn poincare_pairing_check(alpha: &Form) -> Result<PairingCheck> {
    require_torus(alpha)?;
    let n = alpha.ambient().n;
    if alpha.degree().is_some_and(|k| k != n) {
        return Err(Error::Ambient(format!("expected an {n}-form")));
    }
    if !alpha.is_closed() {
        return Err(Error::NotClosed);
    }
    if !alpha.is_invariant() {
        return Err(Error::NotInvariant);
    }
    let lhs = zero_section_integral(alpha)?;
    let rhs = integrate_top(&alpha.wedge(&Form::dy_n(alpha.ambient()))?)?;
    let equal = lhs == rhs;
    Ok(PairingCheck { lhs, rhs, equal })
}

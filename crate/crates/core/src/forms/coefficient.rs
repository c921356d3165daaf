//! Coefficient ring: finite sums `a · τ^p · x^α · e^{τ⟨k, z⟩}` with `τ = 2πi`
//! kept formal and `a` a Gaussian rational.
//!
//! `z = (x_1..x_n, y_1..y_n)` runs over base then fibre coordinates; the
//! frequency vector `k` has one entry per coordinate.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::int;
use crate::Rational;

pub type Gaussian = Complex<Rational>;

pub fn gaussian(re: Rational, im: Rational) -> Gaussian {
    Complex::new(re, im)
}

pub fn real(re: Rational) -> Gaussian {
    Complex::new(re, int(0))
}

/// `e^{2πi q}` when it is a Gaussian rational, i.e. `4q ∈ Z`.
pub fn exact_root_of_unity(q: &Rational) -> Option<Gaussian> {
    let quarter = crate::scalar::frac(q) * int(4);
    if !quarter.is_integer() {
        return None;
    }
    let one = int(1);
    let zero = int(0);
    Some(match quarter.to_integer().to_i64()? {
        0 => Complex::new(one, zero),
        1 => Complex::new(zero, one),
        2 => Complex::new(-one, zero),
        _ => Complex::new(zero, -one),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Polynomial exponents of the base coordinates.
    pub x_pow: Vec<u32>,
    /// Fourier frequencies over all `2n` coordinates.
    pub freq: Vec<i64>,
    /// Power of the formal unit `τ = 2πi`.
    pub tau: u32,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Self {
            x_pow: vec![0; n],
            freq: vec![0; 2 * n],
            tau: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.x_pow.len()
    }

    pub fn is_polynomial_free(&self) -> bool {
        self.x_pow.iter().all(|&p| p == 0)
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            x_pow: self.x_pow.iter().zip(&other.x_pow).map(|(a, b)| a + b).collect(),
            freq: self.freq.iter().zip(&other.freq).map(|(a, b)| a + b).collect(),
            tau: self.tau + other.tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, Gaussian>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(n: usize, a: Gaussian) -> Self {
        Self::term(Monomial::one(n), a)
    }

    pub fn term(m: Monomial, a: Gaussian) -> Self {
        let mut c = Self::zero();
        c.add_term(m, a);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gaussian)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, a: Gaussian) {
        if a.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += a;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(a);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in &other.terms {
            out.add_term(m.clone(), a.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&real(int(-1)))
    }

    pub fn scale(&self, s: &Gaussian) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, a1) in &self.terms {
            for (m2, a2) in &other.terms {
                out.add_term(m1.mul(m2), a1 * a2);
            }
        }
        out
    }

    /// `∂/∂z_c`, with `c < n` a base coordinate and `c ≥ n` a fibre coordinate.
    pub fn partial(&self, c: usize) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            let n = m.n();
            if c < n && m.x_pow[c] > 0 {
                let mut d = m.clone();
                d.x_pow[c] -= 1;
                out.add_term(d, a * real(int(i64::from(m.x_pow[c]))));
            }
            if m.freq[c] != 0 {
                let mut d = m.clone();
                d.tau += 1;
                out.add_term(d, a * real(int(m.freq[c])));
            }
        }
        out
    }

    /// Keeps the terms whose frequencies vanish on every coordinate in `mask`.
    ///
    /// This is `∫ … dz_mask` over the unit torus in those coordinates for
    /// terms without polynomial dependence on them.
    pub fn zero_mode(&self, mask: u64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.freq.iter().enumerate().all(|(c, &k)| mask >> c & 1 == 0 || k == 0))
                .map(|(m, a)| (m.clone(), a.clone()))
                .collect(),
        }
    }

    /// True when every term depends on no coordinate in `mask`.
    pub fn independent_of(&self, mask: u64) -> bool {
        self.terms.keys().all(|m| {
            (0..m.freq.len()).all(|c| mask >> c & 1 == 0 || (m.freq[c] == 0 && (c >= m.n() || m.x_pow[c] == 0)))
        })
    }

    /// Realness: `conj` of the term at `(α, k, p)` equals `(−1)^p` times the term at `(α, −k, p)`.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(m, a)| {
            let mut partner = m.clone();
            partner.freq.iter_mut().for_each(|k| *k = -*k);
            let want = if m.tau % 2 == 0 { a.conj() } else { -a.conj() };
            self.terms.get(&partner).is_some_and(|b| *b == want)
        })
    }
}

/// Exact value `Σ_p a_p τ^p` in `Q(i)[2πi]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalNumber {
    by_tau: BTreeMap<u32, Gaussian>,
}

impl FormalNumber {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut f = Self::zero();
        f.add(0, real(r));
        f
    }

    pub fn add(&mut self, tau: u32, a: Gaussian) {
        if a.is_zero() {
            return;
        }
        let slot = self.by_tau.entry(tau).or_insert_with(Gaussian::zero);
        *slot += a;
        if slot.is_zero() {
            self.by_tau.remove(&tau);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.by_tau.is_empty()
    }

    /// The value when it is a plain rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.by_tau.len() {
            0 => Some(int(0)),
            1 => {
                let (&p, a) = self.by_tau.iter().next()?;
                (p == 0 && a.im.is_zero()).then(|| a.re.clone())
            }
            _ => None,
        }
    }

    /// Sum of constant terms: terms with no polynomial or Fourier dependence.
    pub fn constant_part(c: &Coefficient) -> Self {
        let mut out = Self::zero();
        for (m, a) in c.terms() {
            if m.is_polynomial_free() && m.freq.iter().all(|&k| k == 0) {
                out.add(m.tau, a.clone());
            }
        }
        out
    }
}

pub(crate) fn fmt_gaussian(a: &Gaussian, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if a.im.is_zero() {
        write!(f, "{}", a.re)
    } else {
        let sign = if a.im < int(0) { "-" } else { "+" };
        let im = if a.im < int(0) { -a.im.clone() } else { a.im.clone() };
        write!(f, "({}{sign}{im}i)", a.re)
    }
}

impl fmt::Display for FormalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.by_tau.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, a)) in self.by_tau.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            fmt_gaussian(a, f)?;
            match p {
                0 => {}
                1 => write!(f, "*tau")?,
                _ => write!(f, "*tau^{p}")?,
            }
        }
        Ok(())
    }
}

impl One for FormalNumber {
    fn one() -> Self {
        Self::from_rational(int(1))
    }
}

impl std::ops::Mul for FormalNumber {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (p, a) in &self.by_tau {
            for (q, b) in &rhs.by_tau {
                out.add(p + q, a * b);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn mono(x: &[u32], k: &[i64]) -> Monomial {
        Monomial {
            x_pow: x.to_vec(),
            freq: k.to_vec(),
            tau: 0,
        }
    }

    #[test]
    fn partial_derivatives() {
        // ∂/∂x1 of x1² e^{τ x1} = 2 x1 e + τ x1² e
        let c = Coefficient::term(mono(&[2], &[1, 0]), real(int(1)));
        let d = c.partial(0);
        assert_eq!(d.len(), 2);
        let mut want = Coefficient::term(mono(&[1], &[1, 0]), real(int(2)));
        want.add_term(
            Monomial {
                tau: 1,
                ..mono(&[2], &[1, 0])
            },
            real(int(1)),
        );
        assert_eq!(d, want);
        // fibre derivative of a base-only term vanishes
        assert!(c.partial(1).is_zero());
    }

    #[test]
    fn cancellation_prunes_terms() {
        let c = Coefficient::constant(1, real(int(3)));
        assert!(c.add(&c.neg()).is_zero());
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(exact_root_of_unity(&rat(1, 4)), Some(gaussian(int(0), int(1))));
        assert_eq!(exact_root_of_unity(&rat(-1, 2)), Some(real(int(-1))));
        assert_eq!(exact_root_of_unity(&int(3)), Some(real(int(1))));
        assert_eq!(exact_root_of_unity(&rat(1, 3)), None);
    }

    #[test]
    fn reality_condition() {
        let mut c = Coefficient::term(mono(&[0], &[0, 1]), gaussian(int(1), int(2)));
        assert!(!c.is_real());
        c.add_term(mono(&[0], &[0, -1]), gaussian(int(1), int(-2)));
        assert!(c.is_real());
        // τ is imaginary: a real derivative keeps realness
        assert!(c.partial(1).is_real());
    }

    #[test]
    fn formal_number_display() {
        let mut f = FormalNumber::from_rational(rat(1, 2));
        f.add(1, gaussian(int(0), int(-3)));
        assert_eq!(f.to_string(), "1/2 + (0-3i)*tau");
        assert_eq!(FormalNumber::zero().to_string(), "0");
    }
}

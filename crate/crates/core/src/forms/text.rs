//! Text syntax for forms.
//!
//! ```text
//! form   := "0" | term (" + " term)*
//! term   := coeff [" " legs]
//! coeff  := amp ("*" factor)*
//! amp    := rational | "(" rational ("+"|"-") rational "i)"
//! factor := "x" i ["^" p] | "e(" k_x "|" k_y ")" | "tau" ["^" p]
//! legs   := leg ("^" leg)*        leg := "dx" i | "dy" i
//! ```
//!
//! Indices are 1-based; `k_x` and `k_y` are comma-separated integer lists of
//! length `n`, the frequencies of `e^{2πi(⟨k_x, x⟩ + ⟨k_y, y⟩)}`. `tau` is `2πi`.
//! Example: `2*x1*e(1,0|0,0) dx1^dy2`.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::parse_rational;
use crate::Rational;

use super::coefficient::{fmt_gaussian, gaussian, Coefficient, Gaussian, Monomial};
use super::{Ambient, Form};

fn fmt_ints(f: &mut fmt::Formatter<'_>, ks: &[i64]) -> fmt::Result {
    for (i, k) in ks.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{k}")?;
    }
    Ok(())
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.ambient.n;
        let mut first = true;
        for (&legs, c) in &self.terms {
            for (m, a) in c.terms() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                fmt_gaussian(a, f)?;
                for (i, &p) in m.x_pow.iter().enumerate() {
                    match p {
                        0 => {}
                        1 => write!(f, "*x{}", i + 1)?,
                        _ => write!(f, "*x{}^{p}", i + 1)?,
                    }
                }
                if m.freq.iter().any(|&k| k != 0) {
                    write!(f, "*e(")?;
                    fmt_ints(f, &m.freq[..n])?;
                    write!(f, "|")?;
                    fmt_ints(f, &m.freq[n..])?;
                    write!(f, ")")?;
                }
                match m.tau {
                    0 => {}
                    1 => write!(f, "*tau")?,
                    p => write!(f, "*tau^{p}")?,
                }
                if legs != 0 {
                    write!(f, " ")?;
                    let mut sep = "";
                    for c in 0..2 * n {
                        if legs >> c & 1 == 1 {
                            let (name, idx) = if c < n { ("dx", c + 1) } else { ("dy", c - n + 1) };
                            write!(f, "{sep}{name}{idx}")?;
                            sep = "^";
                        }
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn bad(what: impl fmt::Display) -> Error {
    Error::Parse(format!("form: {what}"))
}

fn parse_index(s: &str, n: usize) -> Result<usize> {
    let i: usize = s.parse().map_err(|_| bad(format!("bad index {s:?}")))?;
    if i == 0 || i > n {
        return Err(bad(format!("index {i} out of range 1..={n}")));
    }
    Ok(i - 1)
}

fn parse_power(s: Option<&str>) -> Result<u32> {
    match s {
        None => Ok(1),
        Some(p) => p.parse().map_err(|_| bad(format!("bad exponent {p:?}"))),
    }
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| bad(format!("bad rational {s:?}")))
}

fn parse_amp(s: &str) -> Result<Gaussian> {
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix("i)")) {
        let split = inner
            .char_indices()
            .skip(1)
            .filter(|&(_, ch)| ch == '+' || ch == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| bad(format!("bad complex amplitude {s:?}")))?;
        let re = rational(&inner[..split])?;
        let im = rational(inner[split + 1..].trim_start_matches('+'))?;
        let im = if inner.as_bytes()[split] == b'-' { -im } else { im };
        return Ok(gaussian(re, im));
    }
    Ok(gaussian(rational(s)?, Zero::zero()))
}

fn parse_freqs(s: &str, n: usize) -> Result<Vec<i64>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(bad(format!("expected {n} frequencies in {s:?}")));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| bad(format!("bad frequency {p:?}"))))
        .collect()
}

fn parse_term(s: &str, n: usize) -> Result<(u64, Monomial, Gaussian)> {
    let (coeff, legs) = match s.split_once(' ') {
        Some((c, l)) => (c, Some(l)),
        None => (s, None),
    };
    let mut factors = coeff.split('*');
    let amp = parse_amp(factors.next().unwrap_or_default())?;
    let mut m = Monomial::one(n);
    for factor in factors {
        if let Some(rest) = factor.strip_prefix("tau") {
            m.tau += match rest.strip_prefix('^') {
                Some(p) => parse_power(Some(p))?,
                None if rest.is_empty() => 1,
                None => return Err(bad(format!("unknown factor {factor:?}"))),
            };
        } else if let Some(rest) = factor.strip_prefix('x') {
            let (idx, pow) = match rest.split_once('^') {
                Some((i, p)) => (i, Some(p)),
                None => (rest, None),
            };
            m.x_pow[parse_index(idx, n)?] += parse_power(pow)?;
        } else if let Some(body) = factor.strip_prefix("e(").and_then(|r| r.strip_suffix(')')) {
            let (kx, ky) = body
                .split_once('|')
                .ok_or_else(|| bad(format!("bad mode {factor:?}")))?;
            let kx = parse_freqs(kx, n)?;
            let ky = parse_freqs(ky, n)?;
            for (slot, k) in m.freq.iter_mut().zip(kx.into_iter().chain(ky)) {
                *slot += k;
            }
        } else {
            return Err(bad(format!("unknown factor {factor:?}")));
        }
    }
    let mut mask = 0u64;
    if let Some(legs) = legs {
        let mut last = None;
        for leg in legs.split('^') {
            let c = if let Some(i) = leg.strip_prefix("dx") {
                parse_index(i, n)?
            } else if let Some(i) = leg.strip_prefix("dy") {
                n + parse_index(i, n)?
            } else {
                return Err(bad(format!("bad leg {leg:?}")));
            };
            if last.is_some_and(|l| l >= c) {
                return Err(bad(format!("legs must be strictly increasing in {legs:?}")));
            }
            last = Some(c);
            mask |= 1 << c;
        }
    }
    Ok((mask, m, amp))
}

impl Form {
    /// Parses the text syntax of [`Form`]'s `Display` on the given ambient.
    pub fn parse(text: &str, ambient: Ambient) -> Result<Self> {
        let mut out = Self::zero(ambient);
        let text = text.trim();
        if text == "0" {
            return Ok(out);
        }
        for term in text.split(" + ") {
            let (legs, m, a) = parse_term(term.trim(), ambient.n)?;
            out.add_term(legs, Coefficient::term(m, a))?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::real;
    use crate::scalar::{int, rat};

    #[test]
    fn documented_example() {
        let amb = Ambient::open(2);
        let f = Form::parse("2*x1*e(1,0|0,0) dx1^dy2", amb).unwrap();
        let mut m = Monomial::one(2);
        m.x_pow[0] = 1;
        m.freq[0] = 1;
        assert_eq!(f, Form::basis(amb, 0b1001, Coefficient::term(m, real(int(2)))).unwrap());
        assert_eq!(f.to_string(), "2*x1*e(1,0|0,0) dx1^dy2");
    }

    #[test]
    fn round_trips() {
        let amb = Ambient::open(2);
        for text in [
            "0",
            "1",
            "-1/2 dy1",
            "(1/3-2i)*x2^3*tau^2 dx1^dx2 + (0+1i)*e(0,0|-1,2) dy1^dy2",
            "3*tau dx2",
        ] {
            let f = Form::parse(text, amb).unwrap();
            assert_eq!(Form::parse(&f.to_string(), amb).unwrap(), f, "{text}");
        }
        assert_eq!(Form::parse("1 + -1", amb).unwrap(), Form::zero(amb));
        assert_eq!(
            Form::parse("1/4 dx1", amb).unwrap(),
            Form::constant(amb, 1, real(rat(1, 4)))
        );
    }

    #[test]
    fn rejects_malformed() {
        let amb = Ambient::open(1);
        for text in ["", "x1", "1*z1", "1 dx2", "1 dy1^dx1", "1*e(1|)", "(1+i)", "1 dx1^dx1"] {
            assert!(matches!(Form::parse(text, amb), Err(Error::Parse(_))), "{text}");
        }
        assert!(matches!(Form::parse("1*x1", Ambient::torus(1)), Err(Error::Ambient(_))));
    }
}

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::Poly;
use crate::error::{check_dim, Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// A linear form `c_1 z_1 + ... + c_l z_l` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: Vec<Rational>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        LinearForm { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        LinearForm {
            coeffs: coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect(),
        }
    }

    pub fn zero(vars: usize) -> Self {
        LinearForm {
            coeffs: vec![Rational::zero(); vars],
        }
    }

    /// `sign * z_{index+1}`.
    pub fn signed_var(vars: usize, index: usize, negative: bool) -> Self {
        let mut f = Self::zero(vars);
        f.coeffs[index] = if negative { -Rational::one() } else { Rational::one() };
        f
    }

    pub fn vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, v: usize) -> &Rational {
        &self.coeffs[v]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some((index, negative))` when the form is exactly `±z_v`.
    pub fn as_signed_var(&self) -> Option<(usize, bool)> {
        let mut found = None;
        for (v, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if found.is_some() || c.abs() != Rational::one() {
                return None;
            }
            found = Some((v, c.is_negative()));
        }
        found
    }

    /// Whether the form lies in the search alphabet `{0, ±z_v}`.
    pub fn in_alphabet(&self) -> bool {
        self.is_zero() || self.as_signed_var().is_some()
    }

    pub fn neg(&self) -> Self {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn checked_add(&self, other: &LinearForm) -> Result<LinearForm> {
        check_dim(self.vars(), other.vars())?;
        Ok(LinearForm {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        check_dim(self.vars(), point.len())?;
        Ok(self.coeffs.iter().zip(point).map(|(a, x)| a * x).sum())
    }

    /// Composition `z_v ↦ images[v]`: returns `Σ c_v · images[v]`.
    pub fn compose(&self, images: &[LinearForm]) -> Result<LinearForm> {
        check_dim(self.vars(), images.len())?;
        let target = images.first().map(LinearForm::vars).unwrap_or(0);
        let mut out = LinearForm::zero(target);
        for (c, img) in self.coeffs.iter().zip(images) {
            if !c.is_zero() {
                out = out.checked_add(&img.scale(c))?;
            }
        }
        Ok(out)
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::zero(self.vars());
        for (v, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                p = &p + &Poly::var(self.vars(), v).scale(c);
            }
        }
        p
    }

    /// Parses `0`, `z2`, `-z3`, `2*z1-z3`, `1/2*s1+s2` over `vars` variables.
    /// Either stem `z` or `s` is accepted.
    pub fn parse(text: &str, vars: usize) -> Result<LinearForm> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |why: &str| Error::Parse(format!("bad linear form {text:?}: {why}"));
        if compact.is_empty() {
            return Err(err("empty"));
        }
        let mut out = LinearForm::zero(vars);
        // Split into signed summands.
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !current.ends_with('/') {
                pieces.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        pieces.push((negative, current));
        for (negative, piece) in pieces {
            if piece.is_empty() {
                return Err(err("dangling sign"));
            }
            let var_pos = piece.find(['z', 's']);
            let (coeff, var) = match var_pos {
                None => {
                    let c = parse_rational(&piece)?;
                    if !c.is_zero() {
                        return Err(err("constant terms are not allowed"));
                    }
                    continue;
                }
                Some(pos) => {
                    let head = piece[..pos].trim_end_matches('*');
                    let c = if head.is_empty() { Rational::one() } else { parse_rational(head)? };
                    let idx: usize = piece[pos + 1..].parse().map_err(|_| err("bad variable index"))?;
                    (c, idx)
                }
            };
            if var == 0 || var > vars {
                return Err(err(&format!("variable index {var} outside 1..={vars}")));
            }
            out.coeffs[var - 1] += if negative { -coeff } else { coeff };
        }
        Ok(out)
    }

    pub fn display_with<'a>(&'a self, stem: &'a str) -> LinearFormDisplay<'a> {
        LinearFormDisplay { form: self, stem }
    }
}

pub struct LinearFormDisplay<'a> {
    form: &'a LinearForm,
    stem: &'a str,
}

impl fmt::Display for LinearFormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in self.form.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_negative() {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{}*", format_rational(&a))?;
            }
            write!(f, "{}{}", self.stem, v + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with("z").fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for text in ["0", "z1", "-z3", "2*z1-z3", "1/2*z2", "z1+z2-4*z3"] {
            let f = LinearForm::parse(text, 3).unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert_eq!(LinearForm::parse(" - s2 ", 3).unwrap(), LinearForm::from_ints(&[0, -1, 0]));
        assert!(LinearForm::parse("z4", 3).is_err());
        assert!(LinearForm::parse("z1+1", 3).is_err());
        assert!(LinearForm::parse("", 3).is_err());
    }

    #[test]
    fn alphabet_membership() {
        assert!(LinearForm::parse("-z2", 3).unwrap().in_alphabet());
        assert!(LinearForm::zero(3).in_alphabet());
        assert!(!LinearForm::parse("z1+z2", 3).unwrap().in_alphabet());
        assert!(!LinearForm::parse("2*z1", 3).unwrap().in_alphabet());
        assert_eq!(LinearForm::parse("-z2", 3).unwrap().as_signed_var(), Some((1, true)));
    }

    #[test]
    fn composition_matches_polynomial_substitution() {
        let f = LinearForm::from_ints(&[1, -2]);
        let images = [LinearForm::from_ints(&[1, 1]), LinearForm::from_ints(&[0, 1])];
        let composed = f.compose(&images).unwrap();
        assert_eq!(composed, LinearForm::from_ints(&[1, -1]));
        assert_eq!(
            composed.to_poly(),
            f.to_poly().substitute_linear(&images).unwrap()
        );
    }
}

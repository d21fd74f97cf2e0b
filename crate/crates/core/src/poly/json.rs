//! JSON wire format for polynomials:
//! `{"vars": k, "terms": [{"exp": [..], "num": "..", "den": ".."}]}`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Poly;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub num: String,
    pub den: String,
}

impl From<&Poly> for PolyJson {
    fn from(p: &Poly) -> Self {
        PolyJson {
            vars: p.vars(),
            terms: p
                .terms()
                .rev()
                .map(|(m, c)| TermJson {
                    exp: m.exponents().to_vec(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for Poly {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Poly> {
        if j.vars == 0 {
            return Err(Error::Parse("polynomial needs at least one variable".into()));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            let num = BigInt::from_str(&t.num).map_err(|_| Error::Parse(format!("bad numerator {:?}", t.num)))?;
            let den = BigInt::from_str(&t.den).map_err(|_| Error::Parse(format!("bad denominator {:?}", t.den)))?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            terms.push((t.exp, Rational::new(num, den)));
        }
        Poly::from_terms(j.vars, terms)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Poly, D::Error> {
        let j = PolyJson::deserialize(d)?;
        Poly::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_format_is_stable() {
        let p = Poly::from_int_terms(2, &[(&[2, 0], -1), (&[0, 2], -1)]).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(
            text,
            r#"{"vars":2,"terms":[{"exp":[2,0],"num":"-1","den":"1"},{"exp":[0,2],"num":"-1","den":"1"}]}"#
        );
        let back: Poly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(serde_json::from_str::<Poly>(r#"{"vars":2,"terms":[{"exp":[1],"num":"1","den":"1"}]}"#).is_err());
        assert!(serde_json::from_str::<Poly>(r#"{"vars":1,"terms":[{"exp":[1],"num":"1","den":"0"}]}"#).is_err());
    }
}

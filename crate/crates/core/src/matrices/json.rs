//! Matrix JSON: `{"l":3, "n":7, "entries":[["z1","z2",...], ...]}`.
//!
//! Either the full square layout (checked for symmetry) or the upper
//! triangle (row `i` lists columns `i..size`) is accepted; output is always
//! the full square.

use serde::{Deserialize, Serialize};

use super::SymbolicMatrix;
use crate::error::{contract, Error, Result};
use crate::poly::LinearForm;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub entries: Vec<Vec<String>>,
}

impl From<&SymbolicMatrix> for MatrixJson {
    fn from(m: &SymbolicMatrix) -> Self {
        MatrixJson {
            l: m.l(),
            n: Some(m.l() + m.size()),
            entries: m.rows().iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for SymbolicMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<SymbolicMatrix> {
        let size = j.entries.len();
        if size == 0 {
            return contract("matrix has no rows");
        }
        if let Some(n) = j.n {
            if n != j.l + size {
                return contract(format!("n = {n} but l + size = {}", j.l + size));
            }
        }
        let parse_row = |row: &Vec<String>| row.iter().map(|s| LinearForm::parse(s, j.l)).collect::<Result<Vec<_>>>();
        let rows = j.entries.iter().map(parse_row).collect::<Result<Vec<_>>>()?;
        let full = rows.iter().all(|r| r.len() == size);
        let upper = rows.iter().enumerate().all(|(i, r)| r.len() == size - i);
        let entries = if full {
            rows
        } else if upper {
            let mut sq = vec![vec![LinearForm::zero(j.l); size]; size];
            for (i, r) in rows.into_iter().enumerate() {
                for (k, e) in r.into_iter().enumerate() {
                    sq[i][i + k] = e.clone();
                    sq[i + k][i] = e;
                }
            }
            sq
        } else {
            return contract("entries must be a full square or an upper triangle");
        };
        SymbolicMatrix::new(j.l, entries)
    }
}

impl SymbolicMatrix {
    pub fn from_json_str(text: &str) -> Result<SymbolicMatrix> {
        let j: MatrixJson = serde_json::from_str(text)?;
        j.try_into()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from(self)
    }
}

pub(crate) mod matrix_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &SymbolicMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SymbolicMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        SymbolicMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::m37;

    #[test]
    fn documented_example_parses() {
        let text = r#"{"l":3, "n":7, "entries":[["z1","z2","z3","-z3"],["z2","-z1","z3","z3"],["z3","z3","z1","z2"],["-z3","z3","z2","-z1"]]}"#;
        assert_eq!(SymbolicMatrix::from_json_str(text).unwrap(), m37());
    }

    #[test]
    fn upper_triangle_is_authoritative() {
        let text = r#"{"l":3, "entries":[["z1","z2","z3","-z3"],["-z1","z3","z3"],["z1","z2"],["-z1"]]}"#;
        assert_eq!(SymbolicMatrix::from_json_str(text).unwrap(), m37());
    }

    #[test]
    fn validation_errors() {
        let asym = r#"{"l":2, "entries":[["z1","z2"],["z1","-z1"]]}"#;
        assert!(matches!(SymbolicMatrix::from_json_str(asym), Err(Error::Contract(_))));
        let wrong_n = r#"{"l":2, "n":5, "entries":[["z1","z2"],["z2","-z1"]]}"#;
        assert!(SymbolicMatrix::from_json_str(wrong_n).is_err());
        assert!(matches!(SymbolicMatrix::from_json_str("{\"l\":2,"), Err(Error::Json(_))));
    }

    #[test]
    fn serializes_full_square() {
        let j = serde_json::to_string(&m37().to_json()).unwrap();
        assert!(j.starts_with(r#"{"l":3,"n":7,"entries":[["z1","z2","z3","-z3"]"#));
    }
}

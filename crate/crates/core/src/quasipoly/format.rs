//! TOML text format for [`PiecewiseQP`].
//!
//! ```toml
//! format = "piecewise-qp"
//! version = 1
//! rank = 1
//!
//! [[piece]]
//! coeff = 1
//! halfspaces = [{ normal = ["1"], offset = "0" }, { normal = ["-1"], offset = "-2" }]
//! qp.period = 2
//! qp.classes = [
//!     { residues = [1, 0], terms = [{ exp = [0, 0], coeff = "1" }] },
//!     { residues = [1, 1], terms = [{ exp = [0, 0], coeff = "1" }] },
//! ]
//! ```
//!
//! Rationals are strings `"p"` or `"p/q"`. Residues and exponents list the
//! `λ` coordinates first and `k` last.

use serde::{Deserialize, Serialize};

use super::{HalfSpace, Piece, PiecewiseQP, Polyhedron, QpError, QuasiPolynomial};
use crate::exact_series::Rational;
use crate::poly::Poly;

pub const FORMAT_NAME: &str = "piecewise-qp";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Doc {
    format: String,
    version: u32,
    rank: usize,
    #[serde(default, rename = "piece")]
    pieces: Vec<PieceDoc>,
}

#[derive(Serialize, Deserialize)]
struct PieceDoc {
    coeff: i64,
    halfspaces: Vec<HalfSpaceDoc>,
    qp: QpDoc,
}

#[derive(Serialize, Deserialize)]
struct HalfSpaceDoc {
    normal: Vec<String>,
    offset: String,
}

#[derive(Serialize, Deserialize)]
struct QpDoc {
    period: i64,
    #[serde(default)]
    classes: Vec<ClassDoc>,
}

#[derive(Serialize, Deserialize)]
struct ClassDoc {
    residues: Vec<i64>,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    exp: Vec<u32>,
    coeff: String,
}

fn parse_rat(s: &str) -> Result<Rational, QpError> {
    s.trim().parse::<Rational>().map_err(|_| QpError::Format(format!("bad rational {s:?}")))
}

impl PiecewiseQP {
    pub fn to_toml(&self) -> String {
        let doc = Doc {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            rank: self.rank(),
            pieces: self
                .pieces()
                .iter()
                .map(|p| PieceDoc {
                    coeff: p.coeff,
                    halfspaces: p
                        .polyhedron
                        .halfspaces()
                        .iter()
                        .map(|h| HalfSpaceDoc {
                            normal: h.normal.iter().map(ToString::to_string).collect(),
                            offset: h.offset.to_string(),
                        })
                        .collect(),
                    qp: QpDoc {
                        period: p.qp.period(),
                        classes: p
                            .qp
                            .classes()
                            .map(|(res, poly)| ClassDoc {
                                residues: res.clone(),
                                terms: poly
                                    .terms()
                                    .map(|(e, c)| TermDoc { exp: e.clone(), coeff: c.to_string() })
                                    .collect(),
                            })
                            .collect(),
                    },
                })
                .collect(),
        };
        toml::to_string(&doc).expect("document is plain data")
    }

    pub fn from_toml(text: &str) -> Result<Self, QpError> {
        let doc: Doc = toml::from_str(text).map_err(|e| QpError::Format(e.to_string()))?;
        if doc.format != FORMAT_NAME {
            return Err(QpError::Format(format!("expected format {FORMAT_NAME:?}, got {:?}", doc.format)));
        }
        if doc.version != FORMAT_VERSION {
            return Err(QpError::Format(format!("unsupported version {}", doc.version)));
        }
        let r = doc.rank;
        let mut pieces = Vec::with_capacity(doc.pieces.len());
        for p in doc.pieces {
            let hs = p
                .halfspaces
                .iter()
                .map(|h| {
                    if h.normal.len() != r {
                        return Err(QpError::RankMismatch { expected: r, got: h.normal.len() });
                    }
                    Ok(HalfSpace {
                        normal: h.normal.iter().map(|x| parse_rat(x)).collect::<Result<_, _>>()?,
                        offset: parse_rat(&h.offset)?,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut qp = QuasiPolynomial::new(r, p.qp.period)?;
            for class in p.qp.classes {
                let mut poly = Poly::zero(r + 1);
                for t in class.terms {
                    if t.exp.len() != r + 1 {
                        return Err(QpError::RankMismatch { expected: r + 1, got: t.exp.len() });
                    }
                    poly.add_term(t.exp, parse_rat(&t.coeff)?);
                }
                qp.set(class.residues, poly)?;
            }
            pieces.push(Piece { polyhedron: Polyhedron::new(r, hs), coeff: p.coeff, qp });
        }
        PiecewiseQP::new(r, pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAG_SQUARE: &str = r#"
format = "piecewise-qp"
version = 1
rank = 1

[[piece]]
coeff = 1
halfspaces = [{ normal = ["1"], offset = "0" }, { normal = ["-1"], offset = "-2" }]
qp.period = 2
qp.classes = [
    { residues = [1, 0], terms = [{ exp = [0, 0], coeff = "1" }] },
    { residues = [1, 1], terms = [{ exp = [0, 0], coeff = "1" }] },
]
"#;

    #[test]
    fn parse_documented_example() {
        let m = PiecewiseQP::from_toml(FLAG_SQUARE).unwrap();
        assert_eq!(m.eval(&[3], 2), Rational::from_integer(1.into()));
        assert_eq!(m.eval(&[5], 2), Rational::from_integer(0.into()));
        let again = PiecewiseQP::from_toml(&m.to_toml()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(PiecewiseQP::from_toml("format = \"other\"\nversion = 1\nrank = 1").is_err());
        let bad = FLAG_SQUARE.replace("offset = \"0\"", "offset = \"zero\"");
        assert!(matches!(PiecewiseQP::from_toml(&bad), Err(QpError::Format(_))));
        let bad = FLAG_SQUARE.replace("residues = [1, 0]", "residues = [1, 7]");
        assert!(matches!(PiecewiseQP::from_toml(&bad), Err(QpError::BadResidue(_))));
    }
}

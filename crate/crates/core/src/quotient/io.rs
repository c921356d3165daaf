//! JSON presentation files.
//!
//! ```json
//! { "dim": 2, "label": "klein",
//!   "generators": [ { "A": [["1","0"],["0","1"]], "b": ["1","0"] } ],
//!   "domain": { "vertices": [["0","0"], ...], "open_facets": [1, 3] } }
//! ```
//!
//! `open_facets` indexes the canonical facet order of [`Polytope::new`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{parse_rvector, rvector_strings};
use crate::scalar::format_rational;
use crate::{RAffineMap, RMatrix};

use super::{Polytope, QuotientPresentation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub dim: usize,
    pub label: String,
    pub generators: Vec<GeneratorFile>,
    pub domain: DomainFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    pub b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub vertices: Vec<Vec<String>>,
    pub open_facets: Vec<usize>,
}

impl From<&QuotientPresentation> for PresentationFile {
    fn from(q: &QuotientPresentation) -> Self {
        Self {
            dim: q.dim(),
            label: q.label().to_string(),
            generators: q
                .generators()
                .iter()
                .map(|g| GeneratorFile {
                    a: g.linear()
                        .to_rows()
                        .iter()
                        .map(|row| row.iter().map(format_rational).collect())
                        .collect(),
                    b: rvector_strings(g.translation()),
                })
                .collect(),
            domain: DomainFile {
                vertices: q.domain().vertices().iter().map(rvector_strings).collect(),
                open_facets: q.domain().open_facet_indices(),
            },
        }
    }
}

impl TryFrom<&PresentationFile> for QuotientPresentation {
    type Error = Error;

    fn try_from(f: &PresentationFile) -> Result<Self> {
        let generators = f
            .generators
            .iter()
            .map(|g| {
                let rows =
                    g.a.iter()
                        .map(|r| parse_rvector(r).map(|v| v.into_entries()))
                        .collect::<Result<Vec<_>>>()?;
                RAffineMap::new(RMatrix::from_rows(rows)?, parse_rvector(&g.b)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let vertices = f
            .domain
            .vertices
            .iter()
            .map(|v| parse_rvector(v))
            .collect::<Result<Vec<_>>>()?;
        let domain = Polytope::new(vertices, &f.domain.open_facets)?;
        if domain.dim() != f.dim {
            return Err(Error::Shape(format!(
                "declared dim {} but domain has dim {}",
                f.dim,
                domain.dim()
            )));
        }
        QuotientPresentation::new(f.label.clone(), generators, domain)
    }
}

impl QuotientPresentation {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PresentationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(&file)
    }

    /// Pretty-printed JSON; [`from_json`](Self::from_json) reproduces it byte for byte.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PresentationFile::from(self)).expect("presentation file serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::builtin_presentation;

    #[test]
    fn builtins_round_trip_bit_exactly() {
        for (name, scale) in [("torus-1", 5), ("torus-3", 2), ("klein", 3), ("kodaira-thurston", 2)] {
            let q = builtin_presentation(name, scale).unwrap();
            let text = q.to_json();
            let back = QuotientPresentation::from_json(&text).unwrap();
            assert_eq!(back, q, "{name}");
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn rationals_are_strings() {
        let text = r#"{"dim":1,"label":"half","generators":[{"A":[["1"]],"b":["1/2"]}],
            "domain":{"vertices":[["0"],["3/2"]],"open_facets":[1]}}"#;
        let q = QuotientPresentation::from_json(text).unwrap();
        assert_eq!(q.volume(), crate::scalar::rat(3, 2));
        assert!(q.to_json().contains("\"1/2\""));
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        assert!(matches!(QuotientPresentation::from_json("{"), Err(Error::Parse(_))));
        let bad_rational = r#"{"dim":1,"label":"x","generators":[{"A":[["one"]],"b":["0"]}],
            "domain":{"vertices":[["0"],["1"]],"open_facets":[]}}"#;
        assert!(matches!(
            QuotientPresentation::from_json(bad_rational),
            Err(Error::Parse(_))
        ));
    }
}

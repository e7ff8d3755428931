//! JSON instance and facet files. Rationals are strings (`"3"`, `"-7/2"`);
//! plain JSON integers are accepted on input.

use std::collections::BTreeMap;

use disjhull::hullenum::{Facet, FacetList, Provenance, Signature};
use disjhull::{DisjunctionInstance, HPolytope, LinearInequality, RatVector, Rational};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let s = s.trim();
    s.parse()
        .map_err(|e| CliError::Input(format!("not a rational number: {s:?} ({e})")))
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// A rational as read from JSON: a string, or an integer shorthand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatValue {
    Text(String),
    Int(i64),
}

impl RatValue {
    pub fn to_rational(&self) -> Result<Rational, CliError> {
        match self {
            RatValue::Text(s) => parse_rational(s),
            RatValue::Int(i) => Ok(Rational::from_integer((*i).into())),
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        RatValue::Text(format_rational(r))
    }
}

fn to_vector(v: &[RatValue]) -> Result<RatVector, CliError> {
    v.iter().map(RatValue::to_rational).collect::<Result<Vec<_>, _>>().map(RatVector::new)
}

fn from_vector(v: &[Rational]) -> Vec<RatValue> {
    v.iter().map(RatValue::from_rational).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<RatValue>>,
    pub b: Vec<RatValue>,
}

/// Which generator produced an instance, so closed forms can be applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyTag {
    Hyperrect,
    ReflectedSimplex { a: RatValue, b: RatValue },
    PaddedSimplex { skewed_row: bool },
    RhsPerturbation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub common_matrix: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
    pub polytopes: Vec<PolytopeFile>,
}

impl InstanceFile {
    pub fn from_polytopes(polytopes: &[HPolytope], family: Option<FamilyTag>) -> Self {
        let d = polytopes.first().map_or(0, HPolytope::dim);
        let common = polytopes.windows(2).all(|w| w[0].a() == w[1].a());
        InstanceFile {
            d,
            n: polytopes.len().saturating_sub(1),
            common_matrix: Some(common),
            family,
            polytopes: polytopes
                .iter()
                .map(|p| PolytopeFile {
                    a: p.a().row_iter().map(from_vector).collect(),
                    b: from_vector(p.b()),
                })
                .collect(),
        }
    }

    pub fn from_instance(inst: &DisjunctionInstance, family: Option<FamilyTag>) -> Self {
        InstanceFile::from_polytopes(inst.polytopes(), family)
    }

    pub fn polytopes(&self) -> Result<Vec<HPolytope>, CliError> {
        if self.polytopes.len() != self.n + 1 {
            return Err(CliError::Input(format!(
                "n = {} but {} polytopes given",
                self.n,
                self.polytopes.len()
            )));
        }
        self.polytopes
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let rows = p
                    .a
                    .iter()
                    .map(|r| to_vector(r))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(r) = rows.iter().find(|r| r.len() != self.d) {
                    return Err(CliError::Input(format!(
                        "polytope {i}: row of length {} in dimension {}",
                        r.len(),
                        self.d
                    )));
                }
                HPolytope::from_rows(self.d, &rows, to_vector(&p.b)?).map_err(CliError::from)
            })
            .collect()
    }

    pub fn to_instance(&self) -> Result<DisjunctionInstance, CliError> {
        let inst = DisjunctionInstance::new(self.polytopes()?)?;
        if self.common_matrix == Some(true) && inst.common_matrix().is_none() {
            return Err(CliError::Input(
                "common_matrix is set but the polytopes use different matrices".into(),
            ));
        }
        Ok(inst)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetEntry {
    pub alpha: Vec<RatValue>,
    pub mu: Vec<RatValue>,
    pub rho: RatValue,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetMeta {
    pub d: usize,
    pub n: usize,
    pub generator: String,
    pub counts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetFile {
    pub meta: FacetMeta,
    pub facets: Vec<FacetEntry>,
}

impl FacetFile {
    pub fn from_list(list: &FacetList, generator: &str) -> Self {
        FacetFile {
            meta: FacetMeta {
                d: list.d,
                n: list.n,
                generator: generator.to_string(),
                counts: list
                    .counts()
                    .into_iter()
                    .map(|(p, c)| (p.as_str().to_string(), c))
                    .collect(),
            },
            facets: list
                .iter()
                .map(|f| FacetEntry {
                    alpha: from_vector(&f.inequality.alpha),
                    mu: from_vector(&f.inequality.mu),
                    rho: RatValue::from_rational(&f.inequality.rho),
                    provenance: f.provenance.as_str().to_string(),
                    signature: f.signatures.first().map(|s| s.0.clone()),
                })
                .collect(),
        }
    }

    pub fn to_list(&self) -> Result<FacetList, CliError> {
        let (d, n) = (self.meta.d, self.meta.n);
        let facets = self
            .facets
            .iter()
            .map(|e| {
                let q = LinearInequality::new(to_vector(&e.alpha)?, to_vector(&e.mu)?, e.rho.to_rational()?);
                if q.d() != d || q.n() != n {
                    return Err(CliError::Input(format!("facet {q} does not have d = {d}, n = {n}")));
                }
                let provenance = Provenance::parse(&e.provenance)
                    .ok_or_else(|| CliError::Input(format!("unknown provenance {:?}", e.provenance)))?;
                let mut f = Facet::new(disjhull::canonicalize(&q)?, provenance);
                f.signatures = e.signature.iter().cloned().map(Signature).collect();
                Ok(f)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(FacetList::from_facets(d, n, facets))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use disjhull::{rat, ratio};

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-7/2").unwrap(), ratio(-7, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), rat(4));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(format_rational(&ratio(-9, 10)), "-9/10");
    }

    #[test]
    fn integer_shorthand() {
        let text = r#"{"d":1,"n":1,"polytopes":[{"A":[[1],[-1]],"b":[5,"0"]},{"A":[["1"],["-1"]],"b":["3","-2"]}]}"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        let inst = f.to_instance().unwrap();
        assert_eq!(inst.polytope(0).b()[0], rat(5));
    }

    #[test]
    fn malformed_instances() {
        let text = r#"{"d":2,"n":1,"polytopes":[{"A":[[1]],"b":[1]},{"A":[[1]],"b":[1]}]}"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.to_instance(), Err(CliError::Input(_))));
        let text = r#"{"d":1,"n":2,"polytopes":[{"A":[[1]],"b":[1]}]}"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        assert!(f.to_instance().is_err());
    }
}

//! The JSON problem document and its conversion to library types.
//!
//! Rationals travel as strings (`"3/2"`); plain JSON integers are accepted
//! on input. A zero image is `null`. Units are written in single-base form
//! `{"sign": 1, "base": "2", "exp": "1/2"}`.

use std::sync::Arc;

use coxmap::abelian::RationalVector;
use coxmap::coxring::{build_cox_ring, CoxRingError, MPoly, ToricCoxRing};
use coxmap::descriptions::{CharacterMap, CoxDescription, DescriptionError};
use coxmap::fan::{Cone, Fan, FanError};
use coxmap::sections::{FactoredSection, RadicalScalar, SectionError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{which} fan: {source}")]
    Fan {
        which: &'static str,
        source: FanError,
    },
    #[error("{which} ring: {source}")]
    Ring {
        which: &'static str,
        source: CoxRingError,
    },
    #[error("in `{text}`: {source}")]
    Polynomial { text: String, source: CoxRingError },
    #[error("`{0}` is not a rational number")]
    BadRational(String),
    #[error("section: {0}")]
    Section(#[from] SectionError),
    #[error("factor `{0}` has negative content; move the sign into the unit")]
    NegativeContent(String),
    #[error("the document has no `{0}`")]
    Missing(&'static str),
    #[error("point has {found} coordinates, source has {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("factor check failed: {0}")]
    FactorSanity(String),
    #[error("{0}")]
    Description(#[from] DescriptionError),
}

/// A rational in text form; integers are accepted on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatText {
    Text(String),
    Int(i64),
}

impl RatText {
    pub fn parse(&self) -> Result<BigRational, InputError> {
        match self {
            RatText::Int(n) => Ok(BigRational::from_integer((*n).into())),
            RatText::Text(s) => parse_rational(s),
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        RatText::Text(q.to_string())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, InputError> {
    let bad = || InputError::BadRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero_value() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

trait IsZeroValue {
    fn is_zero_value(&self) -> bool;
}

impl IsZeroValue for BigInt {
    fn is_zero_value(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanSpec {
    /// Needed only when there are no rays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSpec {
    #[serde(default = "one_i8")]
    pub sign: i8,
    #[serde(default = "one_text")]
    pub base: RatText,
    #[serde(default = "one_text")]
    pub exp: RatText,
}

fn one_i8() -> i8 {
    1
}

fn one_text() -> RatText {
    RatText::Text("1".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<UnitSpec>,
    #[serde(default)]
    pub factors: Vec<(String, RatText)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterMapSpec {
    #[serde(default)]
    pub sigma: Vec<usize>,
    pub basis: Vec<Vec<i64>>,
    pub values: Vec<SectionSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptionsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trust_factors: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub source: FanSpec,
    pub target: FanSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<Option<SectionSpec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character_map: Option<CharacterMapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<RatText>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

impl ProblemDocument {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &str) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn rings(&self) -> Result<(Arc<ToricCoxRing>, Arc<ToricCoxRing>), InputError> {
        Ok((
            Arc::new(build_ring(&self.source, "source")?),
            Arc::new(build_ring(&self.target, "target")?),
        ))
    }

    /// Parses the images; a zero-cone violation is returned in the inner
    /// result since it is a condition failure rather than an input error.
    pub fn description(
        &self,
        source: &Arc<ToricCoxRing>,
        target: &Arc<ToricCoxRing>,
    ) -> Result<Result<CoxDescription, DescriptionError>, InputError> {
        let specs = self.images.as_ref().ok_or(InputError::Missing("images"))?;
        let images = specs
            .iter()
            .map(|s| match s {
                None => Ok(FactoredSection::Zero),
                Some(s) => section_from_spec(source, s),
            })
            .collect::<Result<Vec<_>, _>>()?;
        match CoxDescription::new(source.clone(), target.clone(), images) {
            Ok(d) => Ok(Ok(d)),
            Err(e @ DescriptionError::ZeroConeNotInFan(_)) => Ok(Err(e)),
            Err(e) => Err(e.into()),
        }
    }

    pub fn character_map(&self, source: &ToricCoxRing) -> Result<Option<CharacterMap>, InputError> {
        let Some(cm) = &self.character_map else {
            return Ok(None);
        };
        let values = cm
            .values
            .iter()
            .map(|v| section_from_spec(source, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(CharacterMap {
            sigma: Cone::new(cm.sigma.iter().copied()),
            basis: cm
                .basis
                .iter()
                .map(|m| m.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            values,
        }))
    }

    pub fn ideal(&self, target: &ToricCoxRing) -> Result<Vec<MPoly>, InputError> {
        self.ideal
            .as_ref()
            .ok_or(InputError::Missing("ideal"))?
            .iter()
            .map(|g| parse_in(target, g))
            .collect()
    }

    pub fn points(&self, source: &ToricCoxRing) -> Result<Vec<Vec<BigRational>>, InputError> {
        let pts = self.points.as_ref().ok_or(InputError::Missing("points"))?;
        pts.iter()
            .map(|p| {
                if p.len() != source.nvars() {
                    return Err(InputError::PointDimension {
                        expected: source.nvars(),
                        found: p.len(),
                    });
                }
                p.iter().map(RatText::parse).collect()
            })
            .collect()
    }

    pub fn set_images(&mut self, d: &CoxDescription) {
        self.images = Some(
            d.images()
                .iter()
                .map(|s| section_to_spec(d.source(), s))
                .collect(),
        );
    }
}

fn build_ring(spec: &FanSpec, which: &'static str) -> Result<ToricCoxRing, InputError> {
    let dim = match (spec.dim, spec.rays.first()) {
        (Some(d), _) => d,
        (None, Some(r)) => r.len(),
        (None, None) => 0,
    };
    let cones = spec.cones.iter().map(|c| Cone::new(c.iter().copied())).collect();
    let fan = Fan::new(dim, spec.rays.clone(), cones).map_err(|source| InputError::Fan { which, source })?;
    fan.validate_strict()
        .map_err(|source| InputError::Fan { which, source })?;
    build_cox_ring(fan, spec.names.clone()).map_err(|source| InputError::Ring { which, source })
}

pub fn parse_in(ring: &ToricCoxRing, text: &str) -> Result<MPoly, InputError> {
    ring.parse(text).map_err(|source| InputError::Polynomial {
        text: text.to_string(),
        source,
    })
}

pub fn parse_point(text: &str) -> Result<Vec<BigRational>, InputError> {
    text.split(',').map(parse_rational).collect()
}

/// Builds a section; a positive content of a factor is moved into the unit.
pub fn section_from_spec(ring: &ToricCoxRing, spec: &SectionSpec) -> Result<FactoredSection, InputError> {
    let mut unit = match &spec.unit {
        None => RadicalScalar::one(),
        Some(u) => {
            let base = u.base.parse()?;
            if !base.is_positive() {
                return Err(InputError::BadRational(format!("{base} (unit base must be positive)")));
            }
            let r = RadicalScalar::radical(&base, &u.exp.parse()?)?;
            if u.sign < 0 {
                r.mul(&RadicalScalar::minus_one())
            } else {
                r
            }
        }
    };
    let mut factors = Vec::with_capacity(spec.factors.len());
    for (text, e) in &spec.factors {
        let e = e.parse()?;
        let (c, p) = parse_in(ring, text)?.normalize();
        if c.is_negative() {
            return Err(InputError::NegativeContent(text.clone()));
        }
        if !c.is_one() {
            unit = unit.mul(&RadicalScalar::radical(&c, &e)?);
        }
        factors.push((p, e));
    }
    Ok(FactoredSection::new(ring.nvars(), unit, factors)?)
}

pub fn unit_to_spec(unit: &RadicalScalar) -> Option<UnitSpec> {
    if unit.is_one() {
        return None;
    }
    let (base, r) = unit.single_base();
    Some(UnitSpec {
        sign: unit.sign(),
        base: RatText::from_rational(&base),
        exp: RatText::from_rational(&BigRational::new(BigInt::one(), r)),
    })
}

pub fn section_to_spec(ring: &ToricCoxRing, s: &FactoredSection) -> Option<SectionSpec> {
    let s = s.as_nonzero()?;
    Some(SectionSpec {
        unit: unit_to_spec(s.unit()),
        factors: s
            .factors()
            .iter()
            .map(|(p, e)| (ring.print(p), RatText::from_rational(e)))
            .collect(),
    })
}

pub fn rational_strings(v: &RationalVector) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{
        "source": {"rays": [[1], [-1]], "cones": [[0], [1]], "names": ["u", "v"]},
        "target": {"rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [0, 2], [1, 2]], "names": ["x0", "x1", "x2"]},
        "images": [{"factors": [["u", 1]]}, {"factors": [["2*v", "1/2"]]}, null]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let doc = ProblemDocument::from_json(LINE).unwrap();
        let (s, t) = doc.rings().unwrap();
        let d = doc.description(&s, &t).unwrap().unwrap();
        assert_eq!(d.zero_set(), &[2]);
        assert_eq!(d.image_strings(), vec!["u", "2^(1/2)*v^(1/2)", "0"]);
        let mut out = doc.clone();
        out.set_images(&d);
        let text = serde_json::to_string(&out).unwrap();
        let back = ProblemDocument::from_json(&text).unwrap();
        assert_eq!(back.description(&s, &t).unwrap().unwrap(), d);
        let unit = &back.images.as_ref().unwrap()[1].as_ref().unwrap().unit;
        assert_eq!(
            unit.as_ref().unwrap(),
            &UnitSpec {
                sign: 1,
                base: RatText::Text("2".into()),
                exp: RatText::Text("1/2".into())
            }
        );
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_point("1,2/3").unwrap().len(), 2);
    }

    #[test]
    fn input_errors() {
        let bad = LINE.replace(r#"["u", 1]"#, r#"["w", 1]"#);
        let doc = ProblemDocument::from_json(&bad).unwrap();
        let (s, t) = doc.rings().unwrap();
        assert!(matches!(doc.description(&s, &t), Err(InputError::Polynomial { .. })));
        let neg = LINE.replace(r#"["u", 1]"#, r#"["-u", 1]"#);
        let doc = ProblemDocument::from_json(&neg).unwrap();
        assert!(matches!(doc.description(&s, &t), Err(InputError::NegativeContent(_))));
        let fan = LINE.replace("[[1], [-1]]", "[[2], [-1]]");
        assert!(matches!(ProblemDocument::from_json(&fan).unwrap().rings(), Err(InputError::Fan { .. })));
        assert!(ProblemDocument::from_json("{").is_err());
    }
}

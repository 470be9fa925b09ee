//! Versioned JSON for varieties, decorations, morphisms and sessions.
//! Rationals are written as "p/q" strings, integers as numbers.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decoration::{StratumSpec, WeilDecoration};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::fixtures;
use crate::linalg::Matrix;
use crate::morphism::DecorationMorphism;
use crate::polyhedra::{Divisor, ExtDivisor};
use crate::rational::{format_q, parse_q, Q};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VarietyJson {
    Fan {
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ample: Option<Vec<i64>>,
    },
    AmplePolytope(Vec<Vec<i64>>),
    /// One of p2, p1xp1, f1, hexagon, p3.
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumJson {
    pub closure: Vec<Vec<String>>,
    /// None for the zero stratum.
    pub divisor: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecorationJson {
    pub rank: usize,
    pub strata: Vec<StratumJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub matrix: Vec<Vec<String>>,
    pub source: DecorationJson,
    pub target: DecorationJson,
}

/// A single sheaf file: a variety and one decoration on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDocument {
    pub version: u32,
    pub variety: VarietyJson,
    pub decoration: DecorationJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectJson {
    Decoration(DecorationJson),
    Divisor(Vec<i64>),
    Morphism(MorphismJson),
}

/// Named objects on one variety and a list of requests, each an object with
/// a "command" field and the parameters of that command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionDocument {
    pub version: u32,
    pub variety: VarietyJson,
    #[serde(default)]
    pub objects: BTreeMap<String, ObjectJson>,
    #[serde(default)]
    pub requests: Vec<Value>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

pub fn check_version(v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(schema(format!("unknown schema version {v}, expected {SCHEMA_VERSION}")))
    }
}

pub fn named_fan(name: &str) -> Result<Arc<Fan>> {
    Ok(match name {
        "p2" => fixtures::p2(),
        "p1xp1" => fixtures::p1xp1(),
        "f1" => fixtures::f1(),
        "hexagon" => fixtures::hexagon_surface(),
        "p3" => fixtures::p3(),
        _ => return Err(schema(format!("unknown variety {name:?}"))),
    })
}

impl VarietyJson {
    pub fn build(&self) -> Result<Arc<Fan>> {
        match self {
            VarietyJson::Fan { rays, max_cones, ample } => {
                let fan = Fan::new(rays.clone(), max_cones.clone())?;
                let fan = match ample {
                    Some(a) => fan.with_ample(Divisor::new(a.clone()))?,
                    None => fan,
                };
                Ok(Arc::new(fan))
            }
            VarietyJson::AmplePolytope(points) => Ok(Arc::new(Fan::from_ample_polytope(points)?)),
            VarietyJson::Named(name) => named_fan(name),
        }
    }

    pub fn from_fan(fan: &Fan) -> Self {
        VarietyJson::Fan {
            rays: fan.rays().to_vec(),
            max_cones: fan.max_cones().iter().map(|c| c.rays().to_vec()).collect(),
            ample: fan.ample().map(|d| d.coeffs().to_vec()),
        }
    }
}

fn rat_row(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

fn parse_row(v: &[String]) -> Result<Vec<Q>> {
    v.iter().map(|s| parse_q(s)).collect()
}

impl DecorationJson {
    pub fn from_decoration(dec: &WeilDecoration) -> Self {
        let strata = dec
            .specs()
            .iter()
            .map(|s| StratumJson {
                closure: s.closure.iter().map(|v| rat_row(v)).collect(),
                divisor: s.divisor.finite().map(|d| d.coeffs().to_vec()),
            })
            .collect();
        DecorationJson { rank: dec.rank(), strata }
    }

    pub fn build(&self, fan: &Arc<Fan>) -> Result<WeilDecoration> {
        let mut specs = Vec::with_capacity(self.strata.len());
        for s in &self.strata {
            let closure = s.closure.iter().map(|v| parse_row(v)).collect::<Result<Vec<_>>>()?;
            let divisor = match &s.divisor {
                Some(d) => ExtDivisor::Finite(Divisor::new(d.clone())),
                None => ExtDivisor::Infinity,
            };
            specs.push(StratumSpec { closure, divisor });
        }
        WeilDecoration::new(fan.clone(), self.rank, specs)
    }
}

impl MorphismJson {
    pub fn from_morphism(phi: &DecorationMorphism) -> Self {
        MorphismJson {
            matrix: phi.matrix().rows().iter().map(|r| rat_row(r)).collect(),
            source: DecorationJson::from_decoration(phi.source()),
            target: DecorationJson::from_decoration(phi.target()),
        }
    }

    pub fn build(&self, fan: &Arc<Fan>) -> Result<DecorationMorphism> {
        let source = self.source.build(fan)?;
        let target = self.target.build(fan)?;
        let rows = self.matrix.iter().map(|r| parse_row(r)).collect::<Result<Vec<_>>>()?;
        if rows.iter().any(|r| r.len() != source.rank()) {
            return Err(schema(format!("matrix rows must have length {}", source.rank())));
        }
        DecorationMorphism::new(source.clone(), target, Matrix::from_rows(source.rank(), rows))
    }
}

impl SheafDocument {
    pub fn new(dec: &WeilDecoration) -> Self {
        SheafDocument {
            version: SCHEMA_VERSION,
            variety: VarietyJson::from_fan(dec.fan()),
            decoration: DecorationJson::from_decoration(dec),
        }
    }

    pub fn build(&self) -> Result<WeilDecoration> {
        check_version(self.version)?;
        let fan = self.variety.build()?;
        self.decoration.build(&fan)
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| schema(e.to_string()))
}

pub fn decoration_to_json(dec: &WeilDecoration) -> String {
    serde_json::to_string_pretty(&SheafDocument::new(dec)).expect("plain data")
}

pub fn decoration_from_json(text: &str) -> Result<WeilDecoration> {
    parse_json::<SheafDocument>(text)?.build()
}

/// A session with its variety and objects resolved.
#[derive(Clone, Debug)]
pub struct Session {
    pub fan: Arc<Fan>,
    pub decorations: BTreeMap<String, WeilDecoration>,
    pub divisors: BTreeMap<String, Divisor>,
    pub morphisms: BTreeMap<String, DecorationMorphism>,
    pub requests: Vec<Value>,
}

impl SessionDocument {
    pub fn build(&self) -> Result<Session> {
        check_version(self.version)?;
        let fan = self.variety.build()?;
        let mut s = Session {
            fan: fan.clone(),
            decorations: BTreeMap::new(),
            divisors: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            requests: self.requests.clone(),
        };
        for (name, obj) in &self.objects {
            match obj {
                ObjectJson::Decoration(d) => {
                    s.decorations.insert(name.clone(), d.build(&fan)?);
                }
                ObjectJson::Divisor(d) => {
                    if d.len() != fan.num_rays() {
                        return Err(schema(format!("divisor {name:?} needs {} coefficients", fan.num_rays())));
                    }
                    s.divisors.insert(name.clone(), Divisor::new(d.clone()));
                }
                ObjectJson::Morphism(m) => {
                    s.morphisms.insert(name.clone(), m.build(&fan)?);
                }
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{kaneyama_e2, tangent_p2};
    use crate::morphism::DecorationMorphism;

    #[test]
    fn decorations_roundtrip() {
        let ext = crate::extension::universal_extension(
            &fixtures::hexagon_surface(),
            &Divisor::new(vec![0, 1, 1, 1, 1, 1]),
            &Divisor::new(vec![0, 0, 1, 2, 1, 0]),
        )
        .unwrap();
        for dec in [tangent_p2(-3), kaneyama_e2(), tangent_p2(0).dual_decoration().unwrap(), ext.decoration] {
            let text = decoration_to_json(&dec);
            assert_eq!(decoration_from_json(&text).unwrap(), dec);
            assert_eq!(decoration_to_json(&decoration_from_json(&text).unwrap()), text);
        }
    }

    #[test]
    fn rationals_are_strings() {
        let dec = tangent_p2(0).dual_decoration().unwrap();
        let v: Value = serde_json::from_str(&decoration_to_json(&dec)).unwrap();
        assert!(v["decoration"]["strata"][1]["closure"][0][0].is_string());
        assert!(v["variety"]["fan"]["rays"][0][0].is_number());
    }

    #[test]
    fn morphisms_roundtrip() {
        let t = tangent_p2(0);
        let phi = DecorationMorphism::identity(&t);
        let j = MorphismJson::from_morphism(&phi);
        let text = serde_json::to_string(&j).unwrap();
        let back: MorphismJson = parse_json(&text).unwrap();
        assert_eq!(back.build(t.fan()).unwrap(), phi);
    }

    #[test]
    fn schema_errors() {
        let mut doc = SheafDocument::new(&tangent_p2(0));
        doc.version = 7;
        assert!(matches!(doc.build(), Err(Error::Schema(_))));
        assert!(matches!(decoration_from_json("{\"version\": 1}"), Err(Error::Schema(_))));
        let bad = decoration_to_json(&tangent_p2(0)).replace("\"rank\"", "\"rnak\"");
        assert!(matches!(decoration_from_json(&bad), Err(Error::Schema(_))));
        let v = VarietyJson::Named("p9".into());
        assert!(matches!(v.build(), Err(Error::Schema(_))));
    }

    #[test]
    fn varieties() {
        for name in ["p2", "p1xp1", "f1", "hexagon", "p3"] {
            let fan = VarietyJson::Named(name.into()).build().unwrap();
            let again = VarietyJson::from_fan(&fan).build().unwrap();
            assert_eq!(*fan, *again);
        }
        let p = VarietyJson::AmplePolytope(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).build().unwrap();
        assert_eq!(*p, *fixtures::p2());
    }

    #[test]
    fn sessions() {
        let text = r#"{
            "version": 1,
            "variety": {"named": "p2"},
            "objects": {
                "h": {"divisor": [0, 0, 1]},
                "o": {"decoration": {"rank": 1, "strata": [
                    {"closure": [], "divisor": null},
                    {"closure": [["1"]], "divisor": [0, 0, -3]}]}}
            },
            "requests": [{"command": "euler", "sheaf": "o"}]
        }"#;
        let s = parse_json::<SessionDocument>(text).unwrap().build().unwrap();
        assert_eq!(s.divisors["h"].coeffs(), &[0, 0, 1]);
        assert_eq!(s.decorations["o"].rank(), 1);
        assert_eq!(s.requests.len(), 1);
    }
}

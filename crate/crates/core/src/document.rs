//! JSON fiber documents.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "banana(1,1,1)",
//!   "genus": 2,
//!   "components": [
//!     { "id": "G1", "multiplicity": 1, "genus": 1, "self_intersection": "-1" },
//!     { "id": "G2", "multiplicity": 1, "genus": 1, "self_intersection": "-1" }
//!   ],
//!   "intersections": [ { "a": "G1", "b": "G2", "value": "1" } ],
//!   "horizontal": [ { "id": "D1", "degree": "1", "incidence": { "G1": "1" } } ]
//! }
//! ```
//!
//! Rationals are strings `"n"` or `"n/d"`, or JSON integers. Floating point
//! literals (and decimal strings) are rejected. Unknown fields are rejected.
//! The canonical form written by [`FiberDocument::to_json`] uses strings for
//! every rational, lists intersections once in component order and omits
//! zero incidences.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fiber::{Component, HorizontalIncidence, SpecialFiber};
use crate::rational::{fmt_rat, parse_rat, Rat, RatParseError};

pub const SCHEMA_VERSION: u32 = 1;

const INEXACT: &str = "inexact numeric literal";

/// A rational literal as it appears in a document.
#[derive(Debug, Clone)]
struct RatLit(Rat);

impl<'de> Deserialize<'de> for RatLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RatLit;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a string \"n\" / \"n/d\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RatLit, E> {
                Ok(RatLit(Rat::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RatLit, E> {
                Ok(RatLit(Rat::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<RatLit, E> {
                Err(E::custom(format!("{INEXACT} {v}")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RatLit, E> {
                match parse_rat(v) {
                    Ok(q) => Ok(RatLit(q)),
                    Err(RatParseError::Inexact) => Err(E::custom(format!("{INEXACT} \"{v}\""))),
                    Err(RatParseError::ZeroDenominator) => Err(E::custom(format!("zero denominator in \"{v}\""))),
                    Err(RatParseError::Malformed) => Err(E::custom(format!("malformed rational \"{v}\""))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Integer field that reports floats as inexact rather than as a type error.
#[derive(Debug, Clone, Copy)]
struct IntLit(i64);

impl<'de> Deserialize<'de> for IntLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = IntLit;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<IntLit, E> {
                Ok(IntLit(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<IntLit, E> {
                i64::try_from(v).map(IntLit).map_err(|_| E::custom("integer out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<IntLit, E> {
                Err(E::custom(format!("{INEXACT} {v}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    id: String,
    multiplicity: IntLit,
    genus: IntLit,
    self_intersection: RatLit,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntersection {
    a: String,
    b: String,
    value: RatLit,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHorizontal {
    id: String,
    degree: RatLit,
    incidence: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema_version: IntLit,
    name: String,
    genus: IntLit,
    components: Vec<RawComponent>,
    intersections: Vec<RawIntersection>,
    #[serde(default)]
    horizontal: Vec<RawHorizontal>,
}

#[derive(Serialize)]
struct OutComponent<'a> {
    id: &'a str,
    multiplicity: u32,
    genus: u32,
    self_intersection: String,
}

#[derive(Serialize)]
struct OutIntersection<'a> {
    a: &'a str,
    b: &'a str,
    value: String,
}

#[derive(Serialize)]
struct OutHorizontal<'a> {
    id: &'a str,
    degree: String,
    incidence: Map<String, Value>,
}

#[derive(Serialize)]
struct OutDocument<'a> {
    schema_version: u32,
    name: &'a str,
    genus: i64,
    components: Vec<OutComponent<'a>>,
    intersections: Vec<OutIntersection<'a>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    horizontal: Vec<OutHorizontal<'a>>,
}

/// A parsed document: the fiber and its named horizontal divisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberDocument {
    pub fiber: SpecialFiber,
    pub horizontals: Vec<HorizontalIncidence>,
}

fn classify(path: String, message: String) -> Error {
    if message.contains(INEXACT) {
        Error::Exactness { path, message }
    } else {
        Error::Schema { path, message }
    }
}

fn nonnegative_u32(v: IntLit, path: &str) -> Result<u32> {
    u32::try_from(v.0).map_err(|_| Error::Schema {
        path: path.to_string(),
        message: format!("expected a nonnegative integer, got {}", v.0),
    })
}

fn rat_value(v: &Value, path: String) -> Result<Rat> {
    RatLit::deserialize(v)
        .map(|r| r.0)
        .map_err(|e| classify(path, e.to_string()))
}

impl FiberDocument {
    pub fn new(fiber: SpecialFiber, horizontals: Vec<HorizontalIncidence>) -> Self {
        Self { fiber, horizontals }
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_slice(bytes);
        let raw: RawDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            classify(path, e.into_inner().to_string())
        })?;
        de.end().map_err(|e| classify(".".into(), e.to_string()))?;

        if raw.schema_version.0 != SCHEMA_VERSION as i64 {
            return Err(Error::Schema {
                path: "schema_version".into(),
                message: format!("unsupported version {}, expected {SCHEMA_VERSION}", raw.schema_version.0),
            });
        }
        let mut components = Vec::with_capacity(raw.components.len());
        for (k, c) in raw.components.into_iter().enumerate() {
            let multiplicity = nonnegative_u32(c.multiplicity, &format!("components[{k}].multiplicity"))?;
            let genus = nonnegative_u32(c.genus, &format!("components[{k}].genus"))?;
            components.push(Component::new(c.id, multiplicity, genus, c.self_intersection.0));
        }
        let fiber = SpecialFiber::new(
            raw.name,
            raw.genus.0,
            components,
            raw.intersections.into_iter().map(|e| (e.a, e.b, e.value.0)),
        )?;
        let mut horizontals: Vec<HorizontalIncidence> = Vec::with_capacity(raw.horizontal.len());
        for (k, h) in raw.horizontal.into_iter().enumerate() {
            if horizontals.iter().any(|d| d.id == h.id) {
                return Err(Error::MalformedInput(format!("duplicate divisor id `{}`", h.id)));
            }
            let mut entries = Vec::with_capacity(h.incidence.len());
            for (cid, v) in &h.incidence {
                entries.push((cid.as_str(), rat_value(v, format!("horizontal[{k}].incidence.{cid}"))?));
            }
            horizontals.push(HorizontalIncidence::new(&fiber, h.id, h.degree.0, entries)?);
        }
        Ok(Self { fiber, horizontals })
    }

    pub fn divisor(&self, id: &str) -> Option<&HorizontalIncidence> {
        self.horizontals.iter().find(|d| d.id == id)
    }

    /// Canonical pretty-printed JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let f = &self.fiber;
        let comps = f.components();
        let doc = OutDocument {
            schema_version: SCHEMA_VERSION,
            name: f.name(),
            genus: f.genus(),
            components: comps
                .iter()
                .map(|c| OutComponent {
                    id: &c.id,
                    multiplicity: c.multiplicity,
                    genus: c.arithmetic_genus,
                    self_intersection: fmt_rat(&c.self_intersection),
                })
                .collect(),
            intersections: f
                .edges()
                .map(|(i, j, v)| OutIntersection {
                    a: &comps[i].id,
                    b: &comps[j].id,
                    value: fmt_rat(v),
                })
                .collect(),
            horizontal: self
                .horizontals
                .iter()
                .map(|h| OutHorizontal {
                    id: &h.id,
                    degree: fmt_rat(&h.degree),
                    incidence: h
                        .incidence
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                        .map(|(i, v)| (comps[i].id.clone(), Value::String(fmt_rat(v))))
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("document serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Parse a document.
pub fn parse_fiber(bytes: &[u8]) -> Result<FiberDocument> {
    FiberDocument::parse(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::emit;
    use crate::linalg::build_laplacian;
    use crate::rational::int;

    const BANANA: &str = r#"{
  "schema_version": 1,
  "name": "banana(1,1,1)",
  "genus": 2,
  "components": [
    { "id": "G1", "multiplicity": 1, "genus": 1, "self_intersection": -1 },
    { "id": "G2", "multiplicity": 1, "genus": 1, "self_intersection": "-1" }
  ],
  "intersections": [ { "a": "G2", "b": "G1", "value": 1 } ],
  "horizontal": [ { "id": "D", "degree": "1", "incidence": { "G2": "1/2", "G1": "1/2" } } ]
}"#;

    #[test]
    fn parses_banana() {
        let doc = parse_fiber(BANANA.as_bytes()).unwrap();
        let m = build_laplacian(&doc.fiber);
        assert_eq!(m.get(0, 0), &int(1));
        assert_eq!(m.get(0, 1), &int(-1));
        assert_eq!(doc.divisor("D").unwrap().incidence_sum(), int(1));
    }

    #[test]
    fn canonical_round_trip() {
        let doc = parse_fiber(BANANA.as_bytes()).unwrap();
        let canon = doc.to_json();
        assert!(canon.contains("\"self_intersection\": \"-1\""));
        let again = parse_fiber(canon.as_bytes()).unwrap();
        assert_eq!(again, doc);
        assert_eq!(again.to_json(), canon);
        let (f, d) = emit("fermat", &["7".into(), "2".into()]).unwrap();
        let doc = FiberDocument::new(f, d);
        assert_eq!(parse_fiber(doc.to_json().as_bytes()).unwrap().to_json(), doc.to_json());
    }

    #[test]
    fn float_literals_rejected() {
        let bad = BANANA.replace("\"self_intersection\": -1", "\"self_intersection\": -1.0");
        match parse_fiber(bad.as_bytes()) {
            Err(Error::Exactness { path, .. }) => assert_eq!(path, "components[0].self_intersection"),
            other => panic!("{other:?}"),
        }
        let bad = BANANA.replace("\"1/2\"", "\"0.25\"");
        assert!(matches!(parse_fiber(bad.as_bytes()), Err(Error::Exactness { .. })));
        let bad = BANANA.replace("\"genus\": 2", "\"genus\": 2.0");
        assert!(matches!(parse_fiber(bad.as_bytes()), Err(Error::Exactness { .. })));
    }

    #[test]
    fn schema_errors() {
        let bad = BANANA.replace("  \"genus\": 2,\n", "");
        assert!(matches!(parse_fiber(bad.as_bytes()), Err(Error::Schema { .. })));
        let bad = BANANA.replace("\"name\"", "\"extra\": 1, \"name\"");
        assert!(matches!(parse_fiber(bad.as_bytes()), Err(Error::Schema { .. })));
        let bad = BANANA.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(parse_fiber(bad.as_bytes()), Err(Error::Schema { .. })));
        let bad = BANANA.replace("\"multiplicity\": 1, \"genus\": 1, \"self_intersection\": -1", "\"multiplicity\": -1, \"genus\": 1, \"self_intersection\": -1");
        assert!(matches!(parse_fiber(bad.as_bytes()), Err(Error::Schema { .. })));
        assert!(matches!(parse_fiber(b"\xff"), Err(Error::Schema { .. })));
        assert!(matches!(parse_fiber(b"{} {}"), Err(Error::Schema { .. })));
    }

    #[test]
    fn malformed_input_is_distinct() {
        let bad = BANANA.replace("\"b\": \"G1\"", "\"b\": \"G9\"");
        assert!(matches!(parse_fiber(bad.as_bytes()), Err(Error::MalformedInput(_))));
    }
}

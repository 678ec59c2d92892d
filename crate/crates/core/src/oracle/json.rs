//! Placement documents.
//!
//! Coordinates are written with 17 significant digits so a document read back
//! reproduces the placement bit for bit.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{Case, Encoding, OracleError, Orientation, Pebble, Placement, Role};
use crate::geometry::Point;

#[derive(Serialize)]
struct PebbleOut {
    x: Box<RawValue>,
    y: Box<RawValue>,
    role: String,
}

#[derive(Serialize)]
struct DocOut<'a> {
    k: u32,
    treasure: [Box<RawValue>; 2],
    orientation: &'a str,
    case: &'a str,
    mu: Option<String>,
    pebbles: Vec<PebbleOut>,
    travel_line: Option<u128>,
}

#[derive(Deserialize)]
struct PebbleIn {
    x: f64,
    y: f64,
    role: String,
}

#[derive(Deserialize)]
struct DocIn {
    k: u32,
    treasure: [f64; 2],
    orientation: String,
    case: String,
    #[serde(default)]
    mu: Option<String>,
    pebbles: Vec<PebbleIn>,
    #[serde(default)]
    travel_line: Option<u128>,
}

fn num(v: f64) -> Box<RawValue> {
    let s = format!("{v:.16e}");
    RawValue::from_string(s).expect("formatted float is valid JSON")
}

pub fn placement_to_json(pl: &Placement) -> String {
    let doc = DocOut {
        k: pl.k,
        treasure: [num(pl.treasure.x), num(pl.treasure.y)],
        orientation: pl.orientation.as_str(),
        case: pl.case.as_str(),
        mu: pl.encoding.as_ref().map(|e| e.to_string()),
        pebbles: pl
            .pebbles
            .iter()
            .map(|p| PebbleOut {
                x: num(p.pos.x),
                y: num(p.pos.y),
                role: p.role.to_string(),
            })
            .collect(),
        travel_line: pl.travel_line,
    };
    serde_json::to_string_pretty(&doc).expect("placement serializes")
}

pub fn placement_from_json(s: &str) -> Result<Placement, OracleError> {
    let doc: DocIn = serde_json::from_str(s).map_err(|e| OracleError::Format(e.to_string()))?;
    let orientation = match doc.orientation.as_str() {
        "E" => Orientation::E,
        "W" => Orientation::W,
        other => {
            return Err(OracleError::Format(format!(
                "unknown orientation {other:?}"
            )))
        }
    };
    let case: Case = doc.case.parse()?;
    let treasure = Point::checked(doc.treasure[0], doc.treasure[1])?;
    let encoding = doc.mu.as_deref().map(Encoding::parse).transpose()?;
    if case == Case::MainOutsideB && (encoding.is_none() || doc.travel_line.is_none()) {
        return Err(OracleError::Format(
            "main placement needs mu and travel_line".into(),
        ));
    }
    let pebbles = doc
        .pebbles
        .into_iter()
        .map(|p| {
            Ok(Pebble {
                pos: Point::checked(p.x, p.y)?,
                role: p.role.parse::<Role>()?,
            })
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    Ok(Placement {
        k: doc.k,
        treasure,
        orientation,
        case,
        encoding,
        pebbles,
        travel_line: doc.travel_line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{place, Instance};
    use proptest::prelude::*;

    #[test]
    fn document_shape() {
        let pl = place(&Instance::new(Point::new(2.0, 1.0), 9).unwrap()).unwrap();
        let s = placement_to_json(&pl);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["k"], 9);
        assert_eq!(v["orientation"], "W");
        assert_eq!(v["case"], "MainOutsideB");
        assert_eq!(v["mu"], "10");
        assert_eq!(v["travel_line"], 1);
        assert_eq!(v["pebbles"][7]["role"], "Term2");
        assert_eq!(v["pebbles"][7]["x"], -10.0);
        assert_eq!(placement_from_json(&s).unwrap(), pl);
    }

    #[test]
    fn malformed_documents_rejected() {
        assert!(placement_from_json("{").is_err());
        let pl = place(&Instance::new(Point::new(2.0, 1.0), 9).unwrap()).unwrap();
        let s = placement_to_json(&pl).replace("\"Term2\"", "\"Term9\"");
        assert!(placement_from_json(&s).is_err());
        let s = placement_to_json(&pl).replace("\"W\"", "\"N\"");
        assert!(placement_from_json(&s).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            r in 1.5f64..1e9,
            a in -std::f64::consts::PI..std::f64::consts::PI,
            k in prop::sample::select(vec![2u32, 5, 9, 10, 17, 40, 135]),
        ) {
            let t = Point::new(r * a.cos(), r * a.sin());
            if let Ok(pl) = place(&Instance::new(t, k).unwrap()) {
                let back = placement_from_json(&placement_to_json(&pl)).unwrap();
                prop_assert_eq!(back.pebbles.len(), pl.pebbles.len());
                for (p, q) in back.pebbles.iter().zip(&pl.pebbles) {
                    prop_assert_eq!(p.pos.x.to_bits(), q.pos.x.to_bits());
                    prop_assert_eq!(p.pos.y.to_bits(), q.pos.y.to_bits());
                    prop_assert_eq!(p.role, q.role);
                }
                prop_assert_eq!(back, pl);
            }
        }
    }
}

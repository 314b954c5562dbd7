//! Output documents: schema-versioned JSON and CSV with exact rationals
//! (never floats; rationals serialize as {"num","den"} strings).

use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Rat;
use crate::newton::NewtonPolygon;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RatDoc {
    pub num: String,
    pub den: String,
}

impl From<&Rat> for RatDoc {
    fn from(r: &Rat) -> RatDoc {
        RatDoc {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl RatDoc {
    pub fn to_rat(&self) -> Option<Rat> {
        let num: BigInt = self.num.parse().ok()?;
        let den: BigInt = self.den.parse().ok()?;
        Some(Rat::new(num, den))
    }

    pub fn as_text(&self) -> String {
        format!("{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexDoc {
    pub x: u64,
    pub y: RatDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SlopeDoc {
    pub slope: RatDoc,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolygonDoc {
    pub vertices: Vec<VertexDoc>,
    pub slopes: Vec<SlopeDoc>,
}

impl From<&NewtonPolygon> for PolygonDoc {
    fn from(np: &NewtonPolygon) -> PolygonDoc {
        PolygonDoc {
            vertices: np
                .vertices
                .iter()
                .map(|(x, y)| VertexDoc {
                    x: *x as u64,
                    y: y.into(),
                })
                .collect(),
            slopes: np
                .slopes
                .iter()
                .map(|(s, m)| SlopeDoc {
                    slope: s.into(),
                    multiplicity: *m as u64,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub kind: String,
    pub detail: serde_json::Value,
}

/// Top-level result document for every CLI command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonDocument {
    pub schema_version: u32,
    pub command: String,
    pub f: String,
    pub p: u64,
    pub a: u32,
    pub method: String,
    /// "proved" | "inconclusive" | "error"
    pub status: String,
    pub runtime_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polygon: Option<PolygonDoc>,
    /// exact ord_q valuations of series coefficients when computed
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub coefficient_ords: Vec<Option<RatDoc>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub certificates: Vec<CertificateDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl PolygonDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization is infallible")
    }

    pub fn from_json(s: &str) -> Option<PolygonDocument> {
        serde_json::from_str(s).ok()
    }

    /// CSV: one header block for vertices, one for slopes; rationals as
    /// "num/den" text.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("section,x,value,multiplicity\n");
        if let Some(pg) = &self.polygon {
            for v in &pg.vertices {
                out.push_str(&format!("vertex,{},{},\n", v.x, v.y.as_text()));
            }
            for s in &pg.slopes {
                out.push_str(&format!(
                    "slope,,{},{}\n",
                    s.slope.as_text(),
                    s.multiplicity
                ));
            }
        }
        for (i, ord) in self.coefficient_ords.iter().enumerate() {
            let txt = ord
                .as_ref()
                .map(|r| r.as_text())
                .unwrap_or_else(|| "inf".to_string());
            out.push_str(&format!("ord,{i},{txt},\n"));
        }
        out
    }
}

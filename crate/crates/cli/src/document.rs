//! The JSON coefficient table exchanged on standard input and output.

use num_traits::One;
use quasimod_core::{Level, QSeries, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{count} coefficients do not fill the window [{valuation}, {order}]")]
    Length { valuation: i64, order: i64, count: usize },
    #[error("coefficient {index} ({text:?}) is not a reduced fraction")]
    Coefficient { index: usize, text: String },
    #[error("unsupported level {0}")]
    Level(u32),
    #[error(transparent)]
    Core(#[from] quasimod_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Metadata {
    pub level: u32,
    pub weight: i64,
    pub pole_order: u32,
}

impl Metadata {
    pub fn new(level: Level, weight: i64, pole_order: u32) -> Self {
        Self {
            level: level.number(),
            weight,
            pole_order,
        }
    }

    pub fn level(&self) -> Result<Level, DocumentError> {
        Level::from_number(self.level).ok_or(DocumentError::Level(self.level))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument {
    pub valuation: i64,
    pub order: i64,
    pub coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Inverse of [`format_rational`]; anything it would not have produced is
/// rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let r: Rational = s.parse().ok()?;
    (format_rational(&r) == s).then_some(r)
}

impl SeriesDocument {
    pub fn from_series(f: &QSeries, metadata: Option<Metadata>) -> Self {
        Self {
            valuation: f.valuation(),
            order: f.order(),
            coefficients: f.coeffs().iter().map(format_rational).collect(),
            metadata,
        }
    }

    pub fn to_series(&self) -> Result<QSeries, DocumentError> {
        let want = self.order - self.valuation + 1;
        if want < 1 || want as usize != self.coefficients.len() {
            return Err(DocumentError::Length {
                valuation: self.valuation,
                order: self.order,
                count: self.coefficients.len(),
            });
        }
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(index, text)| {
                parse_rational(text).ok_or_else(|| DocumentError::Coefficient {
                    index,
                    text: text.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries::new(self.valuation, coeffs)?)
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: Self = serde_json::from_str(text)?;
        doc.to_series()?;
        Ok(doc)
    }

    pub fn emit(&self, pretty: bool) -> String {
        let out = if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        };
        out.expect("documents always serialize")
    }
}

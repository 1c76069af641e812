//! JSON description of an end chart: domain, `φ`, `ĝ` and `B̂`.
//!
//! ```json
//! {
//!   "domain": {"x0": -0.3, "x1": 0.3, "y0": -0.3, "y1": 0.3},
//!   "phi": [[1.0, 0.0], [0.0, 0.5]],
//!   "density": "hyperbolic_disk",
//!   "b_z": [{"i": 1, "j": 0, "c": [0.2, 0.0]}],
//!   "b_zbar": []
//! }
//! ```
//!
//! `phi` lists the coefficients of `Σ c_k z^k`. Each `B̂` term is `c xⁱ yʲ`.
//! `density` is `"hyperbolic_disk"` or `{"constant": ρ}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::epstein::EndFrame;
use crate::error::{Error, Result};
use crate::quadrature::{Domain, Rect};
use crate::schwarzian::{ConformalMetric, QuadDiff};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    HyperbolicDisk,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub i: u32,
    pub j: u32,
    pub c: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDocument {
    pub domain: Rect,
    pub phi: Vec<[f64; 2]>,
    pub density: Density,
    #[serde(default)]
    pub b_z: Vec<Term>,
    #[serde(default)]
    pub b_zbar: Vec<Term>,
}

fn eval_terms(terms: &[Term], z: Complex64) -> Complex64 {
    terms
        .iter()
        .map(|t| Complex64::new(t.c[0], t.c[1]) * z.re.powi(t.i as i32) * z.im.powi(t.j as i32))
        .sum()
}

impl ChartDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Rect::new(doc.domain.x0, doc.domain.x1, doc.domain.y0, doc.domain.y1)?;
        if doc.phi.is_empty() {
            return Err(Error::Parse("phi needs at least one coefficient".into()));
        }
        Ok(doc)
    }

    pub fn quad_diff(&self) -> QuadDiff {
        let coeffs: Vec<Complex64> = self.phi.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        QuadDiff::new(move |z| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c), Domain::Rect(self.domain))
    }

    pub fn frame(&self) -> Result<EndFrame> {
        let metric = match self.density {
            Density::HyperbolicDisk => {
                let r = self.domain;
                let far = [(r.x0, r.y0), (r.x0, r.y1), (r.x1, r.y0), (r.x1, r.y1)]
                    .iter()
                    .map(|(x, y)| x * x + y * y)
                    .fold(0.0, f64::max);
                if far >= 1.0 {
                    return Err(Error::Parse("domain must lie inside the unit disk".into()));
                }
                ConformalMetric::hyperbolic_disk()
            }
            Density::Constant(k) => ConformalMetric::constant(k)?,
        };
        let (bz, bzb) = (self.b_z.clone(), self.b_zbar.clone());
        Ok(EndFrame::new(metric, move |z| eval_terms(&bz, z), move |z| eval_terms(&bzb, z), self.domain))
    }
}

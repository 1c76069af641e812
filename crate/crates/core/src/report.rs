//! The drilling-bound pipeline and its JSON report.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model_deformation::hodge_limit_bound;
use crate::tube_trig::{base_radius, margulis_tube_radius, sinh_rp_lower_bound, ConeAxisData, SinhRpBound};

/// Smooth-case Nehari constant, offered only as a labelled reference value for `K`.
pub const REFERENCE_SMOOTH_NEHARI_K: f64 = 1.5;

pub const DEFAULT_L0: f64 = 0.9;

pub const REFERENCE_BANNER: &str =
    "SMOOTH-CASE REFERENCE ONLY: K = 3/2 is the Nehari constant for smooth structures and is not established for cone manifolds";

/// `e^{−asinh √2} = 1/(√2 + √3)`.
pub fn eta() -> f64 {
    1.0 / (2f64.sqrt() + 3f64.sqrt())
}

/// `(1/4η) √(3(1 + 2K)/(7π))`.
pub fn c_drill(k: f64) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(invalid("K", format!("{k} is not positive")));
    }
    Ok((3.0 * (1.0 + 2.0 * k) / (7.0 * PI)).sqrt() / (4.0 * eta()))
}

/// `t · L(2π) / π`.
pub fn interpolated_length(l_2pi: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= TAU) {
        return Err(invalid("t", format!("{t} is not in (0, 2π]")));
    }
    if !(l_2pi >= 0.0) {
        return Err(invalid("L", format!("{l_2pi} is negative")));
    }
    Ok(t * l_2pi / PI)
}

/// Cone data for a drilling bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeLocusSpec {
    pub components: Vec<ConeAxisData>,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
}

/// Input document; `K` and `L0` may be left to the command line.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub components: Vec<ConeAxisData>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "L0")]
    pub l0: Option<f64>,
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl ConeLocusSpec {
    pub fn new(components: Vec<ConeAxisData>, k: f64, l0: f64) -> Result<Self> {
        for c in &components {
            ConeAxisData::new(c.length, c.angle)?;
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(invalid("K", format!("{k} is not positive")));
        }
        if !(l0 > 0.0 && l0 < 1.0) {
            return Err(invalid("L0", format!("{l0} is not in (0, 1)")));
        }
        Ok(Self { components, k, l0 })
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(|c| c.length).sum()
    }
}

/// `3 ΣL / (14π)`.
pub fn hodge_energy_cap(spec: &ConeLocusSpec) -> f64 {
    3.0 * spec.total_length() / (14.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub length: f64,
    pub angle: f64,
    pub tube_radius: f64,
    /// `L ≤ L0 · θ`.
    pub length_within_threshold: bool,
    /// `R ≥ asinh √2`.
    pub tube_radius_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantDiscrepancy {
    #[serde(flatten)]
    pub bound: SinhRpBound,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flags {
    pub length_threshold: bool,
    pub tube_radius: bool,
    pub tube_disjointness: &'static str,
    pub constant_discrepancy: ConstantDiscrepancy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub quadrature_relative: f64,
    pub arithmetic: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub inputs: ConeLocusSpec,
    pub version: &'static str,
    pub tolerances: Tolerances,
    pub k_source: &'static str,
    pub l0_source: &'static str,
}

/// Intermediate values of the chain, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain {
    pub total_length: f64,
    /// `3 ΣL / (14π)`, the per-`t` energy cap.
    pub hodge_energy_cap: f64,
    /// Cap divided by `8 η²`.
    pub limit_bound: f64,
    /// Times `1 + 2K`.
    pub rescaled: f64,
    /// Square root, equal to `c_drill √ΣL`.
    pub per_angle_norm: f64,
    /// Times `2π`.
    pub final_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub banner: Option<&'static str>,
    pub eta: f64,
    pub c_drill: f64,
    pub final_bound: f64,
    pub hodge_energy_cap: f64,
    pub chain: Chain,
    pub components: Vec<ComponentReport>,
    pub flags: Flags,
    /// False when a checkable hypothesis fails; the bound is then unverified.
    pub hypotheses_hold: bool,
    pub provenance: Provenance,
}

/// Where `K` and `L0` came from, for the provenance block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSources {
    pub k: &'static str,
    pub l0: &'static str,
    pub reference_k: bool,
    pub tolerance: f64,
}

impl Default for InputSources {
    fn default() -> Self {
        Self { k: "input", l0: "input", reference_k: false, tolerance: 1e-8 }
    }
}

pub fn assemble_report(spec: &ConeLocusSpec) -> Result<BoundReport> {
    assemble_report_with(spec, InputSources::default())
}

pub fn assemble_report_with(spec: &ConeLocusSpec, src: InputSources) -> Result<BoundReport> {
    let spec = ConeLocusSpec::new(spec.components.clone(), spec.k, spec.l0)?;
    let e = eta();
    let cap = hodge_energy_cap(&spec);
    let limit = hodge_limit_bound(cap, e)?;
    let rescaled = (1.0 + 2.0 * spec.k) * limit;
    let per_angle = rescaled.sqrt();
    let final_bound = TAU * per_angle;

    let r0 = base_radius();
    let mut components = vec![];
    for c in &spec.components {
        let r = margulis_tube_radius(*c)?;
        components.push(ComponentReport {
            length: c.length,
            angle: c.angle,
            tube_radius: r,
            length_within_threshold: c.length <= spec.l0 * c.angle,
            tube_radius_ok: r >= r0,
        });
    }
    let length_threshold = components.iter().all(|c| c.length_within_threshold);
    let tube_radius = components.iter().all(|c| c.tube_radius_ok);
    let flags = Flags {
        length_threshold,
        tube_radius,
        tube_disjointness: "assumed",
        constant_discrepancy: ConstantDiscrepancy {
            bound: sinh_rp_lower_bound(spec.l0)?,
            note: "2π² coth(asinh √2) exceeds 24; the conservative value is used for the bending constant",
        },
    };
    Ok(BoundReport {
        banner: src.reference_k.then_some(REFERENCE_BANNER),
        eta: e,
        c_drill: c_drill(spec.k)?,
        final_bound,
        hodge_energy_cap: cap,
        chain: Chain {
            total_length: spec.total_length(),
            hodge_energy_cap: cap,
            limit_bound: limit,
            rescaled,
            per_angle_norm: per_angle,
            final_bound,
        },
        components,
        hypotheses_hold: length_threshold && tube_radius,
        flags,
        provenance: Provenance {
            inputs: spec,
            version: env!("CARGO_PKG_VERSION"),
            tolerances: Tolerances { quadrature_relative: src.tolerance, arithmetic: "f64 product path; 256-bit oracle in tests" },
            k_source: src.k,
            l0_source: src.l0,
        },
    })
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

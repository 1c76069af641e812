use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("height must be positive, got t = {0}")]
    NonPositiveHeight(f64),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("f'(z) vanishes at z = {re} + {im}i; map is not locally univalent there")]
    CriticalPoint { re: f64, im: f64 },

    #[error("derivative engine rejected input: not holomorphic near z = {re} + {im}i (anti-holomorphic residual {residual:e})")]
    NotHolomorphic { re: f64, im: f64, residual: f64 },

    #[error("derivative engine did not converge near z = {re} + {im}i")]
    DerivativeDiverged { re: f64, im: f64 },

    #[error("quadrature did not converge: estimates {coarse:e} and {fine:e} differ beyond tolerance {tolerance:e}")]
    QuadratureDiverged { coarse: f64, fine: f64, tolerance: f64 },

    #[error("density must be positive, got {0}")]
    NonPositiveDensity(f64),

    #[error("shape operator has negative eigenvalue {0}; surface is not convex")]
    NotConvex(f64),

    #[error("endomorphism Id + B is singular (eigenvalue -1)")]
    SingularEndomorphism,

    #[error("Id + t^2 B is degenerate at t = {t}")]
    DegenerateSurface { t: f64 },

    #[error("Beltrami coefficient has modulus {0} >= 1")]
    BeltramiOutOfRange(f64),

    #[error("map is not orientation preserving or is singular (A_z = {0})")]
    NotOrientationPreserving(f64),

    #[error("leaves {0} and {1} of the lamination intersect")]
    LeavesIntersect(usize, usize),

    #[error("geodesic arc lies inside leaf {0}")]
    ArcInsideLeaf(usize),

    #[error("bending angle {0} outside (0, pi)")]
    BendingOutOfRange(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument { name, reason: reason.into() }
}

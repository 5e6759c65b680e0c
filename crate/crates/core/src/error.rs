use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("matrix is singular (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("near-singular resolvent (condition number {condition:e})")]
    NearSingular { condition: f64 },

    #[error("point not in G_delta (norm of delta(x) is {norm})")]
    NotInDomain { norm: f64 },

    #[error("point not on the distinguished boundary (isometry defect {defect:e})")]
    NotDistinguished { defect: f64 },

    #[error("colligation is not an isometry (defect {defect:e})")]
    NotIsometric { defect: f64 },

    #[error("direction has norm {norm} > 1")]
    DirectionTooLarge { norm: f64 },

    #[error("direction is not inward: {0}")]
    NotInward(String),

    #[error("oracle inapplicable: {0}")]
    OracleInapplicable(String),

    #[error("limit does not converge: {0}")]
    Divergent(String),

    #[error("boundary limit is {distance:e} away from the unitaries")]
    NonUnitaryLimit { distance: f64 },

    #[error("no admissible step size down to {t_min:e}")]
    NoAdmissibleStep { t_min: f64 },

    #[error("sequence approaches tangentially: {0}")]
    Tangential(String),

    #[error("no generated point lies inside G_delta")]
    EmptySequence,

    #[error("pole: {0}")]
    Pole(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

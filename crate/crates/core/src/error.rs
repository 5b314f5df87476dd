use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension n = {0} (only 1 and 2 are implemented)")]
    UnsupportedDimension(usize),

    #[error("truncation degree {0} is too small (need at least 4)")]
    DegreeTooSmall(usize),

    #[error("oversampling factor must be at least 1, got {0}")]
    BadOversample(usize),

    #[error("coefficient degree {degree} exceeds grid truncation {l_max}")]
    DegreeOverflow { degree: usize, l_max: usize },

    #[error("harmonic index (l = {l}, p = {p}) is out of range for n = {n}")]
    BadHarmonicIndex { n: usize, l: usize, p: usize },

    #[error("field shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("height function is not admissible: R + rho = {value} at node {node}")]
    Inadmissible { node: usize, value: f64 },

    #[error("non-finite {what} at node {node}")]
    NonFinite { what: &'static str, node: usize },

    #[error("elementary symmetric order {order} out of range for {len} curvatures")]
    SymmetricOrder { order: usize, len: usize },

    #[error("speed {name}: parameter {reason}")]
    BadSpeedParameter { name: &'static str, reason: String },

    #[error("speed is not admissible: dF/dkappa_i at the umbilic point is {0} (must be > 0)")]
    SpeedNotAdmissible(f64),

    #[error("negative base {base} under fractional power at node {node}")]
    NegativePowerBase { node: usize, base: f64 },

    #[error("constraint index k = {k} out of range -1..={max} for n = {n}")]
    ConstraintIndex { k: i32, n: usize, max: i32 },

    #[error("constraint is degenerate: integral of E_(k+1) over the surface is {0}")]
    ConstraintDegenerate(f64),

    #[error("time step {dt} exceeds the explicit stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("step rejected at t = {t}: {reason}; retry with dt = {suggested_dt}")]
    StepRejected {
        t: f64,
        suggested_dt: f64,
        reason: String,
    },

    #[error("invalid sphere coordinates: square-root argument {value} at node {node}")]
    InadmissibleSphere { node: usize, value: f64 },

    #[error("sphere fit did not converge in {0} iterations")]
    FitDiverged(usize),

    #[error("decay-rate fit: {0}")]
    DecayFit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

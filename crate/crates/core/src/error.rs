use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid grid header: {0}")]
    InvalidHeader(String),
    #[error("wrong value count: expected {expected}, found {found}")]
    WrongValueCount { expected: usize, found: usize },
    #[error("non-finite value at cell {index}")]
    NonFinite { index: usize },
    #[error("cell {index} evaluates to {value}, which collides with the nodata sentinel")]
    NodataCollision { index: usize, value: f64 },
    #[error("layer {layer} header differs in: {fields}")]
    HeaderMismatch { layer: usize, fields: String },
    #[error("no layers given")]
    EmptyLayerList,
    #[error("point ({x}, {y}) lies outside the grid extent")]
    OutOfBounds { x: f64, y: f64 },
}

#[derive(Debug, Error)]
pub enum InterpolationError {
    #[error("no sample points")]
    EmptyPointSet,
    #[error("need at least {needed} sample points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample point {index} has non-finite coordinates or value")]
    NonFinitePoint { index: usize },
    #[error("duplicate sample location ({x}, {y}) at points {first} and {second}")]
    DuplicatePoint {
        first: usize,
        second: usize,
        x: f64,
        y: f64,
    },
    #[error("variogram fit needs at least 3 non-empty lag bins, got {0}")]
    TooFewBins(usize),
    #[error("kriging system is singular (pivot column {column}, involving points {points:?})")]
    SingularSystem { column: usize, points: Vec<usize> },
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassificationError {
    #[error("invalid rating scheme for {parameter}: {message}")]
    InvalidScheme { parameter: String, message: String },
    #[error("no valid values to classify")]
    NoValues,
    #[error("class count must be at least 1")]
    ZeroClasses,
    #[error("only {distinct} distinct values, cannot form {k} classes")]
    TooFewDistinct { distinct: usize, k: usize },
    #[error("invalid class breaks: {0}")]
    InvalidBreaks(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McdaError {
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("entry ({row}, {col}) = {value} is not a positive finite number")]
    NonPositive { row: usize, col: usize, value: f64 },
    #[error("diagonal entry {0} is not 1")]
    Diagonal(usize),
    #[error("reciprocity violated at ({row}, {col}): {a} * {b} != 1")]
    NotReciprocal {
        row: usize,
        col: usize,
        a: f64,
        b: f64,
    },
    #[error("priority {index} = {value} is not positive")]
    NonPositivePriority { index: usize, value: f64 },
    #[error("triangular fuzzy number ({l}, {m}, {u}) is not ordered l <= m <= u")]
    UnorderedTfn { l: f64, m: f64, u: f64 },
    #[error("no random index tabulated for n = {0}")]
    NoRandomIndex(usize),
    #[error("{labels} labels for {n} weights")]
    LabelCount { labels: usize, n: usize },
    #[error("weights do not form a valid weight vector: {0}")]
    InvalidWeights(String),
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("missing rating layer for parameter {0}")]
    MissingLayer(String),
    #[error("parameter list does not match scheme {scheme}: expected {expected}")]
    WrongParameters { scheme: String, expected: String },
    #[error("{weights} weights for {parameters} parameters")]
    WeightCount { weights: usize, parameters: usize },
    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Classification(#[from] ClassificationError),
}

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("ROC/AUC undefined: need at least one positive and one negative (got {n_pos} positive, {n_neg} negative)")]
    SingleClass { n_pos: usize, n_neg: usize },
    #[error("no observation could be scored ({outside} outside the grid, {nodata} on nodata)")]
    NothingScored { outside: usize, nodata: usize },
    #[error("invalid threshold {0}")]
    InvalidThreshold(f64),
    #[error("observation {index} is invalid: {message}")]
    InvalidObservation { index: usize, message: String },
    #[error("high and low class sets overlap on class {0}")]
    OverlappingSets(u32),
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum SyntheticError {
    #[error("degenerate scenario: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Classification(#[from] ClassificationError),
}

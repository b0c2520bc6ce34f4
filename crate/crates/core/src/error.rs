use core::fmt;

/// Errors produced by graphon construction and the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The value matrix does not have `k` rows of length `k`.
    ShapeMismatch { blocks: usize, rows: usize, cols: usize },
    /// `values[i][j] != values[j][i]`.
    AsymmetricValues { i: usize, j: usize },
    /// A block weight is zero, negative or not finite.
    NonpositiveWeight { index: usize, weight: f64 },
    /// A value entry is NaN or infinite.
    NonFiniteValue { i: usize, j: usize },
    /// The ambient mass is smaller than the total support mass.
    AmbientTooSmall { ambient: f64, support: f64 },
    /// `p < 1` (or `p <= 1` where a strict exponent is required).
    InvalidP(f64),
    /// Exact enumeration requested beyond the configured block limit.
    TooManyBlocks { blocks: usize, limit: usize },
    /// An entry is negative where a non-negative graphon is required.
    NegativeValue { i: usize, j: usize },
    /// A 0/1 adjacency matrix is not symmetric, not 0/1, or has loops.
    NotSymmetric,
    /// A density outside `[0, 1]`.
    BadDensity(f64),
    /// Coupling row or column sums do not match the required marginals.
    MarginalMismatch { axis: Axis, index: usize, expected: f64, found: f64 },
    /// The requested distance mode cannot handle the inputs.
    ModeUnsupported(&'static str),
    /// A signed graphon was passed to the invariant `L^p` metric.
    NegativeGraphon,
    /// Stretch factor must be strictly positive and finite.
    NonpositiveU(f64),
    /// A value outside `[0, 1]` where a probability is required.
    ValueOutOfRange { i: usize, j: usize, value: f64 },
    /// Sampling needs a graphon whose blocks have finite total mass.
    InfiniteSupport,
    /// A graph edge joins a vertex to itself.
    SelfLoop(usize),
    /// The same unordered edge occurs twice.
    DuplicateEdge(usize, usize),
    /// An edge endpoint is not a vertex of the graph.
    VertexOutOfRange { vertex: usize, vertices: usize },
    /// A gallery depth beyond what the constructor supports.
    NTooLarge { n: usize, max: usize },
    /// Any other violated precondition.
    InvalidArgument(&'static str),
}

/// Which side of a coupling matrix a marginal refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { blocks, rows, cols } => write!(
                f,
                "value matrix is {rows}x{cols} but there are {blocks} block weights"
            ),
            Error::AsymmetricValues { i, j } => {
                write!(f, "values[{i}][{j}] differs from values[{j}][{i}]")
            }
            Error::NonpositiveWeight { index, weight } => {
                write!(f, "block weight {index} is {weight}, expected a positive finite number")
            }
            Error::NonFiniteValue { i, j } => write!(f, "values[{i}][{j}] is not finite"),
            Error::AmbientTooSmall { ambient, support } => write!(
                f,
                "ambient mass {ambient} is smaller than the support mass {support}"
            ),
            Error::InvalidP(p) => write!(f, "invalid exponent p = {p}"),
            Error::TooManyBlocks { blocks, limit } => write!(
                f,
                "{blocks} blocks exceed the exact enumeration limit of {limit}"
            ),
            Error::NegativeValue { i, j } => write!(f, "values[{i}][{j}] is negative"),
            Error::NotSymmetric => {
                f.write_str("adjacency matrix must be symmetric, 0/1-valued with zero diagonal")
            }
            Error::BadDensity(p) => write!(f, "density {p} is outside [0, 1]"),
            Error::MarginalMismatch { axis, index, expected, found } => write!(
                f,
                "coupling {} {index} sums to {found}, expected {expected}",
                match axis {
                    Axis::Row => "row",
                    Axis::Column => "column",
                }
            ),
            Error::ModeUnsupported(why) => write!(f, "distance mode unsupported: {why}"),
            Error::NegativeGraphon => f.write_str(
                "the invariant L^p metric with p > 1 requires non-negative graphons \
                 (use allow_signed to compute the non-invariant quantity)",
            ),
            Error::NonpositiveU(u) => write!(f, "stretch factor {u} must be positive"),
            Error::ValueOutOfRange { i, j, value } => {
                write!(f, "values[{i}][{j}] = {value} is outside [0, 1]")
            }
            Error::InfiniteSupport => f.write_str("graphon support must have finite mass"),
            Error::SelfLoop(v) => write!(f, "self-loop at vertex {v}"),
            Error::DuplicateEdge(u, v) => write!(f, "duplicate edge {u}-{v}"),
            Error::VertexOutOfRange { vertex, vertices } => {
                write!(f, "vertex {vertex} out of range for a graph on {vertices} vertices")
            }
            Error::NTooLarge { n, max } => write!(f, "n = {n} exceeds the supported maximum {max}"),
            Error::InvalidArgument(what) => f.write_str(what),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

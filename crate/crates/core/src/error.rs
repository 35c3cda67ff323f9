use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyInput,
    #[error("unbounded region")]
    UnboundedRegion,
    #[error("blow-up of this region kind is not supported")]
    UnsupportedBlowup,
    #[error("invalid world: area must be positive and finite, got {0}")]
    InvalidWorld(f64),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k too large for point count (k = {k}, m = {m})")]
    KTooLarge { k: usize, m: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("no outside vertex")]
    NoOutsideVertex,
    #[error("empty component")]
    EmptyComponent,
    #[error("component is the giant component")]
    GiantComponent,
    #[error("ambiguous side: component is near two sides of the square")]
    AmbiguousSide,
    #[error("hypothesis violated: need |A| <= |C| and |B| <= |C| (got a = {a}, b = {b}, c = {c})")]
    LemmaHypothesis { a: f64, b: f64, c: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

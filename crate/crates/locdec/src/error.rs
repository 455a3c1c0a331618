use thiserror::Error;

/// Errors produced by construction, parsing, and the decision engines.
///
/// Anything that reaches a caller through this type is an *input* problem:
/// malformed files, invariant-violating graphs, or mismatched parameters.
/// Verdicts ("reject", "no counterexample") are never reported as errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("node index {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("graph is not connected")]
    Disconnected,

    #[error("{got} inputs supplied for {expect} nodes")]
    InputLength { got: usize, expect: usize },

    #[error("identity values must be positive")]
    ZeroIdentity,

    #[error("identity values must be pairwise distinct")]
    DuplicateIdentity,

    #[error("{got} identities supplied for {expect} nodes")]
    IdentityLength { got: usize, expect: usize },

    #[error("{got} certificates supplied for {expect} nodes")]
    CertificateLength { got: usize, expect: usize },

    #[error("{got} oracle bounds supplied for {expect} nodes")]
    OracleLength { got: usize, expect: usize },

    #[error("oracle bounds must be positive")]
    ZeroOracleBound,

    #[error("ball radii differ: {0} vs {1}")]
    RadiusMismatch(usize, usize),

    #[error("identity range 1..={range_max} cannot host {k} distinct identities")]
    RangeTooSmall { k: usize, range_max: u64 },

    #[error("decider reads identities but none were provided")]
    MissingIdentities,

    #[error("decider reads per-node oracle bounds but none were provided")]
    MissingOracle,

    #[error("language '{0}' is not marked hereditary")]
    NotHereditary(String),

    #[error("unknown language spec '{0}'")]
    UnknownLanguage(String),

    #[error("language parameter invalid: {0}")]
    LanguageParameter(String),

    #[error("map entry {node}->{image} out of range for target with {target_nodes} nodes")]
    MapOutOfRange {
        node: usize,
        image: usize,
        target_nodes: usize,
    },

    #[error("map length {got} does not cover the {expect} source nodes")]
    MapLength { got: usize, expect: usize },

    #[error("composed maps disagree on the middle instance")]
    ComposeMismatch,

    #[error("certificate label {label} outside 1..={node_count}")]
    CertificateLabel { label: usize, node_count: usize },

    #[error("certificate encoding overflows a 16-bit field: {0}")]
    CertificateField(String),

    #[error("certificate bytes malformed: {0}")]
    CertificateMalformed(String),

    #[error("exhaustive enumeration capped at {cap} nodes, {requested} requested")]
    DeskScaleExceeded { requested: usize, cap: usize },

    #[error("radius must be at least 1 for lift checks")]
    RadiusZero,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

//! Projective linear arrangements of rooted trees.
//!
//! Exact expected sum of edge lengths over uniformly random projective
//! arrangements, counting, enumeration and uniform sampling of those
//! arrangements, the trees minimizing and maximizing the expectation, and a
//! Monte Carlo comparison over CoNLL-U treebanks.
//!
//! ```
//! use projlin_core::{expected_d_projective, count_projective, Method, RootedTree};
//!
//! let star: RootedTree = "0 1 1 1 1".parse().unwrap();
//! assert_eq!(expected_d_projective(&star, Method::ClosedForm).to_string(), "8");
//! assert_eq!(count_projective(&star).to_string(), "120");
//! ```

pub mod arrangement;
pub mod expectation;
pub mod extrema;
pub mod montecarlo;
pub mod numeric;
pub mod selfcheck;
pub mod tree;
pub mod treebank;

pub use arrangement::{
    count_projective, enumerate_projective, is_planar, is_projective, sample_projective, seeded_rng,
    sum_edge_lengths, ArrangementError, LengthVariant, LinearArrangement, ProjectiveArrangements, ProjectiveSampler,
    DEFAULT_ENUMERATION_CAP,
};
pub use expectation::{
    class_formula, expected_d_projective, expected_d_unconstrained, expected_dprime_projective,
    expected_projective, ExpectationError, Method,
};
pub use extrema::{
    enumerate_rooted_trees, max_expected, min_expected, ExtremaError, MemoTable, OptimumEntry, DEFAULT_MINIMA_CAP,
};
pub use montecarlo::{
    aggregate_errors, estimate_expected_d, relative_error, BootstrapConfig, ErrorStats, McEstimate, MonteCarloError,
};
pub use numeric::{BigCount, ExactRational};
pub use tree::{make_class, random_tree, CanonicalCode, RootedTree, SubtreeMetrics, TreeClass, TreeError, Vertex};
pub use treebank::{
    analyze_treebank, parse_conllu, write_sentence_csv, write_summary_csv, AnalysisConfig, AnalysisError,
    ConlluItem, ParseOptions, SkipReason, TreebankReport, TreebankSentence,
};

/// Any error raised by this crate, with a stable name per variant.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Expectation(#[from] ExpectationError),
    #[error(transparent)]
    Extrema(#[from] ExtremaError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::Tree(e) => e.name(),
            Error::Arrangement(e) => e.name(),
            Error::Expectation(e) => e.name(),
            Error::Extrema(e) => e.name(),
            Error::MonteCarlo(e) => e.name(),
            Error::Analysis(e) => e.name(),
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
        }
    }

    /// True when a request was refused only because of a size cap.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            Error::Arrangement(ArrangementError::CapExceeded { .. }) | Error::Extrema(ExtremaError::CapExceeded { .. })
        )
    }
}

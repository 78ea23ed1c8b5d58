pub mod bounds;
pub mod canonical;
pub mod cli;
pub mod graph;
pub mod io;
pub mod matching;
pub mod moments;
pub mod search;
pub mod survey;
pub mod table;

pub use bounds::{certified_lower_bound, flip_improve, parallel_matching, shared_color_edges, BoundCertificate};
pub use canonical::{canonical_form, is_isomorphic, CanonicalForm};
pub use graph::{Color, ColoredGraph, Face, FaceProfile, GraphError};
pub use matching::{double_factorial, enumerate_matchings, faces_with_color0, Matching};
pub use moments::{factorization_diagnostic, mc_estimate, moment_polynomial, MomentPolynomial};
pub use search::{max_faces, max_faces_with, MaxFaceResult, SearchOptions, SearchOutcome};
pub use survey::{count_colored_graphs, find_violators, run_survey, verify_fixture_set, SurveyConfig, SurveyMode, SurveyReport};
pub use table::PartialFaceTable;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/matchings.md")]
    mod matchings {}
    #[doc = include_str!("../../../book/src/canonical.md")]
    mod canonical {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/survey.md")]
    mod survey {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

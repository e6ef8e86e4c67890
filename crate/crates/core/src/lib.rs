//! Symbolic dynamics and adaptedness analysis for uniformly expanding
//! Markov interval maps.
//!
//! The crate is organized in three layers:
//!
//! * [`sft`]: subshifts of finite type, Perron eigendata, maximal-entropy
//!   (Parry) measures and the periodic return-block correspondence;
//! * [`map`]: piecewise-smooth interval maps with a Markov partition,
//!   their validation, signed (two-sided) symbolic dynamics, singularity
//!   detection and cylinder geometry;
//! * [`adapted`]: the analysis pipeline deciding whether the
//!   maximal-entropy measure is adapted, with the supporting integral
//!   bounds, Lyapunov estimates and dimension output.
//!
//! [`constructions`] holds ready-made example maps exercising every branch
//! of the classifier.

pub mod adapted;
pub mod constructions;
pub mod map;
pub mod sft;

pub use sft::{
    admissible_words, cyclic_structure, measure_correspondence, perron, perron_dense, scc_order,
    CyclicStructure, CylinderMeasure, GibbsConstants, LiftedMeasure, MeasureCorrespondence,
    ParryMeasure, PerronData, RestrictedMeasure, SccDecomposition, SftError, TransitionMatrix,
};

pub use map::singularity::the_singularity;
pub use map::{
    b_range_on_cylinder, cylinder_bracket, detect_singularities, itinerary, transitive_component,
    BranchKind, BranchSpec, HolderClass, LocalProfile, MapError, MarkovIntervalMap, OrbitClass,
    Side, SignedPoint, SingularityInfo, ValidationReport,
};
pub use map::signed::{classify_orbit, signed_orbit, tilde_step};

pub use adapted::{
    beta_interval, classify_mme, classify_with, dk_shadowing_check, integral_bounds,
    ledrappier_dimension, lyapunov_mme, period_reduce, AdaptednessStatus, AdaptednessVerdict,
    BetaInterval, DimensionBracket, LyapunovBracket, ReducedSystem, Rule, SeriesBoundReport,
    SeriesVerdict, ShadowingReport,
};
pub use constructions::{
    by_name, eqadapt_series, lorenz_family, make_eqadapt, make_eqnonadapt, make_fig1_counterexample,
    make_fig1_notholder, make_fig_b, make_fig_c, make_nonpolynonadapt, make_power_adapted,
    nonsing_measure, AnalyticSeries, ConstructionError, LorenzFamilyReport, LorenzParams,
    LorenzScenario, NonsingMeasure, GALLERY_NAMES,
};

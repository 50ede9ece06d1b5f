//! Random generation and simulation: seeded streams, equicorrelated normal
//! data, one-sided t-test p-values, the weight scenarios, the FWER/power
//! study and the least favorable configuration samplers.

pub mod lfc;
pub mod rng;
pub mod sampling;
pub mod simulation;
pub mod tdist;

pub use lfc::{
    estimate_sharpness, falsifier_error_rate, lfc_stepdown_falsifier, lfc_whp_sampler, LfcSample,
    SharpnessEstimate,
};
pub use rng::{rng_new, substream, SimRng};
pub use sampling::{
    one_sample_t_pvalue, sample_equicorrelated, weight_scenario, DataMatrix, WeightScenario,
};
pub use simulation::{
    proportion_se, run_simulation, CellRecord, ProcedureTag, SimulationConfig, SimulationResult,
};
pub use tdist::{regularized_incomplete_beta, student_t_sf};

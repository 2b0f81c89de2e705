//! Multi-round leakage accounting: per-round leakage terms, the probabilistic
//! leakage model, score-weighted entropies and the final key-rate arithmetic.

mod geattl;
mod leakage;
mod penalty;
mod qes;
mod sup;

pub use geattl::{
    copy_leakage_channel, geattl_delta_sweep, geattl_end_to_end, random_geattl_rounds, DeltaSweep, GeattlReport, GeattlRound,
    XiSource, GEATTL_TOL,
};
pub use leakage::{leakage_curve, prob_leakage_bound, prob_leakage_channel, prob_leakage_vn_limit, CurveRow, LeakageModel};
pub use penalty::{
    compensated_sum, freq, freq_str, info_bounding_aggregate, keyrate_penalty, Frequencies, PenaltyBreakdown, PenaltyInput,
    RoundBounds,
};
pub use qes::{qes_entropy, QesSpec};
pub use sup::{
    channel_sup_mi, classical_reduction_check, closed_form_sup, tagged_model, ChannelSup, ClassicalReductionReport,
    EstimateStatus,
};

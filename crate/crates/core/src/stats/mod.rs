//! Statistics shared by the test procedures.

mod ranks;
pub mod special;
mod variance;
mod weights;

pub use ranks::{rank_midranks, rank_sum_statistic};
pub use special::{
    normal_cdf, normal_two_sided, student_t_cdf, student_t_two_sided, SpecialFunctionConfig,
};
pub use variance::{
    mean, neyman_se, pooled_se, sample_variance, welch_df, welch_se, ArmSummary,
};
pub use weights::{d_statistic, resolve_weights, WeightFamily, WeightTable};

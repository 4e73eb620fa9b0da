//! Exact computations on finite chains.

mod hitting;
mod minorization;
mod mixing;
mod stationary;

pub use hitting::{
    expected_hitting, max_hitting_time, mix_to_hit_bound, HitMethod, HitMixReport, HitStrategy,
};
pub use minorization::{pseudo_minorization, MinorizationReport};
pub use mixing::{default_horizon, mixing_time, tv_distance, tv_profile, EPS_MIX};
pub use stationary::{closed_classes, stationary_distribution};

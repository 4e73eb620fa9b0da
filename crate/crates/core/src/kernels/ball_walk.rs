use super::DensitySpec;
use crate::{Error, Result};

/// Metropolis-Hastings ball walk on `[0, 1]`: propose `y` uniform on
/// `[x - c, x + c]`, reject proposals outside `[0, 1]`, otherwise accept with
/// probability `min{1, psi(y)/psi(x)}` (the uniform proposal is symmetric).
#[derive(Debug, Clone, PartialEq)]
pub struct BallWalk {
    target: DensitySpec,
    half_width: f64,
}

impl BallWalk {
    /// Requires `c` in `(0, 1/2]`.
    pub fn new(target: DensitySpec, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width <= 0.5) {
            return Err(Error::InvalidParameters("ball walk half-width must lie in (0, 1/2]"));
        }
        Ok(Self { target, half_width })
    }

    pub fn target(&self) -> &DensitySpec {
        &self.target
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Acceptance probability of a move from `x` to `y`, zero outside `[0, 1]`.
    pub fn acceptance(&self, x: f64, y: f64) -> f64 {
        if !(0.0..=1.0).contains(&y) {
            return 0.0;
        }
        (self.target.eval(y) / self.target.eval(x)).min(1.0)
    }

    /// One step driven by two uniforms: `u_propose` places the proposal,
    /// `u_accept` decides acceptance.
    pub fn step(&self, x: f64, u_propose: f64, u_accept: f64) -> f64 {
        let y = x + self.half_width * (2.0 * u_propose - 1.0);
        if u_accept < self.acceptance(x, y) {
            y
        } else {
            x
        }
    }
}

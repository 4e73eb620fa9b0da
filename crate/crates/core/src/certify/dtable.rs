use alloc::vec::Vec;

use crate::{tol, Error, Result};

/// Sandwich constants at one `alpha`: `lower t_H(alpha) <= t_L <= upper t_H(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DTableEntry {
    pub alpha: f64,
    pub upper: f64,
    pub lower: f64,
    /// Whether the upper constant comes from a proof rather than a guess.
    pub verified: bool,
}

/// User-supplied hitting-to-mixing constants, sorted by `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct DTable {
    entries: Vec<DTableEntry>,
}

impl DTable {
    /// Validates `alpha` in `(0, 0.5)`, `0 < lower <= upper`, distinct keys,
    /// and that `upper` does not decrease as `alpha` grows (larger sets are
    /// hit sooner, so the best constants can only grow).
    pub fn new(mut entries: Vec<DTableEntry>) -> Result<Self> {
        for e in &entries {
            if !(e.alpha > 0.0 && e.alpha < 0.5) {
                return Err(Error::InvalidTable("alpha keys must lie in (0, 0.5)"));
            }
            if !(e.lower > 0.0 && e.upper.is_finite() && e.lower <= e.upper) {
                return Err(Error::InvalidTable("need 0 < lower <= upper < inf"));
            }
        }
        entries.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        for w in entries.windows(2) {
            if w[1].alpha - w[0].alpha <= tol::BALANCE {
                return Err(Error::InvalidTable("duplicate alpha key"));
            }
            if w[1].upper < w[0].upper {
                return Err(Error::InvalidTable("upper constants must not decrease in alpha"));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[DTableEntry] {
        &self.entries
    }

    pub fn get(&self, alpha: f64) -> Result<&DTableEntry> {
        self.entries
            .iter()
            .find(|e| (e.alpha - alpha).abs() <= tol::BALANCE)
            .ok_or(Error::MissingAlpha { alpha })
    }
}

/// `(lower t_H, upper t_H)`: bounds on the lazy mixing time.
pub fn hit_to_mix(t_h: f64, alpha: f64, table: &DTable) -> Result<(f64, f64)> {
    let e = table.get(alpha)?;
    Ok((e.lower * t_h, e.upper * t_h))
}

/// Consistency of a table entry against exactly computed `t_H(alpha)` and `t_L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DTableCheck {
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

pub fn check_dtable(table: &DTable, alpha: f64, t_h: f64, t_l: f64) -> Result<DTableCheck> {
    let (lower_bound, upper_bound) = hit_to_mix(t_h, alpha, table)?;
    Ok(DTableCheck {
        lower_ok: lower_bound <= t_l,
        upper_ok: t_l <= upper_bound,
        lower_bound,
        upper_bound,
    })
}

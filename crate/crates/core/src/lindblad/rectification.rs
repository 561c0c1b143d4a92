use super::ness::{ness, NessMethod};
use super::observables::observables;
use crate::error::{invalid, Result};
use crate::model::params::ModelParams;

/// Reverse currents below this magnitude make `R` an overflow-flagged lower bound.
pub const REVERSE_FLOOR: f64 = 1e-300;

/// Forward (`f = +|f|`) and reverse (`f = -|f|`) currents and `R = -J_F / J_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectification {
    pub forward: f64,
    pub reverse: f64,
    pub ratio: f64,
    /// Set when `|J_R|` is below [`REVERSE_FLOOR`]; `ratio` is then computed with the floor.
    pub overflow: bool,
}

impl Rectification {
    pub fn from_currents(forward: f64, reverse: f64) -> Self {
        if reverse.abs() < REVERSE_FLOOR {
            let floor = if reverse < 0.0 { -REVERSE_FLOOR } else { REVERSE_FLOOR };
            Self { forward, reverse, ratio: -forward / floor, overflow: true }
        } else {
            Self { forward, reverse, ratio: -forward / reverse, overflow: false }
        }
    }
}

pub fn rectification(params: &ModelParams, method: NessMethod) -> Result<Rectification> {
    let f = params.driving.abs();
    if f == 0.0 {
        return Err(invalid("rectification needs nonzero driving"));
    }
    let forward = params.with_driving(f);
    let reverse = params.with_driving(-f);
    let jf = observables(&ness(&forward, method)?, &forward)?.current;
    let jr = observables(&ness(&reverse, method)?, &reverse)?.current;
    Ok(Rectification::from_currents(jf, jr))
}

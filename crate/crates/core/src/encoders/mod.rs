//! Exact reductions of application problems to combinatorial n-fold
//! programs, and decoders that turn solver points back into answers.

use serde::{Deserialize, Serialize};

use crate::error::{NFoldError, Result};
use crate::solver::{SolveStatus, SolverConfig};
use crate::transform::{solve_relational, RelationalInstance};

pub mod bribery;
pub mod huge;
pub mod strings;
pub mod wsm;

pub use bribery::{
    encode_bribery_c1, encode_bribery_scoring, order_cost, solve_bribery, BriberyAnswer, BriberyDecoder, BriberyInstance, Copeland,
    Outcome, Rule, ScenarioRule, VoterType,
};
pub use huge::{encode_huge_nfold, HugeAnswer, SuccinctBrick, HugeDecoder, HugeNFoldInstance, HugeType};
pub use strings::{
    encode_multi_strings, encode_part, normalize_hamming, solve_string_problem, string_presets, ColumnType, MismatchReading,
    MultiStringsInstance, Normalized, PartSolution, ScheduleMember, SchedulePart, StringAnswer, StringProblem,
    StringSolution, StringsDecoder, StringsInput,
};
pub use wsm::{encode_wsm, CoverAnswer, SetType, WsmDecoder, WsmInstance};

/// Size limits for the encoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// largest brick width an encoder may produce
    pub max_brick_width: usize,
    /// largest number of instances in a schedule
    pub max_schedule: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_brick_width: 1 << 12, max_schedule: 1 << 16 }
    }
}

impl Caps {
    pub(crate) fn check_width(&self, width: u128, what: &str) -> Result<usize> {
        if width > self.max_brick_width as u128 {
            Err(NFoldError::EncoderCap(format!(
                "{what}: brick width {width} exceeds the limit of {}",
                self.max_brick_width
            )))
        } else {
            Ok(width as usize)
        }
    }

    pub(crate) fn check_schedule(&self, len: u128, what: &str) -> Result<()> {
        if len > self.max_schedule as u128 {
            Err(NFoldError::EncoderCap(format!("{what}: {len} instances exceed the limit of {}", self.max_schedule)))
        } else {
            Ok(())
        }
    }
}

/// Maps a point of an encoded instance back to the application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Decoder {
    Strings(StringsDecoder),
    Wsm(WsmDecoder),
    Bribery(BriberyDecoder),
    Huge(HugeDecoder),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Answer {
    Strings(StringAnswer),
    Wsm(CoverAnswer),
    Bribery(BriberyAnswer),
    Huge(HugeAnswer),
}

impl Answer {
    /// The application objective: total distance, cover weight, bribery cost
    /// or program value.
    pub fn cost(&self) -> i64 {
        match self {
            Answer::Strings(a) => a.objective,
            Answer::Wsm(a) => a.cost,
            Answer::Bribery(a) => a.cost,
            Answer::Huge(a) => a.objective,
        }
    }
}

/// Decodes a point of the encoded (relational) instance. Fails if the
/// decoded answer violates the application constraints.
pub fn decode(d: &Decoder, p: &[i64]) -> Result<Answer> {
    Ok(match d {
        Decoder::Strings(s) => Answer::Strings(s.decode(p)?),
        Decoder::Wsm(w) => Answer::Wsm(w.decode(p)?),
        Decoder::Bribery(b) => Answer::Bribery(b.decode(p)?),
        Decoder::Huge(h) => Answer::Huge(h.decode(p)?),
    })
}

/// Solves an encoded instance and decodes the optimum. `None` means the
/// encoded instance is infeasible.
pub fn solve_encoded(rel: &RelationalInstance, d: &Decoder, cfg: &SolverConfig) -> Result<Option<Answer>> {
    let report = solve_relational(rel, cfg, None)?;
    match report.status {
        SolveStatus::Infeasible => Ok(None),
        SolveStatus::Optimal | SolveStatus::LocalOptimum => {
            let p = report.point.expect("solved report carries a point");
            decode(d, &p).map(Some)
        }
        SolveStatus::Error(msg) => Err(NFoldError::Invalid(vec![msg])),
    }
}

/// Solves every member of a schedule and keeps the cheapest answer; ties go
/// to the earliest member.
pub fn solve_schedule(members: &[(RelationalInstance, Decoder)], cfg: &SolverConfig) -> Result<Option<(usize, Answer)>> {
    use rayon::prelude::*;
    let answers: Vec<Result<Option<Answer>>> =
        members.par_iter().map(|(rel, d)| solve_encoded(rel, d, cfg)).collect();
    let mut best: Option<(usize, Answer)> = None;
    for (i, a) in answers.into_iter().enumerate() {
        if let Some(a) = a? {
            if best.as_ref().is_none_or(|(_, b)| a.cost() < b.cost()) {
                best = Some((i, a));
            }
        }
    }
    Ok(best)
}

/// Every instance built by an encoder must keep the combinatorial shape:
/// one local row per brick and bounds as the only pinning device.
pub(crate) fn debug_check_shape(rel: &RelationalInstance) {
    debug_assert!(rel.base.validate().is_valid(), "{:?}", rel.base.validate().violations);
    debug_assert_eq!(rel.local.len(), rel.base.n);
    debug_assert_eq!(rel.global.len(), rel.base.r());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cover(demands: Vec<i64>, pair_weight: i64) -> WsmInstance {
        WsmInstance {
            universe: 2,
            demands,
            types: vec![
                SetType { members: vec![0, 1], weights: vec![pair_weight] },
                SetType { members: vec![0], weights: vec![1] },
                SetType { members: vec![1], weights: vec![1] },
            ],
        }
    }

    #[test]
    fn schedule_keeps_the_cheapest_member() {
        let caps = Caps::default();
        let members: Vec<_> =
            [cover(vec![1, 1], 5), cover(vec![1, 1], 1), cover(vec![2, 2], 1)].iter().map(|w| encode_wsm(w, &caps).unwrap()).collect();
        let (i, a) = solve_schedule(&members, &SolverConfig::default()).unwrap().unwrap();
        assert_eq!((i, a.cost()), (1, 1));
    }

    #[test]
    fn schedule_of_infeasible_members() {
        let caps = Caps::default();
        let members = vec![encode_wsm(&cover(vec![3, 0], 1), &caps).unwrap()];
        assert_eq!(solve_schedule(&members, &SolverConfig::default()).unwrap(), None);
    }

    #[test]
    fn decoder_json_is_tagged() {
        let (_, dec) = encode_wsm(&cover(vec![1, 1], 3), &Caps::default()).unwrap();
        let v = serde_json::to_value(&dec).unwrap();
        assert_eq!(v["problem"], "wsm");
        assert_eq!(serde_json::from_value::<Decoder>(v).unwrap(), dec);
    }
}

//! Weighted set multicover: pick a multisubset of weighted sets so that
//! every universe element `j` is covered at least `d_j` times, at minimum
//! total weight.
//!
//! Sets are grouped by type (the subset of the universe they cover). Within
//! a type the lightest sets are always used first, so the cost of taking
//! `c` sets of a type is the sum of its `c` lightest weights, a convex
//! function of `c`.

use serde::{Deserialize, Serialize};

use super::{debug_check_shape, Caps, Decoder};
use crate::error::{NFoldError, Result};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::{PiecewiseLinear, SeparableObjective, Term};
use crate::transform::{Relation, RelationalInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetType {
    /// universe elements covered, zero-based
    pub members: Vec<usize>,
    /// weights of the sets of this type
    pub weights: Vec<i64>,
}

impl SetType {
    pub fn mask(&self) -> usize {
        self.members.iter().fold(0, |m, &e| m | (1 << e))
    }

    pub fn sorted_weights(&self) -> Vec<i64> {
        let mut w = self.weights.clone();
        w.sort_unstable();
        w
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WsmInstance {
    pub universe: usize,
    pub demands: Vec<i64>,
    pub types: Vec<SetType>,
}

impl WsmInstance {
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.universe == 0 {
            v.push("universe must be non-empty".to_string());
        }
        if self.demands.len() != self.universe {
            v.push("one demand per universe element is required".to_string());
        }
        if self.demands.iter().any(|&d| d < 0) {
            v.push("demands must be non-negative".to_string());
        }
        if self.types.is_empty() {
            v.push("at least one set type is required".to_string());
        }
        for (i, ty) in self.types.iter().enumerate() {
            if ty.members.iter().any(|&e| e >= self.universe) {
                v.push(format!("set type {i} names an element outside the universe"));
            }
            if ty.weights.iter().any(|&w| w < 0) {
                v.push(format!("set type {i} has a negative weight"));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(NFoldError::Invalid(v))
        }
    }
}

/// One brick per set type with `2^k` variables, one per subset of the
/// universe; only the variable of the type's own subset is free. Rows are
/// the `k` covering constraints (`≥ d_j`); each brick sums to at most the
/// number of sets of its type.
pub fn encode_wsm(w: &WsmInstance, caps: &Caps) -> Result<(RelationalInstance, Decoder)> {
    w.validate()?;
    let k = w.universe;
    let t = caps.check_width(1u128.checked_shl(k as u32).unwrap_or(u128::MAX), "set multicover universe")?;
    let n = w.types.len();
    let rows: Vec<Vec<i64>> = (0..k).map(|j| (0..t).map(|f| ((f >> j) & 1) as i64).collect()).collect();
    let mut lower = vec![0i64; n * t];
    let mut upper = vec![0i64; n * t];
    let mut terms = vec![Term::Zero; n * t];
    for (tau, ty) in w.types.iter().enumerate() {
        let idx = tau * t + ty.mask();
        lower[idx] = 0;
        upper[idx] = ty.weights.len() as i64;
        terms[idx] = Term::PiecewiseLinear(PiecewiseLinear::partial_sums(&ty.sorted_weights())?);
    }
    let base = CombNFoldInstance {
        bimatrix: Bimatrix::new(rows)?,
        n,
        b0: w.demands.clone(),
        b_local: w.types.iter().map(|ty| ty.weights.len() as i64).collect(),
        lower,
        upper,
        objective: SeparableObjective::new(terms),
    };
    let rel = RelationalInstance::new(base, vec![Relation::Ge; k], vec![Relation::Le; n])?;
    debug_check_shape(&rel);
    Ok((rel, Decoder::Wsm(WsmDecoder { instance: w.clone(), t })))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WsmDecoder {
    pub instance: WsmInstance,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverAnswer {
    /// number of sets used per type
    pub counts: Vec<i64>,
    /// chosen sets as (type, weight), the lightest of each type
    pub chosen: Vec<(usize, i64)>,
    pub cost: i64,
}

impl WsmDecoder {
    pub fn decode(&self, p: &[i64]) -> Result<CoverAnswer> {
        let w = &self.instance;
        if p.len() != w.types.len() * self.t {
            return Err(NFoldError::Dimension("point does not match the encoded instance".into()));
        }
        let mut counts = Vec::with_capacity(w.types.len());
        let mut chosen = Vec::new();
        let mut cost = 0i64;
        let mut covered = vec![0i64; w.universe];
        for (tau, ty) in w.types.iter().enumerate() {
            let c = p[tau * self.t + ty.mask()];
            if c < 0 || c > ty.weights.len() as i64 {
                return Err(NFoldError::InfeasiblePoint(format!("type {tau} uses {c} sets")));
            }
            for wt in ty.sorted_weights().into_iter().take(c as usize) {
                chosen.push((tau, wt));
                cost += wt;
            }
            for &e in &ty.members {
                covered[e] += c;
            }
            counts.push(c);
        }
        if let Some(j) = (0..w.universe).find(|&j| covered[j] < w.demands[j]) {
            return Err(NFoldError::InfeasiblePoint(format!("element {j} is covered {} < {} times", covered[j], w.demands[j])));
        }
        Ok(CoverAnswer { counts, chosen, cost })
    }
}

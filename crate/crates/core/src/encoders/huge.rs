//! High-multiplicity n-fold programs with small variable domains.
//!
//! The input lists brick types, each with a multiplicity `n_i` that may be
//! huge. After shifting every lower bound to zero, a brick of any type is a
//! configuration `c ∈ Π [0, d_j]`. The encoded program has one brick per
//! type and one variable per configuration, counting how many bricks of
//! that type use it, so its size does not depend on the multiplicities.

use serde::{Deserialize, Serialize};

use super::{debug_check_shape, Caps, Decoder};
use crate::error::{NFoldError, Result};
use crate::format::{objective_from_specs, TermSpec};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::{SeparableObjective, Term};
use crate::oracle::for_each_point;
use crate::transform::{Relation, RelationalInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HugeType {
    /// right-hand side of the inner rows `A x = b_local`
    #[serde(default)]
    pub b_local: Vec<i64>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub objective: Vec<TermSpec>,
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HugeNFoldInstance {
    /// global matrix, `r x t`
    pub d: Vec<Vec<i64>>,
    /// inner matrix, `s x t`; absent means bricks have no inner rows
    #[serde(default)]
    pub a: Option<Vec<Vec<i64>>>,
    pub b0: Vec<i64>,
    pub types: Vec<HugeType>,
}

impl HugeNFoldInstance {
    pub fn t(&self) -> usize {
        self.d.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.t();
        let mut v = Vec::new();
        if self.d.is_empty() || t == 0 || self.d.iter().any(|r| r.len() != t) {
            v.push("D must be a non-empty rectangular matrix".to_string());
        }
        if self.b0.len() != self.d.len() {
            v.push("b0 needs one entry per row of D".to_string());
        }
        let s = match &self.a {
            Some(a) => {
                if a.iter().any(|r| r.len() != t) {
                    v.push("A must have as many columns as D".to_string());
                }
                a.len()
            }
            None => 0,
        };
        if self.types.is_empty() {
            v.push("at least one brick type is required".to_string());
        }
        for (i, ty) in self.types.iter().enumerate() {
            if ty.lower.len() != t || ty.upper.len() != t || ty.objective.len() != t {
                v.push(format!("type {i}: bounds and objective need {t} entries"));
            } else if ty.lower.iter().zip(&ty.upper).any(|(l, u)| l > u) {
                v.push(format!("type {i}: lower bound exceeds upper bound"));
            }
            if ty.b_local.len() != s {
                v.push(format!("type {i}: b_local needs {s} entries"));
            }
            if ty.count < 1 {
                v.push(format!("type {i}: multiplicity must be positive"));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(NFoldError::Invalid(v))
        }
    }

    /// `d_j = max_i (u_j^i − l_j^i)`
    pub fn domain_widths(&self) -> Vec<i64> {
        (0..self.t()).map(|j| self.types.iter().map(|ty| ty.upper[j] - ty.lower[j]).max().unwrap_or(0)).collect()
    }

    /// All configurations in lexicographic order.
    pub fn configurations(&self, caps: &Caps) -> Result<Vec<Vec<i64>>> {
        let widths = self.domain_widths();
        let count = widths
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128 + 1))
            .unwrap_or(u128::MAX);
        caps.check_width(count, "configuration count")?;
        let mut out = Vec::with_capacity(count as usize);
        for_each_point(&vec![0; widths.len()], &widths, |c| {
            out.push(c.to_vec());
            true
        });
        Ok(out)
    }

    /// The configurations admitted by at least one type, in lexicographic
    /// order. If no type admits anything, the first configuration is kept so
    /// that the encoded program still has a column.
    pub fn columns(&self, caps: &Caps) -> Result<Vec<Vec<i64>>> {
        let all = self.configurations(caps)?;
        let mut kept: Vec<Vec<i64>> =
            all.iter().filter(|c| self.types.iter().any(|ty| self.admits(ty, c))).cloned().collect();
        if kept.is_empty() {
            kept.extend(all.into_iter().take(1));
        }
        Ok(kept)
    }

    fn inner_ok(&self, ty: &HugeType, x: &[i64]) -> bool {
        self.a.as_ref().is_none_or(|a| {
            a.iter().zip(&ty.b_local).all(|(row, &b)| row.iter().zip(x).map(|(p, q)| p * q).sum::<i64>() == b)
        })
    }

    /// Whether the shifted configuration `c` is allowed for type `ty`.
    fn admits(&self, ty: &HugeType, c: &[i64]) -> bool {
        let x: Vec<i64> = c.iter().zip(&ty.lower).map(|(c, l)| c + l).collect();
        c.iter().zip(ty.lower.iter().zip(&ty.upper)).all(|(c, (l, u))| *c <= u - l) && self.inner_ok(ty, &x)
    }

    fn brick_cost(&self, ty: &HugeType, x: &[i64]) -> Result<i64> {
        objective_from_specs(&ty.objective)?.eval(x)
    }

    /// The same program with every brick written out, `Σ n_i` bricks in
    /// type order. Only available when there are no inner rows or a single
    /// all-ones inner row.
    pub fn expanded(&self, max_bricks: usize) -> Result<RelationalInstance> {
        self.validate()?;
        let total: i64 = self.types.iter().map(|ty| ty.count).sum();
        if total as u128 > max_bricks as u128 {
            return Err(NFoldError::EncoderCap(format!("{total} bricks exceed the limit of {max_bricks}")));
        }
        let ones = match &self.a {
            None => false,
            Some(a) if a.len() == 1 && a[0].iter().all(|&v| v == 1) => true,
            Some(_) => {
                return Err(NFoldError::Invalid(vec!["inner rows other than 1ᵀ have no expanded form".into()]))
            }
        };
        let mut b_local = Vec::new();
        let mut local = Vec::new();
        let (mut lower, mut upper, mut terms) = (Vec::new(), Vec::new(), Vec::new());
        for ty in &self.types {
            let obj = objective_from_specs(&ty.objective)?;
            for _ in 0..ty.count {
                lower.extend_from_slice(&ty.lower);
                upper.extend_from_slice(&ty.upper);
                terms.extend(obj.terms.iter().cloned());
                if ones {
                    b_local.push(ty.b_local[0]);
                    local.push(Relation::Eq);
                } else {
                    b_local.push(ty.upper.iter().sum());
                    local.push(Relation::Le);
                }
            }
        }
        let base = CombNFoldInstance {
            bimatrix: Bimatrix::new(self.d.clone())?,
            n: total as usize,
            b0: self.b0.clone(),
            b_local,
            lower,
            upper,
            objective: SeparableObjective::new(terms),
        };
        RelationalInstance::new(base, vec![Relation::Eq; self.d.len()], local)
    }
}

/// Builds the configuration program: variables `y^i_c`, rows `D C y = b0'`
/// where `b0'` is `b0` shifted by the lower bounds, and `1ᵀ y^i = n_i`.
/// Only configurations admitted by some type get a column; within a brick,
/// the configurations its type does not admit are pinned to zero.
pub fn encode_huge_nfold(h: &HugeNFoldInstance, caps: &Caps) -> Result<(RelationalInstance, Decoder)> {
    h.validate()?;
    let configs = h.columns(caps)?;
    let width = configs.len();
    let r = h.d.len();
    let rows: Vec<Vec<i64>> =
        h.d.iter().map(|drow| configs.iter().map(|c| drow.iter().zip(c).map(|(a, b)| a * b).sum()).collect()).collect();
    let mut b0: Vec<i128> = h.b0.iter().map(|&b| b as i128).collect();
    for ty in &h.types {
        for (k, drow) in h.d.iter().enumerate() {
            let shift: i128 = drow.iter().zip(&ty.lower).map(|(&a, &l)| a as i128 * l as i128).sum();
            b0[k] -= shift * ty.count as i128;
        }
    }
    let b0 = b0
        .into_iter()
        .map(|v| i64::try_from(v).map_err(|_| NFoldError::Overflow("shifted right-hand side")))
        .collect::<Result<Vec<_>>>()?;
    let n = h.types.len();
    let lower = vec![0; n * width];
    let mut upper = vec![0; n * width];
    let mut terms = vec![Term::Zero; n * width];
    for (i, ty) in h.types.iter().enumerate() {
        for (k, c) in configs.iter().enumerate() {
            if h.admits(ty, c) {
                let x: Vec<i64> = c.iter().zip(&ty.lower).map(|(c, l)| c + l).collect();
                upper[i * width + k] = ty.count;
                terms[i * width + k] = Term::Linear(h.brick_cost(ty, &x)?);
            }
        }
    }
    let base = CombNFoldInstance {
        bimatrix: Bimatrix::new(rows)?,
        n,
        b0,
        b_local: h.types.iter().map(|ty| ty.count).collect(),
        lower,
        upper,
        objective: SeparableObjective::new(terms),
    };
    let rel = RelationalInstance::new(base, vec![Relation::Eq; r], vec![Relation::Eq; n])?;
    debug_check_shape(&rel);
    Ok((rel, Decoder::Huge(HugeDecoder { instance: h.clone(), width })))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccinctBrick {
    pub brick_type: usize,
    /// brick values in the original (unshifted) coordinates
    pub values: Vec<i64>,
    pub multiplicity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HugeAnswer {
    pub objective: i64,
    pub succinct: Vec<SuccinctBrick>,
}

impl HugeAnswer {
    /// Writes every brick out, grouped by type in input order. Fails if the
    /// expansion would exceed `max_len` coordinates.
    pub fn expand(&self, max_len: usize) -> Result<Vec<i64>> {
        let mut by_type = self.succinct.clone();
        by_type.sort_by_key(|b| b.brick_type);
        let len: u128 = by_type.iter().map(|b| b.multiplicity as u128 * b.values.len() as u128).sum();
        if len > max_len as u128 {
            return Err(NFoldError::EncoderCap(format!("expansion of {len} coordinates exceeds {max_len}")));
        }
        let mut out = Vec::with_capacity(len as usize);
        for b in &by_type {
            for _ in 0..b.multiplicity {
                out.extend_from_slice(&b.values);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HugeDecoder {
    pub instance: HugeNFoldInstance,
    pub width: usize,
}

impl HugeDecoder {
    pub fn decode(&self, p: &[i64]) -> Result<HugeAnswer> {
        let h = &self.instance;
        if p.len() != h.types.len() * self.width {
            return Err(NFoldError::Dimension("point does not match the encoded instance".into()));
        }
        let configs = h.columns(&Caps { max_brick_width: usize::MAX, max_schedule: 0 })?;
        if configs.len() != self.width {
            return Err(NFoldError::Dimension("decoder width does not match the instance".into()));
        }
        let mut global = vec![0i128; h.d.len()];
        let mut objective = 0i64;
        let mut succinct = Vec::new();
        for (i, ty) in h.types.iter().enumerate() {
            let ys = &p[i * self.width..(i + 1) * self.width];
            if ys.iter().any(|&y| y < 0) || ys.iter().sum::<i64>() != ty.count {
                return Err(NFoldError::InfeasiblePoint(format!("type {i}: configuration counts do not sum to {}", ty.count)));
            }
            for (c, &y) in configs.iter().zip(ys).filter(|(_, &y)| y > 0) {
                if !h.admits(ty, c) {
                    return Err(NFoldError::InfeasiblePoint(format!("type {i} uses a configuration it does not admit")));
                }
                let x: Vec<i64> = c.iter().zip(&ty.lower).map(|(c, l)| c + l).collect();
                objective = crate::error::add(objective, crate::error::mul(h.brick_cost(ty, &x)?, y)?)?;
                for (g, drow) in global.iter_mut().zip(&h.d) {
                    *g += drow.iter().zip(&x).map(|(&a, &v)| a as i128 * v as i128).sum::<i128>() * y as i128;
                }
                succinct.push(SuccinctBrick { brick_type: i, values: x, multiplicity: y });
            }
        }
        if global.iter().zip(&h.b0).any(|(&g, &b)| g != b as i128) {
            return Err(NFoldError::InfeasiblePoint("global rows are violated".into()));
        }
        Ok(HugeAnswer { objective, succinct })
    }
}

//! Swap bribery: change voters' preference orders at minimum total swap
//! cost so that a preferred candidate wins.
//!
//! Voters with the same order and the same swap costs form a type. Each
//! type becomes a brick with one variable per permutation of the
//! candidates, counting the voters of that type moved to that order.

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{debug_check_shape, Caps, Decoder};
use crate::error::{NFoldError, Result};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::SeparableObjective;
use crate::solver::SolverConfig;
use crate::transform::{Relation, RelationalInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterType {
    /// candidate indices, most preferred first
    pub order: Vec<usize>,
    /// `swap_costs[a][b]`: cost of swapping `a` and `b` when `a` is ranked
    /// above `b` in `order`
    pub swap_costs: Vec<Vec<i64>>,
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    /// points per rank, best rank first
    Scoring { scores: Vec<i64> },
    /// head-to-head wins score 1, ties score `alpha_num / alpha_den`
    Copeland { alpha_num: i64, alpha_den: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BriberyInstance {
    pub candidates: Vec<String>,
    pub preferred: usize,
    pub voters: Vec<VoterType>,
    pub rule: Rule,
}

impl BriberyInstance {
    pub fn validate(&self) -> Result<()> {
        let m = self.candidates.len();
        let mut v = Vec::new();
        if m == 0 || self.preferred >= m {
            v.push("the preferred candidate must be one of at least one candidate".to_string());
        }
        if self.voters.is_empty() {
            v.push("at least one voter type is required".to_string());
        }
        for (i, ty) in self.voters.iter().enumerate() {
            if ty.order.len() != m || !ty.order.iter().all_unique() || ty.order.iter().any(|&c| c >= m) {
                v.push(format!("voter type {i}: order is not a permutation of the candidates"));
            }
            if ty.swap_costs.len() != m || ty.swap_costs.iter().any(|r| r.len() != m || r.iter().any(|&c| c < 0)) {
                v.push(format!("voter type {i}: swap costs must be a non-negative {m} x {m} matrix"));
            }
            if ty.count < 1 {
                v.push(format!("voter type {i}: multiplicity must be positive"));
            }
        }
        match &self.rule {
            Rule::Scoring { scores } => {
                if scores.len() != m {
                    v.push("one score per rank is required".to_string());
                } else if scores.windows(2).any(|w| w[0] < w[1])
                    || scores.iter().any(|&s| s < 0)
                    || scores.first().is_some_and(|&s| s > m as i64)
                {
                    v.push("scoring vector must be non-increasing, non-negative, with top score at most |C|".to_string());
                }
            }
            Rule::Copeland { alpha_num, alpha_den } => {
                if *alpha_den <= 0 || *alpha_num < 0 || alpha_num > alpha_den {
                    v.push("Copeland alpha must lie in [0, 1]".to_string());
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(NFoldError::Invalid(v))
        }
    }
}

/// Cost of turning `source` into `target`: every pair whose relative order
/// differs is swapped once, at the cost given for the pair as ordered in
/// `source`.
pub fn order_cost(source: &[usize], target: &[usize], costs: &[Vec<i64>]) -> i64 {
    let mut rank = vec![0usize; target.len()];
    for (p, &c) in target.iter().enumerate() {
        rank[c] = p;
    }
    let mut total = 0;
    for (i, &a) in source.iter().enumerate() {
        for &b in &source[i + 1..] {
            if rank[b] < rank[a] {
                total += costs[a][b];
            }
        }
    }
    total
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    (0..m).permutations(m).collect()
}

fn prefers(order: &[usize], a: usize, b: usize) -> bool {
    order.iter().position(|&c| c == a) < order.iter().position(|&c| c == b)
}

/// Shared part of both encodings: `(D rows, relations, b0)` are supplied
/// by the rule; bricks, bounds and costs come from the voter types.
fn build(
    br: &BriberyInstance,
    orders: &[Vec<usize>],
    rows: Vec<Vec<i64>>,
    global: Vec<Relation>,
) -> Result<(RelationalInstance, Decoder)> {
    let t = orders.len();
    let n = br.voters.len();
    let (rows, global) = if rows.is_empty() {
        // nothing to enforce: keep one trivial row
        (vec![vec![0; t]], vec![Relation::Eq])
    } else {
        (rows, global)
    };
    let r = rows.len();
    let mut coeffs = Vec::with_capacity(n * t);
    let mut upper = Vec::with_capacity(n * t);
    for ty in &br.voters {
        for target in orders {
            coeffs.push(order_cost(&ty.order, target, &ty.swap_costs));
            upper.push(ty.count);
        }
    }
    let base = CombNFoldInstance {
        bimatrix: Bimatrix::new(rows)?,
        n,
        b0: vec![0; r],
        b_local: br.voters.iter().map(|v| v.count).collect(),
        lower: vec![0; n * t],
        upper,
        objective: SeparableObjective::linear(&coeffs),
    };
    let rel = RelationalInstance::new(base, global, vec![Relation::Eq; n])?;
    debug_check_shape(&rel);
    Ok((rel, Decoder::Bribery(BriberyDecoder { instance: br.clone(), t })))
}

fn check_size(br: &BriberyInstance, caps: &Caps) -> Result<Vec<Vec<usize>>> {
    br.validate()?;
    let m = br.candidates.len();
    let width = (1..=m as u128).try_fold(1u128, |a, b| a.checked_mul(b)).unwrap_or(u128::MAX);
    caps.check_width(width, "bribery candidates")?;
    Ok(permutations(m))
}

/// One `≤ 0` row per rival `c`: `Σ (s_j(c) − s_j(c*)) x_j ≤ 0`, that is,
/// the preferred candidate scores at least as much as every rival.
pub fn encode_bribery_scoring(br: &BriberyInstance, caps: &Caps) -> Result<(RelationalInstance, Decoder)> {
    let orders = check_size(br, caps)?;
    let Rule::Scoring { scores } = &br.rule else {
        return Err(NFoldError::Invalid(vec!["scoring encoding needs a scoring rule".into()]));
    };
    let m = br.candidates.len();
    let points = |order: &[usize], c: usize| scores[order.iter().position(|&x| x == c).unwrap()];
    let rows: Vec<Vec<i64>> = (0..m)
        .filter(|&c| c != br.preferred)
        .map(|c| orders.iter().map(|o| points(o, c) - points(o, br.preferred)).collect())
        .collect();
    let rels = vec![Relation::Le; rows.len()];
    build(br, &orders, rows, rels)
}

/// Result of a head-to-head contest between `a` and `b` (`a < b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    FirstWins,
    Tie,
    SecondWins,
}

/// A rule that only looks at head-to-head outcomes.
pub trait ScenarioRule {
    /// `outcomes` lists every pair `(a, b)` with `a < b`, in lexicographic order.
    fn preferred_wins(&self, candidates: usize, preferred: usize, outcomes: &[(usize, usize, Outcome)]) -> bool;
}

/// Copeland with tie value `alpha`; the preferred candidate must have the
/// highest score, possibly shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Copeland {
    pub alpha: Ratio<i64>,
}

impl ScenarioRule for Copeland {
    fn preferred_wins(&self, candidates: usize, preferred: usize, outcomes: &[(usize, usize, Outcome)]) -> bool {
        let mut score = vec![Ratio::from_integer(0); candidates];
        for &(a, b, o) in outcomes {
            match o {
                Outcome::FirstWins => score[a] += 1,
                Outcome::SecondWins => score[b] += 1,
                Outcome::Tie => {
                    score[a] += self.alpha;
                    score[b] += self.alpha;
                }
            }
        }
        score.iter().all(|s| *s <= score[preferred])
    }
}

fn pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).tuple_combinations().collect()
}

/// Every outcome assignment over the candidate pairs, in lexicographic order.
pub fn scenarios(m: usize) -> Vec<Vec<(usize, usize, Outcome)>> {
    const ALL: [Outcome; 3] = [Outcome::FirstWins, Outcome::Tie, Outcome::SecondWins];
    let pairs = pairs(m);
    if pairs.is_empty() {
        return vec![Vec::new()];
    }
    pairs
        .iter()
        .map(|_| ALL.iter().copied())
        .multi_cartesian_product()
        .map(|outs| pairs.iter().zip(outs).map(|(&(a, b), o)| (a, b, o)).collect())
        .collect()
}

/// One instance per scenario in which the preferred candidate wins under
/// `rule`. For each pair `(a, b)` the row is `Σ (α_j(a,b) − α_j(b,a)) x_j`,
/// compared with 0 by `>`, `=` or `<` according to the scenario.
pub fn encode_bribery_c1(
    br: &BriberyInstance,
    rule: &dyn ScenarioRule,
    caps: &Caps,
) -> Result<Vec<(RelationalInstance, Decoder)>> {
    let orders = check_size(br, caps)?;
    let m = br.candidates.len();
    let count = 3u128.checked_pow(pairs(m).len() as u32).unwrap_or(u128::MAX);
    caps.check_schedule(count, "C1 scenarios")?;
    let mut out = Vec::new();
    for scenario in scenarios(m) {
        if !rule.preferred_wins(m, br.preferred, &scenario) {
            continue;
        }
        let rows = scenario
            .iter()
            .map(|&(a, b, _)| orders.iter().map(|o| if prefers(o, a, b) { 1 } else { -1 }).collect())
            .collect();
        let rels = scenario
            .iter()
            .map(|&(_, _, o)| match o {
                Outcome::FirstWins => Relation::Gt,
                Outcome::Tie => Relation::Eq,
                Outcome::SecondWins => Relation::Lt,
            })
            .collect();
        out.push(build(br, &orders, rows, rels)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BriberyMove {
    pub voter_type: usize,
    pub order: Vec<String>,
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BriberyAnswer {
    pub cost: i64,
    /// voters moved away from their original order
    pub moves: Vec<BriberyMove>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BriberyDecoder {
    pub instance: BriberyInstance,
    pub t: usize,
}

/// Does the preferred candidate win when `counts[i][j]` voters of type `i`
/// hold order `j`?
pub fn preferred_wins(br: &BriberyInstance, orders: &[Vec<usize>], counts: &[Vec<i64>]) -> bool {
    let m = br.candidates.len();
    let profile = || counts.iter().flat_map(|row| row.iter().zip(orders)).filter(|(&c, _)| c > 0);
    match &br.rule {
        Rule::Scoring { scores } => {
            let mut pts = vec![0i64; m];
            for (&c, order) in profile() {
                for (rank, &cand) in order.iter().enumerate() {
                    pts[cand] += c * scores[rank];
                }
            }
            pts.iter().all(|&p| p <= pts[br.preferred])
        }
        Rule::Copeland { alpha_num, alpha_den } => {
            let outcomes: Vec<(usize, usize, Outcome)> = pairs(m)
                .into_iter()
                .map(|(a, b)| {
                    let ab: i64 = profile().filter(|(_, o)| prefers(o, a, b)).map(|(&c, _)| c).sum();
                    let ba: i64 = profile().filter(|(_, o)| prefers(o, b, a)).map(|(&c, _)| c).sum();
                    let o = match ab.cmp(&ba) {
                        std::cmp::Ordering::Greater => Outcome::FirstWins,
                        std::cmp::Ordering::Equal => Outcome::Tie,
                        std::cmp::Ordering::Less => Outcome::SecondWins,
                    };
                    (a, b, o)
                })
                .collect();
            Copeland { alpha: Ratio::new(*alpha_num, *alpha_den) }.preferred_wins(m, br.preferred, &outcomes)
        }
    }
}

impl BriberyDecoder {
    pub fn decode(&self, p: &[i64]) -> Result<BriberyAnswer> {
        let br = &self.instance;
        if p.len() != br.voters.len() * self.t {
            return Err(NFoldError::Dimension("point does not match the encoded instance".into()));
        }
        let orders = permutations(br.candidates.len());
        let counts: Vec<Vec<i64>> = p.chunks(self.t).map(<[i64]>::to_vec).collect();
        let mut cost = 0;
        let mut moves = Vec::new();
        for (i, (ty, row)) in br.voters.iter().zip(&counts).enumerate() {
            if row.iter().any(|&c| c < 0) || row.iter().sum::<i64>() != ty.count {
                return Err(NFoldError::InfeasiblePoint(format!("voter type {i} counts do not add up")));
            }
            for (order, &c) in orders.iter().zip(row) {
                if c > 0 && *order != ty.order {
                    cost += c * order_cost(&ty.order, order, &ty.swap_costs);
                    moves.push(BriberyMove {
                        voter_type: i,
                        order: order.iter().map(|&x| br.candidates[x].clone()).collect(),
                        count: c,
                    });
                }
            }
        }
        if !preferred_wins(br, &orders, &counts) {
            return Err(NFoldError::InfeasiblePoint("the preferred candidate does not win".into()));
        }
        Ok(BriberyAnswer { cost, moves })
    }
}

/// Minimum bribery cost under the instance's rule, `None` if no bribery
/// makes the preferred candidate win.
pub fn solve_bribery(br: &BriberyInstance, cfg: &SolverConfig, caps: &Caps) -> Result<Option<BriberyAnswer>> {
    let members = match &br.rule {
        Rule::Scoring { .. } => vec![encode_bribery_scoring(br, caps)?],
        Rule::Copeland { alpha_num, alpha_den } => {
            br.validate()?;
            encode_bribery_c1(br, &Copeland { alpha: Ratio::new(*alpha_num, *alpha_den) }, caps)?
        }
    };
    Ok(super::solve_schedule(&members, cfg)?.map(|(_, a)| match a {
        super::Answer::Bribery(b) => b,
        _ => unreachable!("bribery decoders yield bribery answers"),
    }))
}

//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nfold_core::encoders::{BriberyInstance, HugeNFoldInstance, HugeType, Rule, SetType, StringsInput, VoterType, WsmInstance};
use nfold_core::format::{Int, TermSpec};
use nfold_core::oracle::random_relations;
use nfold_core::{
    Bimatrix, CombNFoldInstance, NFoldError, PreNFoldInstance, Relation, RelationalInstance, RelaxationOracle,
    SeparableObjective, Term,
};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

/// Linear-programming relaxation solved with a floating-point simplex; the
/// vertex is converted back to small rationals.
pub struct LpRelaxation;

impl RelaxationOracle for LpRelaxation {
    fn relaxed_optimum(&self, inst: &CombNFoldInstance) -> nfold_core::Result<Option<Vec<Ratio<i64>>>> {
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let mut vars = Vec::with_capacity(inst.dim());
        for k in 0..inst.dim() {
            let c = match &inst.objective.terms[k] {
                Term::Zero => 0,
                Term::Linear(c) => *c,
                _ => return Err(NFoldError::Invalid(vec!["LP relaxation needs a linear objective".into()])),
            };
            vars.push(lp.add_var(c as f64, (inst.lower[k] as f64, inst.upper[k] as f64)));
        }
        let t = inst.t();
        let mut rows: Vec<(Vec<(minilp::Variable, f64)>, f64)> = Vec::new();
        for row in 0..inst.r() {
            let expr = (0..inst.dim())
                .filter(|&k| inst.bimatrix.get(row, k % t) != 0)
                .map(|k| (vars[k], inst.bimatrix.get(row, k % t) as f64))
                .collect();
            rows.push((expr, inst.b0[row] as f64));
        }
        for i in 0..inst.n {
            rows.push(((i * t..(i + 1) * t).map(|k| (vars[k], 1.0)).collect(), inst.b_local[i] as f64));
        }
        for (expr, rhs) in rows {
            if expr.is_empty() {
                if rhs != 0.0 {
                    return Ok(None);
                }
                continue;
            }
            lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, rhs);
        }
        match lp.solve() {
            Ok(sol) => Ok(Some(
                vars.iter()
                    .map(|&v| Ratio::approximate_float(sol[v]).expect("finite LP value"))
                    .collect(),
            )),
            Err(minilp::Error::Infeasible) => Ok(None),
            Err(minilp::Error::Unbounded) => unreachable!("the box is bounded"),
        }
    }
}

/// Random relational instance around a corpus instance.
pub fn random_relational(rng: &mut impl Rng, base: CombNFoldInstance, global_free: bool, local_free: bool) -> RelationalInstance {
    let (r, n) = (base.r(), base.n);
    let global = if global_free { random_relations(rng, r, true) } else { vec![Relation::Eq; r] };
    let local = if local_free { random_relations(rng, n, false) } else { vec![Relation::Eq; n] };
    RelationalInstance::new(base, global, local).unwrap()
}

/// Random program with blocks of unequal width.
pub fn random_pre_nfold(rng: &mut impl Rng) -> PreNFoldInstance {
    let blocks_n = rng.gen_range(1..=3);
    let r = rng.gen_range(1..=2);
    let widths: Vec<usize> = (0..blocks_n).map(|_| rng.gen_range(1..=3)).collect();
    let blocks: Vec<Vec<Vec<i64>>> =
        widths.iter().map(|&w| (0..r).map(|_| (0..w).map(|_| rng.gen_range(-1..=1)).collect()).collect()).collect();
    let dim: usize = widths.iter().sum();
    let lower: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=0)).collect();
    let upper: Vec<i64> = lower.iter().map(|&l| l + rng.gen_range(0..=2)).collect();
    let witness: Vec<i64> = lower.iter().zip(&upper).map(|(&l, &u)| rng.gen_range(l..=u)).collect();
    let mut b0 = vec![0i64; r];
    let mut b_local = Vec::new();
    let mut off = 0;
    for (tau, &w) in widths.iter().enumerate() {
        for (row, b) in b0.iter_mut().enumerate() {
            *b += (0..w).map(|j| blocks[tau][row][j] * witness[off + j]).sum::<i64>();
        }
        b_local.push(witness[off..off + w].iter().sum());
        off += w;
    }
    if rng.gen_bool(0.2) {
        b0[0] += 1;
    }
    let global = random_relations(rng, r, true);
    let local = random_relations(rng, blocks_n, false);
    PreNFoldInstance {
        widths,
        blocks,
        b0,
        b_local,
        lower,
        upper,
        objective: SeparableObjective::linear(&(0..dim).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>()),
        global,
        local,
    }
}

/// Small instance with a wide box, so that box tightening actually cuts.
pub fn wide_box_instance(rng: &mut impl Rng) -> CombNFoldInstance {
    let (n, t) = if rng.gen_bool(0.5) { (1, 2) } else { (2, 1) };
    let d = vec![(0..t).map(|_| rng.gen_range(1..=2)).collect::<Vec<i64>>()];
    let lower: Vec<i64> = (0..n * t).map(|_| -rng.gen_range(60..=90)).collect();
    let upper: Vec<i64> = (0..n * t).map(|_| rng.gen_range(60..=90)).collect();
    let witness: Vec<i64> = lower.iter().zip(&upper).map(|(&l, &u)| rng.gen_range(l..=u)).collect();
    let mut inst = CombNFoldInstance {
        bimatrix: Bimatrix::new(d).unwrap(),
        n,
        b0: vec![0],
        b_local: vec![0; n],
        lower,
        upper,
        objective: SeparableObjective::linear(&(0..n * t).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>()),
    };
    inst.b0 = inst.global_lhs(&witness).unwrap();
    inst.b_local = inst.brick_sums(&witness).unwrap();
    inst
}

pub fn random_strings(rng: &mut impl Rng, k: usize, sigma: usize, len: usize, wildcards: bool) -> StringsInput {
    let alphabet: String = "abc".chars().take(sigma).collect();
    let lines: Vec<String> = (0..k)
        .map(|_| {
            (0..len)
                .map(|_| {
                    if wildcards && rng.gen_bool(0.2) {
                        '*'
                    } else {
                        alphabet.as_bytes()[rng.gen_range(0..sigma)] as char
                    }
                })
                .collect()
        })
        .collect();
    StringsInput::parse(&lines, Some(&alphabet)).unwrap()
}

/// The two-element toy family with demand vector `demands`.
pub fn wsm_toy(demands: Vec<i64>) -> WsmInstance {
    WsmInstance {
        universe: 2,
        demands,
        types: vec![
            SetType { members: vec![0, 1], weights: vec![3] },
            SetType { members: vec![0], weights: vec![1] },
            SetType { members: vec![1], weights: vec![1] },
        ],
    }
}

pub fn random_wsm(rng: &mut impl Rng) -> WsmInstance {
    let universe = rng.gen_range(1..=3);
    let mut masks: Vec<usize> = (1..1 << universe).collect();
    masks.shuffle(rng);
    let mut budget = rng.gen_range(1..=6);
    let mut types = Vec::new();
    for m in masks {
        if budget == 0 {
            break;
        }
        let c = rng.gen_range(1..=budget.min(3));
        budget -= c;
        types.push(SetType {
            members: (0..universe).filter(|e| m >> e & 1 == 1).collect(),
            weights: (0..c).map(|_| rng.gen_range(0..=5)).collect(),
        });
    }
    WsmInstance { universe, demands: (0..universe).map(|_| rng.gen_range(0..=3)).collect(), types }
}

pub fn two_candidate_fixture(voters: i64, rule: Rule) -> BriberyInstance {
    BriberyInstance {
        candidates: vec!["star".into(), "rival".into()],
        preferred: 0,
        voters: vec![VoterType { order: vec![1, 0], swap_costs: vec![vec![0, 5], vec![5, 0]], count: voters }],
        rule,
    }
}

pub fn random_bribery(rng: &mut impl Rng) -> BriberyInstance {
    let m = rng.gen_range(2..=3);
    let mut left = rng.gen_range(1..=3);
    let mut voters = Vec::new();
    while left > 0 {
        let count = rng.gen_range(1..=left);
        left -= count;
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let swap_costs = (0..m).map(|a| (0..m).map(|b| if a == b { 0 } else { rng.gen_range(0..=4) }).collect()).collect();
        voters.push(VoterType { order, swap_costs, count });
    }
    let rule = match rng.gen_range(0..5) {
        0 => Rule::Scoring { scores: [vec![1], vec![0; m - 1]].concat() },
        1 => Rule::Scoring { scores: (0..m as i64).rev().collect() },
        2 => Rule::Scoring { scores: [vec![1; m - 1], vec![0]].concat() },
        3 => Rule::Copeland { alpha_num: rng.gen_range(0..=2), alpha_den: 2 },
        _ => Rule::Copeland { alpha_num: 1, alpha_den: 1 },
    };
    BriberyInstance {
        candidates: (0..m).map(|c| format!("c{c}")).collect(),
        preferred: rng.gen_range(0..m),
        voters,
        rule,
    }
}

/// High-multiplicity program with `types` brick types of the given counts.
pub fn random_huge(rng: &mut impl Rng, counts: &[i64]) -> HugeNFoldInstance {
    let t = rng.gen_range(1..=2);
    let d = vec![(0..t).map(|_| rng.gen_range(-1..=2)).collect::<Vec<i64>>()];
    let ones = rng.gen_bool(0.5);
    let types: Vec<HugeType> = counts
        .iter()
        .map(|&count| {
            let lower: Vec<i64> = (0..t).map(|_| rng.gen_range(-1..=0)).collect();
            let upper: Vec<i64> = lower.iter().map(|&l| l + rng.gen_range(0..=2)).collect();
            let b_local = if ones {
                vec![rng.gen_range(lower.iter().sum::<i64>()..=upper.iter().sum::<i64>())]
            } else {
                vec![]
            };
            let objective = (0..t)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        TermSpec::Pwl { points: [(-1, 2), (0, 0), (2, 2)].map(|(x, y)| (Int(x), Int(y))).to_vec() }
                    } else {
                        TermSpec::linear(rng.gen_range(-2..=3))
                    }
                })
                .collect();
            HugeType { b_local, lower, upper, objective, count }
        })
        .collect();
    // right-hand side from a random expanded point
    let mut b0 = 0i64;
    for ty in &types {
        for _ in 0..ty.count.min(50) {
            let x: Vec<i64> = ty.lower.iter().zip(&ty.upper).map(|(&l, &u)| rng.gen_range(l..=u)).collect();
            b0 += d[0].iter().zip(&x).map(|(a, b)| a * b).sum::<i64>();
        }
    }
    HugeNFoldInstance { d, a: ones.then(|| vec![vec![1; t]]), b0: vec![b0], types }
}

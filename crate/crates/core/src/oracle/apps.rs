//! Brute-force answers to the application problems, computed directly from
//! their definitions without going through any encoding.

use itertools::Itertools;

use super::{check_cap, for_each_point};
use crate::encoders::{BriberyInstance, HugeNFoldInstance, MismatchReading, Rule, StringProblem, StringsInput, WsmInstance};
use crate::error::{NFoldError, Result};
use crate::format::objective_from_specs;

fn hamming(s: &[Option<usize>], y: &[i64]) -> i64 {
    s.iter().zip(y).filter(|(a, &b)| matches!(a, Some(a) if *a as i64 != b)).count() as i64
}

/// Calls `visit` with every string of the given length over the input
/// alphabet, as symbol indices.
fn all_strings(input: &StringsInput, len: usize, cap: u128, mut visit: impl FnMut(&[i64])) -> Result<()> {
    let lower = vec![0; len];
    let upper = vec![input.alphabet.len() as i64 - 1; len];
    check_cap(&lower, &upper, cap)?;
    for_each_point(&lower, &upper, |y| {
        visit(y);
        true
    });
    Ok(())
}

/// Optimal value of a closest-string family problem by search over `Σ^L`:
/// `Some(total distance)` for optimal consensus, `Some(0)` for the other
/// (pure feasibility) problems, `None` if infeasible.
pub fn strings_brute_force(problem: &StringProblem, input: &StringsInput, cap: u128) -> Result<Option<i64>> {
    let k = input.k();
    let len = input.length();
    let l = len as i64;
    if let StringProblem::Mismatch { d, reading } = problem {
        return Ok(mismatch_brute_force(input, *d, *reading, cap)?.map(|_| 0));
    }
    let mut best: Option<i64> = None;
    let mut cover_masks = Vec::new();
    all_strings(input, len, cap, |y| {
        let dist: Vec<i64> = input.strings.iter().map(|s| hamming(s, y)).collect();
        let value = match problem {
            StringProblem::Closest { d } | StringProblem::Wildcards { d } => dist.iter().all(|x| x <= d).then_some(0),
            StringProblem::Farthest { d } => dist.iter().all(|x| x >= d).then_some(0),
            StringProblem::Neighbor { bounds } => dist.iter().zip(bounds).all(|(x, b)| x <= b).then_some(0),
            StringProblem::Dss { bad, d1, d2 } => {
                (dist[..*bad].iter().all(|x| x <= d1) && dist[*bad..].iter().all(|&x| x >= l - d2)).then_some(0)
            }
            StringProblem::OptimalConsensus { d } => dist.iter().all(|x| x <= d).then(|| dist.iter().sum()),
            StringProblem::ClosestToMost { outliers, d } => {
                (dist.iter().filter(|&x| x > d).count() <= *outliers).then_some(0)
            }
            StringProblem::Hrc { d, .. } => {
                cover_masks.push(dist.iter().enumerate().filter(|(_, x)| *x <= d).fold(0u64, |m, (i, _)| m | 1 << i));
                None
            }
            StringProblem::Mismatch { .. } => unreachable!(),
        };
        if let Some(v) = value {
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    })?;
    if let StringProblem::Hrc { clusters, .. } = problem {
        let full = (1u64 << k) - 1;
        let masks: Vec<u64> = cover_masks.into_iter().unique().collect();
        let c = (*clusters).min(k);
        let feasible = k == 0 || (1..=c).any(|size| masks.iter().combinations(size).any(|ms| ms.into_iter().fold(0, |a, m| a | m) == full));
        return Ok(feasible.then_some(0));
    }
    Ok(best)
}

/// The window `(start, length)` a mismatch search settles on: the longest
/// window, then the leftmost, for which some string fits every input
/// string's window under the chosen reading.
pub fn mismatch_brute_force(
    input: &StringsInput,
    d: i64,
    reading: MismatchReading,
    cap: u128,
) -> Result<Option<(usize, usize)>> {
    let len = input.length();
    for w in (1..=len).rev() {
        for p in 0..=len - w {
            let mut found = false;
            all_strings(input, w, cap, |y| {
                found = found
                    || input.strings.iter().all(|s| {
                        let x = hamming(&s[p..p + w], y);
                        match reading {
                            MismatchReading::AtMost => x <= d,
                            MismatchReading::AtLeast => x >= d,
                        }
                    });
            })?;
            if found {
                return Ok(Some((p, w)));
            }
        }
    }
    Ok(None)
}

/// Cheapest cover found by trying every subset of the individual sets.
pub fn wsm_brute_force(w: &WsmInstance, cap: u128) -> Result<Option<i64>> {
    let sets: Vec<(&[usize], i64)> =
        w.types.iter().flat_map(|ty| ty.weights.iter().map(move |&wt| (ty.members.as_slice(), wt))).collect();
    if sets.len() >= 64 || 1u128 << sets.len() > cap {
        return Err(NFoldError::OracleTooLarge { cap });
    }
    let mut best: Option<i64> = None;
    for mask in 0u64..1 << sets.len() {
        let mut covered = vec![0i64; w.universe];
        let mut cost = 0;
        for (i, (members, wt)) in sets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                cost += wt;
                for &e in *members {
                    covered[e] += 1;
                }
            }
        }
        if covered.iter().zip(&w.demands).all(|(c, d)| c >= d) {
            best = Some(best.map_or(cost, |b| b.min(cost)));
        }
    }
    Ok(best)
}

fn position_map(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (p, &c) in order.iter().enumerate() {
        pos[c] = p;
    }
    pos
}

fn wins_election(br: &BriberyInstance, profile: &[&Vec<usize>]) -> bool {
    let m = br.candidates.len();
    let star = br.preferred;
    let positions: Vec<Vec<usize>> = profile.iter().map(|o| position_map(o)).collect();
    match &br.rule {
        Rule::Scoring { scores } => {
            let pts: Vec<i64> = (0..m).map(|c| positions.iter().map(|pos| scores[pos[c]]).sum()).collect();
            (0..m).all(|c| pts[c] <= pts[star])
        }
        Rule::Copeland { alpha_num, alpha_den } => {
            // scores scaled by alpha_den: a win is alpha_den, a tie alpha_num
            let mut score = vec![0i64; m];
            for a in 0..m {
                for b in 0..m {
                    if a == b {
                        continue;
                    }
                    let ab = positions.iter().filter(|pos| pos[a] < pos[b]).count();
                    let ba = positions.len() - ab;
                    score[a] += match ab.cmp(&ba) {
                        std::cmp::Ordering::Greater => *alpha_den,
                        std::cmp::Ordering::Equal => *alpha_num,
                        std::cmp::Ordering::Less => 0,
                    };
                }
            }
            (0..m).all(|c| score[c] <= score[star])
        }
    }
}

/// Cheapest bribery found by giving every single voter every possible
/// order.
pub fn bribery_brute_force(br: &BriberyInstance, cap: u128) -> Result<Option<i64>> {
    br.validate()?;
    let m = br.candidates.len();
    let orders: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    let voters: Vec<usize> = br.voters.iter().enumerate().flat_map(|(i, v)| std::iter::repeat_n(i, v.count as usize)).collect();
    let states = (orders.len() as u128).checked_pow(voters.len() as u32).unwrap_or(u128::MAX);
    if states > cap {
        return Err(NFoldError::OracleTooLarge { cap });
    }
    // cost[type][order]
    let cost: Vec<Vec<i64>> = br
        .voters
        .iter()
        .map(|v| {
            let src = position_map(&v.order);
            orders
                .iter()
                .map(|o| {
                    let dst = position_map(o);
                    let mut c = 0;
                    for a in 0..m {
                        for b in 0..m {
                            if src[a] < src[b] && dst[a] > dst[b] {
                                c += v.swap_costs[a][b];
                            }
                        }
                    }
                    c
                })
                .collect()
        })
        .collect();
    let mut best: Option<i64> = None;
    let last = vec![orders.len() as i64 - 1; voters.len()];
    for_each_point(&vec![0; voters.len()], &last, |choice| {
        let profile: Vec<&Vec<usize>> = choice.iter().map(|&j| &orders[j as usize]).collect();
        if wins_election(br, &profile) {
            let c: i64 = voters.iter().zip(choice).map(|(&ty, &j)| cost[ty][j as usize]).sum();
            best = Some(best.map_or(c, |b| b.min(c)));
        }
        true
    });
    Ok(best)
}

/// Optimum of a high-multiplicity program by enumerating every brick of
/// the written-out program.
pub fn huge_brute_force(h: &HugeNFoldInstance, cap: u128) -> Result<Option<i64>> {
    h.validate()?;
    let bricks: Vec<usize> =
        h.types.iter().enumerate().flat_map(|(i, ty)| std::iter::repeat_n(i, ty.count as usize)).collect();
    let lower: Vec<i64> = bricks.iter().flat_map(|&i| h.types[i].lower.clone()).collect();
    let upper: Vec<i64> = bricks.iter().flat_map(|&i| h.types[i].upper.clone()).collect();
    check_cap(&lower, &upper, cap)?;
    let objectives = h.types.iter().map(|ty| objective_from_specs(&ty.objective)).collect::<Result<Vec<_>>>()?;
    let t = h.t();
    let mut best: Option<i64> = None;
    let mut err = None;
    for_each_point(&lower, &upper, |x| {
        let inner_ok = bricks.iter().zip(x.chunks(t)).all(|(&i, xb)| match &h.a {
            None => true,
            Some(a) => a.iter().zip(&h.types[i].b_local).all(|(row, &b)| row.iter().zip(xb).map(|(p, q)| p * q).sum::<i64>() == b),
        });
        let global_ok = h.d.iter().zip(&h.b0).all(|(row, &b)| {
            x.chunks(t).map(|xb| row.iter().zip(xb).map(|(p, q)| p * q).sum::<i64>()).sum::<i64>() == b
        });
        if inner_ok && global_ok {
            let value: Result<i64> = bricks.iter().zip(x.chunks(t)).map(|(&i, xb)| objectives[i].eval(xb)).sum();
            match value {
                Ok(v) => best = Some(best.map_or(v, |b| b.min(v))),
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            }
        }
        true
    });
    match err {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::{HugeType, SetType, VoterType};
    use crate::format::TermSpec;

    const CAP: u128 = super::super::DEFAULT_CAP;

    fn strings(lines: &[&str], alphabet: &str) -> StringsInput {
        StringsInput::parse(lines, Some(alphabet)).unwrap()
    }

    #[test]
    fn closest_and_farthest() {
        let s = strings(&["aa", "bb"], "ab");
        assert_eq!(strings_brute_force(&StringProblem::Closest { d: 1 }, &s, CAP).unwrap(), Some(0));
        assert_eq!(strings_brute_force(&StringProblem::Closest { d: 0 }, &s, CAP).unwrap(), None);
        assert_eq!(strings_brute_force(&StringProblem::Farthest { d: 1 }, &s, CAP).unwrap(), Some(0));
        assert_eq!(strings_brute_force(&StringProblem::OptimalConsensus { d: 2 }, &s, CAP).unwrap(), Some(2));
        assert_eq!(strings_brute_force(&StringProblem::Hrc { clusters: 2, d: 0 }, &s, CAP).unwrap(), Some(0));
        assert_eq!(strings_brute_force(&StringProblem::Hrc { clusters: 1, d: 0 }, &s, CAP).unwrap(), None);
        assert_eq!(mismatch_brute_force(&s, 0, MismatchReading::AtMost, CAP).unwrap(), None);
        assert_eq!(mismatch_brute_force(&s, 1, MismatchReading::AtMost, CAP).unwrap(), Some((0, 2)));
    }

    #[test]
    fn wsm_subsets() {
        let w = WsmInstance {
            universe: 2,
            demands: vec![1, 1],
            types: vec![
                SetType { members: vec![0, 1], weights: vec![3] },
                SetType { members: vec![0], weights: vec![1] },
                SetType { members: vec![1], weights: vec![1] },
            ],
        };
        assert_eq!(wsm_brute_force(&w, CAP).unwrap(), Some(2));
    }

    #[test]
    fn bribery_states() {
        let br = BriberyInstance {
            candidates: vec!["star".into(), "rival".into()],
            preferred: 0,
            voters: vec![VoterType { order: vec![1, 0], swap_costs: vec![vec![0, 5], vec![5, 0]], count: 1 }],
            rule: Rule::Scoring { scores: vec![1, 0] },
        };
        assert_eq!(bribery_brute_force(&br, CAP).unwrap(), Some(5));
        let copeland = BriberyInstance { rule: Rule::Copeland { alpha_num: 1, alpha_den: 2 }, ..br };
        assert_eq!(bribery_brute_force(&copeland, CAP).unwrap(), Some(5));
    }

    #[test]
    fn huge_expansion() {
        let h = HugeNFoldInstance {
            d: vec![vec![1]],
            a: None,
            b0: vec![2],
            types: vec![HugeType { b_local: vec![], lower: vec![0], upper: vec![1], objective: vec![TermSpec::linear(1)], count: 3 }],
        };
        assert_eq!(huge_brute_force(&h, CAP).unwrap(), Some(2));
        let big = HugeNFoldInstance { types: vec![HugeType { count: 40, ..h.types[0].clone() }], ..h };
        assert!(matches!(huge_brute_force(&big, CAP), Err(NFoldError::OracleTooLarge { .. })));
    }
}

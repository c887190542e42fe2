//! Multi-strings problems: find an output string whose distance to each
//! input string lies in a given range, optionally minimizing the total.
//!
//! The input is viewed column by column. Columns with the same symbol
//! pattern form a column type; each type becomes one brick whose variables
//! count how many of its columns receive each output symbol.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{debug_check_shape, Caps, Decoder};
use crate::error::{NFoldError, Result};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::{SeparableObjective, Term};
use crate::solver::SolverConfig;
use crate::transform::{Relation, RelationalInstance};

pub const WILDCARD: char = '*';

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnType {
    /// one entry per input string, `None` for a wildcard
    pub symbols: Vec<Option<usize>>,
    pub count: i64,
    /// input positions of the columns of this type; empty when only the
    /// count is known
    #[serde(default)]
    pub positions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiStringsInstance {
    pub alphabet: Vec<char>,
    pub columns: Vec<ColumnType>,
    /// per-string distance lower bounds `d_i`
    pub lower: Vec<i64>,
    /// per-string distance upper bounds `D_i`
    pub upper: Vec<i64>,
    /// `distance[a][b]` between output symbol `a` and input symbol `b`
    pub distance: Vec<Vec<i64>>,
    pub minimize_total: bool,
}

pub fn hamming(size: usize) -> Vec<Vec<i64>> {
    (0..size).map(|a| (0..size).map(|b| i64::from(a != b)).collect()).collect()
}

impl MultiStringsInstance {
    pub fn k(&self) -> usize {
        self.lower.len()
    }

    pub fn length(&self) -> i64 {
        self.columns.iter().map(|c| c.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let (k, s) = (self.k(), self.alphabet.len());
        let mut v = Vec::new();
        if k == 0 {
            v.push("at least one input string is required".to_string());
        }
        if s == 0 {
            v.push("alphabet is empty".to_string());
        }
        if self.upper.len() != k {
            v.push("distance bound lengths differ".to_string());
        }
        if self.columns.is_empty() {
            v.push("at least one column is required".to_string());
        }
        for (e, col) in self.columns.iter().enumerate() {
            if col.symbols.len() != k || col.symbols.iter().flatten().any(|&a| a >= s) {
                v.push(format!("column type {e} does not match the strings or alphabet"));
            }
            if col.count < 1 {
                v.push(format!("column type {e} has non-positive multiplicity"));
            }
            if !col.positions.is_empty() && col.positions.len() as i64 != col.count {
                v.push(format!("column type {e} lists {} positions for {} columns", col.positions.len(), col.count));
            }
        }
        if !self.columns.iter().map(|c| &c.symbols).all_unique() {
            v.push("column types are not distinct".to_string());
        }
        if self.distance.len() != s || self.distance.iter().any(|row| row.len() != s || row.iter().any(|&d| d < 0)) {
            v.push("distance table must be a non-negative |Σ| x |Σ| matrix".to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(NFoldError::Invalid(v))
        }
    }

    /// Distances from an output assignment (`counts[e][f]` columns of type
    /// `e` get symbol `f`) to each input string.
    fn distances(&self, counts: &[Vec<i64>]) -> Vec<i64> {
        (0..self.k())
            .map(|i| {
                self.columns
                    .iter()
                    .zip(counts)
                    .map(|(col, row)| match col.symbols[i] {
                        None => 0,
                        Some(e) => row.iter().enumerate().map(|(f, &c)| self.distance[f][e] * c).sum::<i64>(),
                    })
                    .sum()
            })
            .collect()
    }
}

/// Raw input strings over an alphabet, `None` marking a wildcard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringsInput {
    pub alphabet: Vec<char>,
    pub strings: Vec<Vec<Option<usize>>>,
}

impl StringsInput {
    /// Parses equal-length strings. Without an explicit alphabet, the sorted
    /// set of non-wildcard characters is used.
    pub fn parse<S: AsRef<str>>(lines: &[S], alphabet: Option<&str>) -> Result<Self> {
        let alphabet: Vec<char> = match alphabet {
            Some(a) => a.chars().collect(),
            None => lines.iter().flat_map(|l| l.as_ref().chars()).filter(|&c| c != WILDCARD).sorted().dedup().collect(),
        };
        if !alphabet.iter().all_unique() || alphabet.contains(&WILDCARD) {
            return Err(NFoldError::Parse("alphabet must list distinct non-wildcard characters".into()));
        }
        let mut strings = Vec::with_capacity(lines.len());
        for line in lines {
            let s = line
                .as_ref()
                .chars()
                .map(|c| {
                    if c == WILDCARD {
                        Ok(None)
                    } else {
                        alphabet
                            .iter()
                            .position(|&a| a == c)
                            .map(Some)
                            .ok_or_else(|| NFoldError::Parse(format!("character {c:?} is not in the alphabet")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            strings.push(s);
        }
        if !strings.iter().map(Vec::len).all_equal() {
            return Err(NFoldError::Parse("strings must have equal length".into()));
        }
        Ok(Self { alphabet, strings })
    }

    pub fn k(&self) -> usize {
        self.strings.len()
    }

    pub fn length(&self) -> usize {
        self.strings.first().map_or(0, Vec::len)
    }

    /// The sub-input made of some strings restricted to a window.
    pub fn restrict(&self, which: &[usize], start: usize, len: usize) -> Self {
        Self {
            alphabet: self.alphabet.clone(),
            strings: which.iter().map(|&i| self.strings[i][start..start + len].to_vec()).collect(),
        }
    }

    /// Column types in order of first occurrence.
    pub fn columns(&self) -> Vec<ColumnType> {
        let mut out: Vec<ColumnType> = Vec::new();
        for p in 0..self.length() {
            let symbols: Vec<Option<usize>> = self.strings.iter().map(|s| s[p]).collect();
            match out.iter_mut().find(|c| c.symbols == symbols) {
                Some(c) => {
                    c.count += 1;
                    c.positions.push(p);
                }
                None => out.push(ColumnType { symbols, count: 1, positions: vec![p] }),
            }
        }
        out
    }

    pub fn render(&self, y: &[usize]) -> String {
        y.iter().map(|&a| self.alphabet[a]).collect()
    }

    /// Hamming distance with wildcards matching everything.
    pub fn distance_to(&self, i: usize, y: &[usize]) -> i64 {
        self.strings[i].iter().zip(y).filter(|(s, &c)| matches!(s, Some(a) if *a != c)).count() as i64
    }
}

/// A Hamming input rewritten over a small alphabet: in every column the
/// symbols are renumbered by first occurrence, and one extra symbol stands
/// for "anything not in this column".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub columns: Vec<ColumnType>,
    pub alphabet_size: usize,
    /// per input position: normalized symbol → original character
    pub tables: Vec<Vec<char>>,
}

pub fn normalize_hamming(input: &StringsInput) -> Normalized {
    let size = (input.k() + 1).min(input.alphabet.len()).max(1);
    let mut columns: Vec<ColumnType> = Vec::new();
    let mut tables = Vec::with_capacity(input.length());
    for p in 0..input.length() {
        let seen: Vec<usize> = input.strings.iter().filter_map(|s| s[p]).unique().collect();
        let symbols: Vec<Option<usize>> =
            input.strings.iter().map(|s| s[p].map(|a| seen.iter().position(|&b| b == a).unwrap())).collect();
        let table: Vec<char> = seen
            .iter()
            .copied()
            .chain((0..input.alphabet.len()).filter(|a| !seen.contains(a)))
            .take(size)
            .map(|a| input.alphabet[a])
            .collect();
        tables.push(table);
        match columns.iter_mut().find(|c| c.symbols == symbols) {
            Some(c) => {
                c.count += 1;
                c.positions.push(p);
            }
            None => columns.push(ColumnType { symbols, count: 1, positions: vec![p] }),
        }
    }
    Normalized { columns, alphabet_size: size, tables }
}

impl Normalized {
    pub fn instance(&self, lower: Vec<i64>, upper: Vec<i64>, minimize_total: bool) -> MultiStringsInstance {
        MultiStringsInstance {
            alphabet: (0..self.alphabet_size).map(|a| char::from_digit(a as u32, 36).unwrap_or('?')).collect(),
            columns: self.columns.clone(),
            lower,
            upper,
            distance: hamming(self.alphabet_size),
            minimize_total,
        }
    }

    /// Encodes with a decoder that writes output in the original alphabet.
    pub fn encode(
        &self,
        lower: Vec<i64>,
        upper: Vec<i64>,
        minimize_total: bool,
        caps: &Caps,
    ) -> Result<(RelationalInstance, Decoder)> {
        let (rel, mut dec) = encode_multi_strings(&self.instance(lower, upper, minimize_total), caps)?;
        if let Decoder::Strings(s) = &mut dec {
            s.tables = Some(self.tables.clone());
        }
        Ok((rel, dec))
    }
}

/// Index of the solution column type `(e, f)` inside a brick.
fn column_code(symbols: &[Option<usize>], s: usize) -> usize {
    symbols.iter().fold(0usize, |acc, sym| acc * (s + 1) + sym.unwrap_or(s))
}

/// One brick per input column type, one variable per solution column type
/// `(e, f) ∈ (Σ ∪ {⋆})^k × Σ`. Only the `|Σ|` variables compatible with the
/// brick's own type are free, with bounds `[0, n_e]`. Rows `0..k` are the
/// `≥ d_i` distance rows, rows `k..2k` the `≤ D_i` rows.
pub fn encode_multi_strings(ms: &MultiStringsInstance, caps: &Caps) -> Result<(RelationalInstance, Decoder)> {
    ms.validate()?;
    let (k, s) = (ms.k(), ms.alphabet.len());
    let width = (s as u128 + 1)
        .checked_pow(k as u32)
        .and_then(|v| v.checked_mul(s as u128))
        .unwrap_or(u128::MAX);
    let t = caps.check_width(width, "alphabet/k too large for exact encoding")?;
    let n = ms.columns.len();

    // coefficient of solution type α = (e', f) in distance row i
    let mut dist_rows = vec![vec![0i64; t]; k];
    let mut cost = vec![0i64; t];
    for code in 0..t / s {
        // decode e' from its base-(s+1) digits
        let mut rest = code;
        let mut digits = vec![0usize; k];
        for i in (0..k).rev() {
            digits[i] = rest % (s + 1);
            rest /= s + 1;
        }
        for f in 0..s {
            let a = code * s + f;
            for i in 0..k {
                if digits[i] < s {
                    dist_rows[i][a] = ms.distance[f][digits[i]];
                    cost[a] += ms.distance[f][digits[i]];
                }
            }
        }
    }
    let rows: Vec<Vec<i64>> = dist_rows.iter().chain(&dist_rows).cloned().collect();
    let lower = vec![0i64; n * t];
    let mut upper = vec![0i64; n * t];
    let mut terms = Vec::with_capacity(n * t);
    for (e, col) in ms.columns.iter().enumerate() {
        let base = e * t + column_code(&col.symbols, s) * s;
        upper[base..base + s].fill(col.count);
        terms.extend(cost.iter().map(|&c| if ms.minimize_total && c != 0 { Term::Linear(c) } else { Term::Zero }));
    }
    let base = CombNFoldInstance {
        bimatrix: Bimatrix::new(rows)?,
        n,
        b0: ms.lower.iter().chain(&ms.upper).copied().collect(),
        b_local: ms.columns.iter().map(|c| c.count).collect(),
        lower,
        upper,
        objective: SeparableObjective::new(terms),
    };
    let global = std::iter::repeat_n(Relation::Ge, k).chain(std::iter::repeat_n(Relation::Le, k)).collect();
    let rel = RelationalInstance::new(base, global, vec![Relation::Eq; n])?;
    debug_check_shape(&rel);
    let decoder = StringsDecoder { instance: ms.clone(), t, tables: None };
    Ok((rel, Decoder::Strings(decoder)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringsDecoder {
    pub instance: MultiStringsInstance,
    pub t: usize,
    /// per position, normalized symbol → original character
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<Vec<char>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringAnswer {
    pub output: String,
    pub distances: Vec<i64>,
    /// total distance when minimizing, otherwise 0
    pub objective: i64,
    /// `counts[e][f]`: columns of type `e` that receive symbol `f`
    pub counts: Vec<Vec<i64>>,
}

impl StringsDecoder {
    pub fn decode(&self, p: &[i64]) -> Result<StringAnswer> {
        let ms = &self.instance;
        let s = ms.alphabet.len();
        if p.len() != ms.columns.len() * self.t {
            return Err(NFoldError::Dimension("point does not match the encoded instance".into()));
        }
        let mut counts = Vec::with_capacity(ms.columns.len());
        for (e, col) in ms.columns.iter().enumerate() {
            let base = e * self.t + column_code(&col.symbols, s) * s;
            let row = p[base..base + s].to_vec();
            if row.iter().any(|&c| c < 0) || row.iter().sum::<i64>() != col.count {
                return Err(NFoldError::InfeasiblePoint(format!("column type {e} is not fully assigned")));
            }
            counts.push(row);
        }
        let distances = ms.distances(&counts);
        if let Some(i) = (0..ms.k()).find(|&i| distances[i] < ms.lower[i] || distances[i] > ms.upper[i]) {
            return Err(NFoldError::InfeasiblePoint(format!(
                "distance {} to string {i} is outside [{}, {}]",
                distances[i], ms.lower[i], ms.upper[i]
            )));
        }
        let objective = if ms.minimize_total { distances.iter().sum() } else { 0 };

        let len = ms.length() as usize;
        let mut out = vec!['?'; len];
        let mut next_free = 0usize;
        for (col, row) in ms.columns.iter().zip(&counts) {
            let positions: Vec<usize> = if col.positions.is_empty() {
                let v = (next_free..next_free + col.count as usize).collect();
                next_free += col.count as usize;
                v
            } else {
                col.positions.clone()
            };
            let symbols = row.iter().enumerate().flat_map(|(f, &c)| std::iter::repeat_n(f, c as usize));
            for (pos, f) in positions.into_iter().zip(symbols) {
                out[pos] = match &self.tables {
                    Some(tables) => tables[pos][f],
                    None => ms.alphabet[f],
                };
            }
        }
        Ok(StringAnswer { output: out.into_iter().collect(), distances, objective, counts })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchReading {
    /// every window distance at most `d` (solved as closest string)
    AtMost,
    /// every window distance at least `d`
    AtLeast,
}

/// Closest-string family problems over Hamming distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum StringProblem {
    Closest { d: i64 },
    Farthest { d: i64 },
    Neighbor { bounds: Vec<i64> },
    /// the first `bad` input strings are bad, the rest good
    Dss { bad: usize, d1: i64, d2: i64 },
    Wildcards { d: i64 },
    OptimalConsensus { d: i64 },
    ClosestToMost { outliers: usize, d: i64 },
    Hrc { clusters: usize, d: i64 },
    Mismatch { d: i64, reading: MismatchReading },
}

/// One multi-strings instance over a subset of the strings and a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedulePart {
    pub strings: Vec<usize>,
    pub start: usize,
    pub len: usize,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub minimize_total: bool,
}

/// A member is feasible when all of its parts are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleMember {
    pub label: String,
    pub parts: Vec<SchedulePart>,
}

fn whole(input: &StringsInput, lower: Vec<i64>, upper: Vec<i64>, minimize_total: bool) -> Vec<ScheduleMember> {
    vec![ScheduleMember {
        label: "all".into(),
        parts: vec![SchedulePart {
            strings: (0..input.k()).collect(),
            start: 0,
            len: input.length(),
            lower,
            upper,
            minimize_total,
        }],
    }]
}

/// Partitions of `0..k` into at most `c` non-empty groups, as restricted
/// growth strings.
fn partitions(k: usize, c: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, k: usize, c: usize, label: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == k {
            let groups = label.iter().max().map_or(0, |&m| m + 1);
            out.push((0..groups).map(|g| (0..k).filter(|&j| label[j] == g).collect()).collect());
            return;
        }
        let used = label.iter().max().map_or(0, |&m| m + 1);
        for g in 0..=used.min(c.saturating_sub(1)) {
            label.push(g);
            rec(i + 1, k, c, label, out);
            label.pop();
        }
    }
    let mut out = Vec::new();
    if c > 0 || k == 0 {
        rec(0, k, c, &mut Vec::new(), &mut out);
    }
    out
}

/// Parameters of each problem as multi-strings instances. Problems that
/// reduce to several closest-string instances yield a schedule; the answer
/// is the first feasible member.
pub fn string_presets(problem: &StringProblem, input: &StringsInput, caps: &Caps) -> Result<Vec<ScheduleMember>> {
    let (k, len) = (input.k(), input.length() as i64);
    let uniform = |v: i64| vec![v; k];
    Ok(match problem {
        StringProblem::Closest { d } | StringProblem::Wildcards { d } => whole(input, uniform(0), uniform(*d), false),
        StringProblem::Farthest { d } => whole(input, uniform(*d), uniform(len), false),
        StringProblem::OptimalConsensus { d } => whole(input, uniform(0), uniform(*d), true),
        StringProblem::Neighbor { bounds } => {
            if bounds.len() != k {
                return Err(NFoldError::Invalid(vec!["one distance bound per string is required".into()]));
            }
            whole(input, uniform(0), bounds.clone(), false)
        }
        StringProblem::Dss { bad, d1, d2 } => {
            if *bad > k {
                return Err(NFoldError::Invalid(vec!["more bad strings than strings".into()]));
            }
            let lower = (0..k).map(|i| if i < *bad { 0 } else { len - d2 }).collect();
            let upper = (0..k).map(|i| if i < *bad { *d1 } else { len }).collect();
            whole(input, lower, upper, false)
        }
        StringProblem::ClosestToMost { outliers, d } => {
            let drop = (*outliers).min(k);
            let count = (0..k).combinations(drop).count();
            caps.check_schedule(count as u128, "closest to most strings")?;
            (0..k)
                .combinations(drop)
                .map(|out| {
                    let kept: Vec<usize> = (0..k).filter(|i| !out.contains(i)).collect();
                    let parts = if kept.is_empty() {
                        Vec::new()
                    } else {
                        vec![SchedulePart {
                            lower: vec![0; kept.len()],
                            upper: vec![*d; kept.len()],
                            strings: kept,
                            start: 0,
                            len: input.length(),
                            minimize_total: false,
                        }]
                    };
                    ScheduleMember { label: format!("outliers {out:?}"), parts }
                })
                .collect()
        }
        StringProblem::Hrc { clusters, d } => {
            let parts = partitions(k, *clusters);
            caps.check_schedule(parts.len() as u128, "hamming radius clustering")?;
            parts
                .into_iter()
                .map(|groups| ScheduleMember {
                    label: format!("clusters {groups:?}"),
                    parts: groups
                        .into_iter()
                        .map(|g| SchedulePart {
                            lower: vec![0; g.len()],
                            upper: vec![*d; g.len()],
                            strings: g,
                            start: 0,
                            len: input.length(),
                            minimize_total: false,
                        })
                        .collect(),
                })
                .collect()
        }
        StringProblem::Mismatch { d, reading } => {
            let l = input.length();
            let mut members = Vec::new();
            for w in (1..=l).rev() {
                for p in 0..=l - w {
                    let (lower, upper) = match reading {
                        MismatchReading::AtMost => (uniform(0), uniform(*d)),
                        MismatchReading::AtLeast => (uniform(*d), uniform(w as i64)),
                    };
                    members.push(ScheduleMember {
                        label: format!("window start {p} length {w}"),
                        parts: vec![SchedulePart {
                            strings: (0..k).collect(),
                            start: p,
                            len: w,
                            lower,
                            upper,
                            minimize_total: false,
                        }],
                    });
                }
            }
            caps.check_schedule(members.len() as u128, "d-mismatch windows")?;
            members
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartSolution {
    pub strings: Vec<usize>,
    pub start: usize,
    pub output: String,
    pub distances: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringSolution {
    pub member: String,
    pub parts: Vec<PartSolution>,
    pub objective: i64,
}

/// Encodes one schedule part (normalized) for the solver.
pub fn encode_part(input: &StringsInput, part: &SchedulePart, caps: &Caps) -> Result<(RelationalInstance, Decoder)> {
    let sub = input.restrict(&part.strings, part.start, part.len);
    normalize_hamming(&sub).encode(part.lower.clone(), part.upper.clone(), part.minimize_total, caps)
}

/// Solves a problem through its schedule: normalize each part, encode,
/// solve, decode. `None` if no member is feasible.
pub fn solve_string_problem(
    problem: &StringProblem,
    input: &StringsInput,
    cfg: &SolverConfig,
    caps: &Caps,
) -> Result<Option<StringSolution>> {
    if input.k() == 0 || input.length() == 0 {
        return Err(NFoldError::Invalid(vec!["at least one non-empty string is required".into()]));
    }
    'members: for member in string_presets(problem, input, caps)? {
        let mut parts = Vec::with_capacity(member.parts.len());
        let mut objective = 0;
        for part in &member.parts {
            let (rel, dec) = encode_part(input, part, caps)?;
            match super::solve_encoded(&rel, &dec, cfg)? {
                Some(super::Answer::Strings(a)) => {
                    objective += a.objective;
                    parts.push(PartSolution {
                        strings: part.strings.clone(),
                        start: part.start,
                        output: a.output,
                        distances: a.distances,
                    });
                }
                _ => continue 'members,
            }
        }
        return Ok(Some(StringSolution { member: member.label, parts, objective }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::solve_encoded;

    fn input(lines: &[&str], alphabet: &str) -> StringsInput {
        StringsInput::parse(lines, Some(alphabet)).unwrap()
    }

    fn solve_closest(lines: &[&str], alphabet: &str, d: i64) -> Option<StringSolution> {
        solve_string_problem(&StringProblem::Closest { d }, &input(lines, alphabet), &SolverConfig::default(), &Caps::default())
            .unwrap()
    }

    #[test]
    fn identity_consensus() {
        let inp = input(&["aaa"], "a");
        let ms = MultiStringsInstance {
            alphabet: vec!['a'],
            columns: inp.columns(),
            lower: vec![0],
            upper: vec![0],
            distance: hamming(1),
            minimize_total: false,
        };
        let (rel, dec) = encode_multi_strings(&ms, &Caps::default()).unwrap();
        let ans = solve_encoded(&rel, &dec, &SolverConfig::default()).unwrap().unwrap();
        assert_eq!(ans.cost(), 0);
        match ans {
            crate::encoders::Answer::Strings(a) => assert_eq!(a.output, "aaa"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn encoded_shape() {
        let inp = input(&["ab", "ba"], "ab");
        let ms = MultiStringsInstance {
            alphabet: inp.alphabet.clone(),
            columns: inp.columns(),
            lower: vec![0, 0],
            upper: vec![1, 1],
            distance: hamming(2),
            minimize_total: false,
        };
        let (rel, _) = encode_multi_strings(&ms, &Caps::default()).unwrap();
        assert_eq!(rel.base.r(), 4);
        assert_eq!(rel.base.t(), 9 * 2);
        assert_eq!(rel.base.n, 2);
        assert_eq!(rel.global[..2], [Relation::Ge, Relation::Ge]);
    }

    #[test]
    fn closest_string_examples() {
        let sol = solve_closest(&["aa", "bb"], "ab", 1).unwrap();
        let out = &sol.parts[0].output;
        assert!(out == "ab" || out == "ba");
        assert!(solve_closest(&["aa", "bb"], "ab", 0).is_none());
        // one column type (a, b) with multiplicity two
        let sol = solve_closest(&["aa", "bb"], "ab", 1).unwrap();
        assert_eq!(sol.parts[0].distances, vec![1, 1]);
    }

    #[test]
    fn farthest_and_consensus() {
        let far = solve_string_problem(
            &StringProblem::Farthest { d: 2 },
            &input(&["aa"], "ab"),
            &SolverConfig::default(),
            &Caps::default(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(far.parts[0].output, "bb");
        let cons = solve_string_problem(
            &StringProblem::OptimalConsensus { d: 1 },
            &input(&["ab", "ab", "bb"], "ab"),
            &SolverConfig::default(),
            &Caps::default(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(cons.objective, 1);
        assert_eq!(cons.parts[0].output, "ab");
    }

    #[test]
    fn normalization_examples() {
        let n = normalize_hamming(&input(&["x", "x", "y"], "xyz"));
        assert_eq!(n.columns[0].symbols, vec![Some(0), Some(0), Some(1)]);
        assert_eq!(n.alphabet_size, 3);
        assert_eq!(n.tables[0], vec!['x', 'y', 'z']);
        let twice = normalize_hamming(&input(&["ab", "ab"], "ab"));
        // columns (a,a) and (b,b) both become (0,0)
        assert_eq!(twice.columns.len(), 1);
        assert_eq!(twice.columns[0].count, 2);
    }

    #[test]
    fn wildcards_match_everything() {
        let inp = StringsInput::parse(&["a*", "*b"], Some("ab")).unwrap();
        let sol = solve_string_problem(&StringProblem::Wildcards { d: 0 }, &inp, &SolverConfig::default(), &Caps::default())
            .unwrap()
            .unwrap();
        assert_eq!(sol.parts[0].output, "ab");
    }

    #[test]
    fn schedules() {
        assert_eq!(partitions(3, 2).len(), 4);
        assert_eq!(partitions(3, 3).len(), 5);
        let inp = input(&["aaa", "bbb", "aab"], "ab");
        let caps = Caps::default();
        let cfg = SolverConfig::default();
        let hrc = solve_string_problem(&StringProblem::Hrc { clusters: 2, d: 1 }, &inp, &cfg, &caps).unwrap();
        assert!(hrc.is_some());
        let most = solve_string_problem(&StringProblem::ClosestToMost { outliers: 1, d: 1 }, &inp, &cfg, &caps).unwrap();
        assert!(most.is_some());
        let none = solve_string_problem(&StringProblem::ClosestToMost { outliers: 0, d: 1 }, &inp, &cfg, &caps).unwrap();
        assert!(none.is_none());
        let mm = solve_string_problem(
            &StringProblem::Mismatch { d: 0, reading: MismatchReading::AtMost },
            &input(&["abb", "bbb"], "ab"),
            &cfg,
            &caps,
        )
        .unwrap()
        .unwrap();
        assert_eq!(mm.member, "window start 1 length 2");
    }

    #[test]
    fn caps_are_enforced() {
        let inp = input(&["abcdef"; 6], "abcdef");
        let err = solve_closest_err(&inp);
        assert!(matches!(err, NFoldError::EncoderCap(_)));
    }

    fn solve_closest_err(inp: &StringsInput) -> NFoldError {
        let ms = MultiStringsInstance {
            alphabet: inp.alphabet.clone(),
            columns: inp.columns(),
            lower: vec![0; 6],
            upper: vec![1; 6],
            distance: hamming(6),
            minimize_total: false,
        };
        encode_multi_strings(&ms, &Caps::default()).unwrap_err()
    }
}

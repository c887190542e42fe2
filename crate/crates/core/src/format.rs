//! JSON file format for instances and solve reports.
//!
//! Integers whose magnitude is at least 2^53 are written as decimal strings
//! so that readers using double-precision numbers do not lose bits; smaller
//! integers are plain JSON numbers. Either form is accepted on input.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{NFoldError, Result};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::{PiecewiseLinear, SeparableObjective, Term};
use crate::solver::{SolveReport, SolveStatus, TraceEntry};
use crate::transform::{Relation, RelationalInstance};

const EXACT_LIMIT: i64 = 1 << 53;

/// An `i64` with the wide-integer JSON encoding described above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Int(pub i64);

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int(v)
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.unsigned_abs() >= EXACT_LIMIT as u64 {
            s.serialize_str(&self.0.to_string())
        } else {
            s.serialize_i64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Int, E> {
                Ok(Int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Int, E> {
                i64::try_from(v).map(Int).map_err(|_| E::custom("integer out of range"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Int, E> {
                v.trim().parse().map(Int).map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().copied().map(Int).collect()
}

fn plain(v: &[Int]) -> Vec<i64> {
    v.iter().map(|i| i.0).collect()
}

/// A serializable objective term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermSpec {
    Zero,
    Linear { coeff: Int },
    Pwl { points: Vec<(Int, Int)> },
}

impl TermSpec {
    pub fn linear(c: i64) -> Self {
        TermSpec::Linear { coeff: Int(c) }
    }

    pub fn to_term(&self) -> Result<Term> {
        Ok(match self {
            TermSpec::Zero => Term::Zero,
            TermSpec::Linear { coeff } => Term::Linear(coeff.0),
            TermSpec::Pwl { points } => {
                Term::PiecewiseLinear(PiecewiseLinear::new(points.iter().map(|(x, y)| (x.0, y.0)).collect())?)
            }
        })
    }

    pub fn from_term(t: &Term) -> Result<Self> {
        Ok(match t {
            Term::Zero => TermSpec::Zero,
            Term::Linear(c) => TermSpec::Linear { coeff: Int(*c) },
            Term::PiecewiseLinear(p) => TermSpec::Pwl { points: p.points().iter().map(|&(x, y)| (Int(x), Int(y))).collect() },
            Term::Custom(c) => {
                return Err(NFoldError::NotSerializable(format!("custom objective term '{}'", c.name())))
            }
        })
    }
}

pub fn objective_from_specs(specs: &[TermSpec]) -> Result<SeparableObjective> {
    Ok(SeparableObjective::new(specs.iter().map(TermSpec::to_term).collect::<Result<_>>()?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationsSpec {
    pub global: Vec<Relation>,
    pub local: Vec<Relation>,
}

/// On-disk instance layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub r: usize,
    pub t: usize,
    pub n: usize,
    #[serde(rename = "D")]
    pub d: Vec<Vec<Int>>,
    pub b0: Vec<Int>,
    pub b_local: Vec<Int>,
    pub lower: Vec<Int>,
    pub upper: Vec<Int>,
    pub objective: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<RelationsSpec>,
}

impl InstanceFile {
    pub fn from_instance(rel: &RelationalInstance) -> Result<Self> {
        let b = &rel.base;
        Ok(Self {
            r: b.r(),
            t: b.t(),
            n: b.n,
            d: b.bimatrix.rows().iter().map(|row| ints(row)).collect(),
            b0: ints(&b.b0),
            b_local: ints(&b.b_local),
            lower: ints(&b.lower),
            upper: ints(&b.upper),
            objective: b.objective.terms.iter().map(TermSpec::from_term).collect::<Result<_>>()?,
            relations: if rel.is_all_equalities() {
                None
            } else {
                Some(RelationsSpec { global: rel.global.clone(), local: rel.local.clone() })
            },
        })
    }

    pub fn into_instance(self) -> Result<RelationalInstance> {
        if self.d.len() != self.r || self.d.iter().any(|row| row.len() != self.t) {
            return Err(NFoldError::Parse(format!("D must be {} x {}", self.r, self.t)));
        }
        let rows: Vec<Vec<i64>> = if self.r == 0 {
            return Err(NFoldError::Parse("at least one global row is required".into()));
        } else {
            self.d.iter().map(|r| plain(r)).collect()
        };
        let base = CombNFoldInstance {
            bimatrix: Bimatrix::new(rows)?,
            n: self.n,
            b0: plain(&self.b0),
            b_local: plain(&self.b_local),
            lower: plain(&self.lower),
            upper: plain(&self.upper),
            objective: objective_from_specs(&self.objective)?,
        };
        base.validate().into_result()?;
        let (global, local) = match self.relations {
            Some(RelationsSpec { global, local }) => (global, local),
            None => (vec![Relation::Eq; self.r], vec![Relation::Eq; self.n]),
        };
        RelationalInstance::new(base, global, local)
    }
}

pub fn parse_instance(text: &str) -> Result<RelationalInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| NFoldError::Parse(e.to_string()))?;
    file.into_instance()
}

pub fn instance_to_json(rel: &RelationalInstance) -> Result<String> {
    to_pretty(&InstanceFile::from_instance(rel)?)
}

pub fn to_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| NFoldError::NotSerializable(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub iteration: usize,
    pub alpha: Int,
    pub drop: Int,
    pub objective: Int,
}

/// Machine-readable solve report. Field order is fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub objective: Option<Int>,
    pub initial_objective: Option<Int>,
    pub iterations: usize,
    pub point: Option<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_one: Option<Box<ReportDoc>>,
}

pub fn status_name(s: &SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::LocalOptimum => "local_optimum",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Error(_) => "error",
    }
}

impl ReportDoc {
    pub fn from_report(r: &SolveReport, with_trace: bool) -> Self {
        Self {
            status: status_name(&r.status).to_string(),
            message: match &r.status {
                SolveStatus::Error(m) => Some(m.clone()),
                _ => None,
            },
            objective: r.objective_value.map(Int),
            initial_objective: r.initial_objective.map(Int),
            iterations: r.iterations,
            point: r.point.as_deref().map(ints),
            trace: with_trace.then(|| r.trace.iter().map(trace_doc).collect()),
            phase_one: r.phase_one.as_ref().map(|p| Box::new(ReportDoc::from_report(p, with_trace))),
        }
    }
}

fn trace_doc(e: &TraceEntry) -> TraceDoc {
    TraceDoc { iteration: e.iteration, alpha: Int(e.alpha), drop: Int(e.drop), objective: Int(e.objective) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::instance_a;

    #[test]
    fn wide_integers_become_strings() {
        let v = vec![Int(5), Int(-(1 << 53)), Int((1 << 53) - 1), Int(i64::MAX)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, format!("[5,\"-9007199254740992\",9007199254740991,\"{}\"]", i64::MAX));
        let back: Vec<Int> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<Int>("\"12x\"").is_err());
        assert!(serde_json::from_str::<Int>("18446744073709551615").is_err());
    }

    #[test]
    fn instance_round_trip() {
        let rel = RelationalInstance::new(instance_a(&[1, 1, 1, 0]), vec![Relation::Eq], vec![Relation::Eq; 2]).unwrap();
        let text = instance_to_json(&rel).unwrap();
        assert!(!text.contains("relations"));
        assert_eq!(parse_instance(&text).unwrap(), rel);

        let mut base = instance_a(&[1, 1, 1, 0]);
        base.upper[0] = i64::MAX / 4;
        base.objective.terms[1] = Term::PiecewiseLinear(PiecewiseLinear::new(vec![(0, 0), (1, 0), (3, 4)]).unwrap());
        let rel = RelationalInstance::new(base, vec![Relation::Le], vec![Relation::Eq, Relation::Ge]).unwrap();
        let text = instance_to_json(&rel).unwrap();
        assert!(text.contains("\"<=\""));
        assert_eq!(parse_instance(&text).unwrap(), rel);
    }

    #[test]
    fn custom_terms_are_not_serializable() {
        struct Sq;
        impl crate::objective::UnivariateConvex for Sq {
            fn eval(&self, x: i64) -> Result<i64> {
                Ok(x * x)
            }
        }
        let mut base = instance_a(&[1, 1, 1, 0]);
        base.objective.terms[0] = Term::Custom(std::sync::Arc::new(Sq));
        let rel = RelationalInstance::new(base, vec![Relation::Eq], vec![Relation::Eq; 2]).unwrap();
        assert!(matches!(instance_to_json(&rel), Err(NFoldError::NotSerializable(_))));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(matches!(parse_instance("{"), Err(NFoldError::Parse(_))));
        let rel = RelationalInstance::new(instance_a(&[1, 1, 1, 0]), vec![Relation::Eq], vec![Relation::Eq; 2]).unwrap();
        let mut file = InstanceFile::from_instance(&rel).unwrap();
        file.t = 3;
        assert!(file.into_instance().is_err());
    }
}

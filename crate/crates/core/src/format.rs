//! File formats: subset-sum and ILP instance files, the unit-system JSON
//! document with its `stats` block, and the `.eqs` text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::expansion_size;
use crate::ilp::IlpReduction;
use crate::model::{
    IlpInstance, IlpRow, Sign, SubsetSumInstance, Term, ThreeSatInstance, UnitEquation, UnitSystem,
    VarId, VarProvenance, VariableRegistry,
};
use crate::subset_sum::SubsetSumReduction;
use crate::threesat::ThreeSatReduction;

/// `{"set": [1, 2, -3, -4], "target": -2}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetSumFile {
    pub set: Vec<i64>,
    pub target: i64,
}

impl SubsetSumFile {
    pub fn parse(text: &str) -> Result<SubsetSumInstance> {
        let f: SubsetSumFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        SubsetSumInstance::new(f.set, f.target)
    }
}

/// `{"num_vars": 2, "bits": 1, "rows": [{"coeffs": [1, 1], "rhs": 3}]}`;
/// `bits` is optional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlpFile {
    pub num_vars: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    pub rows: Vec<IlpRow>,
}

impl IlpFile {
    pub fn parse(text: &str) -> Result<IlpFile> {
        let f: IlpFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        // validate shape early, independent of the bit width
        IlpInstance::new(f.num_vars, f.rows.clone(), 0)?;
        Ok(f)
    }

    pub fn into_instance(self, bits: u32) -> Result<IlpInstance> {
        IlpInstance::new(self.num_vars, self.rows, bits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarRecord {
    pub id: usize,
    pub name: String,
    pub kind: String,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub sign: i64,
    pub var: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationRecord {
    pub terms: Vec<TermRecord>,
    pub constant: i64,
}

/// One size formula compared against the emitted system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    /// `"=="` or `"<="`.
    pub relation: String,
    pub bound: u64,
    pub actual: u64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn exact(name: impl Into<String>, bound: u64, actual: u64) -> Self {
        BoundCheck {
            name: name.into(),
            relation: "==".into(),
            bound,
            actual,
            pass: actual == bound,
        }
    }

    pub fn at_most(name: impl Into<String>, bound: u64, actual: u64) -> Self {
        BoundCheck {
            name: name.into(),
            relation: "<=".into(),
            bound,
            actual,
            pass: actual <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowStats {
    pub row: usize,
    pub theta: u32,
    pub mu: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub kind: String,
    pub variables: usize,
    pub equations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<RowStats>,
    pub bound_checks: Vec<BoundCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Stats {
    fn new(kind: &str, sys: &UnitSystem) -> Self {
        Stats {
            kind: kind.into(),
            variables: sys.num_vars(),
            equations: sys.num_equations(),
            theta: None,
            mu: None,
            bits: None,
            rows: Vec::new(),
            bound_checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass)
    }

    pub fn summary_line(&self) -> String {
        let mut s = format!("vars={} eqs={}", self.variables, self.equations);
        if let Some(t) = self.theta {
            let _ = write!(s, " theta={t}");
        }
        if let Some(m) = self.mu {
            let _ = write!(s, " mu={m}");
        }
        if let Some(p) = self.bits {
            let _ = write!(s, " bits={p}");
        }
        s
    }
}

pub fn subset_sum_stats(inst: &SubsetSumInstance, red: &SubsetSumReduction) -> Stats {
    let mut st = Stats::new("subset-sum", &red.system);
    let (theta, mu) = (red.params.theta as u64, red.params.mu as u64);
    let n = inst.values().len() as u64 + 1;
    st.theta = Some(red.params.theta);
    st.mu = Some(red.params.mu);
    st.bound_checks = vec![
        BoundCheck::exact(
            "s2_equations == 2*(theta+1)",
            2 * (theta + 1),
            red.s2.equations.len() as u64,
        ),
        BoundCheck::at_most(
            "s2_variables <= 2*theta^2 + N + 2",
            2 * theta * theta + n + 2,
            red.s2_num_vars() as u64,
        ),
        BoundCheck::at_most(
            "s2_max_coefficient <= 2^mu",
            1 << mu,
            red.s2.max_coefficient(),
        ),
        BoundCheck::exact(
            "s2_max_coefficient == 2^mu",
            1 << mu,
            red.s2.max_coefficient(),
        ),
        BoundCheck::exact(
            "s3_added_variables == expansion_size",
            expansion_size(&red.s2.equations).0 as u64,
            (red.system.num_vars() - red.s2_num_vars()) as u64,
        ),
    ];
    st.notes
        .push("the empty subset counts: target 0 is always feasible".into());
    st
}

pub fn threesat_stats(inst: &ThreeSatInstance, red: &ThreeSatReduction) -> Stats {
    let mut st = Stats::new("3sat", &red.system);
    let (v, e) = ThreeSatReduction::expected_size(inst);
    if ThreeSatReduction::size_formula_applies(inst) {
        st.bound_checks = vec![
            BoundCheck::exact(
                "variables == N + 4K",
                v as u64,
                red.system.num_vars() as u64,
            ),
            BoundCheck::exact(
                "equations == 3K",
                e as u64,
                red.system.num_equations() as u64,
            ),
        ];
    } else {
        st.notes.push(
            "N + 4K / 3K size formula not applicable: a clause repeats a variable or is fully negated"
                .into(),
        );
    }
    st.bound_checks.push(BoundCheck::exact(
        "added_variables == expansion_size",
        expansion_size(&red.clause_equations).0 as u64,
        (red.system.num_vars() - inst.num_vars() - 2 * inst.clauses().len()) as u64,
    ));
    st
}

pub fn ilp_stats(inst: &IlpInstance, red: &IlpReduction) -> Stats {
    let mut st = Stats::new("ilp", &red.system);
    st.bits = Some(inst.bit_width());
    for (r, row) in red.rows.iter().enumerate() {
        let theta = row.params.theta as u64;
        st.rows.push(RowStats {
            row: r + 1,
            theta: row.params.theta,
            mu: row.params.mu,
        });
        st.bound_checks.push(BoundCheck::exact(
            format!("row{}_equations == 2*(theta+1)", r + 1),
            2 * (theta + 1),
            row.equations.len() as u64,
        ));
        st.bound_checks.push(BoundCheck::at_most(
            format!("row{}_max_coefficient <= 2^mu", r + 1),
            1 << row.params.mu,
            row.max_coefficient(),
        ));
    }
    st.notes.push(format!(
        "complete only for solutions with every x_i <= {}",
        inst.box_max()
    ));
    st
}

fn var_record(id: VarId, name: &str, p: &VarProvenance) -> VarRecord {
    VarRecord {
        id: id.0,
        name: name.to_string(),
        kind: p.kind_name().to_string(),
        indices: p.indices(),
    }
}

fn eq_record(eq: &UnitEquation) -> EquationRecord {
    EquationRecord {
        terms: eq
            .terms()
            .iter()
            .map(|t| TermRecord {
                sign: t.sign.value(),
                var: t.var.0,
            })
            .collect(),
        constant: eq.constant(),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("records serialize")
}

/// The unit-system document, one variable or equation per line.
pub fn system_to_json(sys: &UnitSystem, stats: Option<&Stats>) -> String {
    let mut out = String::from("{\n  \"variables\": [");
    for (i, (id, e)) in sys.registry().iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        out.push_str(&json(&var_record(id, &e.name, &e.provenance)));
    }
    out.push_str(if sys.num_vars() == 0 {
        "],\n"
    } else {
        "\n  ],\n"
    });
    out.push_str("  \"equations\": [");
    for (i, eq) in sys.equations().iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        out.push_str(&json(&eq_record(eq)));
    }
    out.push_str(if sys.num_equations() == 0 {
        "]"
    } else {
        "\n  ]"
    });
    if let Some(st) = stats {
        let pretty = serde_json::to_string_pretty(st).expect("stats serialize");
        out.push_str(",\n  \"stats\": ");
        out.push_str(&pretty.replace('\n', "\n  "));
    }
    out.push_str("\n}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    variables: Vec<VarRecord>,
    equations: Vec<EquationRecord>,
    #[serde(default)]
    stats: Option<Stats>,
}

pub fn system_from_json(text: &str) -> Result<(UnitSystem, Option<Stats>)> {
    let doc: SystemDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let mut registry = VariableRegistry::new();
    for (pos, v) in doc.variables.iter().enumerate() {
        if v.id != pos {
            return Err(Error::Format(format!(
                "variable ids must be dense: expected {pos}, got {}",
                v.id
            )));
        }
        registry.register(
            VarProvenance::from_parts(&v.kind, &v.indices)?,
            v.name.clone(),
        )?;
    }
    let equations = doc
        .equations
        .iter()
        .map(|e| {
            let terms = e
                .terms
                .iter()
                .map(|t| {
                    let sign = Sign::from_value(t.sign)
                        .ok_or_else(|| Error::Format(format!("term sign {} is not ±1", t.sign)))?;
                    Ok(Term {
                        sign,
                        var: VarId(t.var),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            UnitEquation::new(terms, e.constant)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((UnitSystem::new(registry, equations)?, doc.stats))
}

/// Human-readable rendering: positive terms left, negative terms right.
pub fn render_eqs(sys: &UnitSystem) -> String {
    let reg = sys.registry();
    let side = |sign: Sign, one: bool, eq: &UnitEquation| {
        let mut parts: Vec<&str> = eq
            .terms()
            .iter()
            .filter(|t| t.sign == sign)
            .map(|t| reg.name(t.var))
            .collect();
        if one {
            parts.push("1");
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    };
    let mut out = String::new();
    for eq in sys.equations() {
        let _ = writeln!(
            out,
            "{} = {}",
            side(Sign::Plus, eq.constant() == 1, eq),
            side(Sign::Minus, eq.constant() == -1, eq)
        );
    }
    out
}

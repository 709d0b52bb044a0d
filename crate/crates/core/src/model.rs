//! Source instances, weighted and unit equation systems, the variable
//! registry, and assignments.
//!
//! A [`UnitSystem`] is the single target representation: every equation is
//! `Σ sign·v + constant = 0` with `sign ∈ {-1, +1}` and
//! `constant ∈ {-1, 0, 1}`. Both invariants are enforced by the
//! constructors, so a value of that type is always in target form.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a binary variable inside one system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Why a variable exists. Indices follow the source problem: selectors,
/// clause numbers and boolean variables are 1-based, bit columns 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarProvenance {
    /// `a_i`: selects the i-th element of the same-sign side.
    SelectorA(usize),
    /// `b_i`: selects the i-th element of the opposite-sign side.
    SelectorB(usize),
    /// `t_k` of the decomposed row `row`.
    TargetBit { row: usize, bit: usize },
    /// `d_{i,j}`: carry from column `from` to column `to`, left block.
    CarryLhs { row: usize, from: usize, to: usize },
    /// `e_{i,j}`: carry from column `from` to column `to`, right block.
    CarryRhs { row: usize, from: usize, to: usize },
    /// Fresh variable forced to 1, standing in for one unit of a constant.
    PinnedOne(usize),
    /// The `index`-th copy of `parent` (1-based, counted per parent).
    Copy { parent: VarId, index: usize },
    /// `t_{2k-1}` for clause k.
    ClauseSlackLow(usize),
    /// `t_{2k}` for clause k.
    ClauseSlackHigh(usize),
    /// `b_i` standing for the boolean variable `x_i`.
    BoolVar(usize),
    /// `c_{i,j}`: bit j of the ILP unknown `x_i`.
    IlpBit { var: usize, bit: usize },
}

impl VarProvenance {
    pub fn kind_name(&self) -> &'static str {
        match self {
            VarProvenance::SelectorA(_) => "selector_a",
            VarProvenance::SelectorB(_) => "selector_b",
            VarProvenance::TargetBit { .. } => "target_bit",
            VarProvenance::CarryLhs { .. } => "carry_lhs",
            VarProvenance::CarryRhs { .. } => "carry_rhs",
            VarProvenance::PinnedOne(_) => "pinned_one",
            VarProvenance::Copy { .. } => "copy",
            VarProvenance::ClauseSlackLow(_) => "clause_slack_low",
            VarProvenance::ClauseSlackHigh(_) => "clause_slack_high",
            VarProvenance::BoolVar(_) => "bool_var",
            VarProvenance::IlpBit { .. } => "ilp_bit",
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            VarProvenance::SelectorA(i)
            | VarProvenance::SelectorB(i)
            | VarProvenance::PinnedOne(i)
            | VarProvenance::ClauseSlackLow(i)
            | VarProvenance::ClauseSlackHigh(i)
            | VarProvenance::BoolVar(i) => vec![i],
            VarProvenance::TargetBit { row, bit } => vec![row, bit],
            VarProvenance::CarryLhs { row, from, to }
            | VarProvenance::CarryRhs { row, from, to } => {
                vec![row, from, to]
            }
            VarProvenance::Copy { parent, index } => vec![parent.0, index],
            VarProvenance::IlpBit { var, bit } => vec![var, bit],
        }
    }

    pub fn from_parts(kind: &str, indices: &[usize]) -> Result<Self> {
        let bad = || Error::Format(format!("provenance `{kind}` with indices {indices:?}"));
        let p = match (kind, indices) {
            ("selector_a", &[i]) => VarProvenance::SelectorA(i),
            ("selector_b", &[i]) => VarProvenance::SelectorB(i),
            ("target_bit", &[row, bit]) => VarProvenance::TargetBit { row, bit },
            ("carry_lhs", &[row, from, to]) => VarProvenance::CarryLhs { row, from, to },
            ("carry_rhs", &[row, from, to]) => VarProvenance::CarryRhs { row, from, to },
            ("pinned_one", &[m]) => VarProvenance::PinnedOne(m),
            ("copy", &[parent, index]) => VarProvenance::Copy {
                parent: VarId(parent),
                index,
            },
            ("clause_slack_low", &[k]) => VarProvenance::ClauseSlackLow(k),
            ("clause_slack_high", &[k]) => VarProvenance::ClauseSlackHigh(k),
            ("bool_var", &[i]) => VarProvenance::BoolVar(i),
            ("ilp_bit", &[var, bit]) => VarProvenance::IlpBit { var, bit },
            _ => return Err(bad()),
        };
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub provenance: VarProvenance,
    pub name: String,
}

/// Every variable of a system, in VarId order, with provenance and a unique
/// display name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableRegistry {
    entries: Vec<RegistryEntry>,
    names: HashSet<String>,
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(
        &mut self,
        provenance: VarProvenance,
        name: impl Into<String>,
    ) -> Result<VarId> {
        let name = name.into();
        match provenance {
            VarProvenance::CarryLhs { from, to, .. } | VarProvenance::CarryRhs { from, to, .. }
                if from >= to =>
            {
                return Err(Error::InvalidProvenance(format!(
                    "carry {from}->{to} must go to a higher column"
                )));
            }
            VarProvenance::Copy { parent, .. } if parent.0 >= self.entries.len() => {
                return Err(Error::InvalidProvenance(format!(
                    "copy of unregistered parent {parent}"
                )));
            }
            _ => {}
        }
        if !self.names.insert(name.clone()) {
            return Err(Error::DuplicateName(name));
        }
        let id = VarId(self.entries.len());
        self.entries.push(RegistryEntry { provenance, name });
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, var: VarId) -> bool {
        var.0 < self.entries.len()
    }

    pub fn entry(&self, var: VarId) -> Option<&RegistryEntry> {
        self.entries.get(var.0)
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.entries[var.0].name
    }

    pub fn provenance(&self, var: VarId) -> VarProvenance {
        self.entries[var.0].provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &RegistryEntry)> {
        self.entries.iter().enumerate().map(|(i, e)| (VarId(i), e))
    }

    /// First variable with the given provenance.
    pub fn find(&self, provenance: VarProvenance) -> Option<VarId> {
        self.entries
            .iter()
            .position(|e| e.provenance == provenance)
            .map(VarId)
    }
}

/// A SUBSET-SUM instance: non-zero `values` and a `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    values: Vec<i64>,
    target: i64,
}

impl SubsetSumInstance {
    pub fn new(values: Vec<i64>, target: i64) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&v| v == 0) {
            return Err(Error::MalformedInput(format!(
                "value at position {pos} is zero; subset-sum values must be non-zero"
            )));
        }
        if values.iter().chain(Some(&target)).any(|v| *v == i64::MIN) {
            return Err(Error::Overflow("taking magnitudes of subset-sum values"));
        }
        Ok(Self { values, target })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn target(&self) -> i64 {
        self.target
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    /// DIMACS-style signed integer.
    pub fn from_dimacs(lit: i64) -> Self {
        Literal {
            var: lit.unsigned_abs() as usize,
            negated: lit < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var - 1] != self.negated
    }
}

pub type Clause = [Literal; 3];

/// A 3-SAT formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeSatInstance {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl ThreeSatInstance {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::MalformedInput(
                "3-SAT instance needs at least one variable".into(),
            ));
        }
        for (k, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var == 0 || lit.var > num_vars {
                    return Err(Error::LiteralRange {
                        clause: k + 1,
                        literal: lit.to_dimacs(),
                        num_vars,
                    });
                }
            }
        }
        Ok(Self { num_vars, clauses })
    }

    /// Builds an instance from DIMACS-style signed literals, enforcing arity 3.
    pub fn from_signed(num_vars: usize, clauses: &[Vec<i64>]) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (k, c) in clauses.iter().enumerate() {
            if c.len() != 3 {
                return Err(Error::Arity {
                    clause: k + 1,
                    found: c.len(),
                });
            }
            if let Some(&bad) = c.iter().find(|&&l| l == 0) {
                return Err(Error::LiteralRange {
                    clause: k + 1,
                    literal: bad,
                    num_vars,
                });
            }
            out.push([
                Literal::from_dimacs(c[0]),
                Literal::from_dimacs(c[1]),
                Literal::from_dimacs(c[2]),
            ]);
        }
        Self::new(num_vars, out)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        model.len() == self.num_vars && self.clauses.iter().all(|c| c.iter().any(|l| l.eval(model)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IlpRow {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

/// Equality rows over non-negative integer unknowns, each binarized with
/// bits `0..=bit_width`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpInstance {
    num_vars: usize,
    rows: Vec<IlpRow>,
    bit_width: u32,
}

impl IlpInstance {
    pub fn new(num_vars: usize, rows: Vec<IlpRow>, bit_width: u32) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::MalformedInput(
                "ILP needs at least one unknown".into(),
            ));
        }
        if bit_width > 62 {
            return Err(Error::MalformedInput(format!(
                "bit width {bit_width} exceeds 62"
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.coeffs.len() != num_vars {
                return Err(Error::MalformedInput(format!(
                    "row {} has {} coefficients, expected {num_vars}",
                    r + 1,
                    row.coeffs.len()
                )));
            }
        }
        Ok(Self {
            num_vars,
            rows,
            bit_width,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[IlpRow] {
        &self.rows
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn with_bit_width(&self, bit_width: u32) -> Result<Self> {
        Self::new(self.num_vars, self.rows.clone(), bit_width)
    }

    /// Largest value an unknown can take under the binarization.
    pub fn box_max(&self) -> u64 {
        (1u64 << (self.bit_width + 1)) - 1
    }

    pub fn is_satisfied_by(&self, x: &[i64]) -> bool {
        x.len() == self.num_vars
            && self.rows.iter().all(|row| {
                let lhs: i128 = row
                    .coeffs
                    .iter()
                    .zip(x)
                    .map(|(&a, &xi)| a as i128 * xi as i128)
                    .sum();
                lhs == row.rhs as i128
            })
    }
}

/// `Σ lhs_terms + lhs_const = Σ rhs_terms + rhs_const` with strictly
/// positive coefficients; signs are carried by the side.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightedEquation {
    pub lhs_terms: Vec<(u64, VarId)>,
    pub rhs_terms: Vec<(u64, VarId)>,
    pub lhs_const: u64,
    pub rhs_const: u64,
}

impl WeightedEquation {
    /// Normalizes a signed equation `Σ lhs + lhs_const = Σ rhs + rhs_const`.
    ///
    /// Terms on the same variable are merged into one net coefficient,
    /// which goes left when positive and right when negative; zero terms
    /// vanish. Constants are folded so at most one side is non-zero. Term
    /// order follows first appearance.
    pub fn normalized(
        lhs: impl IntoIterator<Item = (i64, VarId)>,
        lhs_const: i64,
        rhs: impl IntoIterator<Item = (i64, VarId)>,
        rhs_const: i64,
    ) -> Result<Self> {
        let mut net: Vec<(VarId, i128)> = Vec::new();
        let mut add = |var: VarId, c: i128| match net.iter_mut().find(|(v, _)| *v == var) {
            Some((_, acc)) => *acc += c,
            None => net.push((var, c)),
        };
        for (c, v) in lhs {
            add(v, c as i128);
        }
        for (c, v) in rhs {
            add(v, -(c as i128));
        }
        let to_u64 =
            |x: i128| u64::try_from(x).map_err(|_| Error::Overflow("normalizing an equation"));
        let mut eq = WeightedEquation::default();
        for (v, c) in net {
            match c.signum() {
                1 => eq.lhs_terms.push((to_u64(c)?, v)),
                -1 => eq.rhs_terms.push((to_u64(-c)?, v)),
                _ => {}
            }
        }
        let k = lhs_const as i128 - rhs_const as i128;
        if k > 0 {
            eq.lhs_const = to_u64(k)?;
        } else {
            eq.rhs_const = to_u64(-k)?;
        }
        Ok(eq)
    }

    pub fn validate(&self) -> Result<()> {
        for (side, terms) in [("left", &self.lhs_terms), ("right", &self.rhs_terms)] {
            let mut seen = HashSet::new();
            for &(c, v) in terms {
                if c == 0 {
                    return Err(Error::MalformedInput(format!(
                        "non-positive coefficient on {v} ({side} side)"
                    )));
                }
                if !seen.insert(v) {
                    return Err(Error::MalformedInput(format!(
                        "{v} appears twice on the {side} side"
                    )));
                }
            }
        }
        if let Some(&(_, v)) = self
            .lhs_terms
            .iter()
            .find(|(_, v)| self.rhs_terms.iter().any(|(_, w)| w == v))
        {
            return Err(Error::MalformedInput(format!(
                "{v} appears on both sides; normalize the equation first"
            )));
        }
        Ok(())
    }

    pub fn max_coefficient(&self) -> u64 {
        self.lhs_terms
            .iter()
            .chain(&self.rhs_terms)
            .map(|&(c, _)| c)
            .max()
            .unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.lhs_terms
            .iter()
            .chain(&self.rhs_terms)
            .map(|&(_, v)| v)
    }

    /// `Σ lhs - Σ rhs + lhs_const - rhs_const`; zero when satisfied.
    pub fn residual(&self, asg: &Assignment) -> Result<i128> {
        let side = |terms: &[(u64, VarId)]| -> Result<i128> {
            terms.iter().try_fold(0i128, |acc, &(c, v)| {
                let x = asg.get(v).ok_or(Error::UnboundVariable(v))?;
                Ok(acc + if x { c as i128 } else { 0 })
            })
        };
        Ok(
            side(&self.lhs_terms)? - side(&self.rhs_terms)? + self.lhs_const as i128
                - self.rhs_const as i128,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub sign: Sign,
    pub var: VarId,
}

impl Term {
    pub fn plus(var: VarId) -> Self {
        Term {
            sign: Sign::Plus,
            var,
        }
    }

    pub fn minus(var: VarId) -> Self {
        Term {
            sign: Sign::Minus,
            var,
        }
    }
}

/// `Σ sign·v + constant = 0` with `constant ∈ {-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitEquation {
    terms: Vec<Term>,
    constant: i64,
}

impl UnitEquation {
    pub fn new(terms: Vec<Term>, constant: i64) -> Result<Self> {
        if !(-1..=1).contains(&constant) {
            return Err(Error::ConstantOutOfRange(constant));
        }
        let mut seen = HashSet::with_capacity(terms.len());
        for t in &terms {
            if !seen.insert(t.var) {
                return Err(Error::DuplicateTerm(t.var));
            }
        }
        Ok(Self { terms, constant })
    }

    /// `copy - parent = 0`.
    pub fn tie(copy: VarId, parent: VarId) -> Result<Self> {
        Self::new(vec![Term::plus(copy), Term::minus(parent)], 0)
    }

    /// `var - 1 = 0`.
    pub fn pin_one(var: VarId) -> Self {
        Self {
            terms: vec![Term::plus(var)],
            constant: -1,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSystem {
    registry: VariableRegistry,
    equations: Vec<UnitEquation>,
}

impl UnitSystem {
    pub fn new(registry: VariableRegistry, equations: Vec<UnitEquation>) -> Result<Self> {
        for eq in &equations {
            if let Some(t) = eq.terms.iter().find(|t| !registry.contains(t.var)) {
                return Err(Error::UnregisteredVariable(t.var));
            }
        }
        Ok(Self {
            registry,
            equations,
        })
    }

    pub fn empty() -> Self {
        Self {
            registry: VariableRegistry::new(),
            equations: Vec::new(),
        }
    }

    pub fn registry(&self) -> &VariableRegistry {
        &self.registry
    }

    pub fn equations(&self) -> &[UnitEquation] {
        &self.equations
    }

    pub fn num_vars(&self) -> usize {
        self.registry.len()
    }

    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }
}

/// Values for every variable of a system, indexed by VarId.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![false; n],
        }
    }

    /// Assignment whose i-th value is bit i of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self {
            values: (0..n).map(|i| (bits >> i) & 1 == 1).collect(),
        }
    }

    pub fn get(&self, var: VarId) -> Option<bool> {
        self.values.get(var.0).copied()
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        self.values[var.0] = value;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// `Σ sign·asg(var) + constant`; the equation holds iff this is 0.
pub fn evaluate_equation(eq: &UnitEquation, asg: &Assignment) -> Result<i64> {
    eq.terms.iter().try_fold(eq.constant, |acc, t| {
        let x = asg.get(t.var).ok_or(Error::UnboundVariable(t.var))?;
        Ok(acc + if x { t.sign.value() } else { 0 })
    })
}

pub fn check_system(sys: &UnitSystem, asg: &Assignment) -> Result<bool> {
    if asg.len() != sys.num_vars() {
        return Err(Error::AssignmentSize {
            expected: sys.num_vars(),
            actual: asg.len(),
        });
    }
    for eq in &sys.equations {
        if evaluate_equation(eq, asg)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Index of the first violated equation, if any.
pub fn first_violation(sys: &UnitSystem, asg: &Assignment) -> Result<Option<usize>> {
    if asg.len() != sys.num_vars() {
        return Err(Error::AssignmentSize {
            expected: sys.num_vars(),
            actual: asg.len(),
        });
    }
    for (i, eq) in sys.equations.iter().enumerate() {
        if evaluate_equation(eq, asg)? != 0 {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(n: usize) -> VariableRegistry {
        let mut r = VariableRegistry::new();
        for i in 0..n {
            r.register(VarProvenance::BoolVar(i + 1), format!("b{}", i + 1))
                .unwrap();
        }
        r
    }

    #[test]
    fn evaluate_copy_equality() {
        let eq = UnitEquation::tie(VarId(0), VarId(1)).unwrap();
        assert_eq!(
            evaluate_equation(&eq, &Assignment::new(vec![true, true])).unwrap(),
            0
        );
    }

    #[test]
    fn evaluate_pinned_one_violated() {
        let eq = UnitEquation::pin_one(VarId(0));
        assert_eq!(
            evaluate_equation(&eq, &Assignment::new(vec![false])).unwrap(),
            -1
        );
    }

    #[test]
    fn evaluate_unbound() {
        let eq = UnitEquation::tie(VarId(0), VarId(3)).unwrap();
        assert_eq!(
            evaluate_equation(&eq, &Assignment::new(vec![true])),
            Err(Error::UnboundVariable(VarId(3)))
        );
    }

    #[test]
    fn unit_equation_rejects_large_constant_and_duplicates() {
        assert_eq!(
            UnitEquation::new(vec![Term::plus(VarId(0))], 2),
            Err(Error::ConstantOutOfRange(2))
        );
        assert_eq!(
            UnitEquation::new(vec![Term::plus(VarId(0)), Term::minus(VarId(0))], 0),
            Err(Error::DuplicateTerm(VarId(0)))
        );
    }

    #[test]
    fn check_empty_and_pinned() {
        assert!(check_system(&UnitSystem::empty(), &Assignment::default()).unwrap());
        let sys = UnitSystem::new(reg(1), vec![UnitEquation::pin_one(VarId(0))]).unwrap();
        assert!(check_system(&sys, &Assignment::new(vec![true])).unwrap());
        assert!(!check_system(&sys, &Assignment::new(vec![false])).unwrap());
        assert!(matches!(
            check_system(&sys, &Assignment::default()),
            Err(Error::AssignmentSize { .. })
        ));
    }

    #[test]
    fn system_rejects_unregistered() {
        let r = UnitSystem::new(reg(1), vec![UnitEquation::tie(VarId(0), VarId(1)).unwrap()]);
        assert_eq!(r, Err(Error::UnregisteredVariable(VarId(1))));
    }

    #[test]
    fn registry_invariants() {
        let mut r = reg(2);
        assert!(matches!(
            r.register(VarProvenance::BoolVar(9), "b1"),
            Err(Error::DuplicateName(_))
        ));
        assert!(r
            .register(
                VarProvenance::CarryLhs {
                    row: 1,
                    from: 2,
                    to: 2
                },
                "d_2_2"
            )
            .is_err());
        assert!(r
            .register(
                VarProvenance::Copy {
                    parent: VarId(5),
                    index: 1
                },
                "x_1"
            )
            .is_err());
        let c = r
            .register(
                VarProvenance::Copy {
                    parent: VarId(1),
                    index: 1,
                },
                "b2_1",
            )
            .unwrap();
        assert_eq!(c, VarId(2));
        assert_eq!(r.name(c), "b2_1");
    }

    #[test]
    fn provenance_parts_round_trip() {
        let all = [
            VarProvenance::SelectorA(1),
            VarProvenance::SelectorB(2),
            VarProvenance::TargetBit { row: 1, bit: 3 },
            VarProvenance::CarryLhs {
                row: 1,
                from: 0,
                to: 2,
            },
            VarProvenance::CarryRhs {
                row: 2,
                from: 1,
                to: 3,
            },
            VarProvenance::PinnedOne(4),
            VarProvenance::Copy {
                parent: VarId(7),
                index: 2,
            },
            VarProvenance::ClauseSlackLow(1),
            VarProvenance::ClauseSlackHigh(1),
            VarProvenance::BoolVar(5),
            VarProvenance::IlpBit { var: 1, bit: 0 },
        ];
        for p in all {
            assert_eq!(
                VarProvenance::from_parts(p.kind_name(), &p.indices()).unwrap(),
                p
            );
        }
        assert!(VarProvenance::from_parts("target_bit", &[1]).is_err());
    }

    #[test]
    fn normalized_moves_signs_and_folds_constants() {
        // b1 + b2 + 1 - b3 = 1 + t1 + 2 t2
        let (b1, b2, b3, t1, t2) = (VarId(0), VarId(1), VarId(2), VarId(3), VarId(4));
        let eq =
            WeightedEquation::normalized([(1, b1), (1, b2), (-1, b3)], 1, [(1, t1), (2, t2)], 1)
                .unwrap();
        assert_eq!(eq.lhs_terms, vec![(1, b1), (1, b2)]);
        assert_eq!(eq.rhs_terms, vec![(1, b3), (1, t1), (2, t2)]);
        assert_eq!((eq.lhs_const, eq.rhs_const), (0, 0));

        // x - x cancels
        let eq = WeightedEquation::normalized([(1, b1), (-1, b1)], 3, [], 1).unwrap();
        assert!(eq.lhs_terms.is_empty() && eq.rhs_terms.is_empty());
        assert_eq!((eq.lhs_const, eq.rhs_const), (2, 0));
        eq.validate().unwrap();
    }

    #[test]
    fn validate_rejects_zero_and_duplicates() {
        let v = VarId(0);
        let zero = WeightedEquation {
            lhs_terms: vec![(0, v)],
            ..Default::default()
        };
        assert!(matches!(zero.validate(), Err(Error::MalformedInput(_))));
        let dup = WeightedEquation {
            lhs_terms: vec![(1, v), (2, v)],
            ..Default::default()
        };
        assert!(dup.validate().is_err());
        let both = WeightedEquation {
            lhs_terms: vec![(1, v)],
            rhs_terms: vec![(1, v)],
            ..Default::default()
        };
        assert!(both.validate().is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(SubsetSumInstance::new(vec![1, 0], 1).is_err());
        assert!(SubsetSumInstance::new(vec![], 0).is_ok());
        assert!(matches!(
            ThreeSatInstance::from_signed(2, &[vec![1, 2]]),
            Err(Error::Arity {
                clause: 1,
                found: 2
            })
        ));
        assert!(matches!(
            ThreeSatInstance::from_signed(2, &[vec![1, 2, -3]]),
            Err(Error::LiteralRange { literal: -3, .. })
        ));
        assert!(IlpInstance::new(
            2,
            vec![IlpRow {
                coeffs: vec![1],
                rhs: 0
            }],
            1
        )
        .is_err());
    }
}

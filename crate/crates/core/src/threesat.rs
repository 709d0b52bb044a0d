//! 3-SAT to unit system.
//!
//! Clause `k` becomes `Σ literal values = 1 + t_{2k-1} + 2·t_{2k}`, where a
//! negated literal `¬x_i` contributes `1 - b_i`. The right side ranges over
//! {1, 2, 3}, so the equation is satisfiable exactly when at least one
//! literal is true.

use crate::error::{Error, Result};
use crate::expansion::expand_to_unit;
use crate::model::{
    check_system, Assignment, ThreeSatInstance, UnitSystem, VarId, VarProvenance, VariableRegistry,
    WeightedEquation,
};

/// Registers `b_1..b_N` then `t_{2k-1}, t_{2k}` per clause, and returns one
/// normalized equation per clause.
pub fn build_clause_equations(
    inst: &ThreeSatInstance,
    registry: &mut VariableRegistry,
) -> Result<Vec<WeightedEquation>> {
    let b: Vec<VarId> = (1..=inst.num_vars())
        .map(|i| registry.register(VarProvenance::BoolVar(i), format!("b{i}")))
        .collect::<Result<_>>()?;

    let mut eqs = Vec::with_capacity(inst.clauses().len());
    for (k0, clause) in inst.clauses().iter().enumerate() {
        let k = k0 + 1;
        let low = registry.register(VarProvenance::ClauseSlackLow(k), format!("t{}", 2 * k - 1))?;
        let high = registry.register(VarProvenance::ClauseSlackHigh(k), format!("t{}", 2 * k))?;

        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        let mut lhs_const = 0;
        for lit in clause {
            let v = b[lit.var - 1];
            if lit.negated {
                lhs_const += 1;
                rhs.push((1, v));
            } else {
                lhs.push((1, v));
            }
        }
        rhs.push((1, low));
        rhs.push((2, high));
        eqs.push(WeightedEquation::normalized(lhs, lhs_const, rhs, 1)?);
    }
    Ok(eqs)
}

#[derive(Debug, Clone)]
pub struct ThreeSatReduction {
    pub clause_equations: Vec<WeightedEquation>,
    pub system: UnitSystem,
}

impl ThreeSatReduction {
    /// Whether `N + 4K` variables and `3K` equations are expected: no clause
    /// repeats a variable and none has all three literals negated.
    pub fn size_formula_applies(inst: &ThreeSatInstance) -> bool {
        inst.clauses().iter().all(|c| {
            let distinct = c[0].var != c[1].var && c[0].var != c[2].var && c[1].var != c[2].var;
            distinct && !c.iter().all(|l| l.negated)
        })
    }

    pub fn expected_size(inst: &ThreeSatInstance) -> (usize, usize) {
        let k = inst.clauses().len();
        (inst.num_vars() + 4 * k, 3 * k)
    }
}

pub fn reduce_3sat(inst: &ThreeSatInstance) -> Result<ThreeSatReduction> {
    let mut registry = VariableRegistry::new();
    let clause_equations = build_clause_equations(inst, &mut registry)?;
    let system = expand_to_unit(&clause_equations, registry)?;
    Ok(ThreeSatReduction {
        clause_equations,
        system,
    })
}

/// Reads `x_i` from `b_i` of a satisfying assignment.
pub fn lift_3sat(inst: &ThreeSatInstance, sys: &UnitSystem, asg: &Assignment) -> Result<Vec<bool>> {
    if !check_system(sys, asg)? {
        return Err(Error::LiftRefused("some equation is violated".into()));
    }
    let mut model = vec![None; inst.num_vars()];
    for (var, entry) in sys.registry().iter() {
        if let VarProvenance::BoolVar(i) = entry.provenance {
            let slot = model.get_mut(i.wrapping_sub(1)).ok_or_else(|| {
                Error::LiftRefused(format!("`{}` is outside the instance", entry.name))
            })?;
            *slot = asg.get(var);
        }
    }
    let model: Vec<bool> = model
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::LiftRefused(format!("no variable for x{}", i + 1))))
        .collect::<Result<_>>()?;
    if !inst.is_satisfied_by(&model) {
        return Err(Error::LiftRefused("lifted model violates a clause".into()));
    }
    Ok(model)
}

//! Rewrites weighted equations into unit form.
//!
//! A term `w·v` with `w ≥ 2` becomes `v_1 + … + v_w` plus `w` tie equations
//! `v_m - v = 0`. A constant `k ≥ 2` becomes `c_1 + … + c_k` plus `k`
//! equations `c_m - 1 = 0`. Constants equal to 1 stay inline.

use std::collections::HashMap;

use crate::error::Result;
use crate::model::{
    Term, UnitEquation, UnitSystem, VarId, VarProvenance, VariableRegistry, WeightedEquation,
};

/// Number of variables and equations `expand_to_unit` will add.
///
/// The two counts are always equal: one new equation per new variable.
pub fn expansion_size(eqs: &[WeightedEquation]) -> (usize, usize) {
    let added: u64 = eqs
        .iter()
        .map(|eq| {
            let terms: u64 = eq
                .lhs_terms
                .iter()
                .chain(&eq.rhs_terms)
                .map(|&(c, _)| c)
                .filter(|&c| c >= 2)
                .sum();
            let consts: u64 = [eq.lhs_const, eq.rhs_const]
                .into_iter()
                .filter(|&k| k >= 2)
                .sum();
            terms + consts
        })
        .sum();
    (added as usize, added as usize)
}

struct Expander {
    registry: VariableRegistry,
    out: Vec<UnitEquation>,
    next_pin: usize,
    copy_counts: HashMap<VarId, usize>,
}

impl Expander {
    fn pins(&mut self, k: u64, pins: &mut Vec<VarId>) -> Result<()> {
        if k < 2 {
            return Ok(());
        }
        for _ in 0..k {
            self.next_pin += 1;
            let m = self.next_pin;
            let id = self
                .registry
                .register(VarProvenance::PinnedOne(m), format!("c{m}"))?;
            self.out.push(UnitEquation::pin_one(id));
            pins.push(id);
        }
        Ok(())
    }

    /// Unit variables standing for `coeff·var`, recording tie equations.
    fn unit_vars(
        &mut self,
        coeff: u64,
        var: VarId,
        ties: &mut Vec<UnitEquation>,
    ) -> Result<Vec<VarId>> {
        if coeff == 1 {
            return Ok(vec![var]);
        }
        let mut copies = Vec::with_capacity(coeff as usize);
        for _ in 0..coeff {
            let index = {
                let n = self.copy_counts.entry(var).or_insert(0);
                *n += 1;
                *n
            };
            let name = format!("{}_{index}", self.registry.name(var));
            let id = self
                .registry
                .register(VarProvenance::Copy { parent: var, index }, name)?;
            ties.push(UnitEquation::tie(id, var)?);
            copies.push(id);
        }
        Ok(copies)
    }

    fn expand(&mut self, eq: &WeightedEquation) -> Result<()> {
        eq.validate()?;
        if let Some(v) = eq.vars().find(|&v| !self.registry.contains(v)) {
            return Err(crate::Error::UnregisteredVariable(v));
        }
        let mut lhs_pins = Vec::new();
        let mut rhs_pins = Vec::new();
        self.pins(eq.lhs_const, &mut lhs_pins)?;
        self.pins(eq.rhs_const, &mut rhs_pins)?;

        let mut ties = Vec::new();
        let mut terms = Vec::new();
        for &(c, v) in &eq.lhs_terms {
            terms.extend(self.unit_vars(c, v, &mut ties)?.into_iter().map(Term::plus));
        }
        terms.extend(lhs_pins.into_iter().map(Term::plus));
        for &(c, v) in &eq.rhs_terms {
            terms.extend(
                self.unit_vars(c, v, &mut ties)?
                    .into_iter()
                    .map(Term::minus),
            );
        }
        terms.extend(rhs_pins.into_iter().map(Term::minus));

        let constant = i64::from(eq.lhs_const == 1) - i64::from(eq.rhs_const == 1);
        self.out.push(UnitEquation::new(terms, constant)?);
        self.out.append(&mut ties);
        Ok(())
    }
}

/// Expands `eqs` over `registry` into a [`UnitSystem`].
///
/// Per source equation the output holds its pinned-one equations, then the
/// rewritten main equation, then the tie equations. New variables are
/// numbered in equation order then term order.
pub fn expand_to_unit(eqs: &[WeightedEquation], registry: VariableRegistry) -> Result<UnitSystem> {
    let mut ex = Expander {
        registry,
        out: Vec::new(),
        next_pin: 0,
        copy_counts: HashMap::new(),
    };
    for eq in eqs {
        ex.expand(eq)?;
    }
    UnitSystem::new(ex.registry, ex.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_system, Assignment};
    use crate::Error;

    fn fgh() -> (VariableRegistry, WeightedEquation) {
        let mut reg = VariableRegistry::new();
        let f = reg.register(VarProvenance::BoolVar(1), "f").unwrap();
        let g = reg.register(VarProvenance::BoolVar(2), "g").unwrap();
        let h = reg.register(VarProvenance::BoolVar(3), "h").unwrap();
        let eq = WeightedEquation {
            lhs_terms: vec![(3, f), (2, g), (1, h)],
            rhs_const: 5,
            ..Default::default()
        };
        (reg, eq)
    }

    #[test]
    fn worked_example_counts_and_names() {
        let (reg, eq) = fgh();
        assert_eq!(expansion_size(std::slice::from_ref(&eq)), (10, 10));
        let sys = expand_to_unit(&[eq], reg).unwrap();
        assert_eq!(sys.num_equations(), 11);
        assert_eq!(sys.num_vars(), 13);
        let names: Vec<_> = (3..13)
            .map(|i| sys.registry().name(VarId(i)).to_string())
            .collect();
        assert_eq!(
            names,
            ["c1", "c2", "c3", "c4", "c5", "f_1", "f_2", "f_3", "g_1", "g_2"]
        );
        // c1 = 1 … c5 = 1 come first, then the main equation.
        let main = &sys.equations()[5];
        assert_eq!(main.terms().len(), 11);
        assert_eq!(main.constant(), 0);
    }

    #[test]
    fn already_unit_is_unchanged() {
        let mut reg = VariableRegistry::new();
        let f = reg.register(VarProvenance::BoolVar(1), "f").unwrap();
        let g = reg.register(VarProvenance::BoolVar(2), "g").unwrap();
        let eq = WeightedEquation {
            lhs_terms: vec![(1, f), (1, g)],
            rhs_const: 1,
            ..Default::default()
        };
        assert_eq!(expansion_size(std::slice::from_ref(&eq)), (0, 0));
        let sys = expand_to_unit(&[eq], reg).unwrap();
        assert_eq!(sys.num_vars(), 2);
        assert_eq!(sys.num_equations(), 1);
        let e = &sys.equations()[0];
        assert_eq!(e.terms(), &[Term::plus(f), Term::plus(g)]);
        assert_eq!(e.constant(), -1);
    }

    #[test]
    fn two_g_equals_two_forces_g() {
        let mut reg = VariableRegistry::new();
        let g = reg.register(VarProvenance::BoolVar(1), "g").unwrap();
        let eq = WeightedEquation {
            lhs_terms: vec![(2, g)],
            rhs_const: 2,
            ..Default::default()
        };
        let sys = expand_to_unit(&[eq], reg).unwrap();
        assert_eq!(sys.num_vars(), 5);
        assert_eq!(sys.num_equations(), 5);
        let solutions: Vec<u64> = (0..32u64)
            .filter(|&bits| check_system(&sys, &Assignment::from_bits(5, bits)).unwrap())
            .collect();
        assert_eq!(solutions.len(), 1);
        assert_eq!(solutions[0] & 1, 1, "g must be 1");
    }

    #[test]
    fn copies_are_numbered_per_parent_across_equations() {
        let mut reg = VariableRegistry::new();
        let x = reg
            .register(VarProvenance::IlpBit { var: 1, bit: 0 }, "x")
            .unwrap();
        let eqs = vec![
            WeightedEquation {
                lhs_terms: vec![(2, x)],
                rhs_const: 0,
                ..Default::default()
            },
            WeightedEquation {
                lhs_terms: vec![(2, x)],
                rhs_const: 0,
                ..Default::default()
            },
        ];
        let sys = expand_to_unit(&eqs, reg).unwrap();
        assert_eq!(sys.registry().name(VarId(3)), "x_3");
        assert_eq!(
            sys.registry().provenance(VarId(4)),
            VarProvenance::Copy {
                parent: x,
                index: 4
            }
        );
    }

    #[test]
    fn rejects_malformed() {
        let mut reg = VariableRegistry::new();
        let x = reg.register(VarProvenance::BoolVar(1), "x").unwrap();
        let bad = WeightedEquation {
            lhs_terms: vec![(0, x)],
            ..Default::default()
        };
        assert!(matches!(
            expand_to_unit(&[bad], reg.clone()),
            Err(Error::MalformedInput(_))
        ));
        let unknown = WeightedEquation {
            lhs_terms: vec![(1, VarId(9))],
            ..Default::default()
        };
        assert_eq!(
            expand_to_unit(&[unknown], reg),
            Err(Error::UnregisteredVariable(VarId(9)))
        );
    }

    #[test]
    fn unit_constant_stays_inline() {
        let mut reg = VariableRegistry::new();
        let x = reg.register(VarProvenance::BoolVar(1), "x").unwrap();
        let eq = WeightedEquation {
            lhs_terms: vec![(1, x)],
            lhs_const: 1,
            rhs_const: 3,
            ..Default::default()
        };
        let sys = expand_to_unit(&[eq], reg).unwrap();
        // 3 pins + main
        assert_eq!(sys.num_equations(), 4);
        assert_eq!(sys.equations()[3].constant(), 1);
    }
}

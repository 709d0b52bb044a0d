//! Equality ILP over bounded non-negative integers to unit system.
//!
//! Each unknown is written as `x_i = Σ_j 2^j·c_{i,j}` with `j ∈ 0..=P`, every
//! row becomes a weighted equation over the shared bits, and every row is
//! decomposed on its own (row-local target and carry variables) before the
//! whole system is expanded. The result is feasible iff the ILP has a
//! solution with every `x_i ≤ 2^{P+1} - 1`.

use crate::error::{Error, Result};
use crate::expansion::expand_to_unit;
use crate::model::{
    check_system, Assignment, IlpInstance, IlpRow, UnitSystem, VarId, VarProvenance,
    VariableRegistry, WeightedEquation,
};
use crate::subset_sum::{build_s2, ColumnSystem, DecompositionParams, RowScope};

pub const DEFAULT_MAX_BIT_WIDTH: u32 = 16;

/// Registers `c_{i,j}` for every unknown and bit, unknown-major.
fn register_bits(inst: &IlpInstance, registry: &mut VariableRegistry) -> Result<Vec<Vec<VarId>>> {
    (1..=inst.num_vars())
        .map(|i| {
            (0..=inst.bit_width() as usize)
                .map(|j| {
                    registry.register(
                        VarProvenance::IlpBit { var: i, bit: j },
                        format!("c_{i}_{j}"),
                    )
                })
                .collect()
        })
        .collect()
}

fn binarize_rows(inst: &IlpInstance, bits: &[Vec<VarId>]) -> Result<Vec<WeightedEquation>> {
    inst.rows()
        .iter()
        .map(|row| {
            let mut terms = Vec::new();
            for (&a, var_bits) in row.coeffs.iter().zip(bits) {
                if a == 0 {
                    continue;
                }
                for (j, &c) in var_bits.iter().enumerate() {
                    let w = a
                        .checked_mul(1i64 << j)
                        .ok_or(Error::Overflow("binarizing ILP coefficients"))?;
                    terms.push((w, c));
                }
            }
            WeightedEquation::normalized(terms, 0, [], row.rhs)
        })
        .collect()
}

/// One weighted equation per row over shared `c_{i,j}` bits.
pub fn binarize_ilp(
    inst: &IlpInstance,
    registry: &mut VariableRegistry,
) -> Result<Vec<WeightedEquation>> {
    let bits = register_bits(inst, registry)?;
    binarize_rows(inst, &bits)
}

/// Decomposition parameters for one binarized row.
pub fn row_params(inst: &IlpInstance, row: &WeightedEquation) -> DecompositionParams {
    let k = row
        .max_coefficient()
        .max(row.lhs_const)
        .max(row.rhs_const)
        .max(1);
    let n = (inst.num_vars() as u64) * (inst.bit_width() as u64 + 1) + 1;
    DecompositionParams::from_bounds(k, n)
}

#[derive(Debug, Clone)]
pub struct IlpReduction {
    pub binarized: Vec<WeightedEquation>,
    pub rows: Vec<ColumnSystem>,
    pub system: UnitSystem,
}

pub fn reduce_ilp(inst: &IlpInstance) -> Result<IlpReduction> {
    let mut registry = VariableRegistry::new();
    let binarized = binarize_ilp(inst, &mut registry)?;
    let mut rows = Vec::with_capacity(binarized.len());
    for (r, eq) in binarized.iter().enumerate() {
        let prefix = format!("r{}_", r + 1);
        let scope = RowScope {
            row: r + 1,
            prefix: &prefix,
        };
        rows.push(build_s2(eq, row_params(inst, eq), &mut registry, scope)?);
    }
    let all: Vec<WeightedEquation> = rows
        .iter()
        .flat_map(|r| r.equations.iter().cloned())
        .collect();
    let system = expand_to_unit(&all, registry)?;
    Ok(IlpReduction {
        binarized,
        rows,
        system,
    })
}

/// Reassembles `x` from the `c_{i,j}` bits of a satisfying assignment.
pub fn lift_ilp(inst: &IlpInstance, sys: &UnitSystem, asg: &Assignment) -> Result<Vec<i64>> {
    if !check_system(sys, asg)? {
        return Err(Error::LiftRefused("some equation is violated".into()));
    }
    let mut x = vec![0i64; inst.num_vars()];
    for (var, entry) in sys.registry().iter() {
        if let VarProvenance::IlpBit { var: i, bit } = entry.provenance {
            let slot = x.get_mut(i.wrapping_sub(1)).ok_or_else(|| {
                Error::LiftRefused(format!("`{}` is outside the instance", entry.name))
            })?;
            if asg.get(var) == Some(true) {
                *slot += 1i64 << bit;
            }
        }
    }
    if !inst.is_satisfied_by(&x) {
        return Err(Error::LiftRefused(format!(
            "lifted vector {x:?} violates a row"
        )));
    }
    Ok(x)
}

/// Heuristic bit width `P` when the instance does not give one.
///
/// Bit length of `N · max(1, max|a|, max|b|) · 2^M`, clamped to
/// `max_bits`. The reduction is only complete for solutions below
/// `2^{P+1}`, so callers should surface that bound.
pub fn suggest_bit_width(num_vars: usize, rows: &[IlpRow], max_bits: u32) -> u32 {
    let magnitude = rows
        .iter()
        .flat_map(|r| r.coeffs.iter().chain(Some(&r.rhs)))
        .map(|v| v.unsigned_abs() as u128)
        .max()
        .unwrap_or(0)
        .max(1);
    let scale = 1u128.checked_shl(rows.len() as u32).unwrap_or(u128::MAX);
    let value = (num_vars.max(1) as u128)
        .saturating_mul(magnitude)
        .saturating_mul(scale);
    let bit_len = 128 - value.leading_zeros();
    bit_len.min(max_bits)
}

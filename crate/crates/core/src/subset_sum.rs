//! SUBSET-SUM to unit system.
//!
//! The instance is split by sign into `Σ a_p·y_p = Σ b_q·z_q + |β|`, each
//! side is then written as a column-wise binary addition with explicit carry
//! variables meeting in shared target bits `t_k`, and the result is expanded
//! to unit form.

use crate::error::{Error, Result};
use crate::expansion::expand_to_unit;
use crate::model::{
    check_system, Assignment, SubsetSumInstance, UnitSystem, VarId, VarProvenance,
    VariableRegistry, WeightedEquation,
};

/// Magnitudes split by sign relative to the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSplit {
    /// Magnitudes of values with the target's sign (positives when β = 0).
    pub y: Vec<u64>,
    /// Magnitudes of the remaining values.
    pub z: Vec<u64>,
    pub beta_abs: u64,
    /// Source position of each `y` entry.
    pub y_sources: Vec<usize>,
    /// Source position of each `z` entry.
    pub z_sources: Vec<usize>,
}

pub fn split_by_sign(inst: &SubsetSumInstance) -> SignSplit {
    let target_negative = inst.target() < 0;
    let mut split = SignSplit {
        y: Vec::new(),
        z: Vec::new(),
        beta_abs: inst.target().unsigned_abs(),
        y_sources: Vec::new(),
        z_sources: Vec::new(),
    };
    for (pos, &v) in inst.values().iter().enumerate() {
        if (v < 0) == target_negative {
            split.y.push(v.unsigned_abs());
            split.y_sources.push(pos);
        } else {
            split.z.push(v.unsigned_abs());
            split.z_sources.push(pos);
        }
    }
    split
}

/// The i-th binary digit of `x`, least significant first.
pub fn bit(x: u64, i: u32) -> u64 {
    if i >= u64::BITS {
        0
    } else {
        (x >> i) & 1
    }
}

fn floor_log2(x: u128) -> u32 {
    debug_assert!(x > 0);
    127 - x.leading_zeros()
}

fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        floor_log2(x - 1) + 1
    }
}

/// Highest target-bit index and carry span of the column decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecompositionParams {
    pub theta: u32,
    pub mu: u32,
}

impl DecompositionParams {
    /// `theta = max(1, ⌊log2(K·N)⌋)`, `mu = ⌈log2(N + theta + 1)⌉`.
    ///
    /// `k` is the largest magnitude involved and `n` is the number of
    /// weighted terms plus one.
    pub fn from_bounds(k: u64, n: u64) -> Self {
        let kn = (k.max(1) as u128) * (n.max(1) as u128);
        let theta = floor_log2(kn).max(1);
        let mu = ceil_log2(n as u128 + theta as u128 + 1).max(1);
        DecompositionParams { theta, mu }
    }

    /// Largest coefficient a carry can carry: `2^min(mu, theta)`.
    pub fn max_carry_coefficient(&self) -> u64 {
        1u64 << self.mu.min(self.theta)
    }
}

pub fn decomposition_params(inst: &SubsetSumInstance) -> Result<DecompositionParams> {
    if inst.values().is_empty() {
        return Err(Error::DegenerateInstance {
            feasible: inst.target() == 0,
        });
    }
    let k = inst
        .values()
        .iter()
        .chain(Some(&inst.target()))
        .map(|v| v.unsigned_abs())
        .max()
        .unwrap_or(0);
    let n = inst.values().len() as u64 + 1;
    Ok(DecompositionParams::from_bounds(k, n))
}

/// Registers `a_1..a_P`, `b_1..b_Q` and returns the single selector equation.
pub fn build_s1(split: &SignSplit, registry: &mut VariableRegistry) -> Result<WeightedEquation> {
    let mut eq = WeightedEquation {
        rhs_const: split.beta_abs,
        ..Default::default()
    };
    for (i, &y) in split.y.iter().enumerate() {
        let v = registry.register(VarProvenance::SelectorA(i + 1), format!("a{}", i + 1))?;
        eq.lhs_terms.push((y, v));
    }
    for (i, &z) in split.z.iter().enumerate() {
        let v = registry.register(VarProvenance::SelectorB(i + 1), format!("b{}", i + 1))?;
        eq.rhs_terms.push((z, v));
    }
    Ok(eq)
}

/// Column decomposition of one weighted equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSystem {
    pub params: DecompositionParams,
    /// Left block (columns 0..=theta), then right block.
    pub equations: Vec<WeightedEquation>,
    pub target_bits: Vec<VarId>,
    /// Number of variables registered by the decomposition.
    pub new_vars: usize,
}

impl ColumnSystem {
    pub fn max_coefficient(&self) -> u64 {
        self.equations
            .iter()
            .map(WeightedEquation::max_coefficient)
            .max()
            .unwrap_or(0)
    }
}

/// Naming and provenance scope of one decomposed row.
#[derive(Debug, Clone, Copy)]
pub struct RowScope<'a> {
    pub row: usize,
    pub prefix: &'a str,
}

impl Default for RowScope<'_> {
    fn default() -> Self {
        RowScope { row: 1, prefix: "" }
    }
}

fn side_total(terms: &[(u64, VarId)], constant: u64) -> u128 {
    terms.iter().map(|&(c, _)| c as u128).sum::<u128>() + constant as u128
}

/// Rewrites `eq` as `2·(theta+1)` column equations.
///
/// Column `i` of the left block reads
/// `Σ_{i'<i} d_{i',i} + Σ_p bit(y_p, i)·a_p + bit(lhs_const, i) = t_i + Σ_j 2^{j-i}·d_{i,j}`
/// with `j` running over `i+1..=min(i+mu, theta)`; the right block mirrors
/// it with `e` carries. Variables are registered column by column:
/// `t_i`, then `d_{i,*}`, then `e_{i,*}`.
pub fn build_s2(
    eq: &WeightedEquation,
    params: DecompositionParams,
    registry: &mut VariableRegistry,
    scope: RowScope<'_>,
) -> Result<ColumnSystem> {
    eq.validate()?;
    let DecompositionParams { theta, mu } = params;
    if theta >= 63 {
        return Err(Error::Overflow("decomposing into more than 63 columns"));
    }
    let capacity = 1u128 << (theta + 1);
    if side_total(&eq.lhs_terms, eq.lhs_const) >= capacity
        || side_total(&eq.rhs_terms, eq.rhs_const) >= capacity
    {
        return Err(Error::MalformedInput(format!(
            "theta = {theta} cannot represent the side sums of the equation"
        )));
    }

    let before = registry.len();
    let cols = theta as usize + 1;
    let span = |i: usize| (i + 1)..=(i + mu as usize).min(theta as usize);
    let (row, p) = (scope.row, scope.prefix);

    let mut t = Vec::with_capacity(cols);
    // carries[i] = outgoing carries of column i as (to, var)
    let mut d: Vec<Vec<(usize, VarId)>> = vec![Vec::new(); cols];
    let mut e: Vec<Vec<(usize, VarId)>> = vec![Vec::new(); cols];
    for i in 0..cols {
        t.push(registry.register(VarProvenance::TargetBit { row, bit: i }, format!("{p}t{i}"))?);
        for j in span(i) {
            let v = registry.register(
                VarProvenance::CarryLhs {
                    row,
                    from: i,
                    to: j,
                },
                format!("{p}d_{i}_{j}"),
            )?;
            d[i].push((j, v));
        }
        for j in span(i) {
            let v = registry.register(
                VarProvenance::CarryRhs {
                    row,
                    from: i,
                    to: j,
                },
                format!("{p}e_{i}_{j}"),
            )?;
            e[i].push((j, v));
        }
    }

    let block = |carries: &[Vec<(usize, VarId)>], terms: &[(u64, VarId)], constant: u64| {
        (0..cols)
            .map(|i| {
                let mut lhs: Vec<(u64, VarId)> = carries[..i]
                    .iter()
                    .flat_map(|out| out.iter().filter(|(to, _)| *to == i).map(|&(_, v)| (1, v)))
                    .collect();
                lhs.extend(
                    terms
                        .iter()
                        .filter(|&&(c, _)| bit(c, i as u32) == 1)
                        .map(|&(_, v)| (1, v)),
                );
                let mut rhs = vec![(1, t[i])];
                rhs.extend(carries[i].iter().map(|&(j, v)| (1u64 << (j - i), v)));
                WeightedEquation {
                    lhs_terms: lhs,
                    rhs_terms: rhs,
                    lhs_const: bit(constant, i as u32),
                    rhs_const: 0,
                }
            })
            .collect::<Vec<_>>()
    };

    let mut equations = block(&d, &eq.lhs_terms, eq.lhs_const);
    equations.extend(block(&e, &eq.rhs_terms, eq.rhs_const));

    Ok(ColumnSystem {
        params,
        equations,
        target_bits: t,
        new_vars: registry.len() - before,
    })
}

/// A reduced subset-sum instance with the intermediate systems kept for
/// inspection.
#[derive(Debug, Clone)]
pub struct SubsetSumReduction {
    pub split: SignSplit,
    pub params: DecompositionParams,
    pub s1: WeightedEquation,
    pub s2: ColumnSystem,
    /// Registry after column decomposition, before unit expansion.
    pub s2_registry: VariableRegistry,
    pub system: UnitSystem,
}

impl SubsetSumReduction {
    /// Selectors plus column-decomposition variables, before unit expansion.
    pub fn s2_num_vars(&self) -> usize {
        self.s2_registry.len()
    }
}

pub fn reduce_subset_sum(inst: &SubsetSumInstance) -> Result<SubsetSumReduction> {
    let params = decomposition_params(inst)?;
    let split = split_by_sign(inst);
    let mut registry = VariableRegistry::new();
    let s1 = build_s1(&split, &mut registry)?;
    let s2 = build_s2(&s1, params, &mut registry, RowScope::default())?;
    let s2_registry = registry.clone();
    let system = expand_to_unit(&s2.equations, registry)?;
    Ok(SubsetSumReduction {
        split,
        params,
        s1,
        s2,
        s2_registry,
        system,
    })
}

/// Elements chosen by a lifted assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subset {
    /// Positions in the source value list, ascending.
    pub positions: Vec<usize>,
    pub values: Vec<i64>,
}

impl Subset {
    pub fn sum(&self) -> i64 {
        self.values.iter().sum()
    }
}

/// Reads the selector variables of a satisfying assignment back into a
/// subset of the source values.
pub fn lift_subset_sum(
    inst: &SubsetSumInstance,
    sys: &UnitSystem,
    asg: &Assignment,
) -> Result<Subset> {
    if !check_system(sys, asg)? {
        return Err(Error::LiftRefused("some equation is violated".into()));
    }
    let split = split_by_sign(inst);
    let mut positions = Vec::new();
    for (var, entry) in sys.registry().iter() {
        let source = match entry.provenance {
            VarProvenance::SelectorA(i) => split.y_sources.get(i - 1),
            VarProvenance::SelectorB(i) => split.z_sources.get(i - 1),
            _ => continue,
        };
        let source = source.ok_or_else(|| {
            Error::LiftRefused(format!(
                "selector `{}` does not match the instance",
                entry.name
            ))
        })?;
        if asg.get(var) == Some(true) {
            positions.push(*source);
        }
    }
    positions.sort_unstable();
    let values: Vec<i64> = positions.iter().map(|&p| inst.values()[p]).collect();
    let subset = Subset { positions, values };
    if subset.sum() != inst.target() {
        return Err(Error::LiftRefused(format!(
            "selected values sum to {}, not {}",
            subset.sum(),
            inst.target()
        )));
    }
    Ok(subset)
}

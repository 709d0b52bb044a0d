//! Brute-force deciders that restate each source problem directly. They
//! share no code with the reductions and serve as test oracles.

use crate::error::{Error, Result};
use crate::model::{
    check_system, Assignment, IlpInstance, SubsetSumInstance, ThreeSatInstance, UnitSystem,
};

pub const MAX_SUBSET_SUM_VALUES: usize = 25;
pub const MAX_3SAT_VARS: usize = 25;
pub const MAX_ILP_BOX_POINTS: u128 = 10_000_000;
pub const MAX_ENUMERATED_VARS: usize = 26;

/// Whether some subset (the empty one included) sums to the target.
pub fn brute_force_subset_sum(inst: &SubsetSumInstance) -> Result<bool> {
    Ok(subset_sum_witness(inst)?.is_some())
}

/// Bitmask over source positions of the first subset hitting the target.
pub fn subset_sum_witness(inst: &SubsetSumInstance) -> Result<Option<u32>> {
    let n = inst.values().len();
    if n > MAX_SUBSET_SUM_VALUES {
        return Err(Error::SizeGuard(format!(
            "{n} values > {MAX_SUBSET_SUM_VALUES}"
        )));
    }
    let target = inst.target() as i128;
    Ok((0u32..1 << n).find(|&mask| {
        let sum: i128 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| inst.values()[i] as i128)
            .sum();
        sum == target
    }))
}

pub fn brute_force_3sat(inst: &ThreeSatInstance) -> Result<bool> {
    let n = inst.num_vars();
    if n > MAX_3SAT_VARS {
        return Err(Error::SizeGuard(format!("{n} variables > {MAX_3SAT_VARS}")));
    }
    Ok((0u64..1 << n).any(|bits| {
        let model: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        inst.is_satisfied_by(&model)
    }))
}

/// Whether some point of the box `0 ≤ x_i ≤ 2^{P+1} - 1` satisfies every row.
pub fn brute_force_ilp(inst: &IlpInstance) -> Result<bool> {
    let side = inst.box_max() as u128 + 1;
    let points = side.checked_pow(inst.num_vars() as u32);
    if points.is_none_or(|p| p > MAX_ILP_BOX_POINTS) {
        return Err(Error::SizeGuard(format!(
            "box of side {side} in {} dimensions exceeds {MAX_ILP_BOX_POINTS} points",
            inst.num_vars()
        )));
    }
    let max = inst.box_max() as i64;
    let mut x = vec![0i64; inst.num_vars()];
    loop {
        if inst.is_satisfied_by(&x) {
            return Ok(true);
        }
        let mut i = 0;
        while i < x.len() && x[i] == max {
            x[i] = 0;
            i += 1;
        }
        if i == x.len() {
            return Ok(false);
        }
        x[i] += 1;
    }
}

/// Lexicographically smallest satisfying assignment by full enumeration.
pub fn enumerate_unit_system(sys: &UnitSystem) -> Result<Option<Assignment>> {
    let n = sys.num_vars();
    if n > MAX_ENUMERATED_VARS {
        return Err(Error::SizeGuard(format!(
            "{n} variables > {MAX_ENUMERATED_VARS}"
        )));
    }
    // Lexicographic order by VarId with 0 < 1 means v0 is the most
    // significant position.
    for k in 0u64..1 << n {
        let asg = Assignment::new((0..n).map(|i| k >> (n - 1 - i) & 1 == 1).collect());
        if check_system(sys, &asg)? {
            return Ok(Some(asg));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IlpRow, Literal};

    #[test]
    fn subset_sum_examples() {
        let i = |v: &[i64], t| SubsetSumInstance::new(v.to_vec(), t).unwrap();
        assert!(brute_force_subset_sum(&i(&[1, 2, -3, -4], -2)).unwrap());
        assert_eq!(
            subset_sum_witness(&i(&[1, 2, -3, -4], -2)).unwrap(),
            Some(0b0101)
        ); // {1, -3}
        assert!(!brute_force_subset_sum(&i(&[1, 2], -3)).unwrap());
        assert!(brute_force_subset_sum(&i(&[], 0)).unwrap());
        assert!(brute_force_subset_sum(&i(&[1; 26], 3)).is_err());
    }

    #[test]
    fn three_sat_examples() {
        let sample = ThreeSatInstance::from_signed(
            5,
            &[
                vec![1, 2, -3],
                vec![1, -3, 4],
                vec![-1, 4, 5],
                vec![2, -3, -4],
            ],
        )
        .unwrap();
        assert!(brute_force_3sat(&sample).unwrap());
        let all: Vec<[Literal; 3]> = (0..8u32)
            .map(|p| {
                [1, 2, 3].map(|v| Literal {
                    var: v,
                    negated: p >> (v - 1) & 1 == 1,
                })
            })
            .collect();
        assert!(!brute_force_3sat(&ThreeSatInstance::new(3, all).unwrap()).unwrap());
        let one = ThreeSatInstance::from_signed(3, &[vec![1, 2, 3]]).unwrap();
        assert!(brute_force_3sat(&one).unwrap());
    }

    #[test]
    fn ilp_examples() {
        let ilp = |n, rows: &[(&[i64], i64)], p| {
            let rows = rows
                .iter()
                .map(|(c, b)| IlpRow {
                    coeffs: c.to_vec(),
                    rhs: *b,
                })
                .collect();
            IlpInstance::new(n, rows, p).unwrap()
        };
        assert!(brute_force_ilp(&ilp(2, &[(&[1, 1], 3)], 1)).unwrap());
        assert!(!brute_force_ilp(&ilp(1, &[(&[2], 1)], 2)).unwrap());
        assert!(brute_force_ilp(&ilp(1, &[(&[1], 0)], 0)).unwrap());
        assert!(brute_force_ilp(&ilp(4, &[(&[1, 1, 1, 1], 0)], 20)).is_err());
    }
}

use unitsys::dimacs::{parse_dimacs, write_dimacs};
use unitsys::expansion::{expand_to_unit, expansion_size};
use unitsys::ilp::{lift_ilp, reduce_ilp, suggest_bit_width, DEFAULT_MAX_BIT_WIDTH};
use unitsys::oracle::{brute_force_ilp, brute_force_subset_sum};
use unitsys::solver::{solve_unit_system, SolveLimits, SolveResult};
use unitsys::subset_sum::{lift_subset_sum, reduce_subset_sum};
use unitsys::threesat::{lift_3sat, reduce_3sat};
use unitsys::{
    check_system, Assignment, Error, IlpInstance, IlpRow, SubsetSumInstance, ThreeSatInstance,
    UnitSystem, VarId, VarProvenance, VariableRegistry, WeightedEquation,
};

const SAMPLE_CNF: &str = "p cnf 5 4\n1 2 -3 0\n1 -3 4 0\n-1 4 5 0\n2 -3 -4 0\n";

fn subset(values: &[i64], target: i64) -> SubsetSumInstance {
    SubsetSumInstance::new(values.to_vec(), target).unwrap()
}

fn ilp(num_vars: usize, rows: &[(&[i64], i64)], bits: u32) -> IlpInstance {
    let rows = rows
        .iter()
        .map(|(c, b)| IlpRow {
            coeffs: c.to_vec(),
            rhs: *b,
        })
        .collect();
    IlpInstance::new(num_vars, rows, bits).unwrap()
}

fn solve(sys: &UnitSystem) -> SolveResult {
    solve_unit_system(sys, SolveLimits::default())
}

/// Extends an assignment of the original variables to copies and pins.
fn extend(sys: &UnitSystem, base: &[bool]) -> Assignment {
    let mut asg = Assignment::zeros(sys.num_vars());
    for (id, e) in sys.registry().iter() {
        let v = match e.provenance {
            VarProvenance::PinnedOne(_) => true,
            VarProvenance::Copy { parent, .. } => base[parent.0],
            _ => base[id.0],
        };
        asg.set(id, v);
    }
    asg
}

#[test]
fn worked_expansion_checks() {
    let mut reg = VariableRegistry::new();
    let f = reg.register(VarProvenance::BoolVar(1), "f").unwrap();
    let g = reg.register(VarProvenance::BoolVar(2), "g").unwrap();
    let h = reg.register(VarProvenance::BoolVar(3), "h").unwrap();
    let eq = WeightedEquation {
        lhs_terms: vec![(3, f), (2, g), (1, h)],
        rhs_const: 5,
        ..Default::default()
    };
    let sys = expand_to_unit(&[eq], reg).unwrap();
    // 6 ≠ 5
    assert!(!check_system(&sys, &extend(&sys, &[true, true, true])).unwrap());
    // 3 + 2 = 5
    assert!(check_system(&sys, &extend(&sys, &[true, true, false])).unwrap());
}

#[test]
fn sample_subset_sum_s2_is_sound_and_feasible() {
    // Exhaustive over all column-decomposition variables, factored by block: the left block
    // only involves selectors a, target bits and d carries; the right block
    // only selectors b, target bits and e carries.
    let inst = subset(&[1, 2, -3, -4], -2);
    let red = reduce_subset_sum(&inst).unwrap();
    let reg = &red.s2_registry;
    let n = reg.len();
    let theta = red.params.theta as usize;
    let (left, right) = red.s2.equations.split_at(theta + 1);
    let is = |v: VarId, f: fn(&VarProvenance) -> bool| f(&reg.provenance(v));
    let left_vars: Vec<VarId> = (0..n)
        .map(VarId)
        .filter(|&v| {
            is(v, |p| {
                matches!(
                    p,
                    VarProvenance::SelectorA(_)
                        | VarProvenance::SelectorB(_)
                        | VarProvenance::TargetBit { .. }
                        | VarProvenance::CarryLhs { .. }
                )
            })
        })
        .collect();
    let e_vars: Vec<VarId> = (0..n)
        .map(VarId)
        .filter(|&v| is(v, |p| matches!(p, VarProvenance::CarryRhs { .. })))
        .collect();
    assert_eq!(left_vars.len() + e_vars.len(), n);

    let y = [3u64, 4];
    let z = [1u64, 2];
    let mut solutions = 0;
    for bits in 0u64..1 << left_vars.len() {
        let mut asg = Assignment::zeros(n);
        for (i, &v) in left_vars.iter().enumerate() {
            asg.set(v, bits >> i & 1 == 1);
        }
        if !left.iter().all(|e| e.residual(&asg).unwrap() == 0) {
            continue;
        }
        for ebits in 0u64..1 << e_vars.len() {
            for (i, &v) in e_vars.iter().enumerate() {
                asg.set(v, ebits >> i & 1 == 1);
            }
            if right.iter().all(|e| e.residual(&asg).unwrap() == 0) {
                solutions += 1;
                let sel = |k: usize| asg.get(VarId(k)).unwrap() as u64;
                let lhs = sel(0) * y[0] + sel(1) * y[1];
                let rhs = sel(2) * z[0] + sel(3) * z[1] + 2;
                assert_eq!(lhs, rhs);
            }
        }
    }
    assert!(solutions > 0);
}

#[test]
fn subset_sum_examples() {
    let inst = subset(&[1, 2, -3, -4], -2);
    let red = reduce_subset_sum(&inst).unwrap();
    let SolveResult::Feasible(asg) = solve(&red.system) else {
        panic!("expected feasible");
    };
    let s = lift_subset_sum(&inst, &red.system, &asg).unwrap();
    assert_eq!(s.sum(), -2);

    let inst = subset(&[1, 2], -3);
    assert_eq!(
        solve(&reduce_subset_sum(&inst).unwrap().system),
        SolveResult::Infeasible
    );

    let inst = subset(&[1], 1);
    let red = reduce_subset_sum(&inst).unwrap();
    let asg = solve(&red.system).assignment().cloned().unwrap();
    assert_eq!(
        lift_subset_sum(&inst, &red.system, &asg).unwrap().values,
        vec![1]
    );
}

#[test]
fn zero_target_lifts_to_empty_subset() {
    let inst = subset(&[5, -7], 0);
    let red = reduce_subset_sum(&inst).unwrap();
    let asg = solve(&red.system).assignment().cloned().unwrap();
    let s = lift_subset_sum(&inst, &red.system, &asg).unwrap();
    assert!(s.values.is_empty());
}

#[test]
fn tampered_subset_assignment_is_refused() {
    let inst = subset(&[1, 2, -3, -4], -2);
    let red = reduce_subset_sum(&inst).unwrap();
    let mut asg = solve(&red.system).assignment().cloned().unwrap();
    let flip = VarId(0);
    asg.set(flip, !asg.get(flip).unwrap());
    assert!(matches!(
        lift_subset_sum(&inst, &red.system, &asg),
        Err(Error::LiftRefused(_))
    ));
}

#[test]
fn degenerate_subset_sum() {
    assert!(matches!(
        reduce_subset_sum(&subset(&[], 0)),
        Err(Error::DegenerateInstance { feasible: true })
    ));
    assert!(matches!(
        reduce_subset_sum(&subset(&[], 4)),
        Err(Error::DegenerateInstance { feasible: false })
    ));
}

#[test]
fn expansion_size_matches_s2_expansion() {
    let red = reduce_subset_sum(&subset(&[3, -1], 2)).unwrap();
    let (vars, eqs) = expansion_size(&red.s2.equations);
    assert_eq!(red.system.num_vars() - red.s2_num_vars(), vars);
    assert_eq!(red.system.num_equations() - red.s2.equations.len(), eqs);
}

#[test]
fn sample_3sat_end_to_end() {
    let inst = parse_dimacs(SAMPLE_CNF).unwrap();
    assert_eq!(parse_dimacs(&write_dimacs(&inst)).unwrap(), inst);
    let red = reduce_3sat(&inst).unwrap();
    let asg = solve(&red.system).assignment().cloned().unwrap();
    let model = lift_3sat(&inst, &red.system, &asg).unwrap();
    assert!(inst.is_satisfied_by(&model));
}

#[test]
fn single_clause_3sat() {
    let inst = ThreeSatInstance::from_signed(3, &[vec![1, 2, 3]]).unwrap();
    let red = reduce_3sat(&inst).unwrap();
    let asg = solve(&red.system).assignment().cloned().unwrap();
    assert!(inst.is_satisfied_by(&lift_3sat(&inst, &red.system, &asg).unwrap()));

    let inst = ThreeSatInstance::from_signed(3, &[vec![-1, -2, -3]]).unwrap();
    let red = reduce_3sat(&inst).unwrap();
    // lexicographic search sets b1..b3 = 0 first
    let asg = solve(&red.system).assignment().cloned().unwrap();
    assert_eq!(lift_3sat(&inst, &red.system, &asg).unwrap(), vec![false; 3]);
}

#[test]
fn unsatisfiable_3sat() {
    let clauses: Vec<Vec<i64>> = (0..8)
        .map(|p: i64| {
            (1..=3)
                .map(|v| if p >> (v - 1) & 1 == 1 { -v } else { v })
                .collect()
        })
        .collect();
    let inst = ThreeSatInstance::from_signed(3, &clauses).unwrap();
    assert_eq!(
        solve(&reduce_3sat(&inst).unwrap().system),
        SolveResult::Infeasible
    );
}

#[test]
fn ilp_examples() {
    let inst = ilp(2, &[(&[1, 1], 3)], 1);
    let red = reduce_ilp(&inst).unwrap();
    let asg = solve(&red.system).assignment().cloned().unwrap();
    let x = lift_ilp(&inst, &red.system, &asg).unwrap();
    assert_eq!(x[0] + x[1], 3);
    assert!(x.iter().all(|&v| (0..=3).contains(&v)));

    let inst = ilp(2, &[(&[1, 1], 9)], 1);
    assert_eq!(
        solve(&reduce_ilp(&inst).unwrap().system),
        SolveResult::Infeasible
    );

    let inst = ilp(1, &[(&[1], 0)], 2);
    let red = reduce_ilp(&inst).unwrap();
    let asg = solve(&red.system).assignment().cloned().unwrap();
    assert_eq!(lift_ilp(&inst, &red.system, &asg).unwrap(), vec![0]);

    let inst = ilp(1, &[(&[2], 1)], 2);
    assert_eq!(
        solve(&reduce_ilp(&inst).unwrap().system),
        SolveResult::Infeasible
    );
}

#[test]
fn ilp_lift_refuses_broken_carry() {
    let inst = ilp(2, &[(&[1, 1], 3)], 1);
    let red = reduce_ilp(&inst).unwrap();
    let mut asg = solve(&red.system).assignment().cloned().unwrap();
    let carry = red
        .system
        .registry()
        .iter()
        .find(|(_, e)| matches!(e.provenance, VarProvenance::CarryLhs { .. }))
        .unwrap()
        .0;
    asg.set(carry, !asg.get(carry).unwrap());
    assert!(matches!(
        lift_ilp(&inst, &red.system, &asg),
        Err(Error::LiftRefused(_))
    ));
}

#[test]
fn suggested_width_agrees_with_box_oracle() {
    for (n, rows) in [
        (2usize, vec![(vec![1i64, 1], 3i64)]),
        (1, vec![(vec![1], 100)]),
        (2, vec![(vec![2, 3], 7), (vec![1, -1], 1)]),
        (2, vec![(vec![2, 4], 7)]),
    ] {
        let rows: Vec<IlpRow> = rows
            .into_iter()
            .map(|(coeffs, rhs)| IlpRow { coeffs, rhs })
            .collect();
        let p = suggest_bit_width(n, &rows, DEFAULT_MAX_BIT_WIDTH);
        let inst = IlpInstance::new(n, rows, p).unwrap();
        let red = reduce_ilp(&inst).unwrap();
        let res = solve(&red.system);
        assert_eq!(
            res.verdict(),
            Some(brute_force_ilp(&inst).unwrap()),
            "{inst:?}"
        );
        if let SolveResult::Feasible(a) = res {
            assert!(inst.is_satisfied_by(&lift_ilp(&inst, &red.system, &a).unwrap()));
        }
    }
}

#[test]
fn larger_subset_sum_agrees() {
    for target in [6, 12] {
        let inst = subset(&[13, -7, 22, -9, 5, 31, -18], target);
        let red = reduce_subset_sum(&inst).unwrap();
        let res = solve(&red.system);
        assert_eq!(res.verdict(), Some(brute_force_subset_sum(&inst).unwrap()));
        if let SolveResult::Feasible(a) = res {
            assert_eq!(
                lift_subset_sum(&inst, &red.system, &a).unwrap().sum(),
                target
            );
        }
    }
}

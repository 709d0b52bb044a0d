//! Complete feasibility search over unit systems.
//!
//! Tie equations `u - v = 0` are merged into equivalence classes, which turns
//! the remaining equations into small pseudo-boolean equalities over class
//! representatives. Each equality is propagated with interval bounds (fixing
//! every variable whose other value would push 0 out of `[min, max]`) and a
//! gcd divisibility test. Branching is depth-first, 0 before 1.
//!
//! In deterministic mode classes are branched in order of their smallest
//! VarId, so the first solution found is the lexicographically smallest
//! satisfying assignment.

use crate::model::{check_system, Assignment, Sign, UnitSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    /// Branching decisions allowed before giving up.
    pub max_nodes: u64,
    pub deterministic: bool,
    /// Tie merging plus bounds propagation. When off, only fully assigned
    /// equations are checked.
    pub propagate: bool,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_nodes: 100_000_000,
            deterministic: true,
            propagate: true,
        }
    }
}

impl SolveLimits {
    pub fn with_max_nodes(max_nodes: u64) -> Self {
        SolveLimits {
            max_nodes: max_nodes.max(1),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Feasible(Assignment),
    Infeasible,
    /// Node budget hit; says nothing about feasibility.
    BudgetExceeded(u64),
}

impl SolveResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveResult::Feasible(_))
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            SolveResult::Feasible(a) => Some(a),
            _ => None,
        }
    }

    /// `Some(true)` / `Some(false)` for a definite verdict.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            SolveResult::Feasible(_) => Some(true),
            SolveResult::Infeasible => Some(false),
            SolveResult::BudgetExceeded(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub classes: usize,
    pub equations: usize,
}

const UNSET: i8 = -1;

struct PbEq {
    terms: Vec<(i64, usize)>,
    constant: i64,
}

struct Search {
    eqs: Vec<PbEq>,
    occurs: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<usize>,
    qhead: usize,
    propagate: bool,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Search {
    fn assign(&mut self, class: usize, v: bool) {
        debug_assert_eq!(self.value[class], UNSET);
        self.value[class] = v as i8;
        self.trail.push(class);
    }

    fn undo_to(&mut self, len: usize) {
        for &c in &self.trail[len..] {
            self.value[c] = UNSET;
        }
        self.trail.truncate(len);
        self.qhead = len;
    }

    /// Re-examines one equation; false on conflict.
    fn visit(&mut self, e: usize) -> bool {
        let eq = &self.eqs[e];
        let mut cur = eq.constant;
        let (mut lo_add, mut hi_add, mut g, mut open) = (0i64, 0i64, 0i64, 0usize);
        for &(c, cls) in &eq.terms {
            match self.value[cls] {
                1 => cur += c,
                0 => {}
                _ => {
                    open += 1;
                    if c > 0 {
                        hi_add += c;
                    } else {
                        lo_add += c;
                    }
                    g = gcd(g, c);
                }
            }
        }
        if open == 0 {
            return cur == 0;
        }
        if !self.propagate {
            return true;
        }
        let (lo, hi) = (cur + lo_add, cur + hi_add);
        if lo > 0 || hi < 0 || (g > 1 && cur % g != 0) {
            return false;
        }
        let mut forced = Vec::new();
        for &(c, cls) in &eq.terms {
            if self.value[cls] != UNSET {
                continue;
            }
            let (kill_one, kill_zero) = if c > 0 {
                (lo + c > 0, hi - c < 0)
            } else {
                (hi + c < 0, lo - c > 0)
            };
            match (kill_one, kill_zero) {
                (true, true) => return false,
                (true, false) => forced.push((cls, false)),
                (false, true) => forced.push((cls, true)),
                _ => {}
            }
        }
        for (cls, v) in forced {
            if self.value[cls] == UNSET {
                self.assign(cls, v);
            }
        }
        true
    }

    fn run_queue(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let cls = self.trail[self.qhead];
            self.qhead += 1;
            for k in 0..self.occurs[cls].len() {
                let e = self.occurs[cls][k];
                if !self.visit(e) {
                    return false;
                }
            }
        }
        true
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Maps each variable to a class index; classes are numbered by their
/// smallest member.
fn classes(sys: &UnitSystem, merge_ties: bool) -> (Vec<usize>, usize) {
    let n = sys.num_vars();
    let mut parent: Vec<usize> = (0..n).collect();
    if merge_ties {
        for eq in sys.equations() {
            if let [a, b] = eq.terms() {
                if eq.constant() == 0 && a.sign != b.sign {
                    let (ra, rb) = (find(&mut parent, a.var.0), find(&mut parent, b.var.0));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut root_class = vec![usize::MAX; n];
    let mut count = 0;
    for (v, slot) in class_of.iter_mut().enumerate() {
        let r = find(&mut parent, v);
        if root_class[r] == usize::MAX {
            root_class[r] = count;
            count += 1;
        }
        *slot = root_class[r];
    }
    (class_of, count)
}

pub fn solve_unit_system(sys: &UnitSystem, limits: SolveLimits) -> SolveResult {
    solve_with_stats(sys, limits).0
}

pub fn solve_with_stats(sys: &UnitSystem, limits: SolveLimits) -> (SolveResult, SolveStats) {
    let (class_of, n_classes) = classes(sys, limits.propagate);

    let mut coef = vec![0i64; n_classes];
    let mut eqs = Vec::with_capacity(sys.num_equations());
    for eq in sys.equations() {
        let mut touched = Vec::with_capacity(eq.terms().len());
        for t in eq.terms() {
            let c = class_of[t.var.0];
            if coef[c] == 0 {
                touched.push(c);
            }
            coef[c] += match t.sign {
                Sign::Plus => 1,
                Sign::Minus => -1,
            };
        }
        let terms: Vec<(i64, usize)> = touched
            .into_iter()
            .filter_map(|c| {
                let w = std::mem::take(&mut coef[c]);
                (w != 0).then_some((w, c))
            })
            .collect();
        if terms.is_empty() && eq.constant() == 0 {
            continue;
        }
        eqs.push(PbEq {
            terms,
            constant: eq.constant(),
        });
    }

    let mut occurs = vec![Vec::new(); n_classes];
    for (e, eq) in eqs.iter().enumerate() {
        for &(_, c) in &eq.terms {
            occurs[c].push(e);
        }
    }

    let order: Vec<usize> = if limits.deterministic {
        (0..n_classes).collect()
    } else {
        let mut o: Vec<usize> = (0..n_classes).collect();
        o.sort_by_key(|&c| std::cmp::Reverse(occurs[c].len()));
        o
    };

    let mut stats = SolveStats {
        nodes: 0,
        classes: n_classes,
        equations: eqs.len(),
    };
    let mut s = Search {
        eqs,
        occurs,
        value: vec![UNSET; n_classes],
        trail: Vec::new(),
        qhead: 0,
        propagate: limits.propagate,
    };

    if !(0..s.eqs.len()).all(|e| s.visit(e)) || !s.run_queue() {
        return (SolveResult::Infeasible, stats);
    }

    struct Decision {
        trail_len: usize,
        pos: usize,
        tried_one: bool,
    }
    let mut stack: Vec<Decision> = Vec::new();
    let mut cursor = 0;
    loop {
        while cursor < order.len() && s.value[order[cursor]] != UNSET {
            cursor += 1;
        }
        if cursor == order.len() {
            break;
        }
        if stats.nodes >= limits.max_nodes {
            return (SolveResult::BudgetExceeded(stats.nodes), stats);
        }
        stats.nodes += 1;
        stack.push(Decision {
            trail_len: s.trail.len(),
            pos: cursor,
            tried_one: false,
        });
        s.assign(order[cursor], false);
        let mut ok = s.run_queue();
        while !ok {
            let Some(d) = stack.pop() else {
                return (SolveResult::Infeasible, stats);
            };
            s.undo_to(d.trail_len);
            if d.tried_one {
                continue;
            }
            if stats.nodes >= limits.max_nodes {
                return (SolveResult::BudgetExceeded(stats.nodes), stats);
            }
            stats.nodes += 1;
            stack.push(Decision {
                tried_one: true,
                ..d
            });
            s.assign(order[d.pos], true);
            cursor = d.pos;
            ok = s.run_queue();
        }
    }

    let asg = Assignment::new(class_of.iter().map(|&c| s.value[c] == 1).collect());
    assert!(
        check_system(sys, &asg).unwrap_or(false),
        "solver produced an assignment that violates the system"
    );
    (SolveResult::Feasible(asg), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Term, UnitEquation, VarId, VarProvenance, VariableRegistry};

    fn system(n: usize, eqs: Vec<UnitEquation>) -> UnitSystem {
        let mut reg = VariableRegistry::new();
        for i in 0..n {
            reg.register(VarProvenance::BoolVar(i + 1), format!("v{i}"))
                .unwrap();
        }
        UnitSystem::new(reg, eqs).unwrap()
    }

    #[test]
    fn pinned_one() {
        let sys = system(1, vec![UnitEquation::pin_one(VarId(0))]);
        assert_eq!(
            solve_unit_system(&sys, SolveLimits::default()),
            SolveResult::Feasible(Assignment::new(vec![true]))
        );
    }

    #[test]
    fn sum_cannot_be_negative() {
        let eq = UnitEquation::new(vec![Term::plus(VarId(0)), Term::plus(VarId(1))], 1).unwrap();
        let sys = system(2, vec![eq]);
        assert_eq!(
            solve_unit_system(&sys, SolveLimits::default()),
            SolveResult::Infeasible
        );
    }

    #[test]
    fn empty_system_is_feasible() {
        let sys = UnitSystem::empty();
        assert_eq!(
            solve_unit_system(&sys, SolveLimits::default()),
            SolveResult::Feasible(Assignment::default())
        );
    }

    #[test]
    fn lexicographically_smallest() {
        // v0 + v1 + v2 - 1 = 0 → smallest is (0,0,1)
        let eq = UnitEquation::new(
            vec![
                Term::plus(VarId(0)),
                Term::plus(VarId(1)),
                Term::plus(VarId(2)),
            ],
            -1,
        )
        .unwrap();
        let sys = system(3, vec![eq]);
        for propagate in [true, false] {
            let limits = SolveLimits {
                propagate,
                ..Default::default()
            };
            assert_eq!(
                solve_unit_system(&sys, limits),
                SolveResult::Feasible(Assignment::new(vec![false, false, true]))
            );
        }
    }

    #[test]
    fn budget_is_reported() {
        // x0 + … + x9 = 5 without propagation needs more than one node
        let terms = (0..10).map(|i| Term::plus(VarId(i))).collect();
        let mut eqs = vec![UnitEquation::new(terms, 0).unwrap()];
        eqs.push(UnitEquation::pin_one(VarId(9)));
        let sys = system(10, eqs);
        let limits = SolveLimits {
            max_nodes: 3,
            deterministic: true,
            propagate: false,
        };
        assert_eq!(
            solve_unit_system(&sys, limits),
            SolveResult::BudgetExceeded(3)
        );
    }

    #[test]
    fn ties_are_merged() {
        // v1 = v0, v2 = v0, v1 + v2 - 1 = 0 → infeasible (2·v0 = 1)
        let eqs = vec![
            UnitEquation::tie(VarId(1), VarId(0)).unwrap(),
            UnitEquation::tie(VarId(2), VarId(0)).unwrap(),
            UnitEquation::new(vec![Term::plus(VarId(1)), Term::plus(VarId(2))], -1).unwrap(),
        ];
        let sys = system(3, eqs);
        let (res, stats) = solve_with_stats(&sys, SolveLimits::default());
        assert_eq!(res, SolveResult::Infeasible);
        assert_eq!(stats.classes, 1);
        assert_eq!(stats.nodes, 0, "gcd test refutes at the root");
    }
}

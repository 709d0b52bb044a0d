//! `unitsys` command-line front end.
//!
//! Exit codes: 0 success / feasible / agree, 1 infeasible, 2 bad input or
//! oracle size guard, 3 search budget exceeded, 4 disagreement.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use unitsys::dimacs::parse_dimacs;
use unitsys::format::{
    ilp_stats, render_eqs, subset_sum_stats, system_from_json, system_to_json, threesat_stats,
    IlpFile, Stats, SubsetSumFile,
};
use unitsys::ilp::{lift_ilp, reduce_ilp, suggest_bit_width, DEFAULT_MAX_BIT_WIDTH};
use unitsys::oracle::{brute_force_3sat, brute_force_ilp, brute_force_subset_sum};
use unitsys::solver::{solve_with_stats, SolveLimits, SolveResult};
use unitsys::subset_sum::{lift_subset_sum, reduce_subset_sum};
use unitsys::threesat::{lift_3sat, reduce_3sat};
use unitsys::{
    Assignment, Error, IlpInstance, SubsetSumInstance, ThreeSatInstance, UnitSystem, VarProvenance,
};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_DISAGREE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "unitsys",
    version,
    about = "Reduce SUBSET-SUM, 3-SAT and ILP to unit-coefficient binary systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an instance and write the unit system as JSON plus a `.eqs` rendering.
    Reduce(CommonArgs),
    /// Solve a unit system written by `reduce`.
    Solve(CommonArgs),
    /// Reduce, solve and lift, then compare against a brute-force oracle.
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Source problem; required for `reduce` and `verify`.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Input file. `verify` accepts several and checks them concurrently.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Output file; `reduce` writes to stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Search node budget.
    #[arg(long, default_value_t = SolveLimits::default().max_nodes)]
    max_nodes: u64,
    /// Branch in variable order (lexicographically smallest witness).
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    deterministic: bool,
    /// ILP bit width P; overrides the file's `bits`.
    #[arg(long)]
    bits: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    #[value(name = "subset-sum")]
    SubsetSum,
    #[value(name = "3sat")]
    ThreeSat,
    Ilp,
}

impl Kind {
    fn stats_name(self) -> &'static str {
        match self {
            Kind::SubsetSum => "subset-sum",
            Kind::ThreeSat => "3sat",
            Kind::Ilp => "ilp",
        }
    }
}

/// A command outcome: text for stdout, text for stderr, exit status.
#[derive(Default)]
struct Report {
    out: String,
    err: String,
    code: u8,
}

impl Report {
    fn fail(code: u8, msg: impl std::fmt::Display) -> Self {
        Report {
            err: format!("error: {msg}\n"),
            code,
            ..Default::default()
        }
    }

    fn emit(self) -> ExitCode {
        print!("{}", self.out);
        eprint!("{}", self.err);
        ExitCode::from(self.code)
    }
}

enum Instance {
    SubsetSum(SubsetSumInstance),
    ThreeSat(ThreeSatInstance),
    Ilp(IlpInstance),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match cli.command {
        Command::Reduce(a) => cmd_reduce(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
    .emit()
}

fn limits(a: &CommonArgs) -> SolveLimits {
    SolveLimits {
        max_nodes: a.max_nodes,
        deterministic: a.deterministic,
        ..SolveLimits::default()
    }
}

fn single_input(a: &CommonArgs) -> Result<&Path, Report> {
    match a.input.as_slice() {
        [p] => Ok(p),
        _ => Err(Report::fail(
            EXIT_INPUT,
            "this command takes exactly one --input",
        )),
    }
}

fn require_kind(a: &CommonArgs) -> Result<Kind, Report> {
    a.kind
        .ok_or_else(|| Report::fail(EXIT_INPUT, "--kind is required (subset-sum, 3sat or ilp)"))
}

fn read(path: &Path) -> Result<String, Report> {
    fs::read_to_string(path)
        .map_err(|e| Report::fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

/// Parses an instance file. ILP files without a width get one suggested and
/// a warning appended to `warn`.
fn load(kind: Kind, path: &Path, bits: Option<u32>, warn: &mut String) -> Result<Instance, Report> {
    let text = read(path)?;
    let bad = |e: Error| Report::fail(EXIT_INPUT, format!("{}: {e}", path.display()));
    Ok(match kind {
        Kind::SubsetSum => Instance::SubsetSum(SubsetSumFile::parse(&text).map_err(bad)?),
        Kind::ThreeSat => Instance::ThreeSat(parse_dimacs(&text).map_err(bad)?),
        Kind::Ilp => {
            let file = IlpFile::parse(&text).map_err(bad)?;
            let suggested = bits.or(file.bits).is_none();
            let p = bits.or(file.bits).unwrap_or_else(|| {
                suggest_bit_width(file.num_vars, &file.rows, DEFAULT_MAX_BIT_WIDTH)
            });
            let inst = file.into_instance(p).map_err(bad)?;
            if suggested {
                let _ = writeln!(warn, "no bit width given; using suggested P={p}");
                let _ = writeln!(
                    warn,
                    "warning: only solutions with every x_i <= {} are representable",
                    inst.box_max()
                );
            }
            Instance::Ilp(inst)
        }
    })
}

fn reduce(inst: &Instance) -> Result<(UnitSystem, Stats), Error> {
    Ok(match inst {
        Instance::SubsetSum(i) => {
            let red = reduce_subset_sum(i)?;
            let st = subset_sum_stats(i, &red);
            (red.system, st)
        }
        Instance::ThreeSat(i) => {
            let red = reduce_3sat(i)?;
            let st = threesat_stats(i, &red);
            (red.system, st)
        }
        Instance::Ilp(i) => {
            let red = reduce_ilp(i)?;
            let st = ilp_stats(i, &red);
            (red.system, st)
        }
    })
}

fn verdict_word(feasible: bool) -> &'static str {
    if feasible {
        "FEASIBLE"
    } else {
        "INFEASIBLE"
    }
}

fn stats_report(st: &Stats) -> String {
    let mut s = format!("{}\n", st.summary_line());
    for r in &st.rows {
        let _ = writeln!(s, "row {}: theta={} mu={}", r.row, r.theta, r.mu);
    }
    for c in &st.bound_checks {
        let _ = writeln!(
            s,
            "check {}: {} {} {} {}",
            c.name,
            c.actual,
            c.relation,
            c.bound,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    for n in &st.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn eqs_path(output: &Path) -> PathBuf {
    output.with_extension("eqs")
}

fn cmd_reduce(a: &CommonArgs) -> Report {
    match try_reduce(a) {
        Ok(r) | Err(r) => r,
    }
}

fn try_reduce(a: &CommonArgs) -> Result<Report, Report> {
    let kind = require_kind(a)?;
    let path = single_input(a)?;
    let mut rep = Report::default();
    let inst = load(kind, path, a.bits, &mut rep.err)?;
    let (sys, st) = match reduce(&inst) {
        Ok(v) => v,
        Err(Error::DegenerateInstance { feasible }) => {
            let _ = writeln!(
                rep.out,
                "empty set: {} (no system written)",
                verdict_word(feasible)
            );
            return Ok(rep);
        }
        Err(e) => return Err(Report::fail(EXIT_INPUT, e)),
    };
    let doc = system_to_json(&sys, Some(&st));
    let summary = stats_report(&st);
    match &a.output {
        Some(out) => {
            let write = |p: &Path, text: &str| {
                fs::write(p, text)
                    .map_err(|e| Report::fail(EXIT_INPUT, format!("{}: {e}", p.display())))
            };
            write(out, &doc)?;
            write(&eqs_path(out), &render_eqs(&sys))?;
            rep.out.push_str(&summary);
        }
        None => {
            rep.out.push_str(&doc);
            rep.err.push_str(&summary);
        }
    }
    Ok(rep)
}

/// Source-level reading of a satisfying assignment, from provenance alone.
fn lifted_line(sys: &UnitSystem, asg: &Assignment) -> Option<String> {
    let mut bools = BTreeMap::new();
    let mut ints: BTreeMap<usize, i64> = BTreeMap::new();
    let mut selected = Vec::new();
    for (id, e) in sys.registry().iter() {
        let v = asg.get(id).unwrap_or(false);
        match e.provenance {
            VarProvenance::BoolVar(i) => {
                bools.insert(i, v);
            }
            VarProvenance::IlpBit { var, bit } => {
                *ints.entry(var).or_default() += (v as i64) << bit;
            }
            VarProvenance::SelectorA(_) | VarProvenance::SelectorB(_) if v => {
                selected.push(e.name.clone());
            }
            _ => {}
        }
    }
    if !bools.is_empty() {
        let parts: Vec<String> = bools
            .iter()
            .map(|(i, v)| format!("x{i}={}", *v as u8))
            .collect();
        Some(format!("model: {}", parts.join(" ")))
    } else if !ints.is_empty() {
        let parts: Vec<String> = ints.iter().map(|(i, v)| format!("x{i}={v}")).collect();
        Some(format!("model: {}", parts.join(" ")))
    } else if sys.registry().iter().any(|(_, e)| {
        matches!(
            e.provenance,
            VarProvenance::SelectorA(_) | VarProvenance::SelectorB(_)
        )
    }) {
        Some(format!("selected: {}", selected.join(" ")))
    } else {
        None
    }
}

/// Names of the variables set to 1, in id order.
fn true_names(sys: &UnitSystem, asg: &Assignment) -> String {
    let names: Vec<&str> = sys
        .registry()
        .iter()
        .filter(|(id, _)| asg.get(*id) == Some(true))
        .map(|(_, e)| e.name.as_str())
        .collect();
    if names.is_empty() {
        "(all zero)".into()
    } else {
        names.join(" ")
    }
}

fn cmd_solve(a: &CommonArgs) -> Report {
    match try_solve(a) {
        Ok(r) | Err(r) => r,
    }
}

fn try_solve(a: &CommonArgs) -> Result<Report, Report> {
    let path = single_input(a)?;
    let (sys, st) = system_from_json(&read(path)?)
        .map_err(|e| Report::fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    if let (Some(k), Some(st)) = (a.kind, &st) {
        if k.stats_name() != st.kind {
            return Err(Report::fail(
                EXIT_INPUT,
                format!(
                    "--kind {} does not match system kind {}",
                    k.stats_name(),
                    st.kind
                ),
            ));
        }
    }
    let (res, stats) = solve_with_stats(&sys, limits(a));
    let mut rep = Report::default();
    let mut record = serde_json::Map::new();
    match &res {
        SolveResult::Feasible(asg) => {
            let _ = writeln!(rep.out, "FEASIBLE");
            let _ = writeln!(rep.out, "ones: {}", true_names(&sys, asg));
            if let Some(line) = lifted_line(&sys, asg) {
                let _ = writeln!(rep.out, "{line}");
            }
            record.insert("verdict".into(), "FEASIBLE".into());
            record.insert(
                "assignment".into(),
                asg.values()
                    .iter()
                    .map(|&b| b as u8)
                    .collect::<Vec<_>>()
                    .into(),
            );
        }
        SolveResult::Infeasible => {
            let _ = writeln!(rep.out, "INFEASIBLE");
            rep.code = EXIT_INFEASIBLE;
            record.insert("verdict".into(), "INFEASIBLE".into());
        }
        SolveResult::BudgetExceeded(n) => {
            let _ = writeln!(rep.out, "BUDGET-EXCEEDED after {n} nodes");
            rep.code = EXIT_BUDGET;
            record.insert("verdict".into(), "BUDGET-EXCEEDED".into());
        }
    }
    let _ = writeln!(rep.err, "nodes={} classes={}", stats.nodes, stats.classes);
    if let Some(out) = &a.output {
        let text = serde_json::to_string(&record).expect("record serializes") + "\n";
        fs::write(out, text)
            .map_err(|e| Report::fail(EXIT_INPUT, format!("{}: {e}", out.display())))?;
    }
    Ok(rep)
}

fn cmd_verify(a: &CommonArgs) -> Report {
    let kind = match require_kind(a) {
        Ok(k) => k,
        Err(r) => return r,
    };
    let reports: Vec<Report> = std::thread::scope(|s| {
        let handles: Vec<_> = a
            .input
            .iter()
            .map(|p| s.spawn(move || verify_one(kind, p, a)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verify thread"))
            .collect()
    });
    let multi = reports.len() > 1;
    let mut all = Report::default();
    for (p, r) in a.input.iter().zip(reports) {
        if multi {
            let _ = writeln!(all.out, "== {}", p.display());
        }
        all.out.push_str(&r.out);
        all.err.push_str(&r.err);
        all.code = worst(all.code, r.code);
    }
    if let Some(out) = &a.output {
        if let Err(e) = fs::write(out, &all.out) {
            return Report::fail(EXIT_INPUT, format!("{}: {e}", out.display()));
        }
    }
    all
}

/// Disagreement dominates, then budget, then input errors.
fn worst(a: u8, b: u8) -> u8 {
    let rank = |c: u8| match c {
        EXIT_DISAGREE => 3,
        EXIT_BUDGET => 2,
        EXIT_INPUT => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn verify_one(kind: Kind, path: &Path, a: &CommonArgs) -> Report {
    match try_verify(kind, path, a) {
        Ok(r) | Err(r) => r,
    }
}

fn try_verify(kind: Kind, path: &Path, a: &CommonArgs) -> Result<Report, Report> {
    let mut rep = Report::default();
    let inst = load(kind, path, a.bits, &mut rep.err)?;
    let oracle = match &inst {
        Instance::SubsetSum(i) => brute_force_subset_sum(i),
        Instance::ThreeSat(i) => brute_force_3sat(i),
        Instance::Ilp(i) => brute_force_ilp(i),
    }
    .map_err(|e| Report::fail(EXIT_INPUT, format!("oracle: {e}")))?;

    let (reduced, witness) = match reduce(&inst) {
        Err(Error::DegenerateInstance { feasible }) => {
            (feasible, Some("empty set, decided directly".into()))
        }
        Err(e) => return Err(Report::fail(EXIT_INPUT, e)),
        Ok((sys, _)) => match solve_with_stats(&sys, limits(a)).0 {
            SolveResult::BudgetExceeded(n) => {
                let _ = writeln!(
                    rep.out,
                    "BUDGET-EXCEEDED after {n} nodes; oracle={}",
                    verdict_word(oracle)
                );
                rep.code = EXIT_BUDGET;
                return Ok(rep);
            }
            SolveResult::Infeasible => (false, None),
            SolveResult::Feasible(asg) => match lift_and_check(&inst, &sys, &asg) {
                Ok(w) => (true, Some(w)),
                Err(e) => {
                    let _ = writeln!(
                        rep.out,
                        "DISAGREE reduction=FEASIBLE oracle={} (lifted witness rejected: {e})",
                        verdict_word(oracle)
                    );
                    rep.code = EXIT_DISAGREE;
                    return Ok(rep);
                }
            },
        },
    };
    let agree = reduced == oracle;
    let _ = writeln!(
        rep.out,
        "{} reduction={} oracle={}",
        if agree { "AGREE" } else { "DISAGREE" },
        verdict_word(reduced),
        verdict_word(oracle)
    );
    if let Some(w) = witness {
        let _ = writeln!(rep.out, "witness: {w}");
    }
    if !agree {
        rep.code = EXIT_DISAGREE;
    }
    Ok(rep)
}

/// Lifts the assignment and re-checks the witness against the source.
fn lift_and_check(inst: &Instance, sys: &UnitSystem, asg: &Assignment) -> Result<String, Error> {
    let rejected =
        |what: &str| Error::LiftRefused(format!("{what} does not satisfy the source instance"));
    match inst {
        Instance::SubsetSum(i) => {
            let s = lift_subset_sum(i, sys, asg)?;
            if s.sum() != i.target() {
                return Err(rejected("subset"));
            }
            let vals: Vec<String> = s.values.iter().map(i64::to_string).collect();
            Ok(format!(
                "subset {{{}}} sums to {}",
                vals.join(", "),
                s.sum()
            ))
        }
        Instance::ThreeSat(i) => {
            let m = lift_3sat(i, sys, asg)?;
            if !i.is_satisfied_by(&m) {
                return Err(rejected("model"));
            }
            let parts: Vec<String> = m
                .iter()
                .enumerate()
                .map(|(k, v)| format!("x{}={}", k + 1, *v as u8))
                .collect();
            Ok(parts.join(" "))
        }
        Instance::Ilp(i) => {
            let x = lift_ilp(i, sys, asg)?;
            if !i.is_satisfied_by(&x) {
                return Err(rejected("vector"));
            }
            let parts: Vec<String> = x
                .iter()
                .enumerate()
                .map(|(k, v)| format!("x{}={v}", k + 1))
                .collect();
            Ok(parts.join(" "))
        }
    }
}

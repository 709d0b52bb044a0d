//! DIMACS CNF reading and writing, restricted to 3-literal clauses.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::ThreeSatInstance;

/// Parses `p cnf N K` followed by `K` zero-terminated clauses.
///
/// Comment lines start with `c`. Clauses may span lines. A `%` line ends
/// the clause section (SATLIB convention).
pub fn parse_dimacs(text: &str) -> Result<ThreeSatInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::Dimacs {
                    line: line_no,
                    msg: "second problem line".into(),
                });
            }
            header = Some(parse_header(trimmed, line_no)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::Dimacs {
                line: line_no,
                msg: "clause before `p cnf` header".into(),
            });
        };
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| Error::Dimacs {
                line: line_no,
                msg: format!("invalid literal `{tok}`"),
            })?;
            if lit == 0 {
                let clause = std::mem::take(&mut current);
                if clause.len() != 3 {
                    return Err(Error::Arity {
                        clause: clauses.len() + 1,
                        found: clause.len(),
                    });
                }
                clauses.push(clause);
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::LiteralRange {
                        clause: clauses.len() + 1,
                        literal: lit,
                        num_vars,
                    });
                }
                current.push(lit);
            }
        }
    }

    let Some((num_vars, num_clauses)) = header else {
        return Err(Error::Dimacs {
            line: last_line,
            msg: "missing `p cnf` header".into(),
        });
    };
    if !current.is_empty() {
        return Err(Error::Dimacs {
            line: last_line,
            msg: "last clause is not terminated by 0".into(),
        });
    }
    if clauses.len() != num_clauses {
        return Err(Error::Dimacs {
            line: last_line,
            msg: format!(
                "header declares {num_clauses} clauses, found {}",
                clauses.len()
            ),
        });
    }
    ThreeSatInstance::from_signed(num_vars, &clauses)
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let bad = |msg: &str| Error::Dimacs {
        line: line_no,
        msg: msg.to_string(),
    };
    let parts: Vec<&str> = line.split_whitespace().collect();
    match parts.as_slice() {
        ["p", "cnf", n, k] => {
            let n = n.parse().map_err(|_| bad("invalid variable count"))?;
            let k = k.parse().map_err(|_| bad("invalid clause count"))?;
            Ok((n, k))
        }
        _ => Err(bad("expected `p cnf <vars> <clauses>`")),
    }
}

pub fn write_dimacs(inst: &ThreeSatInstance) -> String {
    let mut out = format!("p cnf {} {}\n", inst.num_vars(), inst.clauses().len());
    for clause in inst.clauses() {
        for lit in clause {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

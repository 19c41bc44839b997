use std::fmt::Write as _;

use crate::encode::{CnfEncoding, VarMap};
use crate::error::{Error, Result};

/// DIMACS text with the variable catalog in the comment header.
pub fn to_dimacs(c: &CnfEncoding) -> String {
    let v = &c.vars;
    let mut out = String::new();
    writeln!(
        out,
        "c colors {} labels {} outputs {} nodes {} base {}",
        v.k, v.labels, v.outputs, v.nodes, v.base_states
    )
    .unwrap();
    for n in 0..v.nodes {
        for i in 0..v.k {
            writeln!(out, "c x {n} {i} {}", v.x(n, i)).unwrap();
        }
    }
    for l in 0..v.labels {
        for p in 0..v.k {
            for q in 0..v.k {
                writeln!(out, "c y {l} {p} {q} {}", v.y(l, p, q)).unwrap();
            }
        }
    }
    for i in 0..v.k {
        for s in 0..v.outputs {
            writeln!(out, "c o {i} {s} {}", v.o(i, s)).unwrap();
        }
    }
    for p in 0..v.k {
        for t in 0..v.base_states {
            writeln!(out, "c b {p} {t} {}", v.b(p, t)).unwrap();
        }
    }
    writeln!(out, "p cnf {} {}", c.num_vars, c.clauses.len()).unwrap();
    for clause in &c.clauses {
        for l in clause {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

fn nums<const N: usize>(words: &[&str], line: usize) -> Result<[i64; N]> {
    if words.len() != N {
        return Err(Error::Format { what: "DIMACS", line, msg: format!("expected {N} numbers") });
    }
    let mut out = [0; N];
    for (o, w) in out.iter_mut().zip(words) {
        *o = w
            .parse()
            .map_err(|_| Error::Format { what: "DIMACS", line, msg: format!("bad number `{w}`") })?;
    }
    Ok(out)
}

/// Parses [`to_dimacs`] output.
pub fn from_dimacs(text: &str) -> Result<CnfEncoding> {
    let err = |line: usize, msg: &str| Error::Format { what: "DIMACS", line, msg: msg.into() };
    let mut vars: Option<VarMap> = None;
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let words: Vec<&str> = raw.split_whitespace().collect();
        match words.first() {
            None => continue,
            Some(&"c") => {
                let Some(&kind) = words.get(1) else { continue };
                if kind == "colors" {
                    let w: Vec<&str> = words.iter().skip(2).step_by(2).copied().collect();
                    let [k, labels, outputs, nodes, base] = nums::<5>(&w, line)?;
                    let (k, labels, outputs, nodes, base) =
                        (k as usize, labels as usize, outputs as usize, nodes as usize, base as usize);
                    vars = Some(VarMap {
                        nodes,
                        k,
                        labels,
                        outputs,
                        base_states: base,
                        xs: vec![0; nodes * k],
                        ys: vec![0; labels * k * k],
                        os: vec![0; k * outputs],
                        bs: vec![0; k * base],
                    });
                    continue;
                }
                let Some(v) = vars.as_mut() else { continue };
                let slot = match kind {
                    "x" => {
                        let [n, c, var] = nums::<3>(&words[2..], line)?;
                        v.xs.get_mut(n as usize * v.k + c as usize).map(|s| (s, var))
                    }
                    "y" => {
                        let [l, p, q, var] = nums::<4>(&words[2..], line)?;
                        v.ys.get_mut((l as usize * v.k + p as usize) * v.k + q as usize).map(|s| (s, var))
                    }
                    "o" => {
                        let [c, s, var] = nums::<3>(&words[2..], line)?;
                        v.os.get_mut(c as usize * v.outputs + s as usize).map(|s| (s, var))
                    }
                    "b" => {
                        let [c, t, var] = nums::<3>(&words[2..], line)?;
                        v.bs.get_mut(c as usize * v.base_states + t as usize).map(|s| (s, var))
                    }
                    _ => continue,
                };
                let (s, var) = slot.ok_or_else(|| err(line, "catalog index out of range"))?;
                *s = var as i32;
            }
            Some(&"p") => {
                let [nv, nc] = nums::<2>(&words[2..], line)?;
                header = Some((nv as u32, nc as usize));
            }
            Some(_) => {
                if header.is_none() {
                    return Err(err(line, "clause before `p cnf` line"));
                }
                for w in words {
                    let l: i32 = w.parse().map_err(|_| err(line, "bad literal"))?;
                    if l == 0 {
                        clauses.push(std::mem::take(&mut current));
                    } else {
                        current.push(l);
                    }
                }
            }
        }
    }
    let (num_vars, nc) = header.ok_or_else(|| err(0, "missing `p cnf` line"))?;
    if !current.is_empty() || clauses.len() != nc {
        return Err(err(0, "clause count does not match header"));
    }
    let vars = vars.ok_or_else(|| err(0, "missing variable catalog"))?;
    Ok(CnfEncoding { vars, num_vars, clauses })
}

/// Plain DIMACS of `clauses`, without catalog.
pub fn plain_dimacs(num_vars: u32, clauses: &[Vec<i32>]) -> String {
    let mut out = format!("p cnf {num_vars} {}\n", clauses.len());
    for clause in clauses {
        for l in clause {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

use std::io::Write as _;
use std::path::PathBuf;
use std::process::Command;

use ostdigits::automata::{Alphabet, Dfao, NONE};

use crate::dimacs::to_dimacs;
use crate::encode::{CnfEncoding, VarMap};
use crate::error::{Error, Result};

/// Largest instance the built-in solver accepts.
pub const DPLL_MAX_VARS: u32 = 2000;

/// Which SAT solver decides an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverKind {
    /// CaDiCaL, linked in-process.
    Cadical,
    /// Built-in DPLL for small instances.
    Dpll,
    /// A DIMACS solver executable, called as `path [args] instance.cnf`, that
    /// reports `s SATISFIABLE` / `v ...` lines.
    External { path: PathBuf, args: Vec<String> },
}

/// Model values indexed by variable (index 0 unused).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Vec<bool>),
    Unsat,
}

pub fn solve(c: &CnfEncoding, solver: &SolverKind) -> Result<Verdict> {
    match solver {
        SolverKind::Cadical => {
            let mut s = Incremental::new(c);
            s.solve()
        }
        SolverKind::Dpll => solve_dpll(c.num_vars, &c.clauses),
        SolverKind::External { path, args } => solve_external(c, &[], path, args),
    }
}

fn solve_dpll(num_vars: u32, clauses: &[Vec<i32>]) -> Result<Verdict> {
    if num_vars > DPLL_MAX_VARS {
        return Err(Error::Solver {
            msg: format!("built-in solver takes at most {DPLL_MAX_VARS} variables, got {num_vars}"),
            instance: None,
        });
    }
    Ok(match Dpll::new(num_vars, clauses).search() {
        Some(model) => Verdict::Sat(model),
        None => Verdict::Unsat,
    })
}

fn solve_external(c: &CnfEncoding, extra: &[Vec<i32>], path: &PathBuf, args: &[String]) -> Result<Verdict> {
    let mut file = tempfile::Builder::new().prefix("ostdigits-").suffix(".cnf").tempfile()?;
    let mut text = to_dimacs(c);
    if !extra.is_empty() {
        let mut all = c.clone();
        all.clauses.extend(extra.iter().cloned());
        text = to_dimacs(&all);
    }
    file.write_all(text.as_bytes())?;
    file.flush()?;
    let instance = file.into_temp_path();
    let fail = |msg: String, instance: tempfile::TempPath| -> Error {
        let kept = instance.keep().ok();
        Error::Solver { msg, instance: kept }
    };
    let out = match Command::new(path).args(args).arg(&*instance).output() {
        Ok(out) => out,
        Err(e) => return Err(fail(format!("cannot run {}: {e}", path.display()), instance)),
    };
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut status = None;
    let mut model = vec![false; c.num_vars as usize + 1];
    for line in stdout.lines() {
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim().to_string());
        } else if let Some(v) = line.strip_prefix("v ") {
            for w in v.split_whitespace() {
                let Ok(l) = w.parse::<i64>() else {
                    return Err(fail(format!("bad model literal `{w}`"), instance));
                };
                if l > 0 && (l as usize) < model.len() {
                    model[l as usize] = true;
                }
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => Ok(Verdict::Sat(model)),
        Some("UNSATISFIABLE") => Ok(Verdict::Unsat),
        _ => Err(fail(
            format!("no verdict from {} (exit status {})", path.display(), out.status),
            instance,
        )),
    }
}

/// CaDiCaL instance that accepts blocking clauses between calls.
pub(crate) struct Incremental {
    solver: cadical::Solver,
    num_vars: u32,
}

impl Incremental {
    pub(crate) fn new(c: &CnfEncoding) -> Self {
        let mut solver: cadical::Solver = cadical::Solver::new();
        for clause in &c.clauses {
            solver.add_clause(clause.iter().copied());
        }
        Incremental { solver, num_vars: c.num_vars }
    }

    /// Clauses may introduce new variables.
    pub(crate) fn add(&mut self, clause: &[i32]) {
        self.num_vars = clause.iter().map(|l| l.unsigned_abs()).fold(self.num_vars, u32::max);
        self.solver.add_clause(clause.iter().copied());
    }

    pub(crate) fn solve(&mut self) -> Result<Verdict> {
        match self.solver.solve() {
            Some(true) => {
                let mut model = vec![false; self.num_vars as usize + 1];
                for (v, m) in model.iter_mut().enumerate().skip(1) {
                    *m = self.solver.value(v as i32) == Some(true);
                }
                Ok(Verdict::Sat(model))
            }
            Some(false) => Ok(Verdict::Unsat),
            None => Err(Error::Solver { msg: "CaDiCaL gave no verdict".into(), instance: None }),
        }
    }
}

fn holds(model: &[bool], lit: i32) -> bool {
    model[lit.unsigned_abs() as usize] == (lit > 0)
}

/// Reads the transitions from `y` and the outputs from `o`; color 0 is the
/// start state.
pub fn decode_model(c: &CnfEncoding, model: &[bool]) -> Dfao {
    let v = &c.vars;
    let mut delta = vec![NONE; v.k * v.labels];
    for p in 0..v.k {
        for l in 0..v.labels {
            if let Some(q) = (0..v.k).find(|&q| holds(model, v.y(l, p, q))) {
                delta[p * v.labels + l] = q as u32;
            }
        }
    }
    let outputs = (0..v.k)
        .map(|i| (0..v.outputs).find(|&s| holds(model, v.o(i, s))).map(|s| s as u32))
        .collect();
    Dfao::new(Alphabet::scalar(v.labels as u32), 0, delta, outputs).expect("decoded table is well formed")
}

/// Which variables a blocking clause ranges over, i.e. when two solutions
/// count as different candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Granularity {
    /// Transitions only.
    #[default]
    Transitions,
    /// Transitions and outputs.
    Automaton,
    /// Transitions, outputs and the base-state assignment.
    WithBase,
}

/// Builds clauses excluding one solution at a given granularity.
pub(crate) struct Blocker {
    groups: Vec<Vec<i32>>,
}

impl Blocker {
    pub(crate) fn new(v: &VarMap, granularity: Granularity) -> Self {
        let mut groups: Vec<Vec<i32>> = Vec::new();
        for l in 0..v.labels {
            for p in 0..v.k {
                groups.push((0..v.k).map(|q| v.y(l, p, q)).collect());
            }
        }
        if granularity != Granularity::Transitions {
            groups.extend(v.os.chunks(v.outputs.max(1)).map(<[i32]>::to_vec));
        }
        if granularity == Granularity::WithBase && v.base_states > 0 {
            groups.extend(v.bs.chunks(v.base_states).map(<[i32]>::to_vec));
        }
        Blocker { groups }
    }

    /// Every group is at-most-one, so a solution differs from `model` exactly
    /// when some group loses its true literal or an empty group gains one.
    /// This keeps blocking clauses short.
    pub(crate) fn clause(&self, model: &[bool]) -> Vec<i32> {
        let mut clause = Vec::new();
        for g in &self.groups {
            match g.iter().find(|&&l| holds(model, l)) {
                Some(&l) => clause.push(-l),
                None => clause.extend_from_slice(g),
            }
        }
        clause
    }
}

/// All solutions, distinct at the chosen granularity. Stops after `limit`
/// candidates; the flag reports whether the enumeration ran to UNSAT.
pub fn enumerate_all(
    c: &CnfEncoding,
    solver: &SolverKind,
    granularity: Granularity,
    limit: usize,
) -> Result<(Vec<Dfao>, bool)> {
    let blocker = Blocker::new(&c.vars, granularity);
    let blocking = |model: &[bool]| blocker.clause(model);
    let mut found = Vec::new();
    match solver {
        SolverKind::Cadical => {
            let mut s = Incremental::new(c);
            while found.len() < limit {
                match s.solve()? {
                    Verdict::Unsat => return Ok((found, true)),
                    Verdict::Sat(model) => {
                        found.push(decode_model(c, &model));
                        s.add(&blocking(&model));
                    }
                }
            }
        }
        _ => {
            let mut extra: Vec<Vec<i32>> = Vec::new();
            while found.len() < limit {
                let verdict = match solver {
                    SolverKind::Dpll => {
                        let mut all = c.clauses.clone();
                        all.extend(extra.iter().cloned());
                        solve_dpll(c.num_vars, &all)?
                    }
                    SolverKind::External { path, args } => solve_external(c, &extra, path, args)?,
                    SolverKind::Cadical => unreachable!(),
                };
                match verdict {
                    Verdict::Unsat => return Ok((found, true)),
                    Verdict::Sat(model) => {
                        found.push(decode_model(c, &model));
                        extra.push(blocking(&model));
                    }
                }
            }
        }
    }
    Ok((found, false))
}

/// Chronological backtracking with two watched literals.
struct Dpll {
    clauses: Vec<Vec<i32>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<i32>,
    head: usize,
    units: Vec<i32>,
    empty: bool,
}

fn widx(l: i32) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + (l < 0) as usize
}

impl Dpll {
    fn new(num_vars: u32, clauses: &[Vec<i32>]) -> Self {
        let mut d = Dpll {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars as usize],
            value: vec![0; num_vars as usize + 1],
            trail: Vec::new(),
            head: 0,
            units: Vec::new(),
            empty: false,
        };
        for c in clauses {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|l| c.contains(&-l)) {
                continue;
            }
            match c.len() {
                0 => d.empty = true,
                1 => d.units.push(c[0]),
                _ => {
                    let id = d.clauses.len();
                    d.watches[widx(c[0])].push(id);
                    d.watches[widx(c[1])].push(id);
                    d.clauses.push(c);
                }
            }
        }
        d
    }

    fn val(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    fn undo(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.head = self.head.min(len);
    }

    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = -self.trail[self.head];
            self.head += 1;
            let mut ws = std::mem::take(&mut self.watches[widx(falsified)]);
            let mut i = 0;
            let mut ok = true;
            while i < ws.len() {
                let id = ws[i];
                let c = &mut self.clauses[id];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                let first_val = {
                    let v = self.value[first.unsigned_abs() as usize];
                    if first < 0 {
                        -v
                    } else {
                        v
                    }
                };
                if first_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for j in 2..c.len() {
                    let l = c[j];
                    let v = self.value[l.unsigned_abs() as usize];
                    let lv = if l < 0 { -v } else { v };
                    if lv != -1 {
                        c.swap(1, j);
                        let nl = c[1];
                        self.watches[widx(nl)].push(id);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if first_val == -1 {
                    ok = false;
                    break;
                }
                self.assign(first);
                i += 1;
            }
            let slot = &mut self.watches[widx(falsified)];
            ws.append(slot);
            *slot = ws;
            if !ok {
                return false;
            }
        }
        true
    }

    fn search(mut self) -> Option<Vec<bool>> {
        if self.empty {
            return None;
        }
        for l in std::mem::take(&mut self.units) {
            match self.val(l) {
                -1 => return None,
                0 => self.assign(l),
                _ => {}
            }
        }
        let n = self.value.len() - 1;
        let mut levels: Vec<(usize, i32, bool)> = Vec::new();
        let mut next = 1;
        loop {
            if !self.propagate() {
                loop {
                    let (pos, dec, flipped) = levels.pop()?;
                    self.undo(pos);
                    next = next.min(dec.unsigned_abs() as usize);
                    if !flipped {
                        levels.push((pos, -dec, true));
                        self.assign(-dec);
                        break;
                    }
                }
                continue;
            }
            while next <= n && self.value[next] != 0 {
                next += 1;
            }
            if next > n {
                return Some(self.value.iter().map(|&v| v == 1).collect());
            }
            let dec = -(next as i32);
            levels.push((self.trail.len(), dec, false));
            self.assign(dec);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute(n: u32, clauses: &[Vec<i32>]) -> bool {
        (0u32..1 << n).any(|m| {
            clauses.iter().all(|c| c.iter().any(|&l| ((m >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0)))
        })
    }

    fn satisfies(model: &[bool], clauses: &[Vec<i32>]) -> bool {
        clauses.iter().all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize] == (l > 0)))
    }

    #[test]
    fn dpll_agrees_with_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.gen_range(1..=8u32);
            let m = rng.gen_range(0..=30);
            let clauses: Vec<Vec<i32>> = (0..m)
                .map(|_| {
                    let len = rng.gen_range(1..=3);
                    (0..len)
                        .map(|_| {
                            let v = rng.gen_range(1..=n) as i32;
                            if rng.gen_bool(0.5) {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let expect = brute(n, &clauses);
            match solve_dpll(n, &clauses).unwrap() {
                Verdict::Sat(model) => {
                    assert!(expect);
                    assert!(satisfies(&model, &clauses));
                }
                Verdict::Unsat => assert!(!expect, "{clauses:?}"),
            }
        }
    }

    #[test]
    fn one_clause_instance_is_sat() {
        assert!(matches!(solve_dpll(1, &[vec![1]]).unwrap(), Verdict::Sat(m) if m[1]));
        assert_eq!(solve_dpll(1, &[vec![1], vec![-1]]).unwrap(), Verdict::Unsat);
    }

    #[test]
    fn dpll_refuses_large_instances() {
        assert!(solve_dpll(DPLL_MAX_VARS + 1, &[]).is_err());
    }
}

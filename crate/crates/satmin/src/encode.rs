use ostdigits::automata::Dfa;
use ostdigits::numeration::{NumerationSystem, SystemKind};
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::apta::{propagate_conflicts, Apta, ConsistencyGraph};
use crate::error::{Error, Result};

/// How the digit rules of the numeration system restrict transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OstrowskiConstraints {
    None,
    /// Period `[d1]`: no self-loop on `d1`, and a `d1`-successor only keeps
    /// its `0` edge.
    Metallic { d1: u32 },
    /// Every color is tied to one state of the minimal validity DFA and may
    /// only copy that state's transitions. `self_loops` adds the rule that the
    /// start state loops only on `0` and no other state has a self-loop.
    BaseStates { base: Dfa, self_loops: bool },
}

impl OstrowskiConstraints {
    /// Metallic constraints for one-term periods, base-state constraints
    /// otherwise.
    pub fn for_system(sys: &NumerationSystem) -> Self {
        match sys.kind() {
            SystemKind::Fibonacci => OstrowskiConstraints::Metallic { d1: 1 },
            SystemKind::Pell => OstrowskiConstraints::Metallic { d1: 2 },
            SystemKind::Ostrowski(p) if p.len() == 1 => OstrowskiConstraints::Metallic { d1: p[0] },
            SystemKind::Ostrowski(_) => {
                OstrowskiConstraints::BaseStates { base: sys.validity_dfa(), self_loops: true }
            }
        }
    }

    fn base_states(&self) -> usize {
        match self {
            OstrowskiConstraints::BaseStates { base, .. } => base.num_states(),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Breadth-first symmetry breaking on the color numbering.
    pub symmetry_breaking: bool,
    /// Require every color to carry an output, not just at most one.
    pub total_outputs: bool,
    /// Add the conflicts implied by determinism before encoding.
    pub propagate_conflicts: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { symmetry_breaking: true, total_outputs: false, propagate_conflicts: true }
    }
}

/// Variable catalog: DIMACS indices of `x_{v,i}`, `y_{l,p,q}`, `o_{i,s}` and
/// `b_{p,t}`, row-major in the index order shown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    pub nodes: usize,
    pub k: usize,
    pub labels: usize,
    pub outputs: usize,
    pub base_states: usize,
    pub xs: Vec<i32>,
    pub ys: Vec<i32>,
    pub os: Vec<i32>,
    pub bs: Vec<i32>,
}

impl VarMap {
    pub fn x(&self, v: usize, i: usize) -> i32 {
        self.xs[v * self.k + i]
    }

    pub fn y(&self, l: usize, p: usize, q: usize) -> i32 {
        self.ys[(l * self.k + p) * self.k + q]
    }

    pub fn o(&self, i: usize, s: usize) -> i32 {
        self.os[i * self.outputs + s]
    }

    pub fn b(&self, p: usize, t: usize) -> i32 {
        self.bs[p * self.base_states + t]
    }
}

/// A CNF instance together with its variable catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfEncoding {
    pub vars: VarMap,
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfEncoding {
    pub fn k(&self) -> usize {
        self.vars.k
    }

    /// The same instance under a seeded renaming of variables and reordering
    /// of clauses and literals.
    pub fn permuted(&self, seed: u64) -> CnfEncoding {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<i32> = (1..=self.num_vars as i32).collect();
        perm.shuffle(&mut rng);
        let map = |v: i32| perm[(v.unsigned_abs() - 1) as usize] * v.signum();
        let mut vars = self.vars.clone();
        for list in [&mut vars.xs, &mut vars.ys, &mut vars.os, &mut vars.bs] {
            for v in list.iter_mut() {
                *v = map(*v);
            }
        }
        let mut clauses: Vec<Vec<i32>> = self
            .clauses
            .iter()
            .map(|c| {
                let mut c: Vec<i32> = c.iter().map(|&l| map(l)).collect();
                c.shuffle(&mut rng);
                c
            })
            .collect();
        clauses.shuffle(&mut rng);
        CnfEncoding { vars, num_vars: self.num_vars, clauses }
    }
}

struct Builder {
    next: i32,
    clauses: Vec<Vec<i32>>,
}

impl Builder {
    fn fresh(&mut self, n: usize) -> Vec<i32> {
        let out = (self.next..self.next + n as i32).collect();
        self.next += n as i32;
        out
    }

    fn add(&mut self, c: Vec<i32>) {
        self.clauses.push(c);
    }

    fn at_most_one(&mut self, lits: &[i32]) {
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i + 1..] {
                self.add(vec![-a, -b]);
            }
        }
    }
}

/// Compact coloring encoding of `a` with `k` colors over `labels` symbols and
/// `outputs` output values.
pub fn encode(
    a: &Apta,
    g: &ConsistencyGraph,
    k: usize,
    labels: usize,
    outputs: usize,
    constraints: &OstrowskiConstraints,
    opts: &EncodeOptions,
) -> CnfEncoding {
    assert!(k >= 1, "at least one color");
    let n = a.num_nodes();
    let nb = constraints.base_states();
    let mut bld = Builder { next: 1, clauses: Vec::new() };
    let vars = VarMap {
        nodes: n,
        k,
        labels,
        outputs,
        base_states: nb,
        xs: bld.fresh(n * k),
        ys: bld.fresh(labels * k * k),
        os: bld.fresh(k * outputs),
        bs: bld.fresh(k * nb),
    };
    let colors = |v: usize| -> Vec<i32> { (0..k).map(|i| vars.x(v, i)).collect() };

    // Coloring of the tree.
    bld.add(vec![vars.x(0, 0)]);
    for v in 0..n {
        bld.add(colors(v));
        bld.at_most_one(&colors(v));
    }
    for i in 0..k {
        let os: Vec<i32> = (0..outputs).map(|s| vars.o(i, s)).collect();
        bld.at_most_one(&os);
        if opts.total_outputs {
            bld.add(os);
        }
    }
    for v in 0..n {
        if let Some(s) = a.output(v) {
            for i in 0..k {
                bld.add(vec![-vars.x(v, i), vars.o(i, s as usize)]);
            }
        }
    }
    let closed;
    let g = if opts.propagate_conflicts {
        closed = propagate_conflicts(a, g);
        &closed
    } else {
        g
    };
    for &(u, v) in &g.edges {
        for i in 0..k {
            bld.add(vec![-vars.x(u as usize, i), -vars.x(v as usize, i)]);
        }
    }
    for v in 1..n {
        let (p, l) = a.parent(v).unwrap();
        for i in 0..k {
            for j in 0..k {
                let y = vars.y(l as usize, i, j);
                bld.add(vec![-vars.x(p, i), -vars.x(v, j), y]);
                bld.add(vec![-y, -vars.x(p, i), vars.x(v, j)]);
            }
        }
    }

    // Transitions: deterministic, start loops on 0.
    for l in 0..labels {
        for i in 0..k {
            let row: Vec<i32> = (0..k).map(|q| vars.y(l, i, q)).collect();
            bld.at_most_one(&row);
        }
    }
    bld.add(vec![vars.y(0, 0, 0)]);
    let row = |l: usize, i: usize| -> Vec<i32> { (0..k).map(|q| vars.y(l, i, q)).collect() };

    match constraints {
        OstrowskiConstraints::None => {
            for i in 0..k {
                for l in 0..labels {
                    bld.add(row(l, i));
                }
            }
        }
        OstrowskiConstraints::Metallic { d1 } => {
            let d1 = *d1 as usize;
            for i in 0..k {
                bld.add(vec![-vars.y(d1, i, i)]);
            }
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    for q in 0..k {
                        for l in 1..=d1.min(labels - 1) {
                            bld.add(vec![-vars.y(d1, i, j), -vars.y(l, j, q)]);
                        }
                    }
                }
            }
            // Completeness, except that a d1-successor sends 1..=d1 to the
            // implied dead state.
            for i in 0..k {
                bld.add(row(0, i));
                for l in 1..labels {
                    let mut c = row(l, i);
                    if l <= d1 {
                        c.extend((0..k).filter(|&p| p != i).map(|p| vars.y(d1, p, i)));
                    }
                    bld.add(c);
                }
            }
        }
        OstrowskiConstraints::BaseStates { base, self_loops } => {
            // Number base states so the start is 0.
            let s0 = base.start() as usize;
            let rename = |t: usize| if t == s0 { 0 } else if t < s0 { t + 1 } else { t };
            let mut step = vec![None; nb * labels];
            for t in 0..nb {
                for l in 0..labels.min(base.alphabet().size()) {
                    step[rename(t) * labels + l] = base.step(t as u32, l as u32).map(|u| rename(u as usize));
                }
            }
            if *self_loops {
                for i in 0..k {
                    let from = if i == 0 { 1 } else { 0 };
                    for l in from..labels {
                        bld.add(vec![-vars.y(l, i, i)]);
                    }
                }
            }
            bld.add(vec![vars.b(0, 0)]);
            for i in 0..k {
                let bs: Vec<i32> = (0..nb).map(|t| vars.b(i, t)).collect();
                bld.at_most_one(&bs);
                bld.add(bs);
            }
            for i in 0..k {
                for j in 0..k {
                    for s in 0..nb {
                        for t in 0..nb {
                            for l in 0..labels {
                                if step[s * labels + l] != Some(t) {
                                    bld.add(vec![-vars.b(i, s), -vars.b(j, t), -vars.y(l, i, j)]);
                                }
                            }
                        }
                    }
                }
            }
            for i in 0..k {
                for l in 0..labels {
                    for s in 0..nb {
                        if step[s * labels + l].is_some() {
                            let mut c = vec![-vars.b(i, s)];
                            c.extend(row(l, i));
                            bld.add(c);
                        }
                    }
                }
            }
        }
    }

    if opts.symmetry_breaking && k > 1 {
        symmetry_breaking(&mut bld, &vars);
    }
    CnfEncoding { vars, num_vars: (bld.next - 1) as u32, clauses: bld.clauses }
}

/// Adds the sample entry `(s, o)` to `c`, an encoding of `a`: fresh color
/// variables for new tree nodes, and clauses tying them to the transitions,
/// outputs and conflicts. Returns the added clauses, which are also appended
/// to `c`. Derived conflicts are not propagated to the new nodes.
pub fn extend(c: &mut CnfEncoding, a: &mut Apta, s: &[u32], o: u32) -> Result<Vec<Vec<i32>>> {
    let k = c.vars.k;
    if s.iter().any(|&d| d as usize >= c.vars.labels) || o as usize >= c.vars.outputs {
        return Err(Error::Invalid(format!("entry {s:?} -> {o} is outside the encoded alphabet")));
    }
    if a.find(s).and_then(|v| a.output(v)) == Some(o) {
        return Ok(Vec::new());
    }
    let (first, end) = a.insert(s, o)?;
    let mut bld = Builder { next: c.num_vars as i32 + 1, clauses: Vec::new() };
    for _ in first..a.num_nodes() {
        let xs = bld.fresh(k);
        c.vars.xs.extend(&xs);
    }
    c.vars.nodes = a.num_nodes();
    let v = &c.vars;
    let colors = |u: usize| -> Vec<i32> { (0..k).map(|i| v.x(u, i)).collect() };
    for u in first..a.num_nodes() {
        bld.add(colors(u));
        bld.at_most_one(&colors(u));
        let (p, l) = a.parent(u).unwrap();
        for i in 0..k {
            for j in 0..k {
                let y = v.y(l as usize, i, j);
                bld.add(vec![-v.x(p, i), -v.x(u, j), y]);
                bld.add(vec![-y, -v.x(p, i), v.x(u, j)]);
            }
        }
    }
    for i in 0..k {
        bld.add(vec![-v.x(end, i), v.o(i, o as usize)]);
    }
    for u in 0..a.num_nodes() {
        if a.output(u).is_some_and(|x| x != o) {
            for i in 0..k {
                bld.add(vec![-v.x(end, i), -v.x(u, i)]);
            }
        }
    }
    c.num_vars = (bld.next - 1) as u32;
    c.clauses.extend(bld.clauses.iter().cloned());
    Ok(bld.clauses)
}

/// Colors must appear in breadth-first order of the automaton: each color
/// `j > 0` has a smallest predecessor `p_j < j`, predecessors are
/// nondecreasing in `j`, and siblings with the same predecessor are ordered by
/// their smallest connecting label.
fn symmetry_breaking(bld: &mut Builder, vars: &VarMap) {
    let (k, labels) = (vars.k, vars.labels);
    // t_{i,j}, p_{j,i} and m_{l,i,j} for i < j.
    let pair = |i: usize, j: usize| j * (j - 1) / 2 + i;
    let npairs = k * (k - 1) / 2;
    let t = bld.fresh(npairs);
    let p = bld.fresh(npairs);
    let m = bld.fresh(npairs * labels);
    let mv = |l: usize, i: usize, j: usize| m[pair(i, j) * labels + l];
    for j in 1..k {
        for i in 0..j {
            let tij = t[pair(i, j)];
            let mut c = vec![-tij];
            for l in 0..labels {
                c.push(vars.y(l, i, j));
                bld.add(vec![-vars.y(l, i, j), tij]);
            }
            bld.add(c);

            let pji = p[pair(i, j)];
            bld.add(vec![-pji, tij]);
            let mut back = vec![pji, -tij];
            for h in 0..i {
                bld.add(vec![-pji, -t[pair(h, j)]]);
                back.push(t[pair(h, j)]);
            }
            bld.add(back);

            for l in 0..labels {
                let mlij = mv(l, i, j);
                bld.add(vec![-mlij, vars.y(l, i, j)]);
                let mut back = vec![mlij, -vars.y(l, i, j)];
                for h in 0..l {
                    bld.add(vec![-mlij, -vars.y(h, i, j)]);
                    back.push(vars.y(h, i, j));
                }
                bld.add(back);
            }
        }
        bld.add((0..j).map(|i| p[pair(i, j)]).collect());
    }
    for j in 1..k.saturating_sub(1) {
        for i in 0..j {
            for h in 0..i {
                bld.add(vec![-p[pair(i, j)], -p[pair(h, j + 1)]]);
            }
            for l in 0..labels {
                for h in 0..l {
                    bld.add(vec![-p[pair(i, j)], -p[pair(i, j + 1)], -mv(l, i, j), -mv(h, i, j + 1)]);
                }
            }
        }
    }
}

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

use super::alphabet::{Alphabet, Symbol};
use super::dfa::{Dfa, Dfao};
use super::nfa::Nfa;
use super::NONE;

/// Binary boolean connective for [`product`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    AndNot,
    Iff,
}

impl BoolOp {
    pub fn eval(self, x: bool, y: bool) -> bool {
        match self {
            BoolOp::And => x && y,
            BoolOp::Or => x || y,
            BoolOp::Xor => x != y,
            BoolOp::AndNot => x && !y,
            BoolOp::Iff => x == y,
        }
    }
}

fn same_alphabet(a: &Alphabet, b: &Alphabet) -> Result<()> {
    if a != b {
        return Err(Error::AlphabetMismatch(a.to_string(), b.to_string()));
    }
    Ok(())
}

fn next_of(d: &Dfa, s: u32, sym: Symbol) -> u32 {
    if s == NONE {
        NONE
    } else {
        d.step(s, sym).unwrap_or(NONE)
    }
}

/// Accepts `x` iff `op(a accepts x, b accepts x)`. The result is minimal.
pub fn product(a: &Dfa, b: &Dfa, op: BoolOp) -> Result<Dfa> {
    same_alphabet(a.alphabet(), b.alphabet())?;
    let k = a.alphabet().size();
    let sink_accepts = op.eval(false, false);
    let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pairs = vec![(a.start(), b.start())];
    ids.insert(pairs[0], 0);
    let mut delta = Vec::new();
    let mut accepting = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        let acc_p = p != NONE && a.is_accepting(p);
        let acc_q = q != NONE && b.is_accepting(q);
        accepting.push(op.eval(acc_p, acc_q));
        for sym in 0..k as Symbol {
            let np = next_of(a, p, sym);
            let nq = next_of(b, q, sym);
            if np == NONE && nq == NONE && !sink_accepts {
                delta.push(NONE);
                continue;
            }
            let id = *ids.entry((np, nq)).or_insert_with(|| {
                pairs.push((np, nq));
                (pairs.len() - 1) as u32
            });
            delta.push(id);
        }
        i += 1;
    }
    Ok(Dfa::from_parts(a.alphabet().clone(), 0, delta, accepting).minimize())
}

pub fn intersect(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    product(a, b, BoolOp::And)
}

pub fn union(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    product(a, b, BoolOp::Or)
}

/// Materializes the dead state and flips acceptance.
pub fn complement(a: &Dfa) -> Dfa {
    let k = a.alphabet().size();
    let n = a.num_states();
    let sink = n as u32;
    let mut delta: Vec<u32> = a.delta().iter().map(|&t| if t == NONE { sink } else { t }).collect();
    delta.extend(std::iter::repeat(sink).take(k));
    let mut accepting: Vec<bool> = (0..n as u32).map(|s| !a.is_accepting(s)).collect();
    accepting.push(true);
    Dfa::from_parts(a.alphabet().clone(), a.start(), delta, accepting).minimize()
}

/// Reads `a` as an automaton over `target`, where tape `i` of `a` is tape
/// `tape_map[i]` of `target`. Target columns whose digit exceeds the source
/// range have no transition.
pub fn lift(a: &Dfa, target: &Alphabet, tape_map: &[usize]) -> Result<Dfa> {
    let src = a.alphabet();
    if tape_map.len() != src.tapes() || tape_map.iter().any(|&t| t >= target.tapes()) {
        return Err(Error::AlphabetMismatch(src.to_string(), target.to_string()));
    }
    let translate: Vec<u32> = (0..target.size() as Symbol)
        .map(|sym| {
            let col = target.decode(sym);
            let picked: Vec<u32> = tape_map.iter().map(|&t| col[t]).collect();
            src.encode(&picked).unwrap_or(NONE)
        })
        .collect();
    let n = a.num_states();
    let kt = target.size();
    let mut delta = Vec::with_capacity(n * kt);
    for s in 0..n as u32 {
        for &sym in &translate {
            delta.push(if sym == NONE { NONE } else { a.step(s, sym).unwrap_or(NONE) });
        }
    }
    let accepting = (0..n as u32).map(|s| a.is_accepting(s)).collect();
    Ok(Dfa::from_parts(target.clone(), a.start(), delta, accepting))
}

/// Existentially quantifies the listed tapes away.
///
/// Because the erased witnesses may be longer than the remaining tapes, the
/// start set is closed under columns that are zero on every remaining tape
/// (leading padding).
pub fn project(a: &Dfa, tapes: &[usize]) -> Result<Dfa> {
    let src = a.alphabet();
    let mut keep: Vec<usize> = (0..src.tapes()).filter(|t| !tapes.contains(t)).collect();
    if keep.is_empty() || tapes.iter().any(|&t| t >= src.tapes()) {
        return Err(Error::Unsupported(format!("cannot project tapes {tapes:?} from {src}")));
    }
    keep.sort_unstable();
    let reduced = Alphabet::new(keep.iter().map(|&t| src.radices()[t]).collect())?;
    let translate: Vec<Symbol> = (0..src.size() as Symbol)
        .map(|sym| {
            let col = src.decode(sym);
            let picked: Vec<u32> = keep.iter().map(|&t| col[t]).collect();
            reduced.encode(&picked).expect("digits within range")
        })
        .collect();
    let n = a.num_states();
    let mut nfa = Nfa::new(reduced);
    for s in 0..n as u32 {
        nfa.add_state(a.is_accepting(s));
    }
    for s in 0..n as u32 {
        for (sym, &r) in translate.iter().enumerate() {
            if let Some(t) = a.step(s, sym as Symbol) {
                nfa.add_edge(s, r, t);
            }
        }
    }
    // Leading padding closure.
    let mut seen = vec![false; n];
    let mut stack = vec![a.start()];
    seen[a.start() as usize] = true;
    while let Some(s) = stack.pop() {
        nfa.add_start(s);
        for (sym, &r) in translate.iter().enumerate() {
            if r != 0 {
                continue;
            }
            if let Some(t) = a.step(s, sym as Symbol) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
    }
    Ok(nfa.determinize().minimize())
}

/// Shortest input on which the two DFAs disagree, if any.
pub fn difference_witness(a: &Dfa, b: &Dfa) -> Result<Option<Vec<Symbol>>> {
    same_alphabet(a.alphabet(), b.alphabet())?;
    Ok(dfao_difference(&a.to_dfao_rejecting_none(), &b.to_dfao_rejecting_none(), None)?)
}

pub fn equivalent(a: &Dfa, b: &Dfa) -> Result<bool> {
    Ok(difference_witness(a, b)?.is_none())
}

impl Dfa {
    /// Accepting ⟶ `Some(1)`, rejecting ⟶ `None`, so that rejecting sinks
    /// coincide with the implied dead state.
    pub(crate) fn to_dfao_rejecting_none(&self) -> Dfao {
        let outputs = (0..self.num_states() as u32).map(|s| self.is_accepting(s).then_some(1)).collect();
        Dfao::from_parts(self.alphabet().clone(), self.start(), self.delta().to_vec(), outputs)
    }
}

/// Shortest input on which the two DFAOs produce different outputs (the dead
/// state's output is `None`). With a `domain`, only inputs the domain accepts
/// are compared.
pub fn dfao_difference(a: &Dfao, b: &Dfao, domain: Option<&Dfa>) -> Result<Option<Vec<Symbol>>> {
    same_alphabet(a.alphabet(), b.alphabet())?;
    if let Some(d) = domain {
        same_alphabet(a.alphabet(), d.alphabet())?;
    }
    let k = a.alphabet().size() as Symbol;
    let out = |m: &Dfao, s: u32| if s == NONE { None } else { m.output(s) };
    let step = |m: &Dfao, s: u32, sym: Symbol| if s == NONE { NONE } else { m.step(s, sym).unwrap_or(NONE) };
    let dstart = domain.map_or(0, Dfa::start);
    let start = (a.start(), b.start(), dstart);
    let mut parent: HashMap<(u32, u32, u32), Option<((u32, u32, u32), Symbol)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(cur @ (p, q, r)) = queue.pop_front() {
        let in_domain = domain.map_or(true, |d| d.is_accepting(r));
        if in_domain && out(a, p) != out(b, q) {
            let mut path = Vec::new();
            let mut node = cur;
            while let Some(Some((prev, sym))) = parent.get(&node) {
                path.push(*sym);
                node = *prev;
            }
            path.reverse();
            return Ok(Some(path));
        }
        for sym in 0..k {
            let np = step(a, p, sym);
            let nq = step(b, q, sym);
            let nr = match domain {
                Some(d) => match d.step(r, sym) {
                    Some(t) => t,
                    None => continue,
                },
                None => 0,
            };
            if np == NONE && nq == NONE {
                continue;
            }
            let next = (np, nq, nr);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((cur, sym)));
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}

pub fn dfao_equivalent(a: &Dfao, b: &Dfao) -> Result<bool> {
    Ok(dfao_difference(a, b, None)?.is_none())
}

/// DFAO that outputs `label_i` where part `i` accepts and `default`
/// elsewhere. With a `domain`, inputs outside it have no output.
/// Two parts accepting the same input is an error.
pub fn combine(parts: &[(Dfa, u32)], default: u32, domain: Option<&Dfa>) -> Result<Dfao> {
    let alphabet = match (parts.first(), domain) {
        (Some((d, _)), _) => d.alphabet().clone(),
        (None, Some(d)) => d.alphabet().clone(),
        (None, None) => return Err(Error::Unsupported("combine needs at least one part".into())),
    };
    for (d, _) in parts {
        same_alphabet(&alphabet, d.alphabet())?;
    }
    if let Some(d) = domain {
        same_alphabet(&alphabet, d.alphabet())?;
    }
    let k = alphabet.size() as Symbol;
    // Tuple layout: part states, then the domain state (0 when absent).
    let mut start: Vec<u32> = parts.iter().map(|(d, _)| d.start()).collect();
    start.push(domain.map_or(0, Dfa::start));
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    ids.insert(start.clone(), 0);
    let mut tuples = vec![start];
    let mut parent: Vec<Option<(u32, Symbol)>> = vec![None];
    let mut delta = Vec::new();
    let mut outputs = Vec::new();
    let mut i = 0;
    while i < tuples.len() {
        let tuple = tuples[i].clone();
        let dom = tuple[parts.len()];
        let inside = domain.map_or(true, |d| d.is_accepting(dom));
        let mut label = None;
        if inside {
            let mut hit: Option<usize> = None;
            for (j, (d, l)) in parts.iter().enumerate() {
                let s = tuple[j];
                if s != NONE && d.is_accepting(s) {
                    if let Some(prev) = hit {
                        let mut path = Vec::new();
                        let mut node = i as u32;
                        while let Some((p, sym)) = parent[node as usize] {
                            path.push(sym);
                            node = p;
                        }
                        path.reverse();
                        return Err(Error::Overlap(prev, j, path));
                    }
                    hit = Some(j);
                    label = Some(*l);
                }
            }
            if label.is_none() {
                label = Some(default);
            }
        }
        outputs.push(label);
        for sym in 0..k {
            let mut next: Vec<u32> = parts.iter().enumerate().map(|(j, (d, _))| next_of(d, tuple[j], sym)).collect();
            let nd = match domain {
                Some(d) => d.step(dom, sym).unwrap_or(NONE),
                None => 0,
            };
            let all_dead = next.iter().all(|&s| s == NONE);
            if nd == NONE || (domain.is_none() && all_dead) {
                delta.push(NONE);
                continue;
            }
            next.push(nd);
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = tuples.len() as u32;
                    ids.insert(next.clone(), id);
                    tuples.push(next);
                    parent.push(Some((i as u32, sym)));
                    id
                }
            };
            delta.push(id);
        }
        i += 1;
    }
    Ok(Dfao::from_parts(alphabet, 0, delta, outputs).minimize())
}

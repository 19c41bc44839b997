use std::collections::HashMap;

use super::alphabet::{Alphabet, Symbol};
use super::dfa::Dfa;
use super::NONE;

/// Nondeterministic automaton with ε-moves.
#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: Alphabet,
    starts: Vec<u32>,
    edges: Vec<Vec<(Symbol, u32)>>,
    eps: Vec<Vec<u32>>,
    accepting: Vec<bool>,
}

impl Nfa {
    pub fn new(alphabet: Alphabet) -> Self {
        Nfa { alphabet, starts: Vec::new(), edges: Vec::new(), eps: Vec::new(), accepting: Vec::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn add_state(&mut self, accepting: bool) -> u32 {
        self.edges.push(Vec::new());
        self.eps.push(Vec::new());
        self.accepting.push(accepting);
        (self.accepting.len() - 1) as u32
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn add_start(&mut self, state: u32) {
        self.starts.push(state);
    }

    pub fn set_accepting(&mut self, state: u32, accepting: bool) {
        self.accepting[state as usize] = accepting;
    }

    pub fn add_edge(&mut self, from: u32, sym: Symbol, to: u32) {
        debug_assert!((sym as usize) < self.alphabet.size());
        self.edges[from as usize].push((sym, to));
    }

    pub fn add_eps(&mut self, from: u32, to: u32) {
        self.eps[from as usize].push(to);
    }

    pub fn starts(&self) -> &[u32] {
        &self.starts
    }

    fn closure(&self, set: &mut Vec<u32>, mark: &mut [bool]) {
        let mut i = 0;
        while i < set.len() {
            let s = set[i] as usize;
            for &t in &self.eps[s] {
                if !mark[t as usize] {
                    mark[t as usize] = true;
                    set.push(t);
                }
            }
            i += 1;
        }
        for &s in set.iter() {
            mark[s as usize] = false;
        }
        set.sort_unstable();
    }

    /// Membership by direct set simulation (no subset construction).
    pub fn accepts(&self, input: &[Symbol]) -> bool {
        let mut mark = vec![false; self.num_states()];
        let mut current = self.starts.clone();
        current.sort_unstable();
        current.dedup();
        self.closure(&mut current, &mut mark);
        for &sym in input {
            let mut next = Vec::new();
            for &s in &current {
                for &(a, t) in &self.edges[s as usize] {
                    if a == sym && !mark[t as usize] {
                        mark[t as usize] = true;
                        next.push(t);
                    }
                }
            }
            for &t in &next {
                mark[t as usize] = false;
            }
            self.closure(&mut next, &mut mark);
            current = next;
        }
        current.iter().any(|&s| self.accepting[s as usize])
    }

    /// Removes states that cannot reach an accepting state.
    pub fn trim(&self) -> Nfa {
        let n = self.num_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for s in 0..n {
            for &(_, t) in &self.edges[s] {
                rev[t as usize].push(s as u32);
            }
            for &t in &self.eps[s] {
                rev[t as usize].push(s as u32);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&s| live[s as usize]).collect();
        while let Some(t) = stack.pop() {
            for &s in &rev[t as usize] {
                if !live[s as usize] {
                    live[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        let mut index = vec![NONE; n];
        let mut out = Nfa::new(self.alphabet.clone());
        for s in 0..n {
            if live[s] {
                index[s] = out.add_state(self.accepting[s]);
            }
        }
        for s in 0..n {
            if !live[s] {
                continue;
            }
            for &(a, t) in &self.edges[s] {
                if live[t as usize] {
                    out.add_edge(index[s], a, index[t as usize]);
                }
            }
            for &t in &self.eps[s] {
                if live[t as usize] {
                    out.add_eps(index[s], index[t as usize]);
                }
            }
        }
        for &s in &self.starts {
            if live[s as usize] {
                out.add_start(index[s as usize]);
            }
        }
        out
    }

    /// Subset construction. The empty subset is the implied dead state.
    pub fn determinize(&self) -> Dfa {
        let k = self.alphabet.size();
        let n = self.num_states();
        let mut mark = vec![false; n];
        let mut start: Vec<u32> = self.starts.clone();
        start.sort_unstable();
        start.dedup();
        self.closure(&mut start, &mut mark);
        if start.is_empty() {
            return Dfa::empty(self.alphabet.clone());
        }
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut subsets: Vec<Vec<u32>> = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta: Vec<u32> = Vec::new();
        let mut accepting = Vec::new();
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut i = 0;
        while i < subsets.len() {
            let current = std::mem::take(&mut subsets[i]);
            accepting.push(current.iter().any(|&s| self.accepting[s as usize]));
            for &s in &current {
                for &(a, t) in &self.edges[s as usize] {
                    buckets[a as usize].push(t);
                }
            }
            for bucket in buckets.iter_mut() {
                if bucket.is_empty() {
                    delta.push(NONE);
                    continue;
                }
                bucket.sort_unstable();
                bucket.dedup();
                let mut next = std::mem::take(bucket);
                self.closure(&mut next, &mut mark);
                next.dedup();
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = (ids.len()) as u32;
                        ids.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                delta.push(id);
            }
            subsets[i] = current;
            i += 1;
        }
        Dfa::from_parts(self.alphabet.clone(), 0, delta, accepting)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn all_strings(k: u32, max_len: u32) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &layer {
                for a in 0..k {
                    let mut t: Vec<u32> = s.clone();
                    t.push(a);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn determinize_minimize_random_nfas_agree_with_simulation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let strings = all_strings(2, 8);
        for _ in 0..40 {
            let mut nfa = Nfa::new(Alphabet::scalar(2));
            for _ in 0..5 {
                nfa.add_state(rng.gen_bool(0.4));
            }
            nfa.add_start(0);
            for s in 0..5 {
                for a in 0..2 {
                    for t in 0..5 {
                        if rng.gen_bool(0.25) {
                            nfa.add_edge(s, a, t);
                        }
                    }
                }
                if rng.gen_bool(0.1) {
                    nfa.add_eps(s, rng.gen_range(0..5));
                }
            }
            let dfa = nfa.determinize().minimize();
            let trimmed = nfa.trim().determinize().minimize();
            assert_eq!(dfa, trimmed);
            for s in &strings {
                assert_eq!(dfa.accepts(s).unwrap(), nfa.accepts(s), "{s:?}");
            }
        }
    }
}

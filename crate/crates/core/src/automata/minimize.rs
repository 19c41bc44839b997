use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use super::NONE;

/// A deterministic transition structure with per-state labels, as consumed
/// and produced by [`minimize_labeled`].
pub(crate) struct Labeled<L> {
    pub n_syms: usize,
    pub start: u32,
    pub delta: Vec<u32>,
    pub labels: Vec<L>,
}

/// Moore partition refinement with the label as initial partition.
///
/// Missing transitions go to an implied sink labelled `dead`; states
/// equivalent to that sink are dropped from the result. States are renumbered
/// breadth-first from the start state, following symbols in increasing order.
/// When the start state itself is dead, the result is a single state labelled
/// `dead` with no transitions.
pub(crate) fn minimize_labeled<L: Clone + Eq + Hash>(input: &Labeled<L>, dead: &L) -> Labeled<L> {
    let k = input.n_syms;
    let reach = reachable(input.n_syms, input.start, &input.delta);
    let n = reach.len();
    let mut index = vec![NONE; input.labels.len()];
    for (i, &s) in reach.iter().enumerate() {
        index[s as usize] = i as u32;
    }
    // Complete automaton: states 0..n are the reachable ones, n is the sink.
    let sink = n as u32;
    let mut delta = vec![sink; (n + 1) * k];
    for (i, &s) in reach.iter().enumerate() {
        for a in 0..k {
            let t = input.delta[s as usize * k + a];
            if t != NONE {
                delta[i * k + a] = index[t as usize];
            }
        }
    }
    let mut labels: Vec<L> = reach.iter().map(|&s| input.labels[s as usize].clone()).collect();
    labels.push(dead.clone());

    let mut class = initial_partition(&labels);
    let mut count = class.iter().copied().max().map_or(0, |m| m + 1);
    let mut key = vec![0u32; k + 1];
    loop {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::with_capacity(count as usize * 2);
        let mut next = vec![0u32; n + 1];
        for s in 0..=n {
            key[0] = class[s];
            for a in 0..k {
                key[a + 1] = class[delta[s * k + a] as usize];
            }
            let fresh = ids.len() as u32;
            next[s] = *ids.entry(key.clone()).or_insert(fresh);
        }
        let new_count = ids.len() as u32;
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    let dead_class = class[n];
    let start_class = class[0];
    if n == 0 || start_class == dead_class {
        return Labeled { n_syms: k, start: 0, delta: vec![NONE; k], labels: vec![dead.clone()] };
    }
    // Representative per class, then BFS renumbering.
    let mut rep = vec![NONE; count as usize];
    for s in 0..=n {
        let c = class[s] as usize;
        if rep[c] == NONE {
            rep[c] = s as u32;
        }
    }
    let mut order = vec![NONE; count as usize];
    let mut queue = VecDeque::new();
    let mut reps = Vec::new();
    order[start_class as usize] = 0;
    queue.push_back(start_class);
    while let Some(c) = queue.pop_front() {
        reps.push(rep[c as usize]);
        let s = rep[c as usize] as usize;
        for a in 0..k {
            let t = class[delta[s * k + a] as usize];
            if t != dead_class && order[t as usize] == NONE {
                order[t as usize] = (reps.len() + queue.len()) as u32;
                queue.push_back(t);
            }
        }
    }
    let m = reps.len();
    let mut out_delta = vec![NONE; m * k];
    let mut out_labels = Vec::with_capacity(m);
    for (i, &s) in reps.iter().enumerate() {
        out_labels.push(labels[s as usize].clone());
        for a in 0..k {
            let t = class[delta[s as usize * k + a] as usize];
            if t != dead_class {
                out_delta[i * k + a] = order[t as usize];
            }
        }
    }
    Labeled { n_syms: k, start: 0, delta: out_delta, labels: out_labels }
}

fn initial_partition<L: Eq + Hash>(labels: &[L]) -> Vec<u32> {
    let mut ids: HashMap<&L, u32> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let fresh = ids.len() as u32;
            *ids.entry(l).or_insert(fresh)
        })
        .collect()
}

/// States reachable from `start`, in breadth-first order.
pub(crate) fn reachable(k: usize, start: u32, delta: &[u32]) -> Vec<u32> {
    let n = delta.len() / k.max(1);
    let mut seen = vec![false; n];
    let mut order = vec![start];
    seen[start as usize] = true;
    let mut i = 0;
    while i < order.len() {
        let s = order[i] as usize;
        for a in 0..k {
            let t = delta[s * k + a];
            if t != NONE && !seen[t as usize] {
                seen[t as usize] = true;
                order.push(t);
            }
        }
        i += 1;
    }
    order
}

use std::collections::{HashMap, HashSet};

use ostdigits::numeration::digits_to_string;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};

/// Prefix tree of a dictionary. Node 0 is the root (empty string). A built
/// tree is numbered in breadth-first order with children sorted by label;
/// nodes added later by [`Apta::insert`] are appended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Apta {
    parent: Vec<u32>,
    label: Vec<u32>,
    output: Vec<Option<u32>>,
    children: Vec<Vec<(u32, u32)>>,
}

impl Apta {
    pub fn num_nodes(&self) -> usize {
        self.parent.len()
    }

    /// Parent and incoming label of a non-root node.
    pub fn parent(&self, v: usize) -> Option<(usize, u32)> {
        (v != 0).then(|| (self.parent[v] as usize, self.label[v]))
    }

    pub fn output(&self, v: usize) -> Option<u32> {
        self.output[v]
    }

    /// `(label, child)` pairs sorted by label.
    pub fn children(&self, v: usize) -> &[(u32, u32)] {
        &self.children[v]
    }

    pub fn max_label(&self) -> Option<u32> {
        self.label.iter().skip(1).copied().max()
    }

    /// Adds `s` with output `o`. Returns the first new node index (new nodes
    /// run from there to the end) and the node of `s`.
    pub fn insert(&mut self, s: &[u32], o: u32) -> Result<(usize, usize)> {
        let first = self.num_nodes();
        let mut v = 0;
        for &a in s {
            v = match self.children[v].binary_search_by_key(&a, |&(l, _)| l) {
                Ok(i) => self.children[v][i].1 as usize,
                Err(i) => {
                    let c = self.num_nodes();
                    self.parent.push(v as u32);
                    self.label.push(a);
                    self.output.push(None);
                    self.children.push(Vec::new());
                    self.children[v].insert(i, (a, c as u32));
                    c
                }
            };
        }
        match self.output[v] {
            Some(prev) if prev != o => Err(Error::Invalid(format!(
                "sample gives `{}` both outputs {prev} and {o}",
                digits_to_string(s)
            ))),
            _ => {
                self.output[v] = Some(o);
                Ok((first, v))
            }
        }
    }

    /// Node reached by `s`, if present.
    pub fn find(&self, s: &[u32]) -> Option<usize> {
        let mut v = 0;
        for &a in s {
            let (_, c) = *self.children[v].iter().find(|&&(l, _)| l == a)?;
            v = c as usize;
        }
        Some(v)
    }
}

pub fn build_apta(d: &Dictionary) -> Result<Apta> {
    // Build as a trie first, then renumber breadth-first.
    let mut kids: Vec<HashMap<u32, usize>> = vec![HashMap::new()];
    let mut out: Vec<Option<u32>> = vec![None];
    for (s, o) in &d.entries {
        let mut v = 0;
        for &a in s {
            v = match kids[v].get(&a) {
                Some(&c) => c,
                None => {
                    kids.push(HashMap::new());
                    out.push(None);
                    let c = kids.len() - 1;
                    kids[v].insert(a, c);
                    c
                }
            };
        }
        match out[v] {
            Some(prev) if prev != *o => {
                return Err(Error::Invalid(format!(
                    "dictionary gives `{}` both outputs {prev} and {o}",
                    digits_to_string(s)
                )))
            }
            _ => out[v] = Some(*o),
        }
    }
    let mut apta = Apta { parent: vec![0], label: vec![0], output: vec![out[0]], children: vec![Vec::new()] };
    let mut queue = vec![0usize];
    let mut i = 0;
    while i < queue.len() {
        let old = queue[i];
        let mut ks: Vec<(u32, usize)> = kids[old].iter().map(|(&a, &c)| (a, c)).collect();
        ks.sort_unstable();
        for (a, c) in ks {
            let id = apta.parent.len() as u32;
            apta.parent.push(i as u32);
            apta.label.push(a);
            apta.output.push(out[c]);
            apta.children.push(Vec::new());
            apta.children[i].push((a, id));
            queue.push(c);
        }
        i += 1;
    }
    Ok(apta)
}

/// Pairs of tree nodes that may not share a color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyGraph {
    pub edges: Vec<(u32, u32)>,
}

/// Direct conflicts only: nodes whose defined outputs differ.
pub fn build_cg(a: &Apta) -> ConsistencyGraph {
    let mut by_output: Vec<(u32, u32)> =
        (0..a.num_nodes()).filter_map(|v| a.output(v).map(|o| (o, v as u32))).collect();
    by_output.sort_unstable();
    let mut edges = Vec::new();
    for (i, &(ou, u)) in by_output.iter().enumerate() {
        for &(ov, v) in &by_output[i + 1..] {
            if ou != ov {
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    edges.sort_unstable();
    ConsistencyGraph { edges }
}

/// Closes `g` under determinism: if two nodes conflict and are entered by the
/// same label, their parents conflict too.
pub fn propagate_conflicts(a: &Apta, g: &ConsistencyGraph) -> ConsistencyGraph {
    let mut seen: HashSet<(u32, u32)> = g.edges.iter().copied().collect();
    let mut work = g.edges.clone();
    while let Some((u, v)) = work.pop() {
        let (Some((pu, lu)), Some((pv, lv))) = (a.parent(u as usize), a.parent(v as usize)) else { continue };
        if lu != lv {
            continue;
        }
        let e = ((pu.min(pv)) as u32, (pu.max(pv)) as u32);
        if seen.insert(e) {
            work.push(e);
        }
    }
    let mut edges: Vec<(u32, u32)> = seen.into_iter().collect();
    edges.sort_unstable();
    ConsistencyGraph { edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ostdigits::numeration::NumerationSystem;

    fn dict(entries: &[(&[u32], u32)]) -> Dictionary {
        Dictionary {
            system: NumerationSystem::fibonacci(),
            base: 2,
            entries: entries.iter().map(|(s, o)| (s.to_vec(), *o)).collect(),
        }
    }

    #[test]
    fn single_entry_gives_two_nodes() {
        let a = build_apta(&dict(&[(&[1], 1)])).unwrap();
        assert_eq!(a.num_nodes(), 2);
        assert_eq!(a.output(1), Some(1));
        assert!(build_cg(&a).edges.is_empty());
    }

    #[test]
    fn breadth_first_numbering() {
        let a = build_apta(&dict(&[(&[1, 0, 1], 0), (&[0], 0), (&[1], 1)])).unwrap();
        assert_eq!(a.num_nodes(), 5);
        assert_eq!(a.find(&[0]), Some(1));
        assert_eq!(a.find(&[1]), Some(2));
        assert_eq!(a.find(&[1, 0]), Some(3));
        assert_eq!(a.parent(4), Some((3, 1)));
        assert_eq!(build_cg(&a).edges, vec![(1, 2), (2, 4)]);
    }

    #[test]
    fn parents_of_conflicts_conflict() {
        // "00" and "10" differ, so "0" and "1" cannot share a state.
        let a = build_apta(&dict(&[(&[0, 0], 0), (&[1, 0], 1)])).unwrap();
        let g = build_cg(&a);
        assert_eq!(g.edges, vec![(3, 4)]);
        assert_eq!(propagate_conflicts(&a, &g).edges, vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn insert_appends_nodes() {
        let mut a = build_apta(&dict(&[(&[1, 0], 0)])).unwrap();
        assert_eq!(a.insert(&[1, 1], 1).unwrap(), (3, 3));
        assert_eq!(a.children(1), &[(0, 2), (1, 3)]);
        assert_eq!(a.insert(&[1], 1).unwrap(), (4, 1));
        assert!(a.insert(&[1], 0).is_err());
        assert_eq!(a.find(&[1, 1]), Some(3));
    }

    #[test]
    fn conflicting_duplicates_are_rejected() {
        assert!(build_apta(&dict(&[(&[1], 1), (&[1], 0)])).is_err());
    }
}

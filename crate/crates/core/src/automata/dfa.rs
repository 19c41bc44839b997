use crate::error::{Error, Result};

use super::alphabet::{Alphabet, Symbol};
use super::minimize::{minimize_labeled, Labeled};
use super::NONE;

/// Deterministic automaton with a partial transition function; missing
/// transitions lead to an implied rejecting dead state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    start: u32,
    delta: Vec<u32>,
    accepting: Vec<bool>,
}

/// Deterministic automaton with output. `None` marks states with no output;
/// the implied dead state has no output either.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfao {
    alphabet: Alphabet,
    start: u32,
    delta: Vec<u32>,
    outputs: Vec<Option<u32>>,
}

fn check_table(alphabet: &Alphabet, start: u32, delta: &[u32], n: usize) -> Result<()> {
    let k = alphabet.size();
    if n == 0 || delta.len() != n * k || start as usize >= n {
        return Err(Error::Unsupported(format!(
            "transition table of {} entries for {n} states over {k} symbols",
            delta.len()
        )));
    }
    if delta.iter().any(|&t| t != NONE && t as usize >= n) {
        return Err(Error::Unsupported("transition target out of range".into()));
    }
    Ok(())
}

impl Dfa {
    /// `delta` is row-major `[state][symbol]`, [`NONE`] for a missing edge.
    pub fn new(alphabet: Alphabet, start: u32, delta: Vec<u32>, accepting: Vec<bool>) -> Result<Self> {
        check_table(&alphabet, start, &delta, accepting.len())?;
        Ok(Dfa { alphabet, start, delta, accepting })
    }

    pub(crate) fn from_parts(alphabet: Alphabet, start: u32, delta: Vec<u32>, accepting: Vec<bool>) -> Self {
        debug_assert!(check_table(&alphabet, start, &delta, accepting.len()).is_ok());
        Dfa { alphabet, start, delta, accepting }
    }

    /// The automaton accepting nothing.
    pub fn empty(alphabet: Alphabet) -> Self {
        let k = alphabet.size();
        Dfa { alphabet, start: 0, delta: vec![NONE; k], accepting: vec![false] }
    }

    /// The automaton accepting every string.
    pub fn universal(alphabet: Alphabet) -> Self {
        let k = alphabet.size();
        Dfa { alphabet, start: 0, delta: vec![0; k], accepting: vec![true] }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, state: u32) -> bool {
        self.accepting[state as usize]
    }

    /// Row-major transition table, `NONE` for missing transitions.
    pub fn delta(&self) -> &[u32] {
        &self.delta
    }

    pub fn step(&self, state: u32, sym: Symbol) -> Option<u32> {
        let t = self.delta[state as usize * self.alphabet.size() + sym as usize];
        (t != NONE).then_some(t)
    }

    fn walk(&self, input: &[Symbol]) -> Result<Option<u32>> {
        let k = self.alphabet.size() as u32;
        let mut state = self.start;
        for &sym in input {
            if sym >= k {
                return Err(Error::SymbolOutOfRange { symbol: vec![sym], alphabet: self.alphabet.to_string() });
            }
            match self.step(state, sym) {
                Some(t) => state = t,
                None => return Ok(None),
            }
        }
        Ok(Some(state))
    }

    pub fn accepts(&self, input: &[Symbol]) -> Result<bool> {
        Ok(self.walk(input)?.is_some_and(|s| self.accepting[s as usize]))
    }

    /// Accepts the tuple of tape strings after zero-padding them on the left.
    pub fn accepts_tapes(&self, tapes: &[Vec<u32>]) -> Result<bool> {
        self.accepts(&self.alphabet.padded_columns(tapes)?)
    }

    /// Minimal equivalent DFA, canonically numbered, without the dead state.
    pub fn minimize(&self) -> Dfa {
        let m = minimize_labeled(
            &Labeled {
                n_syms: self.alphabet.size(),
                start: self.start,
                delta: self.delta.clone(),
                labels: self.accepting.clone(),
            },
            &false,
        );
        Dfa { alphabet: self.alphabet.clone(), start: m.start, delta: m.delta, accepting: m.labels }
    }

    /// Accepting ⟶ output 1, rejecting ⟶ output 0.
    pub fn to_dfao(&self) -> Dfao {
        Dfao {
            alphabet: self.alphabet.clone(),
            start: self.start,
            delta: self.delta.clone(),
            outputs: self.accepting.iter().map(|&a| Some(a as u32)).collect(),
        }
    }

    pub fn is_empty_language(&self) -> bool {
        super::minimize::reachable(self.alphabet.size(), self.start, &self.delta)
            .iter()
            .all(|&s| !self.accepting[s as usize])
    }
}

impl Dfao {
    pub fn new(alphabet: Alphabet, start: u32, delta: Vec<u32>, outputs: Vec<Option<u32>>) -> Result<Self> {
        check_table(&alphabet, start, &delta, outputs.len())?;
        Ok(Dfao { alphabet, start, delta, outputs })
    }

    pub(crate) fn from_parts(alphabet: Alphabet, start: u32, delta: Vec<u32>, outputs: Vec<Option<u32>>) -> Self {
        debug_assert!(check_table(&alphabet, start, &delta, outputs.len()).is_ok());
        Dfao { alphabet, start, delta, outputs }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.outputs.len()
    }

    pub fn output(&self, state: u32) -> Option<u32> {
        self.outputs[state as usize]
    }

    pub fn outputs(&self) -> &[Option<u32>] {
        &self.outputs
    }

    /// Row-major transition table, `NONE` for missing transitions.
    pub fn delta(&self) -> &[u32] {
        &self.delta
    }

    pub fn step(&self, state: u32, sym: Symbol) -> Option<u32> {
        let t = self.delta[state as usize * self.alphabet.size() + sym as usize];
        (t != NONE).then_some(t)
    }

    /// Output of the last state reached; `None` if the input falls into the
    /// dead state or ends in a state without output.
    pub fn run(&self, input: &[Symbol]) -> Result<Option<u32>> {
        let path = self.trace(input)?;
        if path.len() != input.len() + 1 {
            return Ok(None);
        }
        Ok(path.last().and_then(|&s| self.outputs[s as usize]))
    }

    /// States visited, starting with the start state; stops early at the dead state.
    pub fn trace(&self, input: &[Symbol]) -> Result<Vec<u32>> {
        let k = self.alphabet.size() as u32;
        let mut state = self.start;
        let mut out = vec![state];
        for &sym in input {
            if sym >= k {
                return Err(Error::SymbolOutOfRange { symbol: vec![sym], alphabet: self.alphabet.to_string() });
            }
            match self.step(state, sym) {
                Some(t) => {
                    state = t;
                    out.push(t);
                }
                None => break,
            }
        }
        Ok(out)
    }

    /// Minimal equivalent DFAO, canonically numbered, without the dead state.
    pub fn minimize(&self) -> Dfao {
        let m = minimize_labeled(
            &Labeled {
                n_syms: self.alphabet.size(),
                start: self.start,
                delta: self.delta.clone(),
                labels: self.outputs.clone(),
            },
            &None,
        );
        Dfao { alphabet: self.alphabet.clone(), start: m.start, delta: m.delta, outputs: m.labels }
    }

    /// Returns a copy with one state's output replaced.
    pub fn with_output(&self, state: u32, output: Option<u32>) -> Dfao {
        let mut out = self.clone();
        out.outputs[state as usize] = output;
        out
    }

    /// States with output `label` as an accepting set.
    pub fn preimage(&self, label: u32) -> Dfa {
        Dfa {
            alphabet: self.alphabet.clone(),
            start: self.start,
            delta: self.delta.clone(),
            accepting: self.outputs.iter().map(|&o| o == Some(label)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binary strings whose number of 1s is divisible by 3, with a redundant copy.
    fn mod3_redundant() -> Dfa {
        let a = Alphabet::scalar(2);
        #[rustfmt::skip]
        let delta = vec![
            0, 1,
            1, 2,
            2, 3,
            3, 4, // 3 ≡ 0
            4, 5, // 4 ≡ 1
            5, 0, // 5 ≡ 2
        ];
        Dfa::new(a, 0, delta, vec![true, false, false, true, false, false]).unwrap()
    }

    #[test]
    fn minimize_merges_equivalent_states() {
        let m = mod3_redundant().minimize();
        assert_eq!(m.num_states(), 3);
        for len in 0..8u32 {
            for bits in 0..(1u32 << len) {
                let s: Vec<u32> = (0..len).rev().map(|i| (bits >> i) & 1).collect();
                let ones = s.iter().filter(|&&b| b == 1).count();
                assert_eq!(m.accepts(&s).unwrap(), ones % 3 == 0);
            }
        }
    }

    #[test]
    fn minimize_is_idempotent_with_identical_numbering() {
        let m = mod3_redundant().minimize();
        assert_eq!(m.minimize(), m);
    }

    #[test]
    fn minimize_drops_dead_states() {
        // State 1 is a rejecting sink and must disappear.
        let a = Alphabet::scalar(2);
        let d = Dfa::new(a, 0, vec![0, 1, 1, 1], vec![true, false]).unwrap().minimize();
        assert_eq!(d.num_states(), 1);
        assert_eq!(d.step(0, 1), None);
    }

    #[test]
    fn empty_language_minimizes_to_one_state() {
        let a = Alphabet::scalar(3);
        let d = Dfa::new(a.clone(), 0, vec![1, 0, NONE, 0, 1, 1], vec![false, false]).unwrap().minimize();
        assert_eq!(d, Dfa::empty(a));
        assert!(d.is_empty_language());
    }

    #[test]
    fn run_on_empty_input_is_start_output() {
        let a = Alphabet::scalar(2);
        let d = Dfao::new(a, 0, vec![0, 1, 1, NONE], vec![Some(7), Some(3)]).unwrap();
        assert_eq!(d.run(&[]).unwrap(), Some(7));
        assert_eq!(d.run(&[1]).unwrap(), Some(3));
        assert_eq!(d.run(&[1, 0]).unwrap(), Some(3));
        assert_eq!(d.run(&[1, 1]).unwrap(), None);
        assert!(d.run(&[2]).is_err());
    }
}

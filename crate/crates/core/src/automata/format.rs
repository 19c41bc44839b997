use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};

use super::alphabet::{Alphabet, Symbol};
use super::dfa::{Dfa, Dfao};
use super::NONE;

/// Serializes to the plain text format:
///
/// ```text
/// alphabet: 2x2
/// states: 3 start: 0
/// state 0 output 1
///   [0,0] -> 0
/// ```
///
/// Missing transitions are omitted; a state without output prints `-`.
pub fn to_text(a: &Dfao) -> String {
    let alphabet = a.alphabet();
    let k = alphabet.size();
    let mut out = String::new();
    writeln!(out, "alphabet: {alphabet}").unwrap();
    writeln!(out, "states: {} start: {}", a.num_states(), a.start()).unwrap();
    for s in 0..a.num_states() as u32 {
        match a.output(s) {
            Some(o) => writeln!(out, "state {s} output {o}").unwrap(),
            None => writeln!(out, "state {s} output -").unwrap(),
        }
        for sym in 0..k as Symbol {
            if let Some(t) = a.step(s, sym) {
                writeln!(out, "  {} -> {t}", alphabet.symbol_text(sym)).unwrap();
            }
        }
    }
    out
}

/// Accepting states get output 1, rejecting ones 0.
pub fn dfa_to_text(a: &Dfa) -> String {
    to_text(&a.to_dfao())
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

/// Inverse of [`to_text`].
pub fn from_text(text: &str) -> Result<Dfao> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (ln, first) = lines.next().ok_or_else(|| bad(1, "empty input"))?;
    let alphabet: Alphabet = first
        .trim()
        .strip_prefix("alphabet:")
        .ok_or_else(|| bad(ln, "expected `alphabet:`"))?
        .parse()
        .map_err(|_| bad(ln, "bad alphabet"))?;
    let (ln, second) = lines.next().ok_or_else(|| bad(ln + 1, "missing `states:` line"))?;
    let words: Vec<&str> = second.split_whitespace().collect();
    let (n, start) = match words.as_slice() {
        ["states:", n, "start:", s] => (
            n.parse::<usize>().map_err(|_| bad(ln, "bad state count"))?,
            s.parse::<u32>().map_err(|_| bad(ln, "bad start state"))?,
        ),
        _ => return Err(bad(ln, "expected `states: N start: S`")),
    };
    let k = alphabet.size();
    let mut delta = vec![NONE; n * k];
    let mut outputs: Vec<Option<u32>> = Vec::with_capacity(n);
    for (ln, line) in lines {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("state ") {
            let words: Vec<&str> = rest.split_whitespace().collect();
            let [idx, "output", o] = words.as_slice() else {
                return Err(bad(ln, "expected `state I output O`"));
            };
            if idx.parse::<usize>().ok() != Some(outputs.len()) {
                return Err(bad(ln, "states must appear in order"));
            }
            let o = if *o == "-" { None } else { Some(o.parse::<u32>().map_err(|_| bad(ln, "bad output"))?) };
            outputs.push(o);
        } else if let Some((sym, target)) = trimmed.split_once("->") {
            let s = outputs.len().checked_sub(1).ok_or_else(|| bad(ln, "transition before any state"))?;
            let sym = alphabet.parse_symbol(sym).map_err(|_| bad(ln, "bad symbol"))?;
            let t = target.trim().parse::<u32>().map_err(|_| bad(ln, "bad target"))?;
            let slot = &mut delta[s * k + sym as usize];
            if *slot != NONE {
                return Err(bad(ln, "duplicate transition"));
            }
            *slot = t;
        } else {
            return Err(bad(ln, format!("unrecognized line `{trimmed}`")));
        }
    }
    if outputs.len() != n {
        return Err(bad(0, format!("declared {n} states, found {}", outputs.len())));
    }
    Dfao::new(alphabet, start, delta, outputs).map_err(|e| bad(0, e.to_string()))
}

/// Reads a DFA written by [`dfa_to_text`]: output 1 accepts, anything else rejects.
pub fn dfa_from_text(text: &str) -> Result<Dfa> {
    let d = from_text(text)?;
    let accepting = d.outputs().iter().map(|&o| o == Some(1)).collect();
    Dfa::new(d.alphabet().clone(), d.start(), d.delta().to_vec(), accepting)
}

/// Graphviz rendering: nodes labelled `<prefix><i>/<output>`, the start state
/// marked by an arrow from an invisible node, parallel edges merged.
pub fn to_dot(a: &Dfao, prefix: &str) -> String {
    let alphabet = a.alphabet();
    let k = alphabet.size();
    let mut out = String::from("digraph {\n  rankdir=LR;\n  node [shape=circle];\n");
    out.push_str("  start [shape=none, label=\"\"];\n");
    writeln!(out, "  start -> q{};", a.start()).unwrap();
    for s in 0..a.num_states() as u32 {
        let label = match a.output(s) {
            Some(o) => format!("{prefix}{s}/{o}"),
            None => format!("{prefix}{s}"),
        };
        writeln!(out, "  q{s} [label=\"{label}\"];").unwrap();
    }
    for s in 0..a.num_states() as u32 {
        let mut by_target: BTreeMap<u32, Vec<String>> = BTreeMap::new();
        for sym in 0..k as Symbol {
            if let Some(t) = a.step(s, sym) {
                by_target.entry(t).or_default().push(alphabet.symbol_text(sym));
            }
        }
        for (t, syms) in by_target {
            writeln!(out, "  q{s} -> q{t} [label=\"{}\"];", syms.join(", ")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dfao {
        Dfao::new(Alphabet::uniform(2, 2), 0, vec![0, 1, NONE, NONE, NONE, NONE, 0, NONE], vec![Some(1), None])
            .unwrap()
    }

    #[test]
    fn text_round_trip_is_exact() {
        let a = sample();
        let text = to_text(&a);
        assert_eq!(
            text,
            "alphabet: 2x2\nstates: 2 start: 0\nstate 0 output 1\n  [0,0] -> 0\n  [0,1] -> 1\nstate 1 output -\n  [1,0] -> 0\n"
        );
        let back = from_text(&text).unwrap();
        assert_eq!(back, a);
        assert_eq!(to_text(&back), text);
    }

    #[test]
    fn format_errors_name_the_line() {
        let err = from_text("alphabet: 2\nstates: 1 start: 0\nstate 0 output 0\n  5 -> 0\n").unwrap_err();
        assert_eq!(err, Error::Format { line: 4, msg: "bad symbol".into() });
    }

    #[test]
    fn dot_has_one_node_per_state() {
        let dot = to_dot(&sample(), "");
        assert!(dot.contains("q0 [label=\"0/1\"]"));
        assert!(dot.contains("start -> q0"));
        assert_eq!(dot.matches("[label=\"").count() - dot.matches("-> q").count() + 1, 2);
    }
}

use crate::error::{Error, Result};

use super::alphabet::{Alphabet, Symbol};
use super::dfa::Dfa;
use super::nfa::Nfa;

/// Compiles a regular expression over `alphabet` to its minimal DFA.
///
/// The syntax has union `|`, concatenation, Kleene star `*`, parentheses,
/// and symbol literals: a single bare digit on a scalar alphabet, or a bracketed
/// column such as `[0,1]`. Whitespace is ignored. The empty pattern matches
/// only the empty string.
pub fn regex_to_dfa(pattern: &str, alphabet: &Alphabet) -> Result<Dfa> {
    let mut p = Parser { text: pattern.as_bytes(), pos: 0, alphabet, nfa: Nfa::new(alphabet.clone()) };
    let (start, end) = p.union()?;
    p.skip_ws();
    if p.pos < p.text.len() {
        return Err(p.error("unexpected character"));
    }
    p.nfa.add_start(start);
    p.nfa.set_accepting(end, true);
    Ok(p.nfa.determinize().minimize())
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    alphabet: &'a Alphabet,
    nfa: Nfa,
}

/// Thompson fragment: entry and exit state.
type Frag = (u32, u32);

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn epsilon(&mut self) -> Frag {
        let s = self.nfa.add_state(false);
        (s, s)
    }

    fn union(&mut self) -> Result<Frag> {
        let first = self.concat()?;
        if self.peek() != Some(b'|') {
            return Ok(first);
        }
        let start = self.nfa.add_state(false);
        let end = self.nfa.add_state(false);
        self.nfa.add_eps(start, first.0);
        self.nfa.add_eps(first.1, end);
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let next = self.concat()?;
            self.nfa.add_eps(start, next.0);
            self.nfa.add_eps(next.1, end);
        }
        Ok((start, end))
    }

    fn concat(&mut self) -> Result<Frag> {
        let mut acc: Option<Frag> = None;
        while let Some(c) = self.peek() {
            if c == b'|' || c == b')' {
                break;
            }
            let f = self.starred()?;
            acc = Some(match acc {
                None => f,
                Some((s, e)) => {
                    self.nfa.add_eps(e, f.0);
                    (s, f.1)
                }
            });
        }
        Ok(acc.unwrap_or_else(|| self.epsilon()))
    }

    fn starred(&mut self) -> Result<Frag> {
        let mut f = self.atom()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let hub = self.nfa.add_state(false);
            self.nfa.add_eps(hub, f.0);
            self.nfa.add_eps(f.1, hub);
            f = (hub, hub);
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Frag> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.union()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(f)
            }
            Some(b'[') => {
                let at = self.pos;
                let close = self.text[at..]
                    .iter()
                    .position(|&c| c == b']')
                    .ok_or_else(|| self.error("unterminated `[`"))?;
                let lit = std::str::from_utf8(&self.text[at..=at + close]).expect("ascii slice");
                let sym = self.literal(lit, at)?;
                self.pos = at + close + 1;
                Ok(self.symbol(sym))
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                self.pos += 1;
                let lit = std::str::from_utf8(&self.text[at..self.pos]).expect("ascii slice");
                let sym = self.literal(lit, at)?;
                Ok(self.symbol(sym))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of pattern")),
        }
    }

    fn literal(&self, lit: &str, at: usize) -> Result<Symbol> {
        self.alphabet
            .parse_symbol(lit)
            .map_err(|_| Error::Parse { pos: at, msg: format!("`{lit}` is not a symbol of {}", self.alphabet) })
    }

    fn symbol(&mut self, sym: Symbol) -> Frag {
        let s = self.nfa.add_state(false);
        let e = self.nfa.add_state(false);
        self.nfa.add_edge(s, sym, e);
        (s, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHIFT: &str = "([0,0]|[0,1][1,1]*[1,0])*";

    #[test]
    fn shift_regex_accepts_column_pairs() {
        let pair = Alphabet::uniform(2, 2);
        let d = regex_to_dfa(SHIFT, &pair).unwrap();
        assert!(d.accepts_tapes(&[vec![0, 1], vec![1, 0]]).unwrap());
        assert!(d.accepts_tapes(&[vec![1, 0, 0, 1, 0], vec![1, 0, 0, 1, 0, 0]]).unwrap());
        assert!(!d.accepts_tapes(&[vec![1, 0], vec![1, 0]]).unwrap());
    }

    #[test]
    fn empty_pattern_is_epsilon() {
        let d = regex_to_dfa("", &Alphabet::scalar(2)).unwrap();
        assert!(d.accepts(&[]).unwrap());
        assert!(!d.accepts(&[0]).unwrap());
    }

    #[test]
    fn scalar_literals_and_union() {
        let d = regex_to_dfa("(0|10)*(1|)", &Alphabet::scalar(2)).unwrap();
        assert!(d.accepts(&[1, 0, 1, 0, 0, 1]).unwrap());
        assert!(!d.accepts(&[1, 1]).unwrap());
        assert_eq!(d.num_states(), 2);
    }

    #[test]
    fn errors_carry_position() {
        let pair = Alphabet::uniform(2, 2);
        assert!(matches!(regex_to_dfa("([0,0]", &pair), Err(Error::Parse { pos: 6, .. })));
        assert!(matches!(regex_to_dfa("[0,0][2,0]", &pair), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(regex_to_dfa("[0,0])", &pair), Err(Error::Parse { pos: 5, .. })));
    }
}

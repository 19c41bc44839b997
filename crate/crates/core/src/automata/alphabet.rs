use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Input symbol index into an [`Alphabet`].
pub type Symbol = u32;

/// A product of digit ranges, one per tape. A scalar alphabet has one tape.
///
/// Columns are encoded mixed-radix with tape 0 most significant, so symbol
/// order is lexicographic order on tuples and the all-zero column is symbol 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    radices: Vec<u32>,
}

impl Alphabet {
    pub fn new(radices: Vec<u32>) -> Result<Self> {
        if radices.is_empty() || radices.contains(&0) {
            return Err(Error::Unsupported(format!("alphabet radices {radices:?}")));
        }
        let size: u64 = radices.iter().map(|&r| r as u64).product();
        if size > u32::MAX as u64 / 2 {
            return Err(Error::Overflow(format!("alphabet of size {size}")));
        }
        Ok(Alphabet { radices })
    }

    /// Digits `0..radix` on a single tape.
    pub fn scalar(radix: u32) -> Self {
        Alphabet::new(vec![radix]).expect("positive radix")
    }

    /// `tapes` copies of the digit range `0..radix`.
    pub fn uniform(radix: u32, tapes: usize) -> Self {
        Alphabet::new(vec![radix; tapes]).expect("positive radix")
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    pub fn tapes(&self) -> usize {
        self.radices.len()
    }

    pub fn size(&self) -> usize {
        self.radices.iter().map(|&r| r as usize).product()
    }

    pub fn encode(&self, column: &[u32]) -> Result<Symbol> {
        if column.len() != self.radices.len() || column.iter().zip(&self.radices).any(|(d, r)| d >= r) {
            return Err(Error::SymbolOutOfRange { symbol: column.to_vec(), alphabet: self.to_string() });
        }
        Ok(column.iter().zip(&self.radices).fold(0, |acc, (&d, &r)| acc * r + d))
    }

    pub fn decode(&self, mut sym: Symbol) -> Vec<u32> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = sym % r;
            sym /= r;
        }
        out
    }

    /// Alphabet with `tape` removed.
    pub fn without(&self, tape: usize) -> Result<Alphabet> {
        let mut radices = self.radices.clone();
        radices.remove(tape);
        Alphabet::new(radices)
    }

    /// Zips equal-length tape strings into a symbol sequence.
    pub fn columns(&self, tapes: &[Vec<u32>]) -> Result<Vec<Symbol>> {
        if tapes.len() != self.tapes() {
            return Err(Error::AlphabetMismatch(format!("{} tapes", tapes.len()), self.to_string()));
        }
        let len = tapes.first().map_or(0, Vec::len);
        if tapes.iter().any(|t| t.len() != len) {
            return Err(Error::Unsupported("tapes of unequal length".into()));
        }
        (0..len)
            .map(|i| {
                let col: Vec<u32> = tapes.iter().map(|t| t[i]).collect();
                self.encode(&col)
            })
            .collect()
    }

    /// Left-pads tapes with zeros to a common length and zips them.
    pub fn padded_columns(&self, tapes: &[Vec<u32>]) -> Result<Vec<Symbol>> {
        let len = tapes.iter().map(Vec::len).max().unwrap_or(0);
        let padded: Vec<Vec<u32>> = tapes.iter().map(|t| pad_left(t, len)).collect();
        self.columns(&padded)
    }

    /// Formats a symbol as a bare digit (one tape) or `[d1,d2,...]`.
    pub fn symbol_text(&self, sym: Symbol) -> String {
        let digits = self.decode(sym);
        if digits.len() == 1 {
            digits[0].to_string()
        } else {
            let parts: Vec<String> = digits.iter().map(u32::to_string).collect();
            format!("[{}]", parts.join(","))
        }
    }

    /// Inverse of [`Alphabet::symbol_text`].
    pub fn parse_symbol(&self, text: &str) -> Result<Symbol> {
        let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
        let digits: std::result::Result<Vec<u32>, _> = inner.split(',').map(|s| s.trim().parse::<u32>()).collect();
        let digits = digits.map_err(|_| Error::Parse { pos: 0, msg: format!("bad symbol `{text}`") })?;
        self.encode(&digits)
    }
}

pub fn pad_left(digits: &[u32], len: usize) -> Vec<u32> {
    let mut out = vec![0; len.saturating_sub(digits.len())];
    out.extend_from_slice(digits);
    out
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.radices.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let radices: std::result::Result<Vec<u32>, _> = s.trim().split('x').map(|p| p.trim().parse::<u32>()).collect();
        Alphabet::new(radices.map_err(|_| Error::Parse { pos: 0, msg: format!("bad alphabet `{s}`") })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_is_lexicographic() {
        let a = Alphabet::new(vec![2, 3]).unwrap();
        assert_eq!(a.size(), 6);
        let syms: Vec<Symbol> = [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]]
            .iter()
            .map(|c| a.encode(c).unwrap())
            .collect();
        assert_eq!(syms, vec![0, 1, 2, 3, 4, 5]);
        for s in 0..6 {
            assert_eq!(a.encode(&a.decode(s)).unwrap(), s);
        }
        assert!(a.encode(&[2, 0]).is_err());
        assert_eq!(a.symbol_text(4), "[1,1]");
        assert_eq!(a.parse_symbol("[1,2]").unwrap(), 5);
        assert_eq!("2x3".parse::<Alphabet>().unwrap(), a);
    }

    #[test]
    fn padded_columns() {
        let a = Alphabet::uniform(2, 2);
        let cols = a.padded_columns(&[vec![1, 0, 1, 0, 0], vec![1, 0, 0, 1, 0, 1]]).unwrap();
        let first: Vec<u32> = cols.iter().map(|&s| a.decode(s)[0]).collect();
        assert_eq!(first, vec![0, 1, 0, 1, 0, 0]);
    }
}

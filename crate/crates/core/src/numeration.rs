//! Zeckendorf, Pell and purely periodic Ostrowski numeration systems.
//!
//! Digits are stored most significant first. Position `i` counts from the
//! least significant digit, and digit `a_i` weighs the basis element `U_i`.

use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::automata::{Alphabet, Dfa, Nfa};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SystemKind {
    /// Basis `F_{i+2}`: 1, 2, 3, 5, 8, ...
    Fibonacci,
    /// Basis `P_{i+1}`: 1, 2, 5, 12, 29, ...
    Pell,
    /// Basis of convergent denominators of `[0; (d_1, ..., d_m)]`.
    Ostrowski(Vec<u32>),
}

/// A numeration system together with a lazily grown basis cache.
#[derive(Debug)]
pub struct NumerationSystem {
    kind: SystemKind,
    basis: RwLock<Vec<BigUint>>,
}

impl Clone for NumerationSystem {
    fn clone(&self) -> Self {
        NumerationSystem { kind: self.kind.clone(), basis: RwLock::new(self.basis.read().unwrap().clone()) }
    }
}

impl PartialEq for NumerationSystem {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for NumerationSystem {}

impl NumerationSystem {
    pub fn new(kind: SystemKind) -> Result<Self> {
        if let SystemKind::Ostrowski(p) = &kind {
            if p.is_empty() || p.contains(&0) {
                return Err(Error::Unsupported(format!("Ostrowski period {p:?}")));
            }
        }
        let sys = NumerationSystem { kind, basis: RwLock::new(Vec::new()) };
        let (u1, u0) = (sys.u_minus_one(), 1u32);
        *sys.basis.write().unwrap() = vec![BigUint::from(u0), BigUint::from(sys.recurrence(1) * u0 + u1)];
        Ok(sys)
    }

    pub fn fibonacci() -> Self {
        NumerationSystem::new(SystemKind::Fibonacci).expect("valid system")
    }

    pub fn pell() -> Self {
        NumerationSystem::new(SystemKind::Pell).expect("valid system")
    }

    pub fn ostrowski(period: Vec<u32>) -> Result<Self> {
        NumerationSystem::new(SystemKind::Ostrowski(period))
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    /// Partial quotients repeating through the basis recurrence.
    pub fn period(&self) -> &[u32] {
        match &self.kind {
            SystemKind::Fibonacci => &[1],
            SystemKind::Pell => &[2],
            SystemKind::Ostrowski(p) => p,
        }
    }

    /// Coefficient `d_i` in `U_i = d_i U_{i-1} + U_{i-2}`, for `i >= 1`.
    pub fn recurrence(&self, i: usize) -> u32 {
        let p = self.period();
        p[(i + p.len() - 1) % p.len()]
    }

    /// Largest digit allowed at position `i`, namely `d_{i+1}`.
    pub fn digit_bound(&self, i: usize) -> u32 {
        self.recurrence(i + 1)
    }

    /// `U_{-1}`, the value extending the recurrence one step down.
    pub fn u_minus_one(&self) -> u32 {
        match self.kind {
            SystemKind::Fibonacci => 1,
            _ => 0,
        }
    }

    /// Whether the least significant digit must stay below its bound.
    pub(crate) fn strict_last(&self) -> bool {
        !matches!(self.kind, SystemKind::Fibonacci)
    }

    /// Number of distinct digit values.
    pub fn radix(&self) -> u32 {
        self.period().iter().copied().max().unwrap_or(1) + 1
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::scalar(self.radix())
    }

    fn ensure(&self, len: usize) {
        if self.basis.read().unwrap().len() >= len {
            return;
        }
        let mut cache = self.basis.write().unwrap();
        while cache.len() < len {
            let i = cache.len();
            let next = &cache[i - 1] * self.recurrence(i) + &cache[i - 2];
            cache.push(next);
        }
    }

    /// `U_i`.
    pub fn basis(&self, i: usize) -> BigUint {
        self.ensure(i + 1);
        self.basis.read().unwrap()[i].clone()
    }

    /// Greedy representation of `n`.
    pub fn encode(&self, n: &BigUint) -> Representation {
        if n.is_zero() {
            return Representation(vec![0]);
        }
        let mut len = self.basis.read().unwrap().len();
        while &self.basis.read().unwrap()[len - 1] <= n {
            len = len * 2;
            self.ensure(len);
        }
        let cache = self.basis.read().unwrap();
        let top = cache[..len].partition_point(|u| u <= n);
        let mut rest = n.clone();
        let mut digits = Vec::with_capacity(top);
        for u in cache[..top].iter().rev() {
            let mut a = 0;
            while &rest >= u {
                rest -= u;
                a += 1;
            }
            digits.push(a);
        }
        debug_assert!(rest.is_zero());
        Representation(digits)
    }

    pub fn encode_u64(&self, n: u64) -> Representation {
        self.encode(&BigUint::from(n))
    }

    /// Digit rules of the system, ignoring leading zeros.
    pub fn is_valid(&self, digits: &[u32]) -> bool {
        let len = digits.len();
        for (j, &a) in digits.iter().enumerate() {
            let i = len - 1 - j;
            let bound = self.digit_bound(i);
            if a > bound {
                return false;
            }
            if a == bound {
                if i == 0 && self.strict_last() {
                    return false;
                }
                if i > 0 && digits[j + 1] != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// `Σ a_i U_i`, without validity checks.
    pub fn value(&self, digits: &[u32]) -> BigUint {
        self.ensure(digits.len());
        let cache = self.basis.read().unwrap();
        let mut total = BigUint::zero();
        for (u, &a) in cache.iter().zip(digits.iter().rev()) {
            if a != 0 {
                total += u * a;
            }
        }
        total
    }

    /// Value of a valid digit string.
    pub fn decode(&self, digits: &[u32]) -> Result<BigUint> {
        if !self.is_valid(digits) {
            return Err(Error::InvalidRepresentation { system: self.to_string(), digits: digits.to_vec() });
        }
        Ok(self.value(digits))
    }

    /// Minimal DFA of the valid strings, leading zeros allowed.
    pub fn validity_dfa(&self) -> Dfa {
        let m = self.period().len();
        let mut nfa = Nfa::new(self.alphabet());
        // State (p, f): the next digit sits at a position ≡ p (mod m); f marks
        // that the previous digit reached its bound.
        let id = |p: usize, f: bool| (2 * p + f as usize) as u32;
        for p in 0..m {
            for f in [false, true] {
                let last = p == m - 1;
                nfa.add_state(last && !(f && self.strict_last()));
            }
        }
        for p in 0..m {
            nfa.add_start(id(p, false));
            let bound = self.period()[p];
            let next = (p + m - 1) % m;
            for f in [false, true] {
                for a in 0..=bound {
                    if f && a != 0 {
                        continue;
                    }
                    nfa.add_edge(id(p, f), a, id(next, a == bound));
                }
            }
        }
        nfa.determinize().minimize()
    }

    pub fn representation(&self, digits: Vec<u32>) -> Result<Representation> {
        if !self.is_valid(&digits) {
            return Err(Error::InvalidRepresentation { system: self.to_string(), digits });
        }
        Ok(Representation::trimmed(digits))
    }
}

impl fmt::Display for NumerationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SystemKind::Fibonacci => write!(f, "fib"),
            SystemKind::Pell => write!(f, "pell"),
            SystemKind::Ostrowski(p) => {
                let parts: Vec<String> = p.iter().map(u32::to_string).collect();
                write!(f, "ost:[{}]", parts.join(","))
            }
        }
    }
}

impl FromStr for NumerationSystem {
    type Err = Error;

    /// Accepts `fib`, `pell`, `ost:[d1,...]` and `ost[d1,...]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "fib" => return Ok(NumerationSystem::fibonacci()),
            "pell" => return Ok(NumerationSystem::pell()),
            _ => {}
        }
        let body = s
            .strip_prefix("ost")
            .map(|r| r.trim_start_matches(':').trim())
            .and_then(|r| r.strip_prefix('['))
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("unknown numeration system `{s}`") })?;
        let period: std::result::Result<Vec<u32>, _> = body.split(',').map(|d| d.trim().parse::<u32>()).collect();
        let period = period.map_err(|_| Error::Parse { pos: 0, msg: format!("bad period in `{s}`") })?;
        NumerationSystem::ostrowski(period)
    }
}

/// Digit string, most significant first, without leading zeros except for
/// the single digit representing zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Representation(Vec<u32>);

impl Representation {
    fn trimmed(mut digits: Vec<u32>) -> Self {
        let lead = digits.iter().take_while(|&&d| d == 0).count().min(digits.len().saturating_sub(1));
        digits.drain(..lead);
        if digits.is_empty() {
            digits.push(0);
        }
        Representation(digits)
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&digits_to_string(&self.0))
    }
}

/// One character per digit when all digits are below 10, otherwise
/// comma-separated.
pub fn digits_to_string(digits: &[u32]) -> String {
    if digits.iter().all(|&d| d < 10) {
        digits.iter().map(|&d| char::from_digit(d, 10).unwrap()).collect()
    } else {
        let parts: Vec<String> = digits.iter().map(u32::to_string).collect();
        parts.join(",")
    }
}

/// Inverse of [`digits_to_string`].
pub fn parse_digits(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let bad = |pos| Error::Parse { pos, msg: format!("bad digit string `{s}`") };
    if s.contains(',') {
        s.split(',').map(|p| p.trim().parse::<u32>().map_err(|_| bad(0))).collect()
    } else {
        s.chars().enumerate().map(|(i, c)| c.to_digit(10).ok_or_else(|| bad(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits(s: &str) -> Vec<u32> {
        parse_digits(s).unwrap()
    }

    fn ost(p: &[u32]) -> NumerationSystem {
        NumerationSystem::ostrowski(p.to_vec()).unwrap()
    }

    #[test]
    fn basis_examples() {
        let take = |s: &NumerationSystem, k: usize| -> Vec<u64> {
            (0..k).map(|i| u64::try_from(s.basis(i)).unwrap()).collect()
        };
        assert_eq!(take(&NumerationSystem::fibonacci(), 5), vec![1, 2, 3, 5, 8]);
        assert_eq!(take(&NumerationSystem::pell(), 5), vec![1, 2, 5, 12, 29]);
        assert_eq!(take(&ost(&[2, 1]), 6), vec![1, 2, 3, 8, 11, 30]);
    }

    #[test]
    fn encode_examples() {
        let fib = NumerationSystem::fibonacci();
        assert_eq!(fib.encode_u64(43).to_string(), "10010001");
        assert_eq!(fib.encode_u64(32).to_string(), "1010100");
        assert_eq!(NumerationSystem::pell().encode_u64(27).to_string(), "2011");
        assert_eq!(ost(&[2, 1]).encode_u64(5).to_string(), "110");
        for s in [fib, NumerationSystem::pell(), ost(&[3, 1, 1])] {
            assert_eq!(s.encode_u64(0).to_string(), "0");
        }
    }

    #[test]
    fn decode_examples() {
        let fib = NumerationSystem::fibonacci();
        assert_eq!(fib.decode(&digits("100100")).unwrap(), BigUint::from(16u32));
        assert_eq!(ost(&[2, 1]).decode(&digits("10010")).unwrap(), BigUint::from(13u32));
        assert_eq!(fib.decode(&digits("0")).unwrap(), BigUint::zero());
        assert!(matches!(fib.decode(&digits("110")), Err(Error::InvalidRepresentation { .. })));
    }

    #[test]
    fn validity_examples() {
        assert!(!NumerationSystem::fibonacci().is_valid(&digits("110")));
        assert!(NumerationSystem::pell().is_valid(&digits("120")));
        assert!(!NumerationSystem::pell().is_valid(&digits("12")));
        assert!(ost(&[2, 1]).is_valid(&digits("20110")));
    }

    #[test]
    fn validity_dfa_sizes() {
        assert_eq!(NumerationSystem::fibonacci().validity_dfa().num_states(), 2);
        assert_eq!(ost(&[2, 1]).validity_dfa().num_states(), 6);
        let pell = NumerationSystem::pell().validity_dfa();
        assert!(pell.accepts(&digits("120")).unwrap());
        assert!(!pell.accepts(&digits("12")).unwrap());
    }

    #[test]
    fn system_text_round_trip() {
        for text in ["fib", "pell", "ost:[2,1]", "ost:[3,1,1]"] {
            assert_eq!(text.parse::<NumerationSystem>().unwrap().to_string(), text);
        }
        assert_eq!("ost[2,1]".parse::<NumerationSystem>().unwrap(), ost(&[2, 1]));
        assert!("ost:[0]".parse::<NumerationSystem>().is_err());
    }

    #[test]
    fn pell_agrees_with_ostrowski_two() {
        let pell = NumerationSystem::pell();
        let o2 = ost(&[2]);
        for n in 0..100_000u64 {
            assert_eq!(pell.encode_u64(n), o2.encode_u64(n), "{n}");
        }
        assert_eq!(pell.validity_dfa(), o2.validity_dfa());
    }
}

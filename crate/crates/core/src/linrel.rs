//! Synchronized automata for linear relations over a numeration system.
//!
//! A relation `Σ c_t · val_{σ_t}(x_t) = c_0` reads its tapes most significant
//! digit first, where `val_σ(x)` is the value of `x` followed by `σ` zeros.
//! The automaton keeps a carry `(X, Y)` such that the part of the sum read
//! so far equals `X·U_{p+1} + Y·U_p`, with `p` the position of the next digit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::automata::{self, Alphabet, Dfa, Nfa};
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;

/// Maximum number of carry states explored before giving up.
pub const STATE_CAP: usize = 1_000_000;

/// `coeff · val_shift(tape var)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub var: usize,
    pub coeff: i64,
    pub shift: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRelation {
    system: NumerationSystem,
    vars: Vec<String>,
    terms: Vec<Term>,
    constant: i64,
}

/// Tuning knobs for [`LinearRelation::to_dfa_with`].
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Multiplier applied to the default carry bound.
    pub bound_factor: i64,
    pub state_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { bound_factor: 1, state_cap: STATE_CAP }
    }
}

impl LinearRelation {
    /// Tapes are the variables in `vars` order; several terms may share a tape.
    pub fn new(system: NumerationSystem, vars: Vec<String>, terms: Vec<Term>, constant: i64) -> Result<Self> {
        if vars.is_empty() || terms.iter().all(|t| t.coeff == 0) {
            return Err(Error::Unsupported("relation needs a nonzero coefficient".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.var >= vars.len()) {
            return Err(Error::Unsupported(format!("term refers to tape {} of {}", t.var, vars.len())));
        }
        if vars.len() > 64 {
            return Err(Error::Unsupported("more than 64 tapes".into()));
        }
        Ok(LinearRelation { system, vars, terms, constant })
    }

    /// One tape per coefficient, named `x0, x1, ...`.
    pub fn simple(system: NumerationSystem, coeffs: &[i64], shifts: &[u32], constant: i64) -> Result<Self> {
        let vars = (0..coeffs.len()).map(|i| format!("x{i}")).collect();
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &coeff)| Term { var: i, coeff, shift: shifts.get(i).copied().unwrap_or(0) })
            .collect();
        LinearRelation::new(system, vars, terms, constant)
    }

    pub fn system(&self) -> &NumerationSystem {
        &self.system
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn tapes(&self) -> usize {
        self.vars.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::uniform(self.system.radix(), self.tapes())
    }

    /// Big-integer oracle: every tape valid and the equation holds.
    pub fn holds(&self, tapes: &[Vec<u32>]) -> bool {
        if tapes.len() != self.tapes() || tapes.iter().any(|t| !self.system.is_valid(t)) {
            return false;
        }
        let mut total = BigInt::from(0);
        for t in &self.terms {
            let mut digits = tapes[t.var].clone();
            digits.extend(std::iter::repeat(0).take(t.shift as usize));
            total += BigInt::from(self.system.value(&digits)) * t.coeff;
        }
        total == BigInt::from(self.constant)
    }

    /// Carry magnitude beyond which a state can no longer reach acceptance.
    pub fn carry_bound(&self) -> i64 {
        let maxd = *self.system.period().iter().max().unwrap() as i64;
        let smax = self.terms.iter().map(|t| t.shift).max().unwrap_or(0) as i64;
        let sum: i64 = self.terms.iter().map(|t| t.coeff.abs() * (maxd + 1) * (smax + 2)).sum();
        (self.constant.abs() + sum) * (maxd + 2)
    }

    pub fn to_dfa(&self) -> Result<Dfa> {
        self.to_dfa_with(BuildOptions::default())
    }

    /// Phase-guessing carry NFA, trimmed, determinized and minimized. Every
    /// tape is checked against the digit rules along the way.
    pub fn to_dfa_with(&self, opts: BuildOptions) -> Result<Dfa> {
        let sys = &self.system;
        let period = sys.period();
        let m = period.len();
        let alphabet = self.alphabet();
        let bound = self.carry_bound() * opts.bound_factor;
        let strict = sys.strict_last();

        // inject[p][sym] = (ΔX, ΔY), or None when a digit exceeds the bound.
        let columns: Vec<Vec<u32>> = (0..alphabet.size() as u32).map(|s| alphabet.decode(s)).collect();
        let mut inject: Vec<Vec<Option<(i64, i64)>>> = Vec::with_capacity(m);
        for p in 0..m {
            let weights: Vec<(i64, i64)> = self.terms.iter().map(|t| shift_weights(sys, p, t.shift)).collect();
            let row = columns
                .iter()
                .map(|col| {
                    if col.iter().any(|&a| a > period[p]) {
                        return None;
                    }
                    let (mut dx, mut dy) = (0i64, 0i64);
                    for (t, &(wa, wb)) in self.terms.iter().zip(&weights) {
                        let a = col[t.var] as i64;
                        dx += t.coeff * a * wa;
                        dy += t.coeff * a * wb;
                    }
                    Some((dx, dy))
                })
                .collect();
            inject.push(row);
        }
        let maxed: Vec<Vec<u64>> = (0..m)
            .map(|p| {
                columns
                    .iter()
                    .map(|col| col.iter().enumerate().fold(0u64, |acc, (t, &a)| acc | (((a == period[p]) as u64) << t)))
                    .collect()
            })
            .collect();
        let nonzero: Vec<u64> = columns
            .iter()
            .map(|col| col.iter().enumerate().fold(0u64, |acc, (t, &a)| acc | (((a != 0) as u64) << t)))
            .collect();

        type Key = (u32, i64, i64, u64);
        let u_minus_one = sys.u_minus_one() as i64;
        let accepting = |&(phase, x, y, flags): &Key| {
            phase as usize == m - 1 && x + y * u_minus_one == self.constant && !(strict && flags != 0)
        };
        let mut nfa = Nfa::new(alphabet.clone());
        let mut ids: HashMap<Key, u32> = HashMap::new();
        let mut states: Vec<Key> = Vec::new();
        for p in 0..m as u32 {
            let key = (p, 0, 0, 0);
            let id = nfa.add_state(accepting(&key));
            ids.insert(key, id);
            states.push(key);
            nfa.add_start(id);
        }
        let mut i = 0;
        while i < states.len() {
            let (phase, x, y, flags) = states[i];
            let p = phase as usize;
            let d = period[p] as i64;
            let next_phase = ((p + m - 1) % m) as u32;
            for (sym, inj) in inject[p].iter().enumerate() {
                let Some((dx, dy)) = *inj else { continue };
                if flags & nonzero[sym] != 0 {
                    continue;
                }
                let nx = d * x + y + dx;
                let ny = x + dy;
                if nx.abs() > bound || ny.abs() > bound {
                    continue;
                }
                let key = (next_phase, nx, ny, maxed[p][sym]);
                let id = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= opts.state_cap {
                            return Err(Error::StateCap { relation: self.to_string(), cap: opts.state_cap });
                        }
                        let id = nfa.add_state(accepting(&key));
                        ids.insert(key, id);
                        states.push(key);
                        id
                    }
                };
                nfa.add_edge(i as u32, sym as u32, id);
            }
            i += 1;
        }
        Ok(nfa.trim().determinize().minimize())
    }
}

/// `(A, B)` with `U_{p+σ} = A·U_p + B·U_{p-1}`, where only `p mod m` matters.
fn shift_weights(sys: &NumerationSystem, p: usize, shift: u32) -> (i64, i64) {
    let (mut prev, mut cur) = ((0i64, 1i64), (1i64, 0i64));
    for j in 1..=shift as usize {
        let d = sys.recurrence(p + j) as i64;
        let next = (d * cur.0 + prev.0, d * cur.1 + prev.1);
        prev = cur;
        cur = next;
    }
    cur
}

/// DFA of the relation; see [`LinearRelation::to_dfa`].
pub fn relation_dfa(rel: &LinearRelation) -> Result<Dfa> {
    rel.to_dfa()
}

/// Pair regexes for the shift relation `val(v) = val(u·0)`, for the
/// systems that have one.
pub fn shift_regex(sys: &NumerationSystem) -> Option<&'static str> {
    match sys.to_string().as_str() {
        "fib" => Some("([0,0]|[0,1][1,1]*[1,0])*"),
        "pell" | "ost:[2]" => Some("([0,0]|([0,1][1,1]*([1,0]|[1,2][2,0]))|[0,2][2,0])*"),
        "ost:[3]" => Some(
            "([0,0]|[0,2][2,2]*[2,0]|([0,2][2,2]*[2,3]|[0,3])[3,0]|([0,1]|[0,2][2,2]*[2,1])([1,1]|[1,2][2,2]*[2,1])*(([1,2][2,2]*[2,3]|[1,3])[3,0]|[1,2][2,2]*[2,0]|[1,0]))*",
        ),
        "ost:[2,1]" => Some("([0,0]|([0,1][1,1][1,0]|[0,1][1,0])|[0,2][2,0])*"),
        "ost:[3,1,1]" => Some("([0,0]|[0,1][1,0]|[0,1][1,1][1,0]|[0,2][2,0]|[0,2][2,1][1,0]|[0,3][3,0])*"),
        _ => None,
    }
}

/// How to build a shift automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftPath {
    /// The stored pair regex, intersected with validity on both tapes.
    Regex,
    /// The carry construction with offsets `(k, 0)`.
    Relation,
    /// `k` single column shifts composed by projection, validity on the ends.
    Chained,
}

/// Pure string relation `v = u·0^k` on zero-padded tapes `(u, v)`.
pub fn column_shift_dfa(radix: u32, k: usize) -> Dfa {
    let pair = Alphabet::uniform(radix, 2);
    let mut nfa = Nfa::new(pair.clone());
    // State: the last k digits of v, oldest first; u must replay them.
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let zero = vec![0; k];
    let mut queue = vec![zero.clone()];
    ids.insert(zero.clone(), nfa.add_state(true));
    nfa.add_start(0);
    let mut i = 0;
    while i < queue.len() {
        let buf = queue[i].clone();
        let from = ids[&buf];
        for v in 0..radix {
            let (u, next) = if k == 0 {
                (v, Vec::new())
            } else {
                let mut next = buf[1..].to_vec();
                next.push(v);
                (buf[0], next)
            };
            let to = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = nfa.add_state(next.iter().all(|&d| d == 0));
                    ids.insert(next.clone(), id);
                    queue.push(next);
                    id
                }
            };
            nfa.add_edge(from, pair.encode(&[u, v]).unwrap(), to);
        }
        i += 1;
    }
    nfa.determinize().minimize()
}

fn both_valid(sys: &NumerationSystem, d: &Dfa) -> Result<Dfa> {
    let valid = sys.validity_dfa();
    let pair = d.alphabet().clone();
    let vu = automata::lift(&valid, &pair, &[0])?;
    let vv = automata::lift(&valid, &pair, &[1])?;
    automata::intersect(&automata::intersect(d, &vu)?, &vv)
}

/// `{(u, v) : v = u·0^k}` over valid strings.
pub fn multi_shift_dfa(sys: &NumerationSystem, k: u32, path: ShiftPath) -> Result<Dfa> {
    match path {
        ShiftPath::Relation => {
            let vars = vec!["u".to_string(), "v".to_string()];
            let terms = vec![Term { var: 0, coeff: 1, shift: k }, Term { var: 1, coeff: -1, shift: 0 }];
            LinearRelation::new(sys.clone(), vars, terms, 0)?.to_dfa()
        }
        ShiftPath::Regex if k == 1 => {
            let pattern = shift_regex(sys)
                .ok_or_else(|| Error::Unsupported(format!("no stored shift regex for {sys}")))?;
            both_valid(sys, &automata::regex_to_dfa(pattern, &Alphabet::uniform(sys.radix(), 2))?)
        }
        ShiftPath::Regex | ShiftPath::Chained => {
            let radix = sys.radix();
            let step = match path {
                ShiftPath::Regex => {
                    let pattern = shift_regex(sys)
                        .ok_or_else(|| Error::Unsupported(format!("no stored shift regex for {sys}")))?;
                    automata::regex_to_dfa(pattern, &Alphabet::uniform(radix, 2))?
                }
                _ => column_shift_dfa(radix, 1),
            };
            let triple = Alphabet::uniform(radix, 3);
            let mut acc = column_shift_dfa(radix, 0);
            for _ in 0..k {
                let left = automata::lift(&acc, &triple, &[0, 1])?;
                let right = automata::lift(&step, &triple, &[1, 2])?;
                acc = automata::project(&automata::intersect(&left, &right)?, &[1])?;
            }
            both_valid(sys, &acc)
        }
    }
}

/// Single shift `{(u, v) : val(v) = val(u·0)}`.
pub fn shift_dfa(sys: &NumerationSystem, path: ShiftPath) -> Result<Dfa> {
    multi_shift_dfa(sys, 1, path)
}

/// Triples `(u, n, z)` with `z = ⌊(s·u + a·n - offset) / c⌋`, as the union of
/// `s·u + a·n - c·z = offset + r` over `0 <= r < c`.
pub fn floor_div_relation(sys: &NumerationSystem, s: i64, a: i64, c: i64, offset: i64) -> Result<Dfa> {
    if c < 1 {
        return Err(Error::NotPositive(c.to_string()));
    }
    let vars = vec!["u".to_string(), "n".to_string(), "z".to_string()];
    let mut acc: Option<Dfa> = None;
    for r in 0..c {
        let mut terms = vec![Term { var: 0, coeff: s, shift: 0 }, Term { var: 2, coeff: -c, shift: 0 }];
        if a != 0 {
            terms.push(Term { var: 1, coeff: a, shift: 0 });
        }
        let d = LinearRelation::new(sys.clone(), vars.clone(), terms, offset + r)?.to_dfa()?;
        acc = Some(match acc {
            None => d,
            Some(prev) => automata::union(&prev, &d)?,
        });
    }
    // `n` is unconstrained when a = 0, but it must still be a valid string.
    let d = acc.expect("c >= 1");
    let valid_n = automata::lift(&sys.validity_dfa(), d.alphabet(), &[1])?;
    automata::intersect(&d, &valid_n)
}

fn system_label(sys: &NumerationSystem) -> String {
    sys.to_string().replacen("ost:", "ost", 1)
}

impl fmt::Display for LinearRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", system_label(&self.system))?;
        for (i, t) in self.terms.iter().enumerate() {
            let mag = t.coeff.unsigned_abs();
            if i == 0 {
                if t.coeff < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if t.coeff < 0 { '-' } else { '+' })?;
            }
            if mag != 1 {
                write!(f, "{mag}")?;
                if t.shift > 0 {
                    write!(f, "*")?;
                }
            }
            let name = &self.vars[t.var];
            if t.shift > 0 {
                write!(f, "shift{}({name})", t.shift)?;
            } else {
                write!(f, "{name}")?;
            }
        }
        write!(f, " = {}", self.constant)
    }
}

impl FromStr for LinearRelation {
    type Err = Error;

    /// Parses `fib: x - 2y = 1` or `ost[2,1]: shift2(w) - 3z - 2u = 0`. Both
    /// sides may hold terms and integer constants.
    fn from_str(s: &str) -> Result<Self> {
        let colon = s.find(':').ok_or_else(|| Error::Parse { pos: 0, msg: "missing `system:` prefix".into() })?;
        // `ost:[...]` also contains a colon; take the one that ends the system.
        let colon = if s[..colon].trim() == "ost" {
            colon + 1 + s[colon + 1..].find(':').ok_or_else(|| Error::Parse { pos: colon, msg: "missing `:`".into() })?
        } else {
            colon
        };
        let system: NumerationSystem = s[..colon].parse()?;
        let body = &s[colon + 1..];
        let eq = body.find('=').ok_or_else(|| Error::Parse { pos: colon + 1, msg: "missing `=`".into() })?;
        let mut vars: Vec<String> = Vec::new();
        let mut terms = Vec::new();
        let mut constant = 0i64;
        for (side, text, base) in [(1i64, &body[..eq], colon + 1), (-1i64, &body[eq + 1..], colon + 2 + eq)] {
            let mut p = ExprParser { text: text.as_bytes(), pos: 0, base };
            for (coeff, item) in p.parse()? {
                match item {
                    None => constant -= side * coeff,
                    Some((name, shift)) => {
                        let var = match vars.iter().position(|v| *v == name) {
                            Some(i) => i,
                            None => {
                                vars.push(name);
                                vars.len() - 1
                            }
                        };
                        terms.push(Term { var, coeff: side * coeff, shift });
                    }
                }
            }
        }
        LinearRelation::new(system, vars, terms, constant)
    }
}

struct ExprParser<'a> {
    text: &'a [u8],
    pos: usize,
    base: usize,
}

type Item = (i64, Option<(String, u32)>);

impl ExprParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.base + self.pos, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.text[start..self.pos]).ok()?.parse().ok()
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        if self.pos < self.text.len() && self.text[self.pos].is_ascii_alphabetic() {
            while self.pos < self.text.len() && (self.text[self.pos].is_ascii_alphanumeric() || self.text[self.pos] == b'_') {
                self.pos += 1;
            }
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
    }

    fn parse(&mut self) -> Result<Vec<Item>> {
        let mut items = Vec::new();
        let mut first = true;
        loop {
            self.ws();
            if self.pos >= self.text.len() {
                if first {
                    return Err(self.err("empty side"));
                }
                return Ok(items);
            }
            let mut sign = 1;
            match self.text[self.pos] {
                b'+' => self.pos += 1,
                b'-' => {
                    sign = -1;
                    self.pos += 1
                }
                _ if !first => return Err(self.err("expected `+` or `-`")),
                _ => {}
            }
            first = false;
            self.ws();
            let coeff = self.number();
            self.ws();
            if coeff.is_some() && self.text.get(self.pos) == Some(&b'*') {
                self.pos += 1;
                self.ws();
            }
            let Some(name) = self.ident() else {
                match coeff {
                    Some(c) => {
                        items.push((sign * c, None));
                        continue;
                    }
                    None => return Err(self.err("expected a term")),
                }
            };
            let coeff = sign * coeff.unwrap_or(1);
            let shift = name.strip_prefix("shift").and_then(|k| k.parse::<u32>().ok());
            match shift {
                Some(k) if self.text.get(self.pos) == Some(&b'(') => {
                    self.pos += 1;
                    self.ws();
                    let inner = self.ident().ok_or_else(|| self.err("expected a variable"))?;
                    self.ws();
                    if self.text.get(self.pos) != Some(&b')') {
                        return Err(self.err("expected `)`"));
                    }
                    self.pos += 1;
                    items.push((coeff, Some((inner, k))));
                }
                _ => items.push((coeff, Some((name, 0)))),
            }
        }
    }
}

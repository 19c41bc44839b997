use std::fmt::Write as _;

use num_bigint::BigUint;
use ostdigits::numeration::{digits_to_string, parse_digits, NumerationSystem};
use ostdigits::pipeline::BetaLinkage;
use ostdigits::qexact;

use crate::error::{Error, Result};

/// Labeled sample for automaton identification: representations paired with
/// the output they must produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dictionary {
    pub system: NumerationSystem,
    pub base: u32,
    pub entries: Vec<(Vec<u32>, u32)>,
}

/// The `count`'th digit set: `("0", 0)` followed by `((b^n)_β, D_b(n))` for
/// `n < count`.
pub fn build_dictionary(link: &BetaLinkage, base: u32, count: usize) -> Dictionary {
    let sys = &link.system;
    let expected = qexact::digits(&link.alpha, base, count);
    let mut entries = Vec::with_capacity(count + 1);
    entries.push((vec![0], 0));
    let mut p = BigUint::from(1u32);
    for d in expected {
        entries.push((sys.encode(&p).into_digits(), d));
        p *= base;
    }
    Dictionary { system: sys.clone(), base, entries }
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest digit in any entry.
    pub fn max_label(&self) -> u32 {
        self.entries.iter().flat_map(|(s, _)| s.iter().copied()).max().unwrap_or(0)
    }

    /// `string<TAB>output` lines under a `#` header naming system and base.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# system {}", self.system).unwrap();
        writeln!(out, "# base {}", self.base).unwrap();
        for (s, o) in &self.entries {
            writeln!(out, "{}\t{o}", digits_to_string(s)).unwrap();
        }
        out
    }

    /// Parses [`Dictionary::to_text`]. Other `#` lines are comments; missing
    /// headers fall back to `system` and `base`.
    pub fn from_text(text: &str, system: Option<NumerationSystem>, base: Option<u32>) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Format { what: "dictionary", line, msg };
        let (mut system, mut base) = (system, base);
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("system ") {
                    system = Some(v.trim().parse().map_err(|e| err(i + 1, format!("{e}")))?);
                } else if let Some(v) = comment.strip_prefix("base ") {
                    base = Some(v.trim().parse().map_err(|e| err(i + 1, format!("{e}")))?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (s, o) = line
                .split_once('\t')
                .ok_or_else(|| err(i + 1, "expected string<TAB>output".into()))?;
            let digits = parse_digits(s.trim()).map_err(|e| err(i + 1, format!("{e}")))?;
            let output = o.trim().parse().map_err(|e| err(i + 1, format!("{e}")))?;
            entries.push((digits, output));
        }
        let system = system.ok_or_else(|| err(0, "numeration system not given".into()))?;
        let base = base.ok_or_else(|| err(0, "base not given".into()))?;
        for (i, (s, _)) in entries.iter().enumerate() {
            if !system.is_valid(s) {
                return Err(Error::Invalid(format!(
                    "entry {} `{}` is not valid in {system}",
                    i + 1,
                    digits_to_string(s)
                )));
            }
        }
        Ok(Dictionary { system, base, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ostdigits::pipeline::preset;

    #[test]
    fn phi_base_two_first_entries() {
        let link = preset("phi-b2").unwrap().link().unwrap();
        let d = build_dictionary(&link, 2, 3);
        assert_eq!(d.entries, vec![(vec![0], 0), (vec![1], 1), (vec![1, 0], 0), (vec![1, 0, 1], 0)]);
    }

    #[test]
    fn text_roundtrip() {
        let link = preset("sqrt3m1-b2").unwrap().link().unwrap();
        let d = build_dictionary(&link, 2, 20);
        let text = d.to_text();
        assert_eq!(Dictionary::from_text(&text, None, None).unwrap(), d);
    }

    #[test]
    fn rejects_invalid_strings() {
        let text = "# system fib\n# base 2\n0\t0\n11\t1\n";
        assert!(Dictionary::from_text(text, None, None).is_err());
    }
}

use num_bigint::BigUint;
use ostdigits::automata::Dfao;
use ostdigits::numeration::NumerationSystem;
use ostdigits::pipeline::BetaLinkage;
use ostdigits::qexact;

/// Outcome of running a candidate on `(b^n)_β` for `n < n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Pass,
    /// First `n` where the candidate disagrees with the digit oracle.
    Fail { n: u64, expected: u32, got: Option<u32> },
}

impl Verification {
    pub fn passed(&self) -> bool {
        *self == Verification::Pass
    }
}

/// `((b^n)_β, D_b(n))` for consecutive `n`.
pub struct PowerStream<'a> {
    system: &'a NumerationSystem,
    base: u32,
    power: BigUint,
    expected: std::vec::IntoIter<u32>,
}

impl<'a> PowerStream<'a> {
    pub fn new(link: &'a BetaLinkage, base: u32, n_max: u64) -> Self {
        PowerStream {
            system: &link.system,
            base,
            power: BigUint::from(1u32),
            expected: qexact::digits(&link.alpha, base, n_max as usize).into_iter(),
        }
    }
}

impl Iterator for PowerStream<'_> {
    type Item = (Vec<u32>, u32);

    fn next(&mut self) -> Option<Self::Item> {
        let d = self.expected.next()?;
        let rep = self.system.encode(&self.power).into_digits();
        self.power *= self.base;
        Some((rep, d))
    }
}

pub fn verify_candidate(cand: &Dfao, link: &BetaLinkage, base: u32, n_max: u64) -> Verification {
    verify_candidates(std::slice::from_ref(cand), link, base, n_max).pop().unwrap()
}

/// Verifies several candidates against one stream of powers, stopping once
/// every candidate has failed.
pub fn verify_candidates(cands: &[Dfao], link: &BetaLinkage, base: u32, n_max: u64) -> Vec<Verification> {
    let mut out = vec![Verification::Pass; cands.len()];
    let mut open = cands.len();
    if open == 0 {
        return out;
    }
    for (n, (rep, d)) in PowerStream::new(link, base, n_max).enumerate() {
        for (c, v) in cands.iter().zip(out.iter_mut()) {
            if !v.passed() {
                continue;
            }
            let got = c.run(&rep).ok().flatten();
            if got != Some(d) {
                *v = Verification::Fail { n: n as u64, expected: d, got };
                open -= 1;
            }
        }
        if open == 0 {
            break;
        }
    }
    out
}

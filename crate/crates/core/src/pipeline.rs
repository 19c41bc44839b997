//! End-to-end constructions: synchronized `⌊nα⌋` automata, the per-digit
//! relations `A_{b,i}` and the digit automata `A_b` reading `(b^n)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::automata::{self, Alphabet, Dfa, Dfao};
use crate::error::{Error, Result};
use crate::linrel::{self, LinearRelation, ShiftPath, Term};
use crate::numeration::{NumerationSystem, SystemKind};
use crate::qexact::{self, QuadraticIrrational};

/// How `α` is expressed through a purely periodic `β = [0; (d_1, ..., d_m)]`:
/// `α = (a + b·β)/c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaLinkage {
    pub alpha: QuadraticIrrational,
    pub beta: QuadraticIrrational,
    pub system: NumerationSystem,
    pub period: Vec<u32>,
    /// `q_m` and `q_{m-1}`, convergent denominators of `β`.
    pub q_m: i64,
    pub q_m1: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BetaLinkage {
    pub fn m(&self) -> usize {
        self.period.len()
    }
}

fn small(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Overflow(x.to_string()))
}

/// Reduced fraction `num/den` with `den > 0`.
fn reduce(num: BigInt, den: BigInt) -> (BigInt, BigInt) {
    let g = num.gcd(&den);
    let (mut n, mut d) = (num / &g, den / g);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// Rotates the period of `α` until its first term exceeds 1 (the all-ones
/// period selects the Fibonacci system) and solves `α = (a + bβ)/c`.
pub fn derive_beta(alpha: &QuadraticIrrational) -> Result<BetaLinkage> {
    if !alpha.is_positive() {
        return Err(Error::NotPositive(alpha.to_string()));
    }
    let cf = qexact::cf_expand(alpha)?;
    if cf.preperiod.len() != 1 {
        return Err(Error::Unsupported(format!("{alpha} = {cf} is not purely periodic after the integer part")));
    }
    let raw: Vec<u32> = cf
        .period
        .iter()
        .map(|&t| u32::try_from(t).map_err(|_| Error::Overflow(t.to_string())))
        .collect::<Result<_>>()?;
    let (period, kind) = match raw.iter().position(|&t| t > 1) {
        None => (vec![1], SystemKind::Fibonacci),
        Some(j) => {
            let mut p = raw[j..].to_vec();
            p.extend_from_slice(&raw[..j]);
            let kind = if p == [2] { SystemKind::Pell } else { SystemKind::Ostrowski(p.clone()) };
            (p, kind)
        }
    };
    let period_u64: Vec<u64> = period.iter().map(|&t| t as u64).collect();
    let beta = qexact::ContinuedFraction::new(vec![BigInt::zero()], period_u64)?.value()?;
    if beta.d() != alpha.d() {
        return Err(Error::Unsupported(format!("{beta} and {alpha} lie in different fields")));
    }
    // b/c = (α_b/α_c)/(β_b/β_c); a/c = α_a/α_c - (b/c)·β_a/β_c.
    let (bn, bd) = reduce(alpha.b() * beta.c(), alpha.c() * beta.b());
    let (an, ad) = reduce(alpha.a() * &bd * beta.c() - &bn * beta.a() * alpha.c(), alpha.c() * &bd * beta.c());
    let c = bd.lcm(&ad);
    let a = an * (&c / &ad);
    let b = bn * (&c / &bd);
    let rebuilt = QuadraticIrrational::new(&a * beta.c() + &b * beta.a(), &b * beta.b(), beta.d(), &c * beta.c())?;
    debug_assert_eq!(&rebuilt, alpha);
    let ost = NumerationSystem::ostrowski(period.clone())?;
    let m = period.len();
    Ok(BetaLinkage {
        alpha: alpha.clone(),
        beta,
        system: NumerationSystem::new(kind)?,
        q_m: small(&BigInt::from(ost.basis(m)))?,
        q_m1: small(&BigInt::from(ost.basis(m - 1)))?,
        a: small(&a)?,
        b: small(&b)?,
        c: small(&c)?,
        period,
    })
}

/// Conjunction of relations, each placed on the listed tapes of a
/// `tapes`-tape alphabet, with every tape outside `keep` projected away.
fn join(sys: &NumerationSystem, tapes: usize, parts: &[(&Dfa, &[usize])], keep: &[usize]) -> Result<Dfa> {
    let alphabet = Alphabet::uniform(sys.radix(), tapes);
    let mut acc = Dfa::universal(alphabet.clone());
    for (d, map) in parts {
        acc = automata::intersect(&acc, &automata::lift(d, &alphabet, map)?)?;
    }
    let drop: Vec<usize> = (0..tapes).filter(|t| !keep.contains(t)).collect();
    if drop.is_empty() {
        Ok(acc)
    } else {
        automata::project(&acc, &drop)
    }
}

/// The pair language `[0,0]*`, i.e. `(0, 0)` with any padding.
fn zero_pair(sys: &NumerationSystem) -> Dfa {
    let pair = Alphabet::uniform(sys.radix(), 2);
    let mut delta = vec![automata::NONE; pair.size()];
    delta[0] = 0;
    Dfa::new(pair, 0, delta, vec![true]).expect("well-formed")
}

/// Pairs `(n, w)` with `w = k·n`.
pub fn multiply_dfa(sys: &NumerationSystem, k: i64) -> Result<Dfa> {
    let vars = vec!["n".to_string(), "w".to_string()];
    let terms = vec![Term { var: 1, coeff: 1, shift: 0 }, Term { var: 0, coeff: -k, shift: 0 }];
    LinearRelation::new(sys.clone(), vars, terms, 0)?.to_dfa()
}

/// Pairs `(n, z)` with `z = ⌊nβ⌋`, from `[(n-1) 0^m] = q_m(n-1) + q_{m-1}⌊nβ⌋`
/// for `n >= 1` and the explicit pair `(0, 0)`.
pub fn build_floor_beta(link: &BetaLinkage) -> Result<Dfa> {
    build_floor_beta_with(link, ShiftPath::Relation)
}

/// As [`build_floor_beta`], choosing how the `m`-fold shift is realized.
pub fn build_floor_beta_with(link: &BetaLinkage, path: ShiftPath) -> Result<Dfa> {
    let sys = &link.system;
    let m = link.m() as u32;
    // Tapes: n, u = n - 1, s = u·0^m, z.
    let dec = LinearRelation::simple(sys.clone(), &[1, -1], &[0, 0], 1)?.to_dfa()?;
    let core = match path {
        ShiftPath::Relation => {
            let vars = vec!["u".to_string(), "z".to_string()];
            let terms = vec![
                Term { var: 0, coeff: 1, shift: m },
                Term { var: 0, coeff: -link.q_m, shift: 0 },
                Term { var: 1, coeff: -link.q_m1, shift: 0 },
            ];
            LinearRelation::new(sys.clone(), vars, terms, 0)?.to_dfa()?
        }
        _ => {
            let shift = linrel::multi_shift_dfa(sys, m, path)?;
            let eq = LinearRelation::simple(sys.clone(), &[1, -link.q_m, -link.q_m1], &[0, 0, 0], 0)?.to_dfa()?;
            join(sys, 3, &[(&shift, &[0, 1]), (&eq, &[1, 0, 2])], &[0, 2])?
        }
    };
    let positive = join(sys, 3, &[(&dec, &[0, 1]), (&core, &[1, 2])], &[0, 2])?;
    automata::union(&positive, &zero_pair(sys))
}

/// Pairs `(n, z)` with `z = ⌊nα⌋`, via `⌊nα⌋ = ⌊(⌊b·nβ⌋ + a·n)/c⌋`.
pub fn build_floor_alpha(link: &BetaLinkage) -> Result<Dfa> {
    let sys = &link.system;
    let beta_floor = build_floor_beta(link)?;
    // (n, u) with u = ⌊|b|·nβ⌋.
    let scaled = if link.b.abs() == 1 {
        beta_floor
    } else {
        let mul = multiply_dfa(sys, link.b.abs())?;
        join(sys, 3, &[(&mul, &[0, 1]), (&beta_floor, &[1, 2])], &[0, 2])?
    };
    // For b < 0 and n >= 1, ⌊-|b|nβ⌋ = -⌊|b|nβ⌋ - 1.
    let (sign, offset) = if link.b > 0 { (1, 0) } else { (-1, 1) };
    let div = linrel::floor_div_relation(sys, sign, link.a, link.c, offset)?;
    // Tapes: n, u, z; div reads (u, n, z).
    let out = join(sys, 3, &[(&scaled, &[0, 1]), (&div, &[1, 0, 2])], &[0, 2])?;
    if link.b > 0 {
        Ok(out)
    } else {
        automata::union(&out, &zero_pair(sys))
    }
}

/// Where the combined digit automaton gives an output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputDomain {
    /// Every live input gets an output; inputs no `A_{b,i}` accepts read 0.
    #[default]
    Live,
    /// Only valid representations get an output.
    Valid,
}

/// `A_{b,1..b-1}` and the combined DFAO `A_b`.
#[derive(Clone, Debug)]
pub struct DigitAutomatonBundle {
    pub link: BetaLinkage,
    pub base: u32,
    pub parts: Vec<Dfa>,
    pub dfao: Dfao,
}

/// `A_{b,i}` accepts `n` iff `⌊bnα⌋ - b⌊nα⌋ = i`, for `i = 1..b-1`.
pub fn build_digit_parts(link: &BetaLinkage, base: u32, floor_alpha: &Dfa) -> Result<Vec<Dfa>> {
    if base < 2 {
        return Err(Error::Unsupported(format!("base {base}")));
    }
    let sys = &link.system;
    let b = base as i64;
    let mul = multiply_dfa(sys, b)?;
    // Tapes: n, w = bn, x = ⌊wα⌋; keep (n, x).
    let g = join(sys, 3, &[(&mul, &[0, 1]), (floor_alpha, &[1, 2])], &[0, 2])?;
    // Tapes: n, x, y = ⌊nα⌋.
    let h = join(sys, 3, &[(&g, &[0, 1]), (floor_alpha, &[0, 2])], &[0, 1, 2])?;
    (1..b)
        .map(|i| {
            let rel = LinearRelation::simple(sys.clone(), &[1, -b], &[0, 0], i)?.to_dfa()?;
            join(sys, 3, &[(&h, &[0, 1, 2]), (&rel, &[1, 2])], &[0])
        })
        .collect()
}

pub fn build_digit_dfao(link: &BetaLinkage, base: u32) -> Result<DigitAutomatonBundle> {
    build_digit_dfao_with(link, base, OutputDomain::default())
}

pub fn build_digit_dfao_with(link: &BetaLinkage, base: u32, domain: OutputDomain) -> Result<DigitAutomatonBundle> {
    let floor_alpha = build_floor_alpha(link)?;
    let parts = build_digit_parts(link, base, &floor_alpha)?;
    let labeled: Vec<(Dfa, u32)> = parts.iter().cloned().zip(1..).collect();
    let valid = link.system.validity_dfa();
    let dom = match domain {
        OutputDomain::Live => None,
        OutputDomain::Valid => Some(&valid),
    };
    let dfao = if labeled.is_empty() {
        automata::combine(&[], 0, Some(&valid))?
    } else {
        automata::combine(&labeled, 0, dom)?
    };
    Ok(DigitAutomatonBundle { link: link.clone(), base, parts, dfao })
}

/// `b^n` in the bundle's system.
pub fn power_representation(sys: &NumerationSystem, base: u32, n: u64) -> Vec<u32> {
    let p = num_traits::pow(BigUint::from(base), n as usize);
    sys.encode(&p).into_digits()
}

/// Runs `A_b` on `(b^n)`; `None` only if the automaton has no output there.
pub fn eval_digit(bundle: &DigitAutomatonBundle, n: u64) -> Option<u32> {
    let rep = power_representation(&bundle.link.system, bundle.base, n);
    bundle.dfao.run(&rep).expect("digits within the alphabet")
}

/// Outputs of `dfao` on `(b^n)` for `n < count`, reusing powers.
pub fn run_on_powers(dfao: &Dfao, sys: &NumerationSystem, base: u32, count: u64) -> Vec<Option<u32>> {
    let mut p = BigUint::one();
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let rep = sys.encode(&p);
        out.push(dfao.run(rep.digits()).ok().flatten());
        p *= base;
    }
    out
}

/// A named configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub alpha: &'static str,
    pub base: u32,
    /// Expected size of the minimal digit automaton, where known.
    pub states: Option<usize>,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "phi-b2", alpha: "(1+sqrt(5))/2", base: 2, states: Some(8) },
    Preset { name: "phi-b3", alpha: "(1+sqrt(5))/2", base: 3, states: Some(13) },
    Preset { name: "phi-b10", alpha: "(1+sqrt(5))/2", base: 10, states: Some(97) },
    Preset { name: "sqrt2-b2", alpha: "sqrt(2)", base: 2, states: Some(6) },
    Preset { name: "sqrt2-b3", alpha: "sqrt(2)", base: 3, states: Some(14) },
    Preset { name: "bronze-b2", alpha: "(3+sqrt(13))/2", base: 2, states: Some(7) },
    Preset { name: "bronze-b3", alpha: "(3+sqrt(13))/2", base: 3, states: Some(8) },
    Preset { name: "sqrt3m1-b2", alpha: "(sqrt(3)-1)/2", base: 2, states: Some(12) },
    Preset { name: "sqrt3p1-b2", alpha: "1+sqrt(3)", base: 2, states: None },
    Preset { name: "sqrt17m3-b2", alpha: "(sqrt(17)-3)/4", base: 2, states: Some(16) },
    Preset { name: "sqrt17p3-b2", alpha: "(3+sqrt(17))/2", base: 2, states: None },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    pub fn alpha(&self) -> QuadraticIrrational {
        self.alpha.parse().expect("preset α parses")
    }

    pub fn link(&self) -> Result<BetaLinkage> {
        derive_beta(&self.alpha())
    }

    pub fn build(&self) -> Result<DigitAutomatonBundle> {
        build_digit_dfao(&self.link()?, self.base)
    }
}

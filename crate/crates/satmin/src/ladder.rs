use std::fmt::Write as _;

use num_bigint::BigUint;
use ostdigits::automata::Dfao;
use ostdigits::pipeline::BetaLinkage;

use crate::apta::{build_apta, build_cg};
use crate::dictionary::build_dictionary;
use crate::encode::{encode, extend, CnfEncoding, EncodeOptions, OstrowskiConstraints};
use crate::error::Result;
use crate::solver::{decode_model, enumerate_all, solve, Blocker, Granularity, Incremental, SolverKind, Verdict};
use crate::verify::{verify_candidate, verify_candidates, Verification};

/// Search settings shared by [`run_cell`] and [`run_ladder`].
#[derive(Clone, Debug)]
pub struct LadderConfig {
    pub k_start: usize,
    pub k_max: usize,
    pub digits_start: usize,
    pub digits_max: usize,
    /// Digit-set growth after a SAT answer that fails verification.
    pub step: usize,
    /// Number of digits a candidate must reproduce.
    pub n_verify: u64,
    pub enumerate: bool,
    /// Enumerate by refinement (see [`enumerate_verified`]) instead of
    /// listing every solution.
    pub refine: bool,
    /// Cap on enumerated solutions.
    pub enum_limit: usize,
    pub solver: SolverKind,
    pub granularity: Granularity,
    pub encode: EncodeOptions,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            k_start: 1,
            k_max: 32,
            digits_start: 1,
            digits_max: 400,
            step: 1,
            n_verify: 10_000,
            enumerate: true,
            refine: false,
            enum_limit: 100_000,
            solver: SolverKind::Cadical,
            granularity: Granularity::default(),
            encode: EncodeOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Unsat,
    /// The solver's automaton fails at digit `first_fail`.
    SatWrong { first_fail: u64 },
    SatVerified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderRow {
    pub k: usize,
    pub digit_set: usize,
    pub status: Status,
    /// Solutions enumerated at this cell.
    pub enumerated: Option<usize>,
    /// Enumerated solutions that pass verification.
    pub candidates: Option<usize>,
    /// Digits added to the sample by refinement.
    pub refined: Option<usize>,
}

/// One solved cell: the verdict and, if enumerated, the candidates that
/// passed verification.
#[derive(Clone, Debug)]
pub struct CellResult {
    pub row: LadderRow,
    pub model: Option<Dfao>,
    pub candidates: Vec<Dfao>,
    /// False if enumeration stopped at the limit.
    pub complete: bool,
}

/// The SAT instance for `k` colors on the `digits`'th digit set.
pub fn instance(link: &BetaLinkage, base: u32, k: usize, digits: usize, opts: &EncodeOptions) -> Result<CnfEncoding> {
    let dict = build_dictionary(link, base, digits);
    let apta = build_apta(&dict)?;
    let cg = build_cg(&apta);
    let constraints = OstrowskiConstraints::for_system(&link.system);
    let labels = link.system.radix() as usize;
    Ok(encode(&apta, &cg, k, labels, base as usize, &constraints, opts))
}

/// Solves one `(k, digit set)` cell, verifies the model and optionally
/// enumerates every solution. With enumeration the cell counts as verified if
/// any solution passes.
pub fn run_cell(link: &BetaLinkage, base: u32, k: usize, digits: usize, cfg: &LadderConfig, enumerate: bool) -> Result<CellResult> {
    let cnf = instance(link, base, k, digits, &cfg.encode)?;
    let mut row = LadderRow { k, digit_set: digits, status: Status::Unsat, enumerated: None, candidates: None, refined: None };
    let Verdict::Sat(model) = solve(&cnf, &cfg.solver)? else {
        return Ok(CellResult { row, model: None, candidates: Vec::new(), complete: true });
    };
    let dfao = decode_model(&cnf, &model);
    row.status = match verify_candidate(&dfao, link, base, cfg.n_verify) {
        Verification::Pass => Status::SatVerified,
        Verification::Fail { n, .. } => Status::SatWrong { first_fail: n },
    };
    let mut candidates = Vec::new();
    let mut complete = true;
    if enumerate && cfg.refine {
        let r = enumerate_verified(link, base, k, digits, cfg)?;
        complete = r.complete;
        candidates = r.candidates;
        row.enumerated = Some(r.models);
        row.candidates = Some(candidates.len());
        row.refined = Some(r.added.len());
        if !candidates.is_empty() {
            row.status = Status::SatVerified;
        }
    } else if enumerate {
        let (all, done) = enumerate_all(&cnf, &cfg.solver, cfg.granularity, cfg.enum_limit)?;
        complete = done;
        let verdicts = verify_candidates(&all, link, base, cfg.n_verify);
        candidates = all.iter().zip(&verdicts).filter(|(_, v)| v.passed()).map(|(a, _)| a.clone()).collect();
        row.enumerated = Some(all.len());
        row.candidates = Some(candidates.len());
        // The cell holds a correct automaton even if the solver's first
        // model was not it.
        if !candidates.is_empty() {
            row.status = Status::SatVerified;
        }
    }
    Ok(CellResult { row, model: Some(dfao), candidates, complete })
}

/// Result of [`enumerate_verified`].
#[derive(Clone, Debug)]
pub struct Refined {
    pub candidates: Vec<Dfao>,
    /// Models the solver returned, verified or not.
    pub models: usize,
    /// Digit positions added to the sample, in order.
    pub added: Vec<u64>,
    /// False if the search stopped at the model limit.
    pub complete: bool,
}

/// The verified candidates of a cell, found without listing every solution.
/// A model that fails verification at digit `n` adds the entry for `b^n` to
/// the sample; a verified model is blocked. Every automaton that passes
/// verification satisfies the added entries, so the candidates are exactly
/// those that full enumeration would verify.
pub fn enumerate_verified(link: &BetaLinkage, base: u32, k: usize, digits: usize, cfg: &LadderConfig) -> Result<Refined> {
    let dict = build_dictionary(link, base, digits);
    let mut apta = build_apta(&dict)?;
    let cg = build_cg(&apta);
    let constraints = OstrowskiConstraints::for_system(&link.system);
    let labels = link.system.radix() as usize;
    let mut cnf = encode(&apta, &cg, k, labels, base as usize, &constraints, &cfg.encode);
    let blocker = Blocker::new(&cnf.vars, cfg.granularity);
    let mut incremental = matches!(cfg.solver, SolverKind::Cadical).then(|| Incremental::new(&cnf));
    let mut out = Refined { candidates: Vec::new(), models: 0, added: Vec::new(), complete: false };
    while out.models < cfg.enum_limit {
        let verdict = match incremental.as_mut() {
            Some(s) => s.solve()?,
            None => solve(&cnf, &cfg.solver)?,
        };
        let Verdict::Sat(model) = verdict else {
            out.complete = true;
            break;
        };
        out.models += 1;
        let dfao = decode_model(&cnf, &model);
        let mut added = Vec::new();
        match verify_candidate(&dfao, link, base, cfg.n_verify) {
            Verification::Pass => out.candidates.push(dfao),
            Verification::Fail { n, expected, .. } => {
                let rep = link.system.encode(&BigUint::from(base).pow(n as u32)).into_digits();
                added = extend(&mut cnf, &mut apta, &rep, expected)?;
                out.added.push(n);
            }
        }
        if added.is_empty() {
            added.push(blocker.clause(&model));
            cnf.clauses.push(added[0].clone());
        }
        if let Some(s) = incremental.as_mut() {
            for c in &added {
                s.add(c);
            }
        }
    }
    Ok(out)
}

/// Search rows in the order visited.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    pub rows: Vec<LadderRow>,
    /// Verified candidates of the final cell, if it was enumerated.
    pub candidates: Vec<Dfao>,
}

impl Ledger {
    /// The last row, which holds the result if the search succeeded.
    pub fn last(&self) -> Option<&LadderRow> {
        self.rows.last()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| states | digit set size | SAT status | candidates |\n|---|---|---|---|\n");
        for r in &self.rows {
            let status = match r.status {
                Status::Unsat => "UNSAT".to_string(),
                Status::SatWrong { first_fail } => format!("SAT, wrong at digit {first_fail}"),
                Status::SatVerified => "SAT, verified".to_string(),
            };
            let cands = match (r.candidates, r.enumerated, r.refined) {
                (Some(c), Some(e), Some(a)) => format!("{c} of {e} models, {a} digits added"),
                (Some(c), Some(e), None) => format!("{c} of {e}"),
                _ => "-".to_string(),
            };
            writeln!(out, "| {} | {} | {status} | {cands} |", r.k, r.digit_set).unwrap();
        }
        out
    }
}

/// UNSAT grows the state count, a SAT model that fails verification grows the
/// digit set, and the first verified model ends the search (after
/// enumerating, if configured).
pub fn run_ladder(link: &BetaLinkage, base: u32, cfg: &LadderConfig) -> Result<Ledger> {
    let mut ledger = Ledger::default();
    let (mut k, mut digits) = (cfg.k_start, cfg.digits_start);
    while k <= cfg.k_max && digits <= cfg.digits_max {
        let first = run_cell(link, base, k, digits, cfg, false)?;
        match first.row.status {
            Status::Unsat => {
                ledger.rows.push(first.row);
                k += 1;
            }
            Status::SatWrong { .. } => {
                ledger.rows.push(first.row);
                digits += cfg.step.max(1);
            }
            Status::SatVerified => {
                if cfg.enumerate {
                    let cell = run_cell(link, base, k, digits, cfg, true)?;
                    ledger.rows.push(cell.row);
                    ledger.candidates = cell.candidates;
                } else {
                    ledger.rows.push(first.row);
                }
                break;
            }
        }
    }
    Ok(ledger)
}

use std::collections::BTreeSet;

use ostdigits::automata::ops::dfao_equivalent;
use ostdigits::automata::Dfao;
use ostdigits::numeration::NumerationSystem;
use ostdigits::pipeline::{preset, BetaLinkage};
use ostdigits_satmin::dimacs::{from_dimacs, to_dimacs};
use ostdigits_satmin::*;
use proptest::prelude::*;

fn link(name: &str) -> (BetaLinkage, u32) {
    let p = preset(name).unwrap();
    (p.link().unwrap(), p.base)
}

fn sat(c: &CnfEncoding, s: &SolverKind) -> bool {
    matches!(solve(c, s).unwrap(), Verdict::Sat(_))
}

fn small_instance(entries: &[(&[u32], u32)], k: usize, constraints: &OstrowskiConstraints, opts: &EncodeOptions) -> CnfEncoding {
    let dict = Dictionary {
        system: NumerationSystem::fibonacci(),
        base: 2,
        entries: entries.iter().map(|(s, o)| (s.to_vec(), *o)).collect(),
    };
    let a = build_apta(&dict).unwrap();
    let g = build_cg(&a);
    encode(&a, &g, k, 2, 2, constraints, opts)
}

#[test]
fn one_color_cannot_separate_two_outputs() {
    let c = small_instance(&[(&[0], 0), (&[1], 1)], 1, &OstrowskiConstraints::None, &EncodeOptions::default());
    assert!(!sat(&c, &SolverKind::Dpll));
    assert!(!sat(&c, &SolverKind::Cadical));
    let c = small_instance(&[(&[0], 0), (&[1], 1)], 2, &OstrowskiConstraints::None, &EncodeOptions::default());
    assert!(sat(&c, &SolverKind::Dpll));
}

#[test]
fn dimacs_round_trip_is_byte_identical() {
    let (l, b) = link("phi-b2");
    let c = instance(&l, b, 4, 20, &EncodeOptions::default()).unwrap();
    let text = to_dimacs(&c);
    let back = from_dimacs(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(to_dimacs(&back), text);
    let again = instance(&l, b, 4, 20, &EncodeOptions::default()).unwrap();
    assert_eq!(to_dimacs(&again), text);
}

#[test]
fn dimacs_header_carries_the_dimensions() {
    let (l, b) = link("sqrt3m1-b2");
    let c = instance(&l, b, 3, 10, &EncodeOptions::default()).unwrap();
    let text = to_dimacs(&c);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("c colors 3 labels 3 outputs 2 "), "{header}");
    let p = text.lines().find(|l| l.starts_with("p cnf")).unwrap();
    assert_eq!(p, format!("p cnf {} {}", c.num_vars, c.clauses.len()));
}

#[test]
fn phi_base_two_needs_eight_states() {
    let (l, b) = link("phi-b2");
    let opts = EncodeOptions::default();
    assert!(!sat(&instance(&l, b, 7, 54, &opts).unwrap(), &SolverKind::Cadical));
    let c = instance(&l, b, 8, 54, &opts).unwrap();
    let (all, done) = enumerate_all(&c, &SolverKind::Cadical, Granularity::Transitions, 100).unwrap();
    assert!(done);
    assert!(all.iter().all(|d| d.num_states() == 8));
    let verified = verify_candidates(&all, &l, b, 10_000).iter().filter(|v| v.passed()).count();
    assert_eq!((all.len(), verified), (4, 1));
}

#[test]
fn decoded_models_reproduce_the_dictionary() {
    for (name, k, digits) in [("phi-b2", 8, 30), ("sqrt2-b2", 6, 20), ("sqrt3m1-b2", 12, 20)] {
        let (l, b) = link(name);
        let c = instance(&l, b, k, digits, &EncodeOptions::default()).unwrap();
        let Verdict::Sat(model) = solve(&c, &SolverKind::Cadical).unwrap() else { panic!("{name}: expected SAT") };
        let d = decode_model(&c, &model);
        for (s, o) in build_dictionary(&l, b, digits).entries {
            assert_eq!(d.run(&s).unwrap(), Some(o), "{name}: {s:?}");
        }
        assert_structure_respects_system(&d, &l.system);
    }
}

/// No input with a defined run leaves the validity DFA.
fn assert_structure_respects_system(d: &Dfao, sys: &NumerationSystem) {
    let base = sys.validity_dfa();
    let mut seen = BTreeSet::from([(d.start(), base.start())]);
    let mut queue = vec![(d.start(), base.start())];
    while let Some((s, bs)) = queue.pop() {
        for l in 0..d.alphabet().size() as u32 {
            let Some(t) = d.step(s, l) else { continue };
            let bt = base.step(bs, l).unwrap_or_else(|| panic!("state {s} reads {l} where the system forbids it"));
            if seen.insert((t, bt)) {
                queue.push((t, bt));
            }
        }
    }
}

#[test]
fn symmetry_breaking_keeps_verdicts() {
    let cases = [("phi-b2", 12), ("sqrt2-b2", 10), ("sqrt3m1-b2", 8), ("bronze-b2", 6)];
    let on = EncodeOptions::default();
    let off = EncodeOptions { symmetry_breaking: false, ..on.clone() };
    for (name, digits) in cases {
        let (l, b) = link(name);
        for k in 1..=5 {
            let a = sat(&instance(&l, b, k, digits, &on).unwrap(), &SolverKind::Cadical);
            let z = sat(&instance(&l, b, k, digits, &off).unwrap(), &SolverKind::Cadical);
            assert_eq!(a, z, "{name} k={k} digits={digits}");
        }
    }
}

#[test]
fn dpll_and_cadical_agree_on_small_cells() {
    let (l, b) = link("phi-b2");
    for k in 1..=4 {
        for digits in [3, 6, 10] {
            let c = instance(&l, b, k, digits, &EncodeOptions::default()).unwrap();
            if c.num_vars > ostdigits_satmin::solver::DPLL_MAX_VARS {
                continue;
            }
            assert_eq!(sat(&c, &SolverKind::Dpll), sat(&c, &SolverKind::Cadical), "k={k} digits={digits}");
        }
    }
}

#[test]
fn sat_status_is_monotone_on_the_phi_ladder() {
    let (l, b) = link("phi-b2");
    let ks: Vec<usize> = (2..=8).collect();
    let ds = [5, 15, 30, 54];
    let grid: Vec<Vec<bool>> = ks
        .iter()
        .map(|&k| ds.iter().map(|&d| sat(&instance(&l, b, k, d, &EncodeOptions::default()).unwrap(), &SolverKind::Cadical)).collect())
        .collect();
    for (ki, row) in grid.iter().enumerate() {
        for (di, &s) in row.iter().enumerate() {
            if s && ki + 1 < grid.len() {
                assert!(grid[ki + 1][di], "SAT at k={} but not k+1", ks[ki]);
            }
            if !s && di + 1 < row.len() {
                assert!(!row[di + 1], "UNSAT at k={} grows back to SAT", ks[ki]);
            }
        }
    }
}

#[test]
fn enumeration_is_invariant_under_renaming() {
    let (l, b) = link("sqrt2-b2");
    let c = instance(&l, b, 6, 29, &EncodeOptions::default()).unwrap();
    let (all, done) = enumerate_all(&c, &SolverKind::Cadical, Granularity::Transitions, 1000).unwrap();
    assert!(done);
    for (i, x) in all.iter().enumerate() {
        for y in &all[i + 1..] {
            assert_ne!(x.delta(), y.delta());
        }
    }
    for seed in [1, 2] {
        let p = c.permuted(seed);
        let (other, done) = enumerate_all(&p, &SolverKind::Cadical, Granularity::Transitions, 1000).unwrap();
        assert!(done);
        assert_eq!(other.len(), all.len(), "seed {seed}");
    }
    let verified = verify_candidates(&all, &l, b, 10_000).iter().filter(|v| v.passed()).count();
    assert_eq!((all.len(), verified), (9, 1));
}

#[test]
fn the_sqrt2_candidate_is_the_pipeline_automaton() {
    let p = preset("sqrt2-b2").unwrap();
    let (l, b) = (p.link().unwrap(), p.base);
    let cfg = LadderConfig::default();
    let cell = run_cell(&l, b, 6, 29, &cfg, true).unwrap();
    assert_eq!(cell.candidates.len(), 1);
    let built = p.build().unwrap().dfao;
    assert!(dfao_equivalent(&cell.candidates[0], &built).unwrap());
}

#[test]
fn refinement_finds_the_same_candidates() {
    for (name, k, digits) in [("sqrt2-b2", 6, 29), ("sqrt3m1-b2", 12, 27)] {
        let p = preset(name).unwrap();
        let (l, b) = (p.link().unwrap(), p.base);
        let cfg = LadderConfig { refine: true, ..LadderConfig::default() };
        let r = enumerate_verified(&l, b, k, digits, &cfg).unwrap();
        assert!(r.complete, "{name}");
        assert_eq!(r.candidates.len(), 1, "{name}");
        assert_eq!(r.models, r.added.len() + 1, "{name}");
        let c = instance(&l, b, k, digits, &cfg.encode).unwrap();
        let (all, _) = enumerate_all(&c, &SolverKind::Cadical, Granularity::Transitions, 1000).unwrap();
        let plain: Vec<_> = all.iter().filter(|d| verify_candidate(d, &l, b, 10_000).passed()).map(|d| d.delta()).collect();
        assert_eq!(plain, vec![r.candidates[0].delta()], "{name}");
        let cell = run_cell(&l, b, k, digits, &cfg, true).unwrap();
        assert_eq!((cell.row.status, cell.row.refined), (Status::SatVerified, Some(r.added.len())), "{name}");
    }
}

#[test]
fn a_corrupted_output_fails_verification() {
    let p = preset("phi-b2").unwrap();
    let (l, b) = (p.link().unwrap(), p.base);
    let d = p.build().unwrap().dfao;
    assert!(verify_candidate(&d, &l, b, 10_000).passed());
    for s in 1..d.num_states() {
        let mut outputs = d.outputs().to_vec();
        outputs[s] = outputs[s].map(|o| 1 - o);
        let bad = Dfao::new(d.alphabet().clone(), d.start(), d.delta().to_vec(), outputs).unwrap();
        let Verification::Fail { n, expected, got } = verify_candidate(&bad, &l, b, 10_000) else {
            panic!("state {s}: flipped output passed")
        };
        assert_eq!(got, Some(1 - expected), "state {s} at n={n}");
    }
}

#[test]
fn conflict_edges_match_brute_force() {
    for (name, digits) in [("phi-b2", 54), ("sqrt3m1-b2", 27)] {
        let (l, b) = link(name);
        let a = build_apta(&build_dictionary(&l, b, digits)).unwrap();
        let g = build_cg(&a);
        let mut brute = 0;
        for u in 0..a.num_nodes() {
            for v in u + 1..a.num_nodes() {
                if let (Some(x), Some(y)) = (a.output(u), a.output(v)) {
                    brute += usize::from(x != y);
                }
            }
        }
        assert_eq!(g.edges.len(), brute, "{name}");
        let distinct: BTreeSet<_> = g.edges.iter().collect();
        assert_eq!(distinct.len(), brute);
    }
}

fn clause_set(c: &CnfEncoding) -> BTreeSet<Vec<i32>> {
    c.clauses
        .iter()
        .map(|cl| {
            let mut cl = cl.clone();
            cl.sort_unstable();
            cl
        })
        .collect()
}

#[test]
fn metallic_shapes() {
    let (l, b) = link("phi-b2");
    let c = instance(&l, b, 4, 10, &EncodeOptions::default()).unwrap();
    let v = &c.vars;
    let set = clause_set(&c);
    let has = |mut cl: Vec<i32>| {
        cl.sort_unstable();
        set.contains(&cl)
    };
    for i in 0..4 {
        assert!(has(vec![-v.y(1, i, i)]));
        let mut complete: Vec<i32> = (0..4).map(|q| v.y(1, i, q)).collect();
        complete.extend((0..4).filter(|&p| p != i).map(|p| v.y(1, p, i)));
        assert!(has(complete));
        assert!(has((0..4).map(|q| v.y(0, i, q)).collect()));
        for j in (0..4).filter(|&j| j != i) {
            for q in 0..4 {
                assert!(has(vec![-v.y(1, i, j), -v.y(1, j, q)]));
            }
        }
    }
}

#[test]
fn base_state_shapes_for_sqrt3_minus_one() {
    let (l, b) = link("sqrt3m1-b2");
    let c = instance(&l, b, 4, 10, &EncodeOptions::default()).unwrap();
    let v = &c.vars;
    assert_eq!(v.base_states, 6);
    let set = clause_set(&c);
    let (i, j) = (1, 2);
    let mut forbidden = BTreeSet::new();
    for t in 0..6 {
        for lab in 0..3 {
            let mut cl = vec![-v.b(i, 4), -v.b(j, t), -v.y(lab, i, j)];
            cl.sort_unstable();
            if set.contains(&cl) {
                forbidden.insert((lab, t));
            }
        }
    }
    let mut expected: BTreeSet<(usize, usize)> = [(0, 2), (1, 2), (2, 5)].into();
    for t in (0..6).filter(|t| ![2, 5].contains(t)) {
        for lab in 0..3 {
            expected.insert((lab, t));
        }
    }
    assert_eq!(forbidden, expected);
}

#[test]
fn ladder_on_phi_base_two() {
    let (l, b) = link("phi-b2");
    let cfg = LadderConfig { k_start: 6, digits_start: 50, ..LadderConfig::default() };
    let ledger = run_ladder(&l, b, &cfg).unwrap();
    let last = ledger.last().unwrap();
    assert_eq!((last.k, last.status.clone(), last.candidates), (8, Status::SatVerified, Some(1)));
    assert!(last.digit_set >= 54);
    assert!(ledger.rows.iter().any(|r| (r.k, r.digit_set, &r.status) == (7, 54, &Status::Unsat)));
    for w in ledger.rows.windows(2) {
        assert!(w[1].k >= w[0].k && w[1].digit_set >= w[0].digit_set);
    }
    let md = ledger.to_markdown();
    assert!(md.contains(&format!("| 8 | {} | SAT, verified | 1 of ", last.digit_set)), "{md}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_samples_decode_consistently(
        entries in prop::collection::btree_map(prop::collection::vec(0u32..2, 1..6), 0u32..2, 1..8),
        k in 1usize..4,
    ) {
        let dict = Dictionary { system: NumerationSystem::fibonacci(), base: 2, entries: entries.into_iter().collect() };
        let a = build_apta(&dict).unwrap();
        let g = build_cg(&a);
        let c = encode(&a, &g, k, 2, 2, &OstrowskiConstraints::None, &EncodeOptions::default());
        let verdict = solve(&c, &SolverKind::Dpll).unwrap();
        prop_assert_eq!(matches!(verdict, Verdict::Sat(_)), sat(&c, &SolverKind::Cadical));
        if let Verdict::Sat(model) = verdict {
            let d = decode_model(&c, &model);
            for (s, o) in &dict.entries {
                prop_assert_eq!(d.run(s).unwrap(), Some(*o));
            }
        }
    }

    #[test]
    fn permutation_keeps_the_verdict(seed in any::<u64>(), k in 1usize..4, digits in 2usize..12) {
        let (l, b) = link("phi-b2");
        let c = instance(&l, b, k, digits, &EncodeOptions::default()).unwrap();
        prop_assert_eq!(sat(&c, &SolverKind::Cadical), sat(&c.permuted(seed), &SolverKind::Cadical));
    }
}

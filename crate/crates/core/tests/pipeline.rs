use num_bigint::BigInt;
use ostdigits::automata::{ops, Alphabet};
use ostdigits::linrel::LinearRelation;
use ostdigits::numeration::NumerationSystem;
use ostdigits::pipeline::*;
use ostdigits::qexact::{self, beatty_floor, QuadraticIrrational};

fn q(s: &str) -> QuadraticIrrational {
    s.parse().unwrap()
}

fn pair_accepts(d: &ostdigits::automata::Dfa, sys: &NumerationSystem, x: u64, y: u64) -> bool {
    d.accepts_tapes(&[sys.encode_u64(x).into_digits(), sys.encode_u64(y).into_digits()]).unwrap()
}

#[test]
fn floor_alpha_is_synchronized_for_every_preset_alpha() {
    let mut seen = Vec::new();
    for p in PRESETS {
        if seen.contains(&p.alpha) {
            continue;
        }
        seen.push(p.alpha);
        let link = p.link().unwrap();
        let d = build_floor_alpha(&link).unwrap();
        for n in 0..=2000u64 {
            let z = beatty_floor(&BigInt::from(n), &link.alpha).try_into().unwrap();
            assert!(pair_accepts(&d, &link.system, n, z), "{} n={n}", p.alpha);
            assert!(!pair_accepts(&d, &link.system, n, z + 1), "{} n={n}", p.alpha);
            if z > 0 {
                assert!(!pair_accepts(&d, &link.system, n, z - 1), "{} n={n}", p.alpha);
            }
        }
    }
}

#[test]
fn synchronized_state_counts() {
    let phi = derive_beta(&QuadraticIrrational::golden_ratio()).unwrap();
    assert_eq!(build_floor_alpha(&phi).unwrap().num_states(), 7);
    let beta = derive_beta(&q("(sqrt(3)-1)/2")).unwrap();
    assert_eq!(build_floor_alpha(&beta).unwrap().num_states(), 23);
    let alpha = derive_beta(&q("1+sqrt(3)")).unwrap();
    assert_eq!(build_floor_beta(&alpha).unwrap().num_states(), 23);
    assert_eq!(build_floor_alpha(&alpha).unwrap().num_states(), 20);
}

#[test]
fn worked_examples() {
    let fib = NumerationSystem::fibonacci();
    let phi = derive_beta(&QuadraticIrrational::golden_ratio()).unwrap();
    assert!(pair_accepts(&build_floor_alpha(&phi).unwrap(), &fib, 11, 17));
    let link = derive_beta(&q("1+sqrt(3)")).unwrap();
    let d = build_floor_alpha(&link).unwrap();
    let digits = |s: &str| s.chars().map(|c| c.to_digit(10).unwrap()).collect::<Vec<_>>();
    assert!(d.accepts_tapes(&[digits("00110"), digits("10010")]).unwrap());
}

#[test]
fn floor_beta_matches_the_shift_identity() {
    // val((n-1)·00) = q_2(n-1) + q_1⌊nβ⌋ = 3(n-1) + 2⌊nβ⌋ for β = (√3-1)/2.
    let link = derive_beta(&q("(sqrt(3)-1)/2")).unwrap();
    let sys = &link.system;
    let d = build_floor_beta(&link).unwrap();
    for n in 1..=500u64 {
        let z: u64 = beatty_floor(&BigInt::from(n), &link.beta).try_into().unwrap();
        let mut shifted = sys.encode_u64(n - 1).into_digits();
        shifted.extend([0, 0]);
        assert_eq!(u64::try_from(sys.value(&shifted)).unwrap(), 3 * (n - 1) + 2 * z);
        assert!(pair_accepts(&d, sys, n, z));
    }
}

#[test]
fn shift_paths_build_the_same_floor_beta() {
    for a in ["(sqrt(3)-1)/2", "(sqrt(17)-3)/4", "sqrt(2)", "(1+sqrt(5))/2"] {
        let link = derive_beta(&q(a)).unwrap();
        let direct = build_floor_beta(&link).unwrap();
        for path in [ostdigits::linrel::ShiftPath::Chained, ostdigits::linrel::ShiftPath::Regex] {
            assert_eq!(build_floor_beta_with(&link, path).unwrap(), direct, "{a} {path:?}");
        }
    }
}

#[test]
fn projections_recover_the_valid_strings() {
    let fib = NumerationSystem::fibonacci();
    let phi = derive_beta(&QuadraticIrrational::golden_ratio()).unwrap();
    let valid = fib.validity_dfa();
    let d = build_floor_alpha(&phi).unwrap();
    assert!(ops::equivalent(&ops::project(&d, &[1]).unwrap(), &valid).unwrap());
    let inc = "fib: x - n = 1".parse::<LinearRelation>().unwrap().to_dfa().unwrap();
    // Tapes are (x, n); projecting x leaves every valid n.
    assert!(ops::equivalent(&ops::project(&inc, &[0]).unwrap(), &valid).unwrap());
}

#[test]
fn digit_automata_have_the_expected_sizes_and_agree_with_the_oracle() {
    for p in PRESETS {
        let bundle = p.build().unwrap();
        if let Some(states) = p.states {
            assert_eq!(bundle.dfao.num_states(), states, "{}", p.name);
        }
        let oracle = qexact::digits(&bundle.link.alpha, p.base, 2001);
        let got = run_on_powers(&bundle.dfao, &bundle.link.system, p.base, 2001);
        for (n, (g, w)) in got.iter().zip(&oracle).enumerate() {
            assert_eq!(*g, Some(*w), "{} n={n}", p.name);
        }
    }
}

#[test]
fn digit_parts_partition_the_inputs() {
    for name in ["phi-b3", "sqrt2-b3", "bronze-b3", "sqrt17m3-b2"] {
        let p = preset(name).unwrap();
        let bundle = p.build().unwrap();
        let sys = &bundle.link.system;
        for n in 0..=2000u64 {
            let nb = BigInt::from(n);
            let d = beatty_floor(&(&nb * p.base), &bundle.link.alpha) - beatty_floor(&nb, &bundle.link.alpha) * p.base;
            let d = u32::try_from(d).unwrap();
            let rep = sys.encode_u64(n).into_digits();
            for (i, part) in bundle.parts.iter().enumerate() {
                assert_eq!(part.accepts(&rep).unwrap(), d == i as u32 + 1, "{name} n={n} part {}", i + 1);
            }
        }
    }
}

#[test]
fn eval_digit_examples() {
    let b2 = preset("phi-b2").unwrap().build().unwrap();
    assert_eq!(eval_digit(&b2, 4), Some(1));
    let first: Vec<u32> = (0..16).map(|n| eval_digit(&b2, n).unwrap()).collect();
    assert_eq!(first, vec![1, 0, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 0, 1, 1, 1]);
    let b3 = preset("phi-b3").unwrap().build().unwrap();
    assert_eq!(eval_digit(&b3, 3), Some(2));
    let digits = |s: &str| s.chars().map(|c| c.to_digit(10).unwrap()).collect::<Vec<_>>();
    assert_eq!(b2.dfao.run(&digits("100100")).unwrap(), Some(1));
    assert_eq!(b3.dfao.run(&digits("1001001")).unwrap(), Some(2));
}

#[test]
fn leading_zeros_never_change_the_output() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for name in ["phi-b2", "sqrt2-b3", "sqrt3m1-b2"] {
        let bundle = preset(name).unwrap().build().unwrap();
        let radix = bundle.link.system.radix();
        for _ in 0..2000 {
            let len = rng.gen_range(0..=10);
            let s: Vec<u32> = (0..len).map(|_| rng.gen_range(0..radix)).collect();
            let mut padded = vec![0];
            padded.extend(&s);
            assert_eq!(bundle.dfao.run(&s).unwrap(), bundle.dfao.run(&padded).unwrap(), "{name} {s:?}");
        }
    }
    // The same holds for relation automata over pairs.
    let link = derive_beta(&q("1+sqrt(3)")).unwrap();
    let d = build_floor_alpha(&link).unwrap();
    let pair = Alphabet::uniform(3, 2);
    for _ in 0..2000 {
        let len = rng.gen_range(0..=10);
        let s: Vec<u32> = (0..len).map(|_| rng.gen_range(0..pair.size() as u32)).collect();
        let mut padded = vec![0];
        padded.extend(&s);
        assert_eq!(d.accepts(&s).unwrap(), d.accepts(&padded).unwrap());
    }
}

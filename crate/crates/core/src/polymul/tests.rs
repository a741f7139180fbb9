use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::oracle::{rel_l2_error, schoolbook_polymul, schoolbook_polymul_real};

fn setup(config: FftConfig) -> PolySetup {
    PolySetup::new(NumberFormat::SINGLE, config, 1024)
}

fn random_real(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn random_complex(m: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect()
}

#[test]
fn small_product() {
    let ops = PolyOperands::real(&[2.0, 3.0], &[1.0, 4.0], ConvMode::Acyclic).unwrap();
    assert_eq!(ops.padded_n, 4);
    for config in [FftConfig::R, FftConfig::TwoR] {
        for r in [polymul_complex(&ops, &setup(config)), polymul_real(&ops, &setup(config))] {
            let c: Vec<f64> = r.unwrap().coeffs.iter().map(|c| c.re).collect();
            assert_eq!(c.len(), 3);
            for (got, want) in c.iter().zip([2.0, 11.0, 12.0]) {
                assert!((got - want).abs() < 1e-5, "{c:?}");
            }
        }
    }
}

#[test]
fn identity_operand() {
    let a = random_real(16, 1);
    let ops = PolyOperands::real(&a, &[1.0], ConvMode::Acyclic).unwrap();
    let r = polymul_real(&ops, &setup(FftConfig::TwoR)).unwrap();
    let got: Vec<f64> = r.coeffs.iter().map(|c| c.re).collect();
    for (g, w) in got.iter().zip(&a) {
        assert!((g - w).abs() < 1e-5);
    }
}

#[test]
fn matches_schoolbook() {
    let configs = [FftConfig::R, FftConfig::TwoR, FftConfig::TwoRBeta { beta: 2 }];
    for (i, config) in configs.into_iter().enumerate() {
        let (a, b) = (random_complex(20, i as u64), random_complex(13, 50 + i as u64));
        let ops = PolyOperands::new(a.clone(), b.clone(), ConvMode::Acyclic).unwrap();
        let r = polymul_complex(&ops, &setup(config)).unwrap();
        let want = schoolbook_polymul(&a, &b, ConvMode::Acyclic);
        assert!(rel_l2_error(&r.coeffs, &want) < 1e-5, "{config:?}");

        let (a, b) = (random_real(16, 7 + i as u64), random_real(16, 9 + i as u64));
        for mode in [ConvMode::Acyclic, ConvMode::Cyclic] {
            let ops = PolyOperands::real(&a, &b, mode).unwrap();
            let r = polymul_real(&ops, &setup(config)).unwrap();
            let want = schoolbook_polymul_real(&a, &b, mode);
            let want: Vec<Complex64> = want.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            assert!(rel_l2_error(&r.coeffs, &want) < 1e-5, "{config:?} {mode:?}");
            assert!(r.imag_residue < 1e-5);
        }
    }
}

#[test]
fn skipping_permutation_is_bit_identical_and_cheaper() {
    let ops = PolyOperands::real(&random_real(32, 3), &random_real(32, 4), ConvMode::Acyclic).unwrap();
    for config in [FftConfig::R, FftConfig::TwoR] {
        let mut runs = Vec::new();
        for skip in [false, true] {
            let s = PolySetup { skip_permutation: skip, ..setup(config) };
            runs.push(polymul_complex(&ops, &s).unwrap());
        }
        let bits = |r: &PolyResult| r.coeffs.iter().map(|c| (c.re.to_bits(), c.im.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&runs[0]), bits(&runs[1]), "{config:?}");
        assert!(runs[1].trace.cycles < runs[0].trace.cycles);
    }
}

#[test]
fn real_variant_is_cheaper() {
    let ops = PolyOperands::real(&random_real(32, 5), &random_real(32, 6), ConvMode::Acyclic).unwrap();
    for config in [FftConfig::R, FftConfig::TwoR] {
        let c = polymul_complex(&ops, &setup(config)).unwrap();
        let r = polymul_real(&ops, &setup(config)).unwrap();
        assert!(r.trace.cycles < c.trace.cycles, "{config:?}");
    }
}

#[test]
fn partitioned_units_agree() {
    let ops = PolyOperands::real(&random_real(16, 8), &random_real(16, 9), ConvMode::Cyclic).unwrap();
    let config = FftConfig::TwoRBeta { beta: 2 };
    let serial = polymul_real(&ops, &PolySetup::new(NumberFormat::HALF, config, 1024)).unwrap();
    let s = PolySetup {
        partitions: 2,
        use_partitions: true,
        ..PolySetup::new(NumberFormat::HALF, config, 1024)
    };
    let par = polymul_real(&ops, &s).unwrap();
    assert_eq!(serial.coeffs, par.coeffs);
    assert!(par.trace.cycles < serial.trace.cycles);
}

#[test]
fn operand_errors() {
    assert!(PolyOperands::real(&[], &[1.0], ConvMode::Acyclic).is_err());
    assert!(PolyOperands::real(&[1.0; 3], &[1.0; 3], ConvMode::Cyclic).is_err());
    let ops = PolyOperands::real(&[1.0; 3], &[1.0; 3], ConvMode::Acyclic).unwrap();
    assert_eq!(ops.padded_n, 8);
    assert!(ops.clone().with_padded_n(4).is_err());
    assert_eq!(ops.with_padded_n(16).unwrap().padded_n, 16);
    let c = PolyOperands::new(vec![Complex64::new(0.0, 1.0)], vec![Complex64::new(1.0, 0.0)], ConvMode::Acyclic).unwrap();
    assert!(polymul_real(&c, &setup(FftConfig::TwoR)).is_err());
}

//! Acceptance suite: one line per criterion, non-zero exit if a gating
//! criterion fails. Criterion 7 (partition speedup band) and criterion 9
//! (throughput magnitude) are reported but do not gate.

use std::cell::Cell;
use std::time::Instant;

use num_complex::Complex64;
use pimfft::arith::NumberFormat;
use pimfft::crossbar::{Crossbar, CrossbarDims, CLOCK_HZ};
use pimfft::fft::{self, Direction, FftConfig, FftRun, Workspace};
use pimfft::harness::{self, emit_report, random_sequence, BenchConfig, FormatPreset, ReportFormat, Workload};
use pimfft::oracle::{self, rel_l2_error, ConvMode};
use pimfft::polymul::{self, PolyOperands, PolySetup};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const SINGLE: NumberFormat = NumberFormat::SINGLE;
const HALF: NumberFormat = NumberFormat::HALF;

struct Outcome {
    pass: bool,
    gating: bool,
    detail: String,
}

fn gate(pass: bool, detail: String) -> Outcome {
    Outcome { pass, gating: true, detail }
}

fn tol(f: NumberFormat) -> f64 {
    harness::tolerance(f)
}

fn workspace(n: usize, f: NumberFormat, config: FftConfig, cols: usize, k: usize) -> (Crossbar, Workspace) {
    let dims = CrossbarDims::new(n / config.per_row(), cols).unwrap();
    let plan = fft::plan_fft(n, dims, f, config, Direction::Forward).unwrap().with_partitions(k > 1);
    let x = fft::new_crossbar(&plan, cols, k).unwrap();
    let ws = Workspace::new(plan, &x, 1, 0).unwrap();
    (x, ws)
}

struct FftCase {
    run: FftRun,
    words: Vec<u64>,
    out: Vec<Complex64>,
    mismatches: usize,
}

fn fft_case(input: &[Complex64], f: NumberFormat, config: FftConfig, cols: usize, k: usize) -> FftCase {
    let (mut x, mut ws) = workspace(input.len(), f, config, cols, k);
    fft::load_sequence(&mut ws, &mut x, 0, input).unwrap();
    ws.enable_log();
    let before = ws.snapshot(&x);
    let run = fft::run_fft(&mut ws, &mut x, 0).unwrap();
    let log = ws.take_log();
    FftCase {
        run,
        words: fft::read_words(&ws, &x, 0),
        out: fft::read_sequence(&ws, &x, 0),
        mismatches: fft::replay_mismatches(&ws, &x, &before, &log),
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn criterion_1() -> Outcome {
    let worst = [Cell::new(0.0f64), Cell::new(0.0)];
    let cases = Cell::new(0);
    let mut failures = Vec::new();
    for (fi, f) in [SINGLE, HALF].into_iter().enumerate() {
        for n in [8usize, 64, 256, 2048] {
            let mut configs = vec![FftConfig::TwoR];
            if n <= 256 {
                configs.extend([FftConfig::R, FftConfig::TwoRBeta { beta: 2 }]);
            }
            for config in configs {
                let count = if n == 2048 { 2 } else { 4 };
                let res = runner(count).run(&any::<u64>(), |seed| {
                    let x = random_sequence(n, seed);
                    let c = fft_case(&x, f, config, 1024, 1);
                    let err = rel_l2_error(&c.out, &oracle::naive_dft(&x));
                    prop_assert_eq!(c.mismatches, 0, "replay mismatch");
                    prop_assert!(err <= tol(f), "rel L2 {}", err);
                    worst[fi].set(worst[fi].get().max(err));
                    cases.set(cases.get() + 1);
                    Ok(())
                });
                if let Err(e) = res {
                    failures.push(format!("{f} n={n} {}: {e}", config.name()));
                }
            }
        }
    }
    gate(
        failures.is_empty(),
        format!(
            "{} cases bit-exact vs replay; worst rel L2 single {:.2e} half {:.2e}{}",
            cases.get(),
            worst[0].get(),
            worst[1].get(),
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for n in [8usize, 64, 256, 2048] {
        let x = random_sequence(n, n as u64);
        let (mut xb, mut ws) = workspace(n, SINGLE, FftConfig::TwoR, 1024, 1);
        fft::load_sequence(&mut ws, &mut xb, 0, &x).unwrap();
        fft::run_fft(&mut ws, &mut xb, 0).unwrap();
        let inv = fft::run_inverse_fft(&mut ws, &mut xb, 0).unwrap();
        assert!(inv.phases.scale > 0);
        worst = worst.max(rel_l2_error(&fft::read_sequence(&ws, &xb, 0), &x));
    }
    gate(worst <= 1e-4, format!("n in {{8,64,256,2048}}, worst rel L2 {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let ops = PolyOperands::real(&[2.0, 3.0], &[1.0, 4.0], ConvMode::Acyclic).unwrap();
    let mut seen = Vec::new();
    let mut pass = true;
    for f in [SINGLE, HALF] {
        for config in [FftConfig::R, FftConfig::TwoR] {
            let s = PolySetup::new(f, config, 1024);
            for r in [polymul::polymul_complex(&ops, &s).unwrap(), polymul::polymul_real(&ops, &s).unwrap()] {
                let c: Vec<f64> = r.coeffs.iter().map(|c| c.re.round()).collect();
                pass &= c == [2.0, 11.0, 12.0] && r.coeffs.iter().all(|c| (c.re - c.re.round()).abs() < 1e-2);
                seen.push(r.coeffs.iter().map(|c| c.re).fold(0.0f64, |m, v| m.max((v - v.round()).abs())));
            }
        }
    }
    let dev = seen.iter().cloned().fold(0.0, f64::max);
    gate(pass, format!("(2+3x)(1+4x) = 2+11x+12x^2 on 8 paths; largest deviation before rounding {dev:.1e}"))
}

fn criterion_4() -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let configs = [FftConfig::TwoR, FftConfig::R, FftConfig::TwoRBeta { beta: 2 }];
    let mut worst = [0.0f64; 2];
    let mut failures = Vec::new();
    for i in 0..200 {
        let m = rng.gen_range(1..=64);
        let (f, fi) = if i % 4 < 2 { (SINGLE, 0) } else { (HALF, 1) };
        let real = i % 2 == 1;
        let mut v = random_sequence(2 * m, rng.gen());
        if real {
            v.iter_mut().for_each(|z| z.im = 0.0);
        }
        let (a, b) = v.split_at(m);
        let ops = PolyOperands::new(a.to_vec(), b.to_vec(), ConvMode::Acyclic).unwrap();
        let n = ops.padded_n.max(4);
        let ops = ops.with_padded_n(n).unwrap();
        let config = configs[i % 3];
        let mut outs = Vec::new();
        for skip in [false, true] {
            let s = PolySetup {
                skip_permutation: skip,
                ..PolySetup::new(f, config, 1024)
            };
            let r = if real { polymul::polymul_real(&ops, &s) } else { polymul::polymul_complex(&ops, &s) };
            outs.push(r.unwrap().coeffs);
        }
        let want = oracle::schoolbook_polymul(a, b, ConvMode::Acyclic);
        let got: Vec<Complex64> = if real {
            outs[1].iter().map(|c| Complex64::new(c.re, 0.0)).collect()
        } else {
            outs[1].clone()
        };
        let err = rel_l2_error(&got, &want);
        worst[fi] = worst[fi].max(err);
        let bits = |v: &[Complex64]| v.iter().map(|c| (c.re.to_bits(), c.im.to_bits())).collect::<Vec<_>>();
        if err > tol(f) || bits(&outs[0]) != bits(&outs[1]) {
            failures.push(format!("#{i} m={m} {f} {} real={real} err={err:.2e}", config.name()));
        }
    }
    gate(
        failures.is_empty(),
        format!(
            "200 instances, skip variant bit-identical; worst rel L2 single {:.2e} half {:.2e}{}",
            worst[0],
            worst[1],
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    let mut pass = true;
    for w in Workload::ALL {
        for (f, config, k) in [
            (FormatPreset::Single, FftConfig::TwoR, 1),
            (FormatPreset::Half, FftConfig::R, 1),
            (FormatPreset::Half, FftConfig::TwoRBeta { beta: 2 }, 2),
        ] {
            let r = harness::run(&BenchConfig::new(w, 128, f, config).with_partitions(k)).unwrap();
            pass &= r.energy_fj_per_instance == r.gate_ops as f64 * 6.4;
            pass &= r.latency_s == r.cycles as f64 / 333_333_333.0 && r.clock_hz == CLOCK_HZ;
            count += 1;
        }
    }
    gate(pass, format!("{count} workload runs: energy == gate_ops * 6.4 fJ and latency == cycles / 333333333 s"))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, f) in [(64usize, HALF), (256, SINGLE)] {
        let c = fft_case(&random_sequence(n, 6), f, FftConfig::R, 1024, 1);
        let per: Vec<u64> = c.run.stages.iter().map(|s| s.total()).collect();
        pass &= per.len() == n.trailing_zeros() as usize && per.iter().all(|&p| p == per[0]);
        notes.push(format!("r n={n}: {} stages x {} cycles", per.len(), per[0]));
    }
    let n = 512;
    let x = random_sequence(n, 66);
    let mut serial = Vec::new();
    let mut part = Vec::new();
    for beta in [2usize, 4] {
        let config = FftConfig::TwoRBeta { beta };
        let s = fft_case(&x, HALF, config, 1024, 1);
        let p = fft_case(&x, HALF, config, 1024, beta);
        pass &= s.words == p.words;
        let bf = |c: &FftCase| c.run.stages.iter().map(|s| s.butterfly).sum::<u64>();
        serial.push(bf(&s));
        part.push(bf(&p));
    }
    pass &= serial[0] == 2 * part[0] && serial[1] == 4 * part[1] && part[0] == part[1];
    notes.push(format!(
        "butterfly cycles n=512 half, beta 2/4: serial {}/{}, k=beta {}/{}, states equal",
        serial[0], serial[1], part[0], part[1]
    ));
    gate(pass, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let ratio = |f: FormatPreset| {
        let c = BenchConfig::new(Workload::Fft, 4096, f, FftConfig::TwoRBeta { beta: 2 });
        let one = harness::run(&c).unwrap();
        let two = harness::run(&c.clone().with_partitions(2)).unwrap();
        assert!(one.passed() && two.passed());
        (two.throughput / one.throughput, one.cycles, two.cycles)
    };
    let (single, c1, c2) = ratio(FormatPreset::Single);
    let (half, ..) = ratio(FormatPreset::Half);
    Outcome {
        pass: (1.4..=1.8).contains(&single),
        gating: false,
        detail: format!(
            "single k=2 vs k=1: {single:.3}x ({c1} -> {c2} cycles), target 1.4-1.8x; half {half:.3}x; \
             the non-butterfly remainder is only {:.1}% of the k=1 single run",
            100.0 * (2.0 / single - 1.0)
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (n, config) in [(2048usize, FftConfig::TwoR), (4096, FftConfig::TwoRBeta { beta: 2 })] {
        let re = |s: u64| random_sequence(n / 2, s).iter().map(|z| z.re).collect::<Vec<f64>>();
        let (a, b) = (re(81), re(82));
        let ops = PolyOperands::real(&a, &b, ConvMode::Acyclic).unwrap();
        let s = PolySetup::new(SINGLE, config, 1024);
        let cr = polymul::polymul_real(&ops, &s).unwrap();
        let cc = polymul::polymul_complex(&ops, &s).unwrap();
        pass &= cr.trace.cycles < cc.trace.cycles;

        let (mut x, mut ws) = s.build(n).unwrap();
        polymul::pack_real_pair(&mut ws, &mut x, 0, &a, &b).unwrap();
        fft::run_transform(&mut ws, &mut x, 0, Direction::Forward, false).unwrap();
        polymul::unpack_real_pair(&mut ws, &mut x).unwrap();
        let spectrum = |v: &[f64]| {
            let mut z: Vec<Complex64> = v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
            z.resize(n, Complex64::new(0.0, 0.0));
            oracle::naive_dft(&z)
        };
        let ex = rel_l2_error(&fft::read_sequence(&ws, &x, 1), &spectrum(&a));
        let ey = rel_l2_error(&fft::read_sequence(&ws, &x, 0), &spectrum(&b));
        pass &= ex.max(ey) <= tol(SINGLE);
        notes.push(format!(
            "n={n}: real {} < complex {} cycles, unpacked spectra rel L2 {:.1e}",
            cr.trace.cycles,
            cc.trace.cycles,
            ex.max(ey)
        ));
    }
    gate(pass, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let r = harness::run(&BenchConfig::new(Workload::Fft, 2048, FormatPreset::Single, FftConfig::TwoR)).unwrap();
    let ratio = r.throughput / 3.65e7;
    Outcome {
        pass: (0.5..=2.0).contains(&ratio),
        gating: false,
        detail: format!(
            "8 GB, single, n=2048, 2r: {:.3e} FFT/s ({} cycles, {} crossbars), {ratio:.2}x the reference point",
            r.throughput, r.cycles, r.crossbar_count
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut configs = Vec::new();
    for w in Workload::ALL {
        configs.push(BenchConfig::new(w, 256, FormatPreset::Single, FftConfig::TwoR).with_seed(10));
        configs.push(BenchConfig::new(w, 128, FormatPreset::Half, FftConfig::TwoRBeta { beta: 2 }).with_partitions(2));
    }
    let bytes = || {
        let mut out = Vec::new();
        for c in &configs {
            emit_report(&harness::run(c).unwrap(), &mut out, ReportFormat::Json).unwrap();
        }
        out
    };
    let x = random_sequence(256, 10);
    let words = || fft_case(&x, SINGLE, FftConfig::R, 1024, 1).words;
    let pass = bytes() == bytes() && words() == words();
    gate(pass, format!("{} reports and raw FFT state byte-identical across repeated runs", configs.len()))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut gating_failures = 0;
    for (id, f) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let status = match (o.pass, o.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-gating)",
        };
        println!("criterion {id:>2}: {status} [{:.1}s] {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass && o.gating {
            gating_failures += 1;
        }
    }
    if gating_failures > 0 {
        eprintln!("{gating_failures} gating criteria failed");
        std::process::exit(1);
    }
}

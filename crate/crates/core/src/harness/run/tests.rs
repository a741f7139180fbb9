use super::*;
use crate::fft::FftConfig;
use crate::harness::{emit_report, emit_reports, FormatPreset, ReportFormat, CSV_COLUMNS};

fn cfg(workload: Workload, n: usize) -> BenchConfig {
    BenchConfig::new(workload, n, FormatPreset::Single, FftConfig::TwoR).with_seed(11)
}

#[test]
fn crossbar_count_follows_memory_size() {
    let c = cfg(Workload::Fft, 2048);
    assert_eq!(c.crossbar_count(), 65_536);
    assert_eq!(c.with_memory_gb(40).crossbar_count(), 327_680);
}

#[test]
fn derived_fields_are_consistent() {
    for w in Workload::ALL {
        let r = run(&cfg(w, 64)).unwrap();
        assert!(r.passed(), "{w}: {r:?}");
        assert_eq!(r.energy_fj_per_instance, r.gate_ops as f64 * 6.4);
        assert_eq!(r.latency_s, r.cycles as f64 / 333_333_333.0);
        assert_eq!(r.batch_per_crossbar, 1024 / 32);
        let ops = (r.crossbar_count * r.batch_per_crossbar) as f64;
        assert!((r.throughput * r.latency_s - ops).abs() <= ops * 1e-15);
        assert!((r.power_w - r.energy_fj_per_instance * 1e-15 * r.throughput).abs() <= r.power_w * 1e-15);
        assert_eq!(r.replay_mismatches.is_some(), w == Workload::Verify);
        assert_eq!(r.imag_residue.is_some(), w == Workload::PolymulReal);
    }
}

#[test]
fn verify_workload_passes() {
    let r = run(&cfg(Workload::Verify, 256)).unwrap();
    assert!(r.passed());
    assert_eq!(r.replay_mismatches, Some(0));
    assert!(r.rel_l2_error < 1e-4);
}

#[test]
fn trials_share_counters() {
    let one = run(&cfg(Workload::Fft, 32)).unwrap();
    let mut c = cfg(Workload::Fft, 32);
    c.trials = 3;
    let three = run(&c).unwrap();
    assert_eq!(one.cycles, three.cycles);
    assert!(three.rel_l2_error >= one.rel_l2_error);
}

#[test]
fn json_round_trip_and_determinism() {
    let emit = || {
        let r = run(&cfg(Workload::PolymulReal, 32)).unwrap();
        let mut buf = Vec::new();
        emit_report(&r, &mut buf, ReportFormat::Json).unwrap();
        (r, buf)
    };
    let (r, a) = emit();
    let (_, b) = emit();
    assert_eq!(a, b);
    let back: Report = serde_json::from_slice(&a).unwrap();
    assert_eq!(back, r);
}

#[test]
fn csv_header_matches_schema() {
    let r = run(&cfg(Workload::Fft, 16)).unwrap();
    let mut buf = Vec::new();
    emit_reports(&[r.clone(), r], &mut buf, ReportFormat::Csv).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_COLUMNS.join(","));
    // the documented order is the serialization order
    let json = serde_json::to_value(run(&cfg(Workload::Fft, 16)).unwrap()).unwrap();
    let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), CSV_COLUMNS.len());
    assert_eq!(lines[1].split(',').count(), CSV_COLUMNS.len());
}

#[test]
fn sweep_grid() {
    assert!(sweep(&[]).reports.is_empty());
    let mut grid = Vec::new();
    for format in [FormatPreset::Single, FormatPreset::Half] {
        for n in [64, 128, 256] {
            grid.push(BenchConfig::new(Workload::Fft, n, format, FftConfig::TwoR));
        }
    }
    let out = sweep(&grid);
    assert!(out.aborted.is_none());
    assert_eq!(out.reports.len(), 6);
    for w in out.reports.chunks(3) {
        // stacked rows make the batch shrink as 1/n while latency grows
        assert!(w[0].throughput > w[1].throughput && w[1].throughput > w[2].throughput);
    }
}

#[test]
fn sweep_aborts_on_error() {
    let mut bad = cfg(Workload::Fft, 16);
    bad.n = 12;
    let out = sweep(&[cfg(Workload::Fft, 16), bad, cfg(Workload::Fft, 16)]);
    assert_eq!(out.reports.len(), 1);
    assert!(matches!(out.aborted, Some((1, Error::Config(_)))));
}

#[test]
fn invalid_configs() {
    let too_long = cfg(Workload::Fft, 4096);
    assert!(run(&too_long).is_err());
    let mut no_trials = cfg(Workload::Fft, 16);
    no_trials.trials = 0;
    assert!(run(&no_trials).is_err());
    assert!(crate::harness::parse_config("2rb", 3).is_err());
    assert_eq!(crate::harness::parse_config("2rb", 4).unwrap(), FftConfig::TwoRBeta { beta: 4 });
    assert_eq!(crate::harness::parse_config("2rb2", 4).unwrap(), FftConfig::TwoRBeta { beta: 2 });
    assert!(crate::harness::parse_config("2rbx", 4).is_err());
    assert!("quad".parse::<FormatPreset>().is_err());
    assert_eq!("polymul-real".parse::<Workload>().unwrap(), Workload::PolymulReal);
}

#[test]
fn supplied_input() {
    let c = cfg(Workload::Fft, 16);
    let x = crate::harness::random_sequence(16, 11);
    assert_eq!(run_on_input(&c, &x).unwrap(), run(&c).unwrap());
    assert!(run_on_input(&c, &x[..8]).is_err());
}

#[test]
fn sequential_and_parallel_agree() {
    let grid: Vec<BenchConfig> = (0..4).map(|s| cfg(Workload::Verify, 64).with_seed(s)).collect();
    let a = sweep_with(&grid, Exec::Sequential).reports;
    let b = sweep_with(&grid, Exec::Parallel).reports;
    assert_eq!(a, b);
}

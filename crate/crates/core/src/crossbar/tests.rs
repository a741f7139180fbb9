use proptest::prelude::*;

use super::*;

fn xbar(rows: usize, cols: usize) -> Crossbar {
    Crossbar::zeros(rows, cols).unwrap()
}

#[test]
fn new_crossbar_is_zeroed_with_empty_trace() {
    let x = xbar(1024, 1024);
    assert_eq!(x.trace(), Trace::default());
    assert!(x.read_region(0..1024, 0..1024).unwrap().iter().flatten().all(|b| !b));
}

#[test]
fn four_partitions_of_256_columns() {
    let dims = CrossbarDims::default();
    let x = Crossbar::new(dims, PartitionConfig::even(1024, 4).unwrap(), Init::Zeros).unwrap();
    assert_eq!(x.partitions().count(), 4);
    assert!(x.partitions().ranges().iter().all(|r| r.len() == 256));
}

#[test]
fn overlapping_partitions_rejected() {
    let bad = PartitionConfig::from_ranges(8, vec![0..4, 2..6, 6..8]);
    assert!(matches!(bad, Err(Error::Config(_))));
}

#[test]
fn nor_truth_table() {
    let m = vec![
        vec![false, false, false],
        vec![false, true, false],
        vec![true, false, false],
        vec![true, true, false],
    ];
    let mut x = Crossbar::new(
        CrossbarDims::new(4, 3).unwrap(),
        PartitionConfig::single(3),
        Init::Matrix(m),
    )
    .unwrap();
    x.nor_columns(0, 1, 2, &x.all_rows()).unwrap();
    let out: Vec<bool> = (0..4).map(|r| x.bit(r, 2)).collect();
    assert_eq!(out, vec![true, false, false, false]);
}

#[test]
fn full_column_op_costs_one_cycle_and_1024_gates() {
    let mut x = xbar(1024, 8);
    x.nor_columns(0, 1, 2, &x.all_rows()).unwrap();
    let t = x.trace();
    assert_eq!(t.cycles, 1);
    assert_eq!(t.gate_ops, 1024);
    assert_eq!(t.energy_fj(), 6553.6);
}

#[test]
fn row_subset_only_changes_selected_rows() {
    let mut x = xbar(1024, 4);
    let rows = Mask::from_indices(1024, (0..1024).filter(|r| r % 2 == 0));
    assert_eq!(rows.count(), 512);
    // NOR of zeros is one; only the selected rows may flip.
    x.nor_columns(0, 1, 2, &rows).unwrap();
    for r in 0..1024 {
        assert_eq!(x.bit(r, 2), r % 2 == 0, "row {r}");
    }
    assert_eq!(x.trace().gate_ops, 512);
}

#[test]
fn not_column_and_involution() {
    let mut x = Crossbar::new(
        CrossbarDims::new(16, 4).unwrap(),
        PartitionConfig::single(4),
        Init::Ones,
    )
    .unwrap();
    let all = x.all_rows();
    x.not_column(0, 1, &all).unwrap();
    assert!((0..16).all(|r| !x.bit(r, 1)));
    // restore a patterned column through a scratch column
    for r in 0..16 {
        x.host_store(r, 0, 1, (r % 3 == 0) as u64);
    }
    x.not_column(0, 1, &all).unwrap();
    x.not_column(1, 2, &all).unwrap();
    assert!((0..16).all(|r| x.bit(r, 2) == (r % 3 == 0)));
}

#[test]
fn shift_up_by_one_row_via_row_nots() {
    // Invert the column into scratch, then move each scratch row up by one with a row NOT.
    let rows = 8;
    let mut x = xbar(rows, 3);
    let data = [true, false, true, true, false, false, true, false];
    for (r, &b) in data.iter().enumerate() {
        x.host_store(r, 0, 1, b as u64);
    }
    x.not_column(0, 1, &x.all_rows()).unwrap();
    let scratch = Mask::from_indices(3, [1]);
    for r in 1..rows {
        x.not_row(r, r - 1, &scratch).unwrap();
    }
    let expect: Vec<bool> = data[1..].to_vec();
    let got: Vec<bool> = (0..rows - 1).map(|r| x.bit(r, 1)).collect();
    assert_eq!(got, expect);
    assert_eq!(x.trace().row_ops, rows as u64 - 1);
}

#[test]
fn row_ops_not_copy_and_nor() {
    let mut x = xbar(4, 16);
    let cols = x.all_cols();
    x.not_row(0, 1, &cols).unwrap();
    assert!((0..16).all(|c| x.bit(1, c)));
    assert_eq!(x.trace().cycles, 1);
    assert_eq!(x.trace().gate_ops, 16);
    for c in 0..16 {
        x.host_store(2, c, 1, (c % 5 == 1) as u64);
    }
    x.not_row(2, 0, &cols).unwrap();
    x.not_row(0, 3, &cols).unwrap();
    assert!((0..16).all(|c| x.bit(3, c) == (c % 5 == 1)));
    // NOR over a column subset
    let subset = Mask::from_range(16, 4..12);
    x.nor_rows(2, 3, 0, &subset).unwrap();
    for c in 0..16 {
        if (4..12).contains(&c) {
            assert_eq!(x.bit(0, c), !(c % 5 == 1));
        }
    }
}

#[test]
fn column_op_errors() {
    let mut x = xbar(4, 4);
    let all = x.all_rows();
    assert!(matches!(x.nor_columns(0, 1, 9, &all), Err(Error::OutOfRange { .. })));
    assert_eq!(x.nor_columns(0, 1, 1, &all), Err(Error::OutputAliasesInput(1)));
    assert_eq!(x.not_column(2, 2, &all), Err(Error::OutputAliasesInput(2)));
    assert_eq!(x.trace(), Trace::default());
}

#[test]
fn partition_span_rules() {
    let dims = CrossbarDims::new(8, 8).unwrap();
    let mut x = Crossbar::new(dims, PartitionConfig::even(8, 2).unwrap(), Init::Zeros).unwrap();
    let all = x.all_rows();
    assert_eq!(x.nor_columns(0, 5, 1, &all), Err(Error::PartitionSpan(1, 0)));
    x.column_op_bridged(ColumnOp::not(0, 5), &all).unwrap();
    assert_eq!(x.trace().cycles, 1);
    let a = ColumnOp::nor(0, 1, 2);
    let b = ColumnOp::nor(1, 2, 3);
    assert_eq!(
        x.parallel_partition_step(&[(a, &all), (b, &all)]),
        Err(Error::PartitionConflict(0))
    );
    let span = ColumnOp::nor(3, 4, 6);
    assert!(x.parallel_partition_step(&[(span, &all)]).is_err());
}

#[test]
fn two_partitions_one_cycle() {
    let dims = CrossbarDims::new(16, 8).unwrap();
    let mut x = Crossbar::new(dims, PartitionConfig::even(8, 2).unwrap(), Init::Zeros).unwrap();
    let all = x.all_rows();
    x.parallel_partition_step(&[(ColumnOp::nor(0, 1, 2), &all), (ColumnOp::nor(4, 5, 6), &all)])
        .unwrap();
    let t = x.trace();
    assert_eq!(t.cycles, 1);
    assert_eq!(t.gate_ops, 32);
    assert_eq!(t.parallel_steps, 1);
}

#[test]
fn single_partition_step_matches_plain_op() {
    let mut a = xbar(16, 4);
    let mut b = xbar(16, 4);
    let all = a.all_rows();
    a.parallel_partition_step(&[(ColumnOp::nor(0, 1, 2), &all)]).unwrap();
    b.nor_columns(0, 1, 2, &all).unwrap();
    assert_eq!(a.read_region(0..16, 0..4), b.read_region(0..16, 0..4));
    assert_eq!(a.trace(), b.trace());
}

#[test]
fn write_then_read_round_trip() {
    let mut x = xbar(8, 8);
    let vals = Mask::from_indices(8, [1, 2, 7]);
    x.write_column(3, &x.all_rows(), &vals).unwrap();
    assert_eq!(x.trace().cycles, 1);
    assert_eq!(x.trace().write_ops, 1);
    assert_eq!(x.trace().gate_ops, 0);
    let col: Vec<bool> = x.read_region(0..8, 3..4).unwrap().into_iter().map(|r| r[0]).collect();
    assert_eq!(col, (0..8).map(|r| vals.get(r)).collect::<Vec<_>>());
    x.write_column(3, &x.all_rows(), &Mask::none(8)).unwrap();
    assert!((0..8).all(|r| !x.bit(r, 3)));
    let rv = Mask::from_indices(8, [0, 4]);
    x.write_row(5, &x.all_cols(), &rv).unwrap();
    assert_eq!(x.read_word(5, 0, 8), 0b0001_0001);
    assert!(x.write_column(8, &x.all_rows(), &vals).is_err());
    assert!(x.read_region(0..9, 0..1).is_err());
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    proptest::collection::vec(proptest::collection::vec(any::<bool>(), cols), rows)
}

proptest! {
    #[test]
    fn column_op_touches_only_output_cells(
        m in arb_matrix(70, 6),
        sel in proptest::collection::vec(any::<bool>(), 70),
        a in 0usize..6, b in 0usize..6, out in 0usize..6,
    ) {
        prop_assume!(out != a && out != b);
        let dims = CrossbarDims::new(70, 6).unwrap();
        let mut x = Crossbar::new(dims, PartitionConfig::single(6), Init::Matrix(m.clone())).unwrap();
        let rows = Mask::from_bools(&sel);
        x.nor_columns(a, b, out, &rows).unwrap();
        let after = x.read_region(0..70, 0..6).unwrap();
        for r in 0..70 {
            for c in 0..6 {
                let expect = if c == out && sel[r] { !(m[r][a] | m[r][b]) } else { m[r][c] };
                prop_assert_eq!(after[r][c], expect);
            }
        }
        prop_assert_eq!(x.trace().cycles, 1);
        prop_assert_eq!(x.trace().energy_fj(), x.trace().gate_ops as f64 * 6.4);
    }

    #[test]
    fn partition_step_equals_sequential(m in arb_matrix(33, 16), k in prop_oneof![Just(1usize), Just(2), Just(4)], nops in 1usize..=4) {
        let nops = nops.min(k);
        let dims = CrossbarDims::new(33, 16).unwrap();
        let parts = PartitionConfig::even(16, k).unwrap();
        let mut par = Crossbar::new(dims, parts.clone(), Init::Matrix(m.clone())).unwrap();
        let mut seq = Crossbar::new(dims, parts, Init::Matrix(m)).unwrap();
        let w = 16 / k;
        let all = par.all_rows();
        let ops: Vec<ColumnOp> = (0..nops).map(|p| ColumnOp::nor(p * w, p * w + 1, p * w + 2)).collect();
        let with_rows: Vec<(ColumnOp, &Mask)> = ops.iter().map(|o| (*o, &all)).collect();
        par.parallel_partition_step(&with_rows).unwrap();
        for o in &ops {
            seq.column_op(*o, &all).unwrap();
        }
        prop_assert_eq!(par.read_region(0..33, 0..16).unwrap(), seq.read_region(0..33, 0..16).unwrap());
        prop_assert_eq!(par.trace().cycles + ops.len() as u64 - 1, seq.trace().cycles);
        prop_assert_eq!(par.trace().gate_ops, seq.trace().gate_ops);
    }
}

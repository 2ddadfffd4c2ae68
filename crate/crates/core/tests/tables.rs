use g2chain::tables::reproduce;

#[test]
fn table1_reproduces_levels_and_roots() {
    let rep = reproduce(1, 1e-3).unwrap();
    println!("{}", serde_json::to_string_pretty(&rep).unwrap());
    assert_eq!(rep.ed_level_count, 4);
    assert_eq!(rep.ed_matched, 4);
    assert!(rep.levels_ok(1e-3) && rep.roots_ok(1e-3, 1e-6, 1e-5));
}

#[test]
fn table2_root_sets_give_printed_levels() {
    let rep = reproduce(2, 1e-3).unwrap();
    for r in &rep.rows {
        println!("{} {:.3e} {:.3e} {:.3e} {:.3e} {:.3e} {}", r.level, r.rel_err_printed, r.rel_err_ed, r.solved_residual, r.rel_err_solved, r.ratio_residual, r.singular);
    }
    assert_eq!(rep.ed_level_count, 30);
    assert_eq!(rep.ed_matched, 30);
    assert!(rep.levels_ok(1e-3) && rep.roots_ok(1e-3, 1e-6, 1e-5));
}

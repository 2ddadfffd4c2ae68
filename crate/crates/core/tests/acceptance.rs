//! Acceptance run: one PASS/FAIL line per criterion, followed by the
//! failing checks and the printed identities recorded as errata.
//!
//! Exits non-zero when a criterion fails for any reason other than a
//! known conflict between its literal statement and the published data.

use std::time::{Duration, Instant};

use g2chain::report::Report;
use g2chain::suites::Suite;
use g2chain::tables::{reproduce, TableReport};

const SEED: u64 = 11;

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
    notes: Vec<String>,
    /// Set when the only failing part is a known conflict with the published data.
    conflict: Option<String>,
}

fn suite(id: usize, title: &'static str, s: Suite, limit: Duration) -> Outcome {
    let start = Instant::now();
    let rep = s.run(SEED, None);
    let took = start.elapsed();
    match rep {
        Ok(rep) => {
            let in_time = took <= limit;
            let mut notes = notes_of(&rep);
            if !in_time {
                notes.push(format!("runtime {took:.1?} exceeds {limit:?}"));
            }
            // checks with their own tolerance (flags, printed decimals) are left out of the headline
            let tol = s.default_tol();
            let max = rep.checks.iter().filter(|c| c.erratum.is_none() && c.tol == tol).map(|c| c.residual).fold(0.0, f64::max);
            Outcome {
                id,
                title,
                passed: rep.ok() && in_time,
                detail: format!("{} checks, max residual {max:.2e} at tol {tol:.0e}, {:.1?}", rep.checks.len(), took),
                notes,
                conflict: None,
            }
        }
        Err(e) => Outcome { id, title, passed: false, detail: format!("error: {e}"), notes: vec![], conflict: None },
    }
}

fn notes_of(rep: &Report) -> Vec<String> {
    let mut out: Vec<String> = rep.failures().iter().map(|c| format!("failed: {} = {:.3e} (tol {:.0e})", c.name, c.residual, c.tol)).collect();
    out.extend(rep.errata().iter().map(|c| format!("erratum: {} = {:.3e} [{}]", c.name, c.residual, c.erratum.as_deref().unwrap_or(""))));
    out
}

fn table(id: usize, title: &'static str, which: usize, expected_levels: usize, limit: Duration) -> Outcome {
    let start = Instant::now();
    let rep: TableReport = match reproduce(which, 1e-3) {
        Ok(r) => r,
        Err(e) => return Outcome { id, title, passed: false, detail: format!("error: {e}"), notes: vec![], conflict: None },
    };
    let took = start.elapsed();
    let levels_ok = rep.levels_ok(1e-3);
    let roots_ok = rep.roots_ok(1e-3, 1e-6, 1e-5);
    let count_ok = rep.ed_level_count == expected_levels;
    let mut notes = Vec::new();
    if !count_ok {
        notes.push(format!("ED gives {} distinct levels, criterion expects {expected_levels}", rep.ed_level_count));
    }
    for r in rep.rows.iter().filter(|r| r.singular) {
        notes.push(format!("level {}: singular root pair at ±i/2, checked in ratio form ({:.1e})", r.level, r.ratio_residual));
    }
    if took > limit {
        notes.push(format!("runtime {took:.1?} exceeds {limit:?}"));
    }
    let rest_ok = levels_ok && roots_ok && rep.ed_matched == rep.rows.len() && took <= limit;
    let conflict = (rest_ok && !count_ok && rep.ed_level_count == rep.rows.len())
        .then(|| format!("the published table itself lists {} distinct levels, all reproduced", rep.rows.len()));
    let worst = |f: fn(&g2chain::tables::RowCheck) -> f64| rep.rows.iter().map(f).fold(0.0, f64::max);
    Outcome {
        id,
        title,
        passed: rest_ok && count_ok,
        detail: format!(
            "{} ED levels, {}/{} printed levels matched, worst rel err {:.1e} (roots) {:.1e} (ED), {:.1?}",
            rep.ed_level_count,
            rep.ed_matched,
            rep.rows.len(),
            worst(|r| r.rel_err_printed),
            worst(|r| r.rel_err_ed),
            took
        ),
        notes,
        conflict,
    }
}

fn main() {
    let secs = Duration::from_secs;
    let outcomes = vec![
        suite(1, "R-matrix properties", Suite::R, secs(10)),
        suite(2, "boundary K-matrices", Suite::Boundary, secs(5)),
        suite(3, "fusion identities", Suite::Fusion, secs(60)),
        suite(4, "open transfer identities, N=1,2", Suite::Transfer, secs(300)),
        suite(5, "periodic product identities, N=1,2", Suite::Periodic, secs(120)),
        table(6, "one-site table", 1, 4, secs(30)),
        table(7, "two-site table", 2, 19, secs(300)),
        suite(8, "Hamiltonian", Suite::Hamiltonian, secs(30)),
        suite(9, "relations on solved roots", Suite::Bethe, secs(300)),
    ];
    println!();
    for o in &outcomes {
        println!("criterion {} {}  {}: {}", o.id, if o.passed { "PASS" } else { "FAIL" }, o.title, o.detail);
    }
    println!();
    for o in &outcomes {
        for n in &o.notes {
            println!("  [{}] {n}", o.id);
        }
    }
    let mut unexpected = 0;
    for o in outcomes.iter().filter(|o| !o.passed) {
        match &o.conflict {
            Some(why) => println!("criterion {} fails as stated; known conflict: {why}", o.id),
            None => unexpected += 1,
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}

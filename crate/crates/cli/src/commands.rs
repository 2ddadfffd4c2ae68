use std::path::Path;

use g2chain::bethe::{eigenvalue, lambda_fund, bae_residuals, rel, relations, solve_bae, BetheRoots, SolveOptions, TQContext};
use g2chain::boundary::Branch;
use g2chain::report::Report;
use g2chain::specmat::{eigvals, re};
use g2chain::suites::Suite;
use g2chain::tables::{self, branch_scan};
use g2chain::transfer::{diagonalize, Chain, ChainSpec, Kind};
use g2chain::C64;
use serde_json::{json, Value};

use crate::config::{parse_complex, parse_points, parse_thetas, BoundaryConfig};
use crate::json::{cx, cx_list, emit, read_json, read_roots, read_seeds, round_floats, roots_json};
use crate::{ChainArgs, Cli, CliError, Command};

/// Levels closer than this (relative) are one level.
const GROUP_TOL: f64 = 1e-8;

pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Verify { suite } => verify(suite, cli.rng_seed, cli.tol, out),
        Command::Spectrum { chain, kind } => spectrum(chain, kind, out),
        Command::BaeSolve { chain, l1, l2, seeds, spectrum, relations } => {
            bae_solve(chain, *l1, l2.unwrap_or(*l1), seeds, spectrum.as_deref(), *relations, cli, out)
        }
        Command::TqEval { chain, roots, u, check } => tq_eval(chain, roots, u.as_deref(), *check, cli.tol, out),
        Command::ReproduceTables { table } => reproduce_tables(table, cli.tol, out),
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// A resolved chain with the JSON echo of its parameters.
struct Setup {
    spec: ChainSpec,
    u0: C64,
    echo: Value,
}

fn setup(a: &ChainArgs) -> Result<Setup, CliError> {
    let u0 = parse_complex(&a.u0).map_err(|e| config_err(format!("--u0: {e}")))?;
    let thetas = match (&a.theta, a.n_sites) {
        (Some(t), n) => {
            let th = parse_thetas(t).map_err(|e| config_err(format!("--theta: {e}")))?;
            if n.is_some_and(|n| n != th.len()) {
                return Err(config_err(format!("--theta has {} entries but --n-sites is {}", th.len(), n.unwrap_or(0))));
            }
            th
        }
        (None, n) => vec![re(0.0); n.unwrap_or(1)],
    };
    let (spec, mut echo) = match &a.boundary {
        Some(path) => {
            let cfg = BoundaryConfig::load(path)?;
            (ChainSpec::open(thetas.clone(), cfg.params()?), cfg.echo()?)
        }
        None => (ChainSpec::periodic(thetas.clone()), json!({ "boundary": "periodic" })),
    };
    echo["n_sites"] = json!(thetas.len());
    echo["thetas"] = cx_list(&thetas);
    for w in spec.degeneracy_warnings() {
        eprintln!("warning: {w}");
    }
    Ok(Setup { spec, u0, echo })
}

fn verify(which: &str, seed: u64, tol: Option<f64>, out: Option<&Path>) -> Result<bool, CliError> {
    let suites: Vec<Suite> = if which == "all" { Suite::ALL.to_vec() } else { vec![which.parse()?] };
    let mut all_ok = true;
    let mut results = Vec::new();
    for s in suites {
        let rep = s.run(seed, tol)?;
        let failures: Vec<&str> = rep.failures().iter().map(|c| c.name.as_str()).collect();
        eprintln!("{:<12} {}  max residual {:.2e}, {} checks, {} errata", s.name(), if rep.ok() { "ok  " } else { "FAIL" }, rep.max_residual(), rep.checks.len(), rep.errata().len());
        for f in &failures {
            eprintln!("    failed: {f}");
        }
        all_ok &= rep.ok();
        results.push(json!({
            "suite": s.name(),
            "tol": tol.unwrap_or(s.default_tol()),
            "ok": rep.ok(),
            "max_residual": rep.max_residual(),
            "failures": failures,
            "checks": rep.checks,
        }));
    }
    emit(json!({ "rng_seed": seed, "ok": all_ok, "suites": results }), out)?;
    Ok(all_ok)
}

fn spectrum(a: &ChainArgs, kind: &str, out: Option<&Path>) -> Result<bool, CliError> {
    let kind: Kind = kind.parse()?;
    let s = setup(a)?;
    let ch = Chain::new(s.spec)?;
    ch.check_size(kind)?;
    let spec = diagonalize(&ch.transfer(kind, s.u0), GROUP_TOL)?;
    let (vals, degs): (Vec<C64>, Vec<usize>) = spec.levels.into_iter().unzip();
    emit(
        json!({
            "kind": kind,
            "u0": cx(s.u0),
            "eigenvalues": cx_list(&vals),
            "degeneracies": degs,
            "params_echo": s.echo,
        }),
        out,
    )?;
    Ok(true)
}

/// Levels from a `spectrum` output; it must describe the same chain and point.
fn levels_from_file(path: &Path, kind: Kind, u0: C64, echo: &Value) -> Result<Vec<C64>, CliError> {
    let v: Value = read_json(path)?;
    let mut want = json!({ "kind": kind, "u0": cx(u0), "params_echo": echo });
    round_floats(&mut want);
    for key in ["kind", "u0", "params_echo"] {
        if v.get(key) != Some(&want[key]) {
            return Err(config_err(format!("{}: '{key}' does not match this run", path.display())));
        }
    }
    let vals: Vec<[f64; 2]> = serde_json::from_value(v["eigenvalues"].clone()).map_err(|e| config_err(format!("{}: eigenvalues: {e}", path.display())))?;
    Ok(vals.into_iter().map(|p| C64::new(p[0], p[1])).collect())
}

fn nearest(levels: &[C64], z: C64) -> Option<(usize, f64)> {
    levels.iter().enumerate().map(|(k, &l)| (k, rel(z, l))).min_by(|a, b| a.1.total_cmp(&b.1))
}

#[allow(clippy::too_many_arguments)]
fn bae_solve(a: &ChainArgs, l1: usize, l2: usize, seeds: &str, spectrum: Option<&Path>, check_relations: bool, cli: &Cli, out: Option<&Path>) -> Result<bool, CliError> {
    let s = setup(a)?;
    let ctx = TQContext::from_spec(&s.spec);
    let mut opts = SolveOptions { rng_seed: cli.rng_seed, ..Default::default() };
    let seed_sets = match seeds.strip_prefix("random:") {
        Some(k) => {
            opts.random_starts = k.parse().map_err(|_| config_err(format!("--seeds: bad count in '{seeds}'")))?;
            vec![]
        }
        None => {
            opts.random_starts = 0;
            read_seeds(Path::new(seeds), ctx.mode)?
        }
    };
    let levels = match spectrum {
        Some(p) => levels_from_file(p, Kind::Fund, s.u0, &s.echo)?,
        None => {
            let ch = Chain::new(s.spec.clone())?;
            diagonalize(&ch.t(s.u0), GROUP_TOL)?.levels.into_iter().map(|l| l.0).collect()
        }
    };
    let match_tol = cli.tol.unwrap_or(1e-6);
    let rel_tol = cli.tol.unwrap_or(Suite::Bethe.default_tol());
    let outcome = solve_bae(&ctx, l1, l2, &seed_sets, &opts)?;
    let mut ok = !outcome.solutions.is_empty();
    let mut sols = Vec::new();
    for sol in &outcome.solutions {
        let lam = lambda_fund(&ctx, &sol.roots, s.u0)?;
        let matched = nearest(&levels, lam).filter(|m| m.1 <= match_tol);
        ok &= matched.is_some();
        let mut entry = json!({
            "roots": roots_json(&sol.roots),
            "residual": sol.residual,
            "lambda_u0": cx(lam),
            "matched_ed_level": matched.map(|(k, _)| json!({ "index": k, "lambda": cx(levels[k]) })),
        });
        if check_relations {
            let rep = relations(&ctx, &sol.roots, rel_tol)?;
            ok &= rep.ok();
            entry["relations"] = relations_json(&rep);
        }
        sols.push(entry);
    }
    let matched: std::collections::BTreeSet<u64> = sols.iter().filter_map(|e| e["matched_ed_level"]["index"].as_u64()).collect();
    eprintln!("{} solutions from {} starts, {} of {} levels matched", sols.len(), outcome.attempts, matched.len(), levels.len());
    emit(
        json!({
            "params_echo": s.echo,
            "u0": cx(s.u0),
            "l1": l1,
            "l2": l2,
            "attempts": outcome.attempts,
            "best_residual": outcome.best_residual,
            "ed_levels": levels.len(),
            "ok": ok,
            "solutions": sols,
        }),
        out,
    )?;
    Ok(ok)
}

fn relations_json(rep: &Report) -> Value {
    json!({
        "ok": rep.ok(),
        "max_residual": rep.max_residual(),
        "failures": rep.failures().iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
        "errata": rep.errata().iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
    })
}

fn tq_eval(a: &ChainArgs, roots: &Path, u: Option<&str>, check: bool, tol: Option<f64>, out: Option<&Path>) -> Result<bool, CliError> {
    let s = setup(a)?;
    let ctx = TQContext::from_spec(&s.spec);
    let raw = read_roots(roots, ctx.mode)?;
    let roots = BetheRoots::new(raw.mu1, raw.mu2, ctx.mode)?;
    let points = match u {
        Some(u) => parse_points(u).map_err(|e| config_err(format!("--u: {e}")))?,
        None => vec![s.u0],
    };
    let tol = tol.unwrap_or(Suite::Bethe.default_tol());
    let chain = if check { Some(Chain::new(s.spec.clone())?) } else { None };
    let mut ok = true;
    let mut values = Vec::new();
    for &p in &points {
        let mut row = json!({ "u": cx(p) });
        for kind in Kind::ALL {
            // a pole of the T-Q expression is reported as null
            row[format!("{kind:?}").to_lowercase()] = eigenvalue(&ctx, &roots, kind, p).ok().map(cx).into();
        }
        if let Some(ch) = &chain {
            let lam = eigenvalue(&ctx, &roots, Kind::Fund, p)?;
            let spec = eigvals(&ch.t(p))?;
            let (_, err) = nearest(&spec, lam).unwrap_or((0, f64::INFINITY));
            ok &= err <= tol;
            row["ed_rel_err"] = json!(err);
        }
        values.push(row);
    }
    let bae = bae_residuals(&ctx, &roots)?;
    let mut result = json!({
        "params_echo": s.echo,
        "roots": roots_json(&roots),
        "mode": roots.mode,
        "bae_residuals": cx_list(&bae),
        "values": values,
    });
    if check {
        let rep = relations(&ctx, &roots, tol)?;
        ok &= rep.ok();
        result["relations"] = relations_json(&rep);
        result["ok"] = json!(ok);
    }
    emit(result, out)?;
    Ok(ok)
}

fn reproduce_tables(which: &str, tol: Option<f64>, out: Option<&Path>) -> Result<bool, CliError> {
    let ids: Vec<usize> = match which {
        "all" => vec![1, 2],
        "1" => vec![1],
        "2" => vec![2],
        other => return Err(config_err(format!("--table: expected 1, 2 or all, got '{other}'"))),
    };
    let tol = tol.unwrap_or(1e-3);
    let scan = branch_scan()?;
    let chosen = scan[0];
    if (chosen.minus, chosen.plus) != (Branch::Plus, Branch::Plus) {
        return Err(config_err("branch scan disagrees with the stored table boundary"));
    }
    let cfg = BoundaryConfig { c1: re(1.73), c2: re(0.93), c3_branch: chosen.minus, ct1: re(0.07), ct2: re(0.93), ct3_branch: chosen.plus };
    let mut all_ok = true;
    let mut reports = Vec::new();
    for id in ids {
        let rep = tables::reproduce(id, tol)?;
        let expected_levels = if id == 1 { Some(4) } else { None };
        let passed = rep.levels_ok(tol)
            && rep.roots_ok(tol, 1e-6, 1e-5)
            && rep.ed_matched == rep.rows.len()
            && expected_levels.is_none_or(|n| rep.ed_level_count == n);
        all_ok &= passed;
        eprintln!("table {id}: {} ED levels, {}/{} printed levels matched  {}", rep.ed_level_count, rep.ed_matched, rep.rows.len(), if passed { "PASS" } else { "FAIL" });
        eprintln!("  {:>5} {:>14} {:>10} {:>10} {:>10} {:>5}", "level", "printed", "vs roots", "vs ED", "BAE", "");
        for r in &rep.rows {
            let bae = if r.singular { r.ratio_residual } else { r.solved_residual };
            let row_ok = r.rel_err_printed <= tol && r.rel_err_ed <= tol && if r.singular { bae <= 1e-5 } else { bae <= 1e-6 && r.rel_err_solved <= tol };
            eprintln!(
                "  {:>5} {:>14.4} {:>10.2e} {:>10.2e} {:>10.2e} {:>5}{}",
                r.level,
                r.printed,
                r.rel_err_printed,
                r.rel_err_ed,
                bae,
                if row_ok { "pass" } else { "FAIL" },
                if r.singular { "  (singular pair, ratio form)" } else { "" }
            );
        }
        reports.push(json!({ "table": id, "passed": passed, "report": rep }));
    }
    emit(
        json!({
            "branch_scan": scan,
            "chosen": chosen,
            "params_echo": cfg.echo()?,
            "ok": all_ok,
            "tables": reports,
        }),
        out,
    )?;
    Ok(all_ok)
}

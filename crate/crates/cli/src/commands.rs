//! Command bodies. Each returns `Ok(true)` when every executed check passed.

use std::error::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use aqctpc::bounds::{curves_to_table, emit_curves, parse_constituents, CurveSelection, DEFAULT_CONSTITUENTS};
use aqctpc::channel::{exhaustive_radius_check, radius_check_cases, run_trials, ChannelParams, TrialOptions};
use aqctpc::codes::{CodeError, DistanceKind, PairConstruction, DEFAULT_ENUMERATION_CAP};
use aqctpc::matgf::Matrix;
use aqctpc::spec::{CodeSpecDocument, Depth};
use aqctpc::tables::{check_table, Agreement, ConstructionStatus, TableId};
use aqctpc::weave::{verify_css, AqctpcCode, WeaveError};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

/// Largest number of error patterns decoded by `verify` at full depth.
pub const RADIUS_CHECK_CAP: u128 = 1 << 22;

fn load(spec: &Path) -> Result<CodeSpecDocument> {
    CodeSpecDocument::from_path(spec).map_err(|e| format!("{}: {e}", spec.display()).into())
}

fn field_name(order: u32) -> String {
    format!("GF({order})")
}

fn construction_name(c: PairConstruction) -> &'static str {
    match c {
        PairConstruction::SharedPoints => "shared-points",
        PairConstruction::SelfDualPair => "self-dual",
        PairConstruction::RootFreeMultiples { .. } => "root-free-multiples",
        PairConstruction::Oval => "oval",
        PairConstruction::Explicit => "explicit",
    }
}

fn summary(code: &AqctpcCode) -> String {
    let p = code.params();
    let inner_tag = match code.inner().distance().kind {
        DistanceKind::Exact => "exact",
        DistanceKind::Family => "family",
        DistanceKind::LowerBound => "lower-bound",
        DistanceKind::Unknown => "unknown",
    };
    let pair = code.pair();
    let mut s = String::new();
    let _ = writeln!(s, "code = {p}");
    let _ = writeln!(s, "n = {}", p.n);
    let _ = writeln!(s, "k = {} (rank identity verified)", p.k);
    let _ = writeln!(s, "d_z >= {} (bound d1*d3)", p.dz);
    let _ = writeln!(s, "d_x >= {} (bound d2)", p.dx);
    let _ = writeln!(s, "inner = [{}, {}, {}] (distance {inner_tag})", p.n1, p.k1, p.d1);
    let _ = writeln!(s, "outer_field = {}", field_name(code.outer_field().order()));
    let _ = writeln!(s, "c2 = [{}, {}, {}]", p.n2, p.k2, p.d2);
    let _ = writeln!(s, "c3 = [{}, {}, {}]", p.n2, p.k3, p.d3);
    let _ = writeln!(s, "pair = {}", construction_name(pair.construction));
    s
}

fn matrix_text(m: &Matrix) -> String {
    let wide = m.field().order() > 10;
    let mut s = format!("# {} {} {}\n", m.rows(), m.cols(), field_name(m.field().order()));
    for r in 0..m.rows() {
        let row = m.row(r).iter().map(u32::to_string);
        let line: Vec<String> = row.collect();
        s.push_str(&line.join(if wide { " " } else { "" }));
        s.push('\n');
    }
    s
}

pub fn construct(spec: &Path, out: Option<&Path>) -> Result<bool> {
    let doc = load(spec)?;
    let inner = doc.inner_code()?;
    if doc.outer.as_ref().is_some_and(|o| o.h2.is_none()) {
        println!("target = {}", doc.target_parameters(&inner)?);
    }
    let code = doc.build()?;
    print!("{}", summary(&code));
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        for (name, m) in [("hx", code.hx()), ("hz", code.hz()), ("gcc", code.gcc())] {
            std::fs::write(dir.join(format!("{name}.txt")), matrix_text(m))?;
        }
    }
    Ok(true)
}

pub fn tables(table: Option<TableId>, depth: Depth) -> Result<bool> {
    let ids = table.map_or(TableId::ALL.to_vec(), |t| vec![t]);
    let mut ok = true;
    println!("table\tinner\tn2\td2\td3\tprinted\trecomputed\tagreement\tconstruction");
    let (mut rows, mut errata, mut mismatches) = (0, 0, 0);
    for id in ids {
        for c in check_table(id, depth)? {
            rows += 1;
            let agreement = match &c.agreement {
                Agreement::Match => "match".to_string(),
                Agreement::Erratum { corrected } => {
                    errata += 1;
                    format!("misprint (corrected {corrected})")
                }
                Agreement::Mismatch => {
                    mismatches += 1;
                    "MISMATCH".to_string()
                }
            };
            let status = match &c.status {
                ConstructionStatus::Verified => "verified".to_string(),
                ConstructionStatus::PairBuilt => "pair-built".to_string(),
                ConstructionStatus::NoMdsPair(_) => "no-mds-pair".to_string(),
                ConstructionStatus::Failed(e) => {
                    ok = false;
                    format!("FAILED: {e}")
                }
            };
            ok &= c.agrees();
            let recomputed = c.recomputed_printed().map_or("-".to_string(), |p| p.to_string());
            let r = c.row;
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{recomputed}\t{agreement}\t{status}",
                r.table, r.inner, r.n2, r.d2, r.d3, r.printed
            );
        }
    }
    println!("rows = {rows}");
    println!("misprints = {errata}");
    println!("mismatches = {mismatches}");
    println!("result = {}", if ok { "pass" } else { "fail" });
    Ok(ok)
}

pub fn verify(spec: &Path, depth: Option<Depth>) -> Result<bool> {
    let doc = load(spec)?;
    let depth = depth.unwrap_or(doc.options.depth);
    let code = doc.build()?;
    let p = code.params();
    println!("code = {p}");
    let mut ok = true;
    let mut report = |name: &str, result: std::result::Result<String, String>| match result {
        Ok(detail) => println!(
            "check {name} = pass{}",
            if detail.is_empty() {
                detail
            } else {
                format!(" {detail}")
            }
        ),
        Err(detail) => {
            ok = false;
            println!("check {name} = fail {detail}");
        }
    };
    report(
        "css",
        verify_css(code.hx(), code.hz())
            .map(|_| String::new())
            .map_err(|e| e.to_string()),
    );
    report(
        "ranks",
        code.verify()
            .map(|_| format!("rank_hx={} rank_hz={} k={}", code.hx().rank(), code.hz().rank(), p.k))
            .map_err(|e| e.to_string()),
    );
    if depth == Depth::Full {
        let x_radius = (p.dx - 1) / 2;
        let z_blocks = (p.d3 - 1) / 2;
        let cases = radius_check_cases(&code, x_radius, z_blocks);
        if cases > RADIUS_CHECK_CAP {
            let needed = if cases == u128::MAX {
                "more than 2^128".to_string()
            } else {
                cases.to_string()
            };
            return Err(format!(
                "refusing full depth: radius check needs {needed} decodes, above the cap {RADIUS_CHECK_CAP}"
            )
            .into());
        }
        match code.exact_distances(DEFAULT_ENUMERATION_CAP) {
            Ok((dz, dx)) if dz >= p.dz && dx >= p.dx => report("distances", Ok(format!("d_z={dz} d_x={dx}"))),
            Ok((dz, dx)) => report(
                "distances",
                Err(format!("d_z={dz} d_x={dx} below the bounds {}/{}", p.dz, p.dx)),
            ),
            Err(WeaveError::Code(CodeError::TooLarge { work, cap })) => {
                println!("check distances = skipped enumeration needs {work} steps, above the cap {cap}")
            }
            Err(e) => report("distances", Err(e.to_string())),
        }
        let rc = exhaustive_radius_check(&code, x_radius, z_blocks, RADIUS_CHECK_CAP)?;
        let detail = format!(
            "x_radius={x_radius} z_blocks={z_blocks} x_cases={} z_cases={} x_degenerate={} z_degenerate={}",
            rc.x_cases, rc.z_cases, rc.x_degenerate, rc.z_degenerate
        );
        report(
            "radius",
            match &rc.counterexample {
                None => Ok(detail),
                Some((kind, e)) => Err(format!("{detail} counterexample={kind:?}:{e:?}")),
            },
        );
    }
    println!("result = {}", if ok { "pass" } else { "fail" });
    Ok(ok)
}

pub struct SimulateArgs {
    pub spec: PathBuf,
    pub p_z: f64,
    pub theta: f64,
    pub trials: u64,
    pub seed: Option<u64>,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

pub fn simulate(args: &SimulateArgs) -> Result<bool> {
    let doc = load(&args.spec)?;
    let code = doc.build()?;
    let params = ChannelParams::from_asymmetry(args.p_z, args.theta, args.seed.unwrap_or(doc.options.seed))?;
    let options = TrialOptions {
        mode: doc.options.z_mode.into(),
        workers: args.workers,
    };
    let start = Instant::now();
    let report = run_trials(&code, &params, args.trials, options)?;
    let timing = format!(
        "wall_seconds = {:.6}\nworkers = {}\n",
        start.elapsed().as_secs_f64(),
        args.workers
    );
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("simulation.txt"), report.to_text())?;
            std::fs::write(dir.join("simulation.timing"), timing)?;
        }
        None => {
            print!("{}", report.to_text());
            eprint!("{timing}");
        }
    }
    Ok(true)
}

fn theta_label(theta: f64) -> String {
    if theta.fract() == 0.0 && theta.abs() < 1e15 {
        format!("{}", theta as i64)
    } else {
        format!("{theta}")
    }
}

pub fn bounds(thetas: &[f64], grid: f64, constituents: Option<&Path>, out: &Path) -> Result<bool> {
    let text = match constituents {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => DEFAULT_CONSTITUENTS.to_string(),
    };
    let selection = CurveSelection {
        constituents: parse_constituents(&text)?,
        ..CurveSelection::default()
    };
    std::fs::create_dir_all(out)?;
    for &theta in thetas {
        let rows = emit_curves(&selection, grid, theta)?;
        let path = out.join(format!("bounds_theta_{}.tsv", theta_label(theta)));
        std::fs::write(&path, curves_to_table(&rows, theta))?;
        println!("{}", path.display());
    }
    Ok(true)
}

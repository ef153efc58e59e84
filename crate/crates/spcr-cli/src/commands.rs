//! Implementations of the subcommands.

use std::fs;
use std::path::PathBuf;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde_json::{json, Value};

use spcr::dimension::{
    select_dimension, DimensionSelection, KurtosisOptions, SelectionOptions, UbTable,
};
use spcr::numerics::{center_columns, CenteredMatrix};
use spcr::pcr::{
    fit, fitted_values, lse, predict, sweep, EvalMode, FitConfig, HPolicy, Method, SweepResult,
    SweepRow,
};
use spcr::ranking::{
    rank_with_scheme, take_ranked_subset, tau_prerank, RankingResult, RankingScheme, TauRankConfig,
};
use spcr::simgen::{derive_seed, multivariate_benchmark, univariate_benchmark, SimulatedDataset};

use crate::io::{self, Table};
use crate::model;
use crate::{
    BenchArgs, CliError, CliResult, FitArgs, PredictArgs, RankArgs, SelectDimArgs, SimulateArgs,
    SweepArgs,
};

fn parse_method(tag: &str) -> CliResult<Method> {
    tag.parse::<Method>().map_err(CliError::from)
}

fn parse_methods(tags: &[String]) -> CliResult<Vec<Method>> {
    tags.iter().map(|t| parse_method(t)).collect()
}

/// Resolves the method list: explicit tags are taken as given, an empty list
/// means every method the response width supports.
fn resolve_methods(tags: &[String], q: usize) -> CliResult<Vec<Method>> {
    if tags.is_empty() {
        let methods: Vec<Method> = Method::ALL
            .iter()
            .copied()
            .filter(|mt| !(mt.needs_univariate() && q != 1))
            .collect();
        if methods.len() < Method::ALL.len() {
            eprintln!(
                "note: response has {q} columns; methods needing a univariate response were skipped"
            );
        }
        Ok(methods)
    } else {
        parse_methods(tags)
    }
}

/// Parses the inclusive subset-size range `A..B`.
fn parse_m_range(text: &str) -> CliResult<(usize, usize)> {
    let usage =
        || CliError::Usage(format!("--m-range expects an inclusive range A..B, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(usage)?;
    let a: usize = a.trim().parse().map_err(|_| usage())?;
    let b: usize = b.trim().parse().map_err(|_| usage())?;
    if a < 2 || b < a {
        return Err(CliError::Usage(format!(
            "--m-range {text:?} must satisfy 2 <= A <= B"
        )));
    }
    Ok((a, b))
}

fn parse_h(text: &str) -> CliResult<HPolicy> {
    if text == "auto" {
        return Ok(HPolicy::Auto);
    }
    match text.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(HPolicy::Fixed(k)),
        _ => Err(CliError::Usage(format!(
            "--h expects `auto` or a positive integer, got {text:?}"
        ))),
    }
}

/// Parses `--tau-prerank L,s,tau[,scheme]`; without an explicit scheme the
/// hint is used when it is one of the block-capable schemes, b1 otherwise.
fn parse_tau(text: &str, hint: RankingScheme) -> CliResult<TauRankConfig> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    if tokens.len() < 3 || tokens.len() > 4 {
        return Err(CliError::Usage(format!(
            "--tau-prerank expects L,s,tau[,scheme], got {text:?}"
        )));
    }
    let parse_count = |tok: &str, what: &str| -> CliResult<usize> {
        tok.parse().map_err(|_| {
            CliError::Usage(format!("--tau-prerank {what} must be a positive integer, got {tok:?}"))
        })
    };
    let n_blocks = parse_count(tokens[0], "block count")?;
    let block_size = parse_count(tokens[1], "block size")?;
    let tau = parse_count(tokens[2], "tau")?;
    let scheme = if tokens.len() == 4 {
        match tokens[3] {
            "b1" => RankingScheme::B1,
            "b2" => RankingScheme::B2,
            other => {
                return Err(CliError::Usage(format!(
                    "--tau-prerank scheme must be b1 or b2, got {other:?}"
                )))
            }
        }
    } else {
        match hint {
            RankingScheme::B1 | RankingScheme::B2 => hint,
            _ => RankingScheme::B1,
        }
    };
    Ok(TauRankConfig {
        n_blocks,
        block_size,
        tau,
        scheme,
        shuffle_seed: None,
    })
}

fn load_ub(path: Option<&PathBuf>) -> CliResult<Option<UbTable>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Ingest(format!("{}: {e}", p.display())))?;
            Ok(Some(UbTable::from_text(&text)?))
        }
    }
}

fn path_str(p: &std::path::Path) -> String {
    p.display().to_string()
}

fn opt_path_str(p: Option<&PathBuf>) -> Value {
    match p {
        Some(p) => Value::String(path_str(p)),
        None => Value::Null,
    }
}

/// Centered predictors and raw responses after the optional block preranking,
/// with column names tracking the surviving predictors.
struct Prepared {
    x: CenteredMatrix,
    x_names: Vec<String>,
    y_raw: Array2<f64>,
    y_names: Vec<String>,
    /// Original indices of the surviving columns when preranking ran.
    kept: Option<Vec<usize>>,
    original_width: usize,
}

fn prepare(
    x_table: Table,
    y_table: Table,
    tau_text: Option<&str>,
    scheme_hint: RankingScheme,
) -> CliResult<Prepared> {
    let original_width = x_table.names.len();
    let x = center_columns(&x_table.values)?;
    let (x, x_names, kept) = match tau_text {
        None => (x, x_table.names, None),
        Some(text) => {
            let cfg = parse_tau(text, scheme_hint)?;
            let y_c = center_columns(&y_table.values)?;
            let out = tau_prerank(&x, &y_c, &cfg)?;
            if !out.degenerate_blocks.is_empty() {
                eprintln!(
                    "note: {} prerank block(s) had no detectable association; their leading columns were kept unranked",
                    out.degenerate_blocks.len()
                );
            }
            let names = out
                .kept_indices
                .iter()
                .map(|&j| x_table.names[j].clone())
                .collect();
            (out.matrix, names, Some(out.kept_indices))
        }
    };
    Ok(Prepared {
        x,
        x_names,
        y_raw: y_table.values,
        y_names: y_table.names,
        kept,
        original_width,
    })
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

fn selection_rows(sel: &DimensionSelection) -> Vec<Vec<String>> {
    sel.ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            vec![
                k.to_string(),
                fmt_f(sel.beta_hats[i]),
                fmt_f(sel.ub_values[i]),
                fmt_f(sel.scores[i]),
                (!sel.non_converged.contains(&k)).to_string(),
            ]
        })
        .collect()
}

const SELECTION_HEADER: [&str; 5] = ["k", "beta_hat", "ub", "score", "converged"];

pub fn run_rank(args: &RankArgs) -> CliResult<()> {
    let tags: Vec<String> = if args.methods.is_empty() {
        vec!["knb1-pcH".to_string()]
    } else {
        args.methods.clone()
    };
    let methods = parse_methods(&tags)?;
    if args.overlap_top == 0 {
        return Err(CliError::Usage(
            "--overlap-top must be a positive count".to_string(),
        ));
    }
    let mut schemes: Vec<RankingScheme> = Vec::new();
    for mt in &methods {
        let s = mt.ranking_scheme();
        if !schemes.contains(&s) {
            schemes.push(s);
        }
    }

    let (xt, yt) = io::load_xy(&args.x, &args.y)?;
    let prep = prepare(xt, yt, args.tau_prerank.as_deref(), schemes[0])?;
    let y_c = center_columns(&prep.y_raw)?;
    let mut rankings: Vec<(RankingScheme, RankingResult)> = Vec::new();
    for &s in &schemes {
        rankings.push((s, rank_with_scheme(&prep.x, &y_c, s)?));
    }

    let config = json!({
        "x": path_str(&args.x),
        "y": path_str(&args.y),
        "methods": tags,
        "overlap_top": args.overlap_top,
        "tau_prerank": args.tau_prerank,
        "seed": args.seed,
    });
    let run = io::create_run_dir(&args.out, "rank", &config)?;

    for (s, r) in &rankings {
        let rows: Vec<Vec<String>> = r
            .order
            .iter()
            .enumerate()
            .map(|(pos, &j)| {
                vec![
                    (pos + 1).to_string(),
                    j.to_string(),
                    prep.x_names[j].clone(),
                    fmt_f(r.scores[j]),
                ]
            })
            .collect();
        io::write_csv(
            &run.dir.join(format!("ranking-{}.csv", s.label())),
            &["rank", "column", "name", "score"],
            &rows,
        )?;
    }

    let mut summary: Vec<String> = Vec::new();
    for (s, r) in &rankings {
        let top: Vec<&str> = r
            .order
            .iter()
            .take(10)
            .map(|&j| prep.x_names[j].as_str())
            .collect();
        summary.push(format!("{}: top variables: {}", s.label(), top.join(", ")));
    }
    let top_n = args.overlap_top.min(prep.x.n_cols());
    for i in 0..rankings.len() {
        for j in (i + 1)..rankings.len() {
            let (sa, ra) = &rankings[i];
            let (sb, rb) = &rankings[j];
            let set_a = &ra.order[..top_n];
            let shared = rb.order[..top_n]
                .iter()
                .filter(|idx| set_a.contains(idx))
                .count();
            let pct = 100.0 * shared as f64 / top_n as f64;
            summary.push(format!(
                "top-{top_n} overlap {} vs {}: {pct:.1}%",
                sa.label(),
                sb.label()
            ));
        }
    }
    io::write_lines(&run.dir.join("summary.txt"), &summary)?;
    io::write_manifest(&run, "rank", Some(args.seed), &config, None)?;

    for line in &summary {
        println!("{line}");
    }
    println!("run directory: {}", run.dir.display());
    Ok(())
}

pub fn run_select_dim(args: &SelectDimArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    let scheme = method.ranking_scheme();
    let (xt, yt) = io::load_xy(&args.x, &args.y)?;
    let prep = prepare(xt, yt, args.tau_prerank.as_deref(), scheme)?;
    let y_c = center_columns(&prep.y_raw)?;
    let ranking = rank_with_scheme(&prep.x, &y_c, scheme)?;
    let (x_m, idx) = take_ranked_subset(&prep.x, &ranking, args.m)?;
    let opts = SelectionOptions {
        kurtosis: KurtosisOptions {
            seed: args.seed,
            ..KurtosisOptions::default()
        },
        ub_table: load_ub(args.ub_table.as_ref())?,
    };
    let sel = select_dimension(&x_m, &opts)?;

    let config = json!({
        "x": path_str(&args.x),
        "y": path_str(&args.y),
        "method": method.tag(),
        "m": args.m,
        "ub_table": opt_path_str(args.ub_table.as_ref()),
        "tau_prerank": args.tau_prerank,
        "seed": args.seed,
    });
    let run = io::create_run_dir(&args.out, "select-dim", &config)?;
    io::write_csv(
        &run.dir.join("selection.csv"),
        &SELECTION_HEADER,
        &selection_rows(&sel),
    )?;
    let kept_names: Vec<&str> = idx.iter().map(|&j| prep.x_names[j].as_str()).collect();
    let mut summary = vec![
        format!("chosen H = {} for the top {} variables", sel.chosen_h, args.m),
        format!("subset: {}", kept_names.join(", ")),
    ];
    if !sel.non_converged.is_empty() {
        summary.push(format!(
            "non-converged candidates excluded from the choice: {:?}",
            sel.non_converged
        ));
    }
    io::write_lines(&run.dir.join("summary.txt"), &summary)?;
    io::write_manifest(&run, "select-dim", Some(args.seed), &config, None)?;

    for line in &summary {
        println!("{line}");
    }
    println!("run directory: {}", run.dir.display());
    Ok(())
}

pub fn run_fit(args: &FitArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    let h_policy = parse_h(&args.h)?;
    let scheme = method.ranking_scheme();
    let (xt, yt) = io::load_xy(&args.x, &args.y)?;
    let prep = prepare(xt, yt, args.tau_prerank.as_deref(), scheme)?;
    let y_c = center_columns(&prep.y_raw)?;
    let ranking = rank_with_scheme(&prep.x, &y_c, scheme)?;
    let config = FitConfig {
        h_policy,
        selection: SelectionOptions {
            kurtosis: KurtosisOptions {
                seed: args.seed,
                ..KurtosisOptions::default()
            },
            ub_table: load_ub(args.ub_table.as_ref())?,
        },
    };
    let out = fit(&prep.x, &prep.y_raw, &ranking, args.m, &config)?;
    let fitted = fitted_values(&out.model, &prep.x)?;
    let in_sample = lse(&fitted, &prep.y_raw)?;

    let config_echo = json!({
        "x": path_str(&args.x),
        "y": path_str(&args.y),
        "method": method.tag(),
        "m": args.m,
        "h": args.h,
        "ub_table": opt_path_str(args.ub_table.as_ref()),
        "tau_prerank": args.tau_prerank,
        "seed": args.seed,
    });
    let run = io::create_run_dir(&args.out, "fit", &config_echo)?;
    model::save(
        &run.dir.join("model.json"),
        &model::to_file(&out.model, &prep.x_names, &prep.y_names),
    )?;
    io::write_table(&run.dir.join("fitted.csv"), &prep.y_names, &fitted)?;
    if let Some(sel) = &out.selection {
        io::write_csv(
            &run.dir.join("selection.csv"),
            &SELECTION_HEADER,
            &selection_rows(sel),
        )?;
    }
    io::write_manifest(&run, "fit", Some(args.seed), &config_echo, None)?;

    println!(
        "fitted {} with m = {}, H = {}; in-sample LSE = {}",
        method.tag(),
        out.model.m,
        out.model.h,
        in_sample
    );
    let names: Vec<&str> = out
        .model
        .selected_indices
        .iter()
        .map(|&j| prep.x_names[j].as_str())
        .collect();
    println!("selected variables: {}", names.join(", "));
    println!("run directory: {}", run.dir.display());
    Ok(())
}

pub fn run_predict(args: &PredictArgs) -> CliResult<()> {
    let (pcr_model, column_names, y_names) = model::load(&args.model)?;
    let new_table = io::load_table(&args.x)?;

    let mut missing: Vec<String> = Vec::new();
    let mut placements: Vec<(usize, usize)> = Vec::new();
    for &j in &pcr_model.selected_indices {
        let name = &column_names[j];
        match new_table.names.iter().position(|n| n == name) {
            Some(pos) => placements.push((j, pos)),
            None => missing.push(name.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Ingest(format!(
            "{}: missing model column(s): {}",
            args.x.display(),
            missing.join(", ")
        )));
    }

    // Rebuild the training width; columns the model never reads are filled
    // with their training means so they center to zero.
    let n = new_table.values.nrows();
    let p = column_names.len();
    let mut z = Array2::zeros((n, p));
    for j in 0..p {
        z.column_mut(j).fill(pcr_model.x_column_means[j]);
    }
    for (j, pos) in placements {
        z.column_mut(j).assign(&new_table.values.column(pos));
    }
    let predictions = predict(&pcr_model, &z)?;

    let config = json!({
        "model": path_str(&args.model),
        "x": path_str(&args.x),
    });
    let run = io::create_run_dir(&args.out, "predict", &config)?;
    io::write_table(&run.dir.join("predictions.csv"), &y_names, &predictions)?;
    io::write_manifest(&run, "predict", None, &config, None)?;

    println!("{n} prediction(s) written");
    println!("run directory: {}", run.dir.display());
    Ok(())
}

fn sweep_output_rows(result: &SweepResult) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let results = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.method.tag().to_string(),
                r.m.to_string(),
                r.h.to_string(),
                fmt_f(r.lse),
            ]
        })
        .collect();
    let timings = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.method.tag().to_string(),
                r.m.to_string(),
                format!("{:.3}", r.wall_time_ms),
            ]
        })
        .collect();
    (results, timings)
}

/// The row with the smallest error for each method, in method order
/// (ties go to the smaller subset size, which comes first).
fn best_rows(result: &SweepResult) -> Vec<&SweepRow> {
    let mut best: Vec<&SweepRow> = Vec::new();
    for row in &result.rows {
        match best.iter_mut().find(|b| b.method == row.method) {
            Some(b) => {
                if row.lse < b.lse {
                    *b = row;
                }
            }
            None => best.push(row),
        }
    }
    best
}

pub fn run_sweep(args: &SweepArgs) -> CliResult<()> {
    let (xt, yt) = io::load_xy(&args.x, &args.y)?;
    let q = yt.values.ncols();
    let methods = resolve_methods(&args.methods, q)?;
    let scheme_hint = methods
        .first()
        .map(|mt| mt.ranking_scheme())
        .unwrap_or(RankingScheme::B1);
    let prep = prepare(xt, yt, args.tau_prerank.as_deref(), scheme_hint)?;

    let cap = prep.x.n_rows().min(prep.x.n_cols());
    let (lo, hi) = match args.m_range.as_deref() {
        Some(text) => parse_m_range(text)?,
        None => {
            if cap < 2 {
                return Err(CliError::Usage(format!(
                    "dataset admits no subset sizes: min(N, p) = {cap}"
                )));
            }
            (2, cap)
        }
    };
    let m_values: Vec<usize> = (lo..=hi).collect();

    let holdout: Option<(Table, Table)> = match args.eval.as_str() {
        "in-sample" => None,
        "holdout" => {
            let hx = args.holdout_x.as_ref().ok_or_else(|| {
                CliError::Usage("--eval holdout requires --holdout-x and --holdout-y".to_string())
            })?;
            let hy = args.holdout_y.as_ref().ok_or_else(|| {
                CliError::Usage("--eval holdout requires --holdout-x and --holdout-y".to_string())
            })?;
            Some(io::load_xy(hx, hy)?)
        }
        other => {
            return Err(CliError::Usage(format!(
                "--eval expects in-sample or holdout, got {other:?}"
            )))
        }
    };
    // With preranking active, reduce the holdout predictors to the same
    // surviving columns (holdout files share the training column layout).
    let holdout_x_reduced: Option<Array2<f64>> = match (&holdout, &prep.kept) {
        (Some((hx, _)), Some(kept)) => {
            if hx.values.ncols() != prep.original_width {
                return Err(CliError::Ingest(format!(
                    "holdout predictors have {} columns but training data had {}",
                    hx.values.ncols(),
                    prep.original_width
                )));
            }
            Some(hx.values.select(Axis(1), kept))
        }
        _ => None,
    };
    let eval = match &holdout {
        None => EvalMode::InSample,
        Some((hx, hy)) => EvalMode::Holdout {
            x: holdout_x_reduced.as_ref().unwrap_or(&hx.values),
            y: &hy.values,
        },
    };

    let ub = load_ub(args.ub_table.as_ref())?;
    let result = sweep(
        &prep.x,
        &prep.y_raw,
        &methods,
        &m_values,
        eval,
        args.seed,
        ub.as_ref(),
    )?;

    let tags: Vec<&str> = methods.iter().map(Method::tag).collect();
    let config = json!({
        "x": path_str(&args.x),
        "y": path_str(&args.y),
        "methods": tags,
        "m_range": format!("{lo}..{hi}"),
        "eval": args.eval,
        "holdout_x": opt_path_str(args.holdout_x.as_ref()),
        "holdout_y": opt_path_str(args.holdout_y.as_ref()),
        "ub_table": opt_path_str(args.ub_table.as_ref()),
        "tau_prerank": args.tau_prerank,
        "seed": args.seed,
    });
    let run = io::create_run_dir(&args.out, "sweep", &config)?;
    let (result_rows, timing_rows) = sweep_output_rows(&result);
    io::write_csv(
        &run.dir.join("results.csv"),
        &["method", "m", "h", "lse"],
        &result_rows,
    )?;
    io::write_csv(
        &run.dir.join("timings.csv"),
        &["method", "m", "wall_time_ms"],
        &timing_rows,
    )?;
    let summary: Vec<String> = best_rows(&result)
        .iter()
        .map(|b| {
            format!(
                "method {}: min LSE {} at m = {}, H = {}",
                b.method.tag(),
                b.lse,
                b.m,
                b.h
            )
        })
        .collect();
    io::write_lines(&run.dir.join("summary.txt"), &summary)?;
    io::write_manifest(&run, "sweep", Some(args.seed), &config, None)?;

    for line in &summary {
        println!("{line}");
    }
    println!("run directory: {}", run.dir.display());
    Ok(())
}

fn benchmark_generator(name: &str) -> CliResult<fn(u64) -> SimulatedDataset> {
    match name {
        "uni" => Ok(univariate_benchmark as fn(u64) -> SimulatedDataset),
        "multi" => Ok(multivariate_benchmark as fn(u64) -> SimulatedDataset),
        other => Err(CliError::Usage(format!(
            "--spec-name expects uni or multi, got {other:?}"
        ))),
    }
}

fn index_names(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|j| format!("{prefix}{j}")).collect()
}

pub fn run_simulate(args: &SimulateArgs) -> CliResult<()> {
    let generator = benchmark_generator(&args.spec_name)?;
    if args.replicates == 0 {
        return Err(CliError::Usage(
            "--replicates must be a positive count".to_string(),
        ));
    }
    let config = json!({
        "spec_name": args.spec_name,
        "replicates": args.replicates,
        "seed": args.seed,
    });
    let run = io::create_run_dir(&args.out, "simulate", &config)?;

    let child_seeds: Vec<u64> = (0..args.replicates)
        .map(|r| derive_seed(args.seed, &[r as u64]))
        .collect();
    let mut shape: Option<((usize, usize), (usize, usize))> = None;
    let mut informative: Vec<usize> = Vec::new();
    for (r, &child) in child_seeds.iter().enumerate() {
        let data = generator(child);
        io::write_table(
            &run.dir.join(format!("x-r{r:03}.csv")),
            &index_names("x", data.x.ncols()),
            &data.x,
        )?;
        io::write_table(
            &run.dir.join(format!("y-r{r:03}.csv")),
            &index_names("y", data.y.ncols()),
            &data.y,
        )?;
        shape = Some((data.x.dim(), data.y.dim()));
        informative = data.informative_indices.clone();
    }
    let (x_shape, y_shape) = shape.expect("at least one replicate was generated");
    let details = json!({
        "child_seeds": child_seeds,
        "x_shape": [x_shape.0, x_shape.1],
        "y_shape": [y_shape.0, y_shape.1],
        "informative_indices": informative,
    });
    io::write_manifest(&run, "simulate", Some(args.seed), &config, Some(&details))?;

    println!(
        "{} replicate pair(s) of the {} design written",
        args.replicates, args.spec_name
    );
    println!("run directory: {}", run.dir.display());
    Ok(())
}

pub fn run_bench(args: &BenchArgs) -> CliResult<()> {
    let generator = benchmark_generator(&args.spec_name)?;
    if args.replicates == 0 {
        return Err(CliError::Usage(
            "--replicates must be a positive count".to_string(),
        ));
    }
    let (q, default_hi) = match args.spec_name.as_str() {
        "uni" => (1usize, 13usize),
        _ => (7usize, 50usize),
    };
    let methods = resolve_methods(&args.methods, q)?;
    let (lo, hi) = match args.m_range.as_deref() {
        Some(text) => parse_m_range(text)?,
        None => (2, default_hi),
    };
    let m_values: Vec<usize> = (lo..=hi).collect();
    let ub = load_ub(args.ub_table.as_ref())?;

    let sweeps: Vec<CliResult<SweepResult>> = (0..args.replicates)
        .into_par_iter()
        .map(|r| {
            let data_seed = derive_seed(args.seed, &[r as u64, 0]);
            let sweep_seed = derive_seed(args.seed, &[r as u64, 1]);
            let data = generator(data_seed);
            let x = center_columns(&data.x)?;
            let result = sweep(
                &x,
                &data.y,
                &methods,
                &m_values,
                EvalMode::InSample,
                sweep_seed,
                ub.as_ref(),
            )?;
            Ok(result)
        })
        .collect();
    let mut per_replicate: Vec<SweepResult> = Vec::with_capacity(args.replicates);
    for s in sweeps {
        per_replicate.push(s?);
    }

    let tags: Vec<&str> = methods.iter().map(Method::tag).collect();
    let config = json!({
        "spec_name": args.spec_name,
        "replicates": args.replicates,
        "methods": tags,
        "m_range": format!("{lo}..{hi}"),
        "ub_table": opt_path_str(args.ub_table.as_ref()),
        "seed": args.seed,
    });
    let run = io::create_run_dir(&args.out, "bench", &config)?;

    let mut best_csv: Vec<Vec<String>> = Vec::new();
    // (method, best-H) counts; the one-component method reports its best m
    // as the dimension in this histogram.
    let mut hist: Vec<(Method, usize, usize)> = Vec::new();
    let mut win_counts: Vec<(Method, usize)> =
        methods.iter().map(|&mt| (mt, 0usize)).collect();
    for (r, result) in per_replicate.iter().enumerate() {
        let best = best_rows(result);
        for b in &best {
            best_csv.push(vec![
                r.to_string(),
                b.method.tag().to_string(),
                b.m.to_string(),
                b.h.to_string(),
                fmt_f(b.lse),
            ]);
            let h_report = if b.method == Method::BhptPc1 { b.m } else { b.h };
            match hist
                .iter_mut()
                .find(|(mt, h, _)| *mt == b.method && *h == h_report)
            {
                Some((_, _, c)) => *c += 1,
                None => hist.push((b.method, h_report, 1)),
            }
        }
        let min_lse = best
            .iter()
            .map(|b| b.lse)
            .fold(f64::INFINITY, f64::min);
        for b in &best {
            if b.lse == min_lse {
                let slot = win_counts
                    .iter_mut()
                    .find(|(mt, _)| *mt == b.method)
                    .expect("every best row has a requested method");
                slot.1 += 1;
            }
        }
    }
    hist.sort_by_key(|&(mt, h, _)| (mt.tag(), h));

    io::write_csv(
        &run.dir.join("best.csv"),
        &["replicate", "method", "best_m", "best_h", "best_lse"],
        &best_csv,
    )?;
    let hist_rows: Vec<Vec<String>> = hist
        .iter()
        .map(|&(mt, h, c)| vec![mt.tag().to_string(), h.to_string(), c.to_string()])
        .collect();
    io::write_csv(
        &run.dir.join("best_h_hist.csv"),
        &["method", "h", "count"],
        &hist_rows,
    )?;
    let count_rows: Vec<Vec<String>> = win_counts
        .iter()
        .map(|&(mt, c)| vec![mt.tag().to_string(), c.to_string()])
        .collect();
    io::write_csv(
        &run.dir.join("best_method_counts.csv"),
        &["method", "count"],
        &count_rows,
    )?;

    let summary: Vec<String> = win_counts
        .iter()
        .map(|&(mt, c)| {
            format!(
                "method {}: smallest error in {c} of {} replicates (ties counted for every tying method)",
                mt.tag(),
                args.replicates
            )
        })
        .collect();
    io::write_lines(&run.dir.join("summary.txt"), &summary)?;
    io::write_manifest(&run, "bench", Some(args.seed), &config, None)?;

    for line in &summary {
        println!("{line}");
    }
    println!("run directory: {}", run.dir.display());
    Ok(())
}

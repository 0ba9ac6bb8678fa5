//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dmac_core::decomp::{
    gmd, jet_shared_left, jet_shared_right, qr_gtd, svd_gtd, verify_joint_triangularization,
    GtdResult, JointReport, Tolerances,
};
use dmac_core::linalg::ProperChannel;
use dmac_core::rates::{
    gap_report, high_snr_rate, qrd_bottleneck_rate, scalar_dmac_bounds, waterfill_capacity,
    PowerKind, PowerSet, RateSummary,
};
use dmac_core::sim::{
    run_single_user_zf_dpc, run_two_user_dmac, run_twrc_pnc_mac_phase, Interference, LatticeConfig,
    SimParams, SimReport,
};
use dmac_core::twrc::{geometric_grid, sweep, TwrcScenario};
use dmac_core::{tol, Matrix};
use serde_json::{json, Value};

use crate::cli::{
    Cli, Command, DecomposeArgs, DecomposeKind, OutputFormat, RatesArgs, SimArgs, SweepSpec,
    TwrcArgs,
};
use crate::format::{
    jet_value, matrix_value, read_json, read_matrix, sim_report_value, summary_value, to_pretty,
    RatesInstanceJson, ScenarioJson, SchemeJson, SimConfigJson,
};
use crate::table::{fmt_sig, Table};
use crate::CliError;

/// Runs one parsed command line. Results go to `out` unless the command
/// writes files; progress and summary lines go to `err`.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Decompose(a) => cmd_decompose(a, out),
        Command::Rates(a) => cmd_rates(a, out),
        Command::Twrc(a) => cmd_twrc(a, out),
        Command::Sim(a) => cmd_sim(a, out, err),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn say(out: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_sig(*x)).collect::<Vec<_>>().join(" ")
}

fn to_matrix(path: &Path, m: &crate::format::MatrixJson) -> Result<Matrix, CliError> {
    m.to_matrix().map_err(|e| CliError::parse(path, e))
}

/// Verdict of a single-matrix decomposition, with the GMD diagonal spread
/// `max_i |d_i − g|/g` (`g` the geometric mean of the diagonal) checked for
/// `gmd` only.
fn single_report(
    kind: DecomposeKind,
    a: &Matrix,
    g: &GtdResult,
    tolerances: &Tolerances,
) -> (bool, Value) {
    let check = g.check(a, tolerances.reconstruction);
    let n = g.diag.len().max(1) as f64;
    let mean = (g.diag.iter().map(|d| d.abs().ln()).sum::<f64>() / n).exp();
    let spread = g
        .diag
        .iter()
        .map(|d| (d - mean).abs() / mean)
        .fold(0.0, f64::max);
    let spread_ok = kind != DecomposeKind::Gmd || spread <= tolerances.diagonal;
    let pass = check.pass && spread_ok;
    let report = json!({
        "kind": kind.name(),
        "pass": pass,
        "diag": g.diag,
        "reconstruction": check.reconstruction,
        "above_diagonal": check.above_diagonal,
        "orthonormality_u": check.orthonormality_u,
        "orthonormality_v": check.orthonormality_v,
        "diagonal_spread": spread,
        "tolerances": tolerances_value(tolerances),
    });
    (pass, report)
}

fn tolerances_value(t: &Tolerances) -> Value {
    json!({
        "orthonormality": t.orthonormality,
        "reconstruction": t.reconstruction,
        "triangularity": t.triangularity,
        "diagonal": t.diagonal,
    })
}

fn joint_report_value(kind: DecomposeKind, r: &JointReport, diag: &[f64], t: &Tolerances) -> Value {
    let factors: Vec<Value> = r
        .factors
        .iter()
        .map(|f| {
            json!({
                "reconstruction_abs": f.reconstruction_abs,
                "reconstruction_rel": f.reconstruction_rel,
                "above_diagonal": f.above_diagonal,
                "orthonormality": f.orthonormality,
            })
        })
        .collect();
    json!({
        "kind": kind.name(),
        "pass": r.pass,
        "diag": diag,
        "shared_orthonormality": r.shared_orthonormality,
        "diagonal_disparity": r.diagonal_disparity,
        "declared_diagonal_error": r.declared_diagonal_error,
        "factors": factors,
        "tolerances": tolerances_value(t),
    })
}

/// Writes `u.json`, `t.json`, `v.json` (single matrix) or `factors.json`
/// (joint), plus `report.json`, into the output directory.
pub fn cmd_decompose(args: &DecomposeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let joint = matches!(args.kind, DecomposeKind::Jet | DecomposeKind::JetLeft);
    let expected = if joint { 2 } else { 1 };
    if args.input.len() != expected {
        return Err(CliError::Usage(format!(
            "--kind {} takes {expected} input matrix file(s), got {}",
            args.kind.name(),
            args.input.len()
        )));
    }
    let matrices = args
        .input
        .iter()
        .map(|p| read_matrix(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tolerances = Tolerances::default();
    if let Some(t) = args.tol {
        tolerances.reconstruction = t;
        tolerances.diagonal = t;
    }
    fs::create_dir_all(&args.output).map_err(|source| CliError::Write {
        path: args.output.clone(),
        source,
    })?;

    let (pass, report, lines) = if joint {
        let jt = match args.kind {
            DecomposeKind::Jet => jet_shared_right(&matrices[0], &matrices[1])?,
            _ => jet_shared_left(&matrices[0], &matrices[1])?,
        };
        let r = verify_joint_triangularization(&jt, &matrices, &tolerances)?;
        write_file(
            &args.output.join("factors.json"),
            &to_pretty(&jet_value(&jt)),
        )?;
        let mut lines = vec![format!("diag: {}", fmt_list(&jt.diag))];
        for (k, f) in jt.per_matrix.iter().enumerate() {
            lines.push(format!(
                "t{} diag: {}",
                k + 1,
                fmt_list(&f.triangular.diagonal())
            ));
        }
        (
            r.pass,
            joint_report_value(args.kind, &r, &jt.diag, &tolerances),
            lines,
        )
    } else {
        let a = &matrices[0];
        let g = match args.kind {
            DecomposeKind::Qr => qr_gtd(a)?,
            DecomposeKind::Svd => svd_gtd(a)?,
            _ => gmd(a)?,
        };
        for (name, m) in [("u", &g.u), ("t", &g.t), ("v", &g.v)] {
            write_file(
                &args.output.join(format!("{name}.json")),
                &to_pretty(&matrix_value(m)),
            )?;
        }
        let (pass, report) = single_report(args.kind, a, &g, &tolerances);
        (pass, report, vec![format!("diag: {}", fmt_list(&g.diag))])
    };
    write_file(&args.output.join("report.json"), &to_pretty(&report))?;
    say(
        out,
        if pass {
            "verifier: pass"
        } else {
            "verifier: FAIL"
        },
    )?;
    for l in &lines {
        say(out, l)?;
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::Verifier(format!(
            "{} factors exceed tolerances, see {}",
            args.kind.name(),
            args.output.join("report.json").display()
        )))
    }
}

/// Every rate the library reports for one instance.
///
/// Entries: `capacity_{k}` and `high_snr_{k}` per user; for two or more
/// users the [`gap_report`] entries and `bottleneck`; for scalar channels
/// also `scalar_outer`, `scalar_inner` and `scalar_high_snr`. Metadata
/// includes `total_power_{k}` and the metadata of the underlying reports.
pub fn rate_summary(
    channels: &[Matrix],
    powers: &PowerSet,
    blocks: Option<usize>,
) -> Result<RateSummary, CliError> {
    if channels.len() != powers.len() {
        return Err(CliError::Validation(dmac_core::Error::LengthMismatch {
            expected: channels.len(),
            found: powers.len(),
        }));
    }
    let totals = powers.totals();
    let proper = channels
        .iter()
        .zip(&totals)
        .map(|(h, p)| ProperChannel::new(h.clone(), *p, tol::PROPER))
        .collect::<Result<Vec<_>, _>>()?;

    let mut s = RateSummary::default();
    for (k, c) in proper.iter().enumerate() {
        s.entries.push((
            format!("capacity_{}", k + 1),
            waterfill_capacity(c)?.capacity,
        ));
    }
    for (k, c) in proper.iter().enumerate() {
        s.entries.push((
            format!("high_snr_{}", k + 1),
            high_snr_rate(c.n_r(), c.power()),
        ));
    }
    for (k, p) in totals.iter().enumerate() {
        s.metadata.push((format!("total_power_{}", k + 1), *p));
    }
    if proper.len() >= 2 {
        let gaps = gap_report(&proper, blocks)?;
        let bottleneck = qrd_bottleneck_rate(&proper)?;
        for part in [gaps, bottleneck] {
            s.entries.extend(part.entries);
            s.metadata.extend(part.metadata);
        }
        if channels.iter().all(|h| h.shape() == (1, 1)) {
            let scalar = scalar_dmac_bounds(&PowerSet::total(totals)?)?;
            s.entries.extend(
                scalar
                    .entries
                    .into_iter()
                    .map(|(k, v)| (format!("scalar_{k}"), v)),
            );
        }
    }
    Ok(s)
}

fn power_set(kind: PowerKind, powers: Vec<f64>, channels: &[Matrix]) -> Result<PowerSet, CliError> {
    let set = match kind {
        PowerKind::Total => PowerSet::total(powers),
        PowerKind::PerAntenna => {
            PowerSet::per_antenna(powers, channels.iter().map(Matrix::cols).collect())
        }
    };
    Ok(set?)
}

fn kind_name(k: PowerKind) -> &'static str {
    match k {
        PowerKind::Total => "total",
        PowerKind::PerAntenna => "per_antenna",
    }
}

fn power_note(k: PowerKind) -> &'static str {
    match k {
        PowerKind::Total => "P is each user's total power",
        PowerKind::PerAntenna => "P is each antenna's power; a user's total power is N_t*P",
    }
}

pub fn cmd_rates(args: &RatesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let inst: RatesInstanceJson = read_json(&args.input)?;
    let channels = inst
        .channels
        .iter()
        .map(|m| to_matrix(&args.input, m))
        .collect::<Result<Vec<_>, _>>()?;
    let kind: PowerKind = args.power_kind.unwrap_or(inst.power_kind).into();
    let blocks = args.blocks.or(inst.blocks);
    let k = channels.len();

    let grid: Option<Vec<f64>> = match (args.sweep, args.power) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--sweep and --power are exclusive".into()))
        }
        (Some(SweepSpec { min, max, points }), None) => Some(geometric_grid(min, max, points)?),
        (None, Some(p)) => Some(vec![p]),
        (None, None) => None,
    };

    let text = match grid {
        None => {
            let powers = power_set(kind, inst.powers.clone(), &channels)?;
            let s = rate_summary(&channels, &powers, blocks)?;
            match args.format {
                OutputFormat::Json => {
                    let mut v = summary_value(&s);
                    v["power_kind"] = json!(kind_name(kind));
                    v["powers"] = json!(inst.powers);
                    to_pretty(&v)
                }
                OutputFormat::Csv => {
                    let mut t = Table::new(s.entries.iter().map(|(l, _)| l.clone()).collect());
                    t.metadata = Some(format!(
                        "power_kind={}; powers={}",
                        kind_name(kind),
                        fmt_list(&inst.powers)
                    ));
                    t.rows
                        .push(s.entries.iter().map(|(_, v)| Some(*v)).collect());
                    t.to_csv_string()
                }
            }
        }
        Some(grid) => {
            let rows = grid
                .iter()
                .map(|&p| {
                    Ok((
                        p,
                        rate_summary(&channels, &power_set(kind, vec![p; k], &channels)?, blocks)?,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            match args.format {
                OutputFormat::Json => {
                    let rows: Vec<Value> = rows
                        .iter()
                        .map(|(p, s)| {
                            let mut v = summary_value(s);
                            v["P"] = json!(p);
                            v
                        })
                        .collect();
                    to_pretty(&json!({ "power_kind": kind_name(kind), "rows": rows }))
                }
                OutputFormat::Csv => {
                    let mut header = vec!["P".to_string()];
                    header.extend(rows[0].1.entries.iter().map(|(l, _)| l.clone()));
                    let mut t = Table::new(header);
                    t.metadata = Some(format!(
                        "power_kind={}; {}",
                        kind_name(kind),
                        power_note(kind)
                    ));
                    for (p, s) in &rows {
                        let mut row = vec![Some(*p)];
                        row.extend(s.entries.iter().map(|(_, v)| Some(*v)));
                        t.rows.push(row);
                    }
                    t.to_csv_string()
                }
            }
        }
    };
    emit(args.output.as_deref(), &text, out)
}

pub fn scenario_from_json(path: &Path, s: &ScenarioJson) -> Result<TwrcScenario, CliError> {
    Ok(TwrcScenario::new(
        to_matrix(path, &s.h1)?,
        to_matrix(path, &s.h2)?,
        s.power,
        s.power_kind.into(),
        s.c_common.unwrap_or(f64::INFINITY),
    )?)
}

/// The two-way relay sweep as a table with columns `P`, `cut_set_mimo`,
/// `pnc_mimo`, `df_symmetric` and `per_element_pnc` (empty for
/// non-diagonal channels).
pub fn twrc_table(s: &TwrcScenario, grid: &[f64]) -> Result<Table, CliError> {
    let rows = sweep(s, grid)?;
    let mut t = Table::new(
        [
            "P",
            "cut_set_mimo",
            "pnc_mimo",
            "df_symmetric",
            "per_element_pnc",
        ]
        .map(String::from)
        .to_vec(),
    );
    t.metadata = Some(format!(
        "power_kind={}; {}; n_t=({}, {}); c_common={}",
        kind_name(s.kind()),
        power_note(s.kind()),
        s.h1().cols(),
        s.h2().cols(),
        fmt_sig(s.c_common()),
    ));
    for r in rows {
        t.rows.push(vec![
            Some(r.power),
            Some(r.cut_set_mimo),
            Some(r.pnc_mimo),
            Some(r.df_symmetric),
            r.per_element_pnc,
        ]);
    }
    Ok(t)
}

pub fn cmd_twrc(args: &TwrcArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut json: ScenarioJson = read_json(&args.input)?;
    if let Some(k) = args.power_kind {
        json.power_kind = k;
    }
    let s = scenario_from_json(&args.input, &json)?;
    let grid = match (args.sweep, args.power) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--sweep and --power are exclusive".into()))
        }
        (Some(SweepSpec { min, max, points }), None) => geometric_grid(min, max, points)?,
        (None, Some(p)) => vec![p],
        (None, None) => vec![s.power()],
    };
    let t = twrc_table(&s, &grid)?;
    let text = match args.format {
        OutputFormat::Csv => t.to_csv_string(),
        OutputFormat::Json => {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    Value::Object(
                        t.header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| (h.clone(), c.map_or(Value::Null, Value::from)))
                            .collect(),
                    )
                })
                .collect();
            to_pretty(&json!({
                "power_kind": kind_name(s.kind()),
                "c_common": json.c_common,
                "rows": rows,
            }))
        }
    };
    emit(args.output.as_deref(), &text, out)
}

/// Runs the scheme of a simulation config.
pub fn run_sim(
    path: &Path,
    c: &SimConfigJson,
    seed: u64,
    trials: Option<u64>,
) -> Result<SimReport, CliError> {
    let want = if c.scheme == SchemeJson::SingleUser {
        1
    } else {
        2
    };
    if c.channels.len() != want {
        return Err(CliError::Validation(dmac_core::Error::LengthMismatch {
            expected: want,
            found: c.channels.len(),
        }));
    }
    if c.interference.len() > want {
        return Err(CliError::Validation(dmac_core::Error::LengthMismatch {
            expected: want,
            found: c.interference.len(),
        }));
    }
    if !(c.noise_scale >= 0.0 && c.noise_scale.is_finite()) {
        return Err(CliError::Usage(
            "noise_scale must be nonnegative and finite".into(),
        ));
    }
    let channels = c
        .channels
        .iter()
        .map(|m| to_matrix(path, m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut interference = [Interference::ZERO; 2];
    for (slot, spec) in interference.iter_mut().zip(&c.interference) {
        *slot = spec.into();
    }
    let lattice = LatticeConfig::from(&c.lattice);
    let params = SimParams {
        trials: trials.unwrap_or(c.trials),
        seed,
        noise_scale: c.noise_scale,
    };
    let powers = power_set(c.power_kind.into(), vec![c.power; want], &channels)?.totals();
    let report = match c.scheme {
        SchemeJson::SingleUser => {
            let h = ProperChannel::new(channels[0].clone(), powers[0], tol::PROPER)?;
            run_single_user_zf_dpc(&h, interference[0], &lattice, &params)?
        }
        SchemeJson::Dmac => {
            let h1 = ProperChannel::new(channels[0].clone(), powers[0], tol::PROPER)?;
            let h2 = ProperChannel::new(channels[1].clone(), powers[1], tol::PROPER)?;
            run_two_user_dmac(&h1, &h2, interference, &lattice, &params)?
        }
        SchemeJson::Twrc => {
            let s = TwrcScenario::new(
                channels[0].clone(),
                channels[1].clone(),
                c.power,
                c.power_kind.into(),
                c.c_common.unwrap_or(f64::INFINITY),
            )?;
            run_twrc_pnc_mac_phase(&s, interference, &lattice, &params)?
        }
    };
    Ok(report)
}

/// One-line summary of a simulation report.
pub fn sim_summary(r: &SimReport) -> String {
    let gains: Vec<f64> = r.subchannels.iter().map(|s| s.gain).collect();
    format!(
        "trials={} errors={} gains=[{}] interference_invariant={} digest={:016x}",
        r.trials,
        r.total_errors(),
        fmt_list(&gains),
        r.interference_invariant,
        r.decision_digest
    )
}

pub fn cmd_sim(args: &SimArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let config: SimConfigJson = read_json(&args.input)?;
    let report = run_sim(&args.input, &config, args.seed, args.trials)?;
    emit(
        args.output.as_deref(),
        &to_pretty(&sim_report_value(&report)),
        out,
    )?;
    let summary = sim_summary(&report);
    match args.output {
        Some(_) => say(out, &summary),
        None => say(err, &summary),
    }
}

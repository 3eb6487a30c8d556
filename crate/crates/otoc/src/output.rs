//! CSV and JSON writers for result tables, oracle curves and Gibbs reports.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::sweep::{ResultTable, Row};

pub const CSV_HEADER: [&str; 13] = [
    "protocol",
    "delta",
    "beta",
    "tau",
    "mean_C",
    "std_C",
    "oracle_C",
    "shots",
    "reps",
    "seed",
    "gibbs_mode",
    "evolution_mode",
    "extra",
];

pub const ORACLE_HEADER: [&str; 6] = ["delta", "beta", "tau", "C_exact", "ReF", "ImF"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => bail!("unknown format {s:?} (expected csv or json)"),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Rounds to 12 significant digits, then prints the shortest decimal that
/// reads back to the rounded value, in exponent form outside
/// `[1e-4, 1e15)`. Independent of locale.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    if (1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn parse_num(s: &str) -> Result<f64> {
    match s {
        "NaN" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().with_context(|| format!("bad number {s:?}")),
    }
}

/// Numeric values, including each part of a '/'-joined list, get the same
/// rounding as the main columns; anything else passes through.
fn fmt_extra_value(v: &str) -> String {
    let parts: Option<Vec<f64>> = v.split('/').map(|p| p.parse().ok()).collect();
    match parts {
        Some(xs) => xs.into_iter().map(fmt_num).collect::<Vec<_>>().join("/"),
        None => v.to_string(),
    }
}

fn join_extra(extra: &[(String, String)]) -> String {
    extra
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_extra_value(v)))
        .collect::<Vec<_>>()
        .join(";")
}

fn split_extra(s: &str) -> Result<Vec<(String, String)>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .with_context(|| format!("bad extra entry {kv:?}"))
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.protocol.clone(),
            fmt_num(r.delta),
            fmt_num(r.beta),
            fmt_num(r.tau),
            fmt_num(r.mean_c),
            fmt_num(r.std_c),
            fmt_num(r.oracle_c),
            r.shots.to_string(),
            r.reps.to_string(),
            r.seed.to_string(),
            r.gibbs_mode.clone(),
            r.evolution_mode.clone(),
            join_extra(&r.extra),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

/// Reads rows written by [`write_csv`]. Per-repetition values are not part
/// of the CSV and come back empty.
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        bail!("unexpected CSV header {header:?}");
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| parse_num(&rec[i]);
            Ok(Row {
                protocol: rec[0].to_string(),
                delta: f(1)?,
                beta: f(2)?,
                tau: f(3)?,
                mean_c: f(4)?,
                std_c: f(5)?,
                oracle_c: f(6)?,
                shots: rec[7].parse()?,
                reps: rec[8].parse()?,
                seed: rec[9].parse()?,
                gibbs_mode: rec[10].to_string(),
                evolution_mode: rec[11].to_string(),
                extra: split_extra(&rec[12])?,
                per_rep: Vec::new(),
            })
        })
        .collect()
}

pub fn table_json(table: &ResultTable) -> Value {
    json!({
        "config": table.config,
        "rows": table.rows,
        "versions": table.versions,
        "wallclock": table.wallclock,
    })
}

fn with_extension(base: &Path, ext: &str) -> PathBuf {
    base.with_extension(ext)
}

/// Writes `<out>.csv` and/or `<out>.json`; returns the paths written.
pub fn write_outputs(table: &ResultTable, out: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    if table.rows.is_empty() {
        bail!("result table is empty");
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut written = Vec::new();
    for &fmt in formats {
        let path = with_extension(out, fmt.extension());
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        match fmt {
            Format::Csv => write_csv(&table.rows, std::io::BufWriter::new(file))?,
            Format::Json => serde_json::to_writer_pretty(std::io::BufWriter::new(file), &table_json(table))?,
        }
        written.push(path);
    }
    Ok(written)
}

/// Exact curve point at one `(Δ, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub delta: f64,
    pub beta: f64,
    pub tau: f64,
    pub c_exact: f64,
    pub re_f: f64,
    pub im_f: f64,
}

pub fn oracle_rows(cfg: &ExperimentConfig) -> Result<Vec<OracleRow>> {
    use otoc_core::oracle::{evaluate, OtocSpec};
    let mut rows = Vec::new();
    for &delta in &cfg.deltas {
        let h = cfg.hamiltonian(delta)?;
        for tau in cfg.taus() {
            let v = evaluate(&OtocSpec::sigma_x_pair(h.clone(), cfg.beta, tau)?)?;
            rows.push(OracleRow {
                delta,
                beta: cfg.beta,
                tau,
                c_exact: v.c,
                re_f: v.f.re,
                im_f: v.f.im,
            });
        }
    }
    Ok(rows)
}

pub fn write_oracle_csv<W: Write>(rows: &[OracleRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(ORACLE_HEADER)?;
    for r in rows {
        w.write_record([r.delta, r.beta, r.tau, r.c_exact, r.re_f, r.im_f].map(fmt_num))?;
    }
    w.flush()?;
    Ok(())
}

/// Summary of a variational Gibbs preparation.
#[derive(Debug, Clone, Serialize)]
pub struct GibbsReport {
    pub beta: f64,
    pub delta: f64,
    pub params: GibbsParams,
    pub free_energy: f64,
    pub exact_free_energy: f64,
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GibbsParams {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(mean: f64) -> Row {
        Row {
            protocol: "ISM".into(),
            delta: 0.1,
            beta: 1.0,
            tau: 0.15 * 7.0,
            mean_c: mean,
            std_c: 0.012_345_678_901_234_5,
            oracle_c: 1.0 / 3.0,
            shots: 1000,
            reps: 10,
            seed: u64::MAX,
            gibbs_mode: "exact".into(),
            evolution_mode: "trotter(order=2,steps_per_unit=4)".into(),
            extra: vec![
                ("theta".into(), "0.4".into()),
                ("raw_mean".into(), "0.123456789012345678".into()),
                ("phis".into(), "0.1/0.2/0.3/0.40000000000000002".into()),
            ],
            per_rep: Vec::new(),
        }
    }

    #[test]
    fn numbers_keep_twelve_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(0.15 * 7.0), "1.05");
        assert_eq!(fmt_num(-2.5e-13), "-2.5e-13");
        assert_eq!(fmt_num(7.132_299_533_789_9e-62), "7.13229953379e-62");
        assert_eq!(fmt_num(0.000_25), "0.00025");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(123_456_789_012_345.0), "123456789012000");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn header_is_exact() {
        let s = csv_string(&[row(0.5)]).unwrap();
        assert_eq!(
            s.lines().next().unwrap(),
            "protocol,delta,beta,tau,mean_C,std_C,oracle_C,shots,reps,seed,gibbs_mode,evolution_mode,extra"
        );
    }

    #[test]
    fn round_trip() {
        let rows = vec![row(0.5), row(f64::NAN), row(2.0 / 7.0)];
        let back = parse_csv(csv_string(&rows).unwrap().as_bytes()).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in rows.iter().zip(&back) {
            for (x, y) in [(a.delta, b.delta), (a.tau, b.tau), (a.mean_c, b.mean_c), (a.std_c, b.std_c), (a.oracle_c, b.oracle_c)] {
                assert!(fmt_num(x) == fmt_num(y));
                assert!(x.is_nan() && y.is_nan() || (x - y).abs() <= 1e-11 * x.abs().max(1e-300));
            }
            assert_eq!(a.seed, b.seed);
            assert_eq!(b.extra_value("raw_mean"), Some("0.123456789012"));
            assert_eq!(b.extra_value("phis"), Some("0.1/0.2/0.3/0.4"));
        }
    }
}

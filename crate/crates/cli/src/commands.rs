use std::{
    collections::BTreeMap,
    fs::{self, File},
    io::{BufReader, BufWriter, Write},
    path::Path,
    time::{SystemTime, UNIX_EPOCH},
};

use anyhow::Context;
use boat_core::{
    analytics::{cap_analysis, cost_comparison, trend_by_group, AnalyticsError, TrendMetric},
    engine::{describe, filter},
    ingest::{is_snapshot, parse_stream, read_snapshot, write_snapshot, ColumnSchema, IngestError, ParseReport},
    parse_money,
    report::{emit_bar, emit_histogram, emit_lines, Datum, PlotDocument, Provenance, ReportError},
    synth::{generate, CohortProfile},
    DataType, Frame,
};
use log::info;

use crate::{
    args::{Cli, Command, Common, Format, MetricArg},
    filter::parse_filters,
    CliError,
};

type Result<T, E = CliError> = std::result::Result<T, E>;

fn validation(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Validation(e.into())
}

fn data(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Data(e.into())
}

fn analytics_error(e: AnalyticsError) -> CliError {
    match e {
        AnalyticsError::EmptyCohort { .. } | AnalyticsError::UndefinedBaseline(_) => data(e),
        _ => validation(e),
    }
}

fn report_error(e: ReportError) -> CliError {
    match e {
        ReportError::EmptyResult | ReportError::InconsistentSeries(_) => data(e),
        _ => validation(e),
    }
}

fn dollars(flag: &str, raw: &str) -> Result<i64> {
    parse_money(raw).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
        .map_err(validation)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(validation)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(validation)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

/// Writes `<stem>.json` (or `.csv`) without a timestamp, and the timestamp alone to
/// `<stem>.meta.json`, so repeated runs produce identical data files.
fn write_document(out: &Path, stem: &str, doc: &PlotDocument, format: Format) -> Result<()> {
    let doc = doc.without_timestamp();
    let (name, body) = match format {
        Format::Json => (format!("{stem}.json"), doc.to_json().map_err(validation)?),
        Format::Csv => (format!("{stem}.csv"), doc.to_csv().map_err(validation)?),
    };
    write_file(&out.join(&name), body.as_bytes())?;
    let meta = BTreeMap::from([
        ("document", serde_json::Value::from(name)),
        ("generated_at", serde_json::Value::from(unix_now())),
    ]);
    write_json(&out.join(format!("{stem}.meta.json")), &meta)
}

fn load_schema(cli: &Cli) -> Result<ColumnSchema> {
    match &cli.schema {
        Some(path) => ColumnSchema::from_path(path).map_err(validation),
        None => Ok(ColumnSchema::bundled()),
    }
}

fn ingest_csv(schema: &ColumnSchema, input: &Path, out: &Path) -> Result<(Frame, ParseReport)> {
    let file = File::open(input)
        .with_context(|| format!("cannot open {}", input.display()))
        .map_err(validation)?;
    let (frame, report) = parse_stream(schema, BufReader::with_capacity(1 << 20, file)).map_err(|e| match e {
        IngestError::Engine(_) => validation(e),
        _ => data(e),
    })?;
    info!(
        "{}: {} rows read, {} ok, {} quarantined",
        input.display(),
        report.rows_read,
        report.rows_ok,
        report.rows_quarantined
    );
    write_json(&out.join("parse_report.json"), &report)?;
    Ok((frame, report))
}

/// Frame from a snapshot directory, or from a CSV parsed on the fly.
fn load_input(cli: &Cli, common: &Common) -> Result<Frame> {
    prepare_out(&common.out)?;
    if is_snapshot(&common.input) {
        info!("reading snapshot {}", common.input.display());
        return read_snapshot(&common.input).map_err(data);
    }
    Ok(ingest_csv(&load_schema(cli)?, &common.input, &common.out)?.0)
}

fn provenance(frame: &Frame, common: &Common) -> Provenance {
    Provenance {
        source_rows: frame.row_count() as u64,
        filters: common.filters.clone(),
    }
}

fn parse_years_pair(raw: &str) -> Result<(i64, i64)> {
    let parsed: Option<(i64, i64)> = raw
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    parsed.ok_or_else(|| CliError::Usage(format!("--years expects `y0,y1`, got `{raw}`")))
}

fn parse_year_list(raw: &str) -> Result<Vec<i64>> {
    let bad = || CliError::Usage(format!("--years expects `y0:y1` or `y0,y1,...`, got `{raw}`"));
    if let Some((a, b)) = raw.split_once(':') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    raw.split(',').map(|y| y.trim().parse().map_err(|_| bad())).collect()
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest { input, out } => {
            prepare_out(out)?;
            let (frame, _) = ingest_csv(&load_schema(cli)?, input, out)?;
            let manifest = write_snapshot(&frame, out).map_err(validation)?;
            info!("snapshot of {} rows written to {}", manifest.row_count, out.display());
            Ok(())
        }
        Command::Describe { common, field } => {
            let frame = load_input(cli, common)?;
            let slice = parse_filters(&frame, &common.filters)?;
            let sliced = filter(&frame, &slice).map_err(validation)?;
            let resolved = frame.resolve(field).map_err(validation)?;
            let money = resolved.data_type() == DataType::Money;
            let values = sliced.integers(resolved.name()).map_err(validation)?;
            let stats = describe(values);
            let amount = |v: Option<i64>| match v {
                None => Datum::Null,
                Some(v) if money => Datum::dollars(v),
                Some(v) => Datum::int(v),
            };
            let summary = BTreeMap::from([
                ("field", Datum::text(resolved.name())),
                ("source_rows", Datum::int(frame.row_count() as i64)),
                ("filters", Datum::text(slice.to_string())),
                ("n", Datum::int(stats.n as i64)),
                ("sum", stats.sum.and_then(|s| i64::try_from(s).ok()).map_or(Datum::Null, |s| amount(Some(s)))),
                ("mean", amount(stats.mean.map(|m| m.rounded()))),
                ("std_sample", stats.std_sample.map_or(Datum::Null, |s| amount(Some(s.round() as i64)))),
                ("min", amount(stats.min)),
                ("max", amount(stats.max)),
                ("median", amount(stats.median)),
            ]);
            write_json(&common.out.join("describe.json"), &summary)?;
            info!("{} over {}: n={} mean={}", resolved.name(), slice, stats.n, summary["mean"]);
            Ok(())
        }
        Command::TopCosts { common, group, years, top, skip_top } => {
            let years = parse_years_pair(years)?;
            let frame = load_input(cli, common)?;
            let slice = parse_filters(&frame, &common.filters)?;
            let table = cost_comparison(&frame, &slice, group, years, *top, *skip_top).map_err(analytics_error)?;
            let doc = emit_bar(&table, &provenance(&frame, common)).map_err(report_error)?;
            write_document(&common.out, "top_costs", &doc, common.format)
        }
        Command::Trend { common, group, metric, years, top } => {
            let years = parse_year_list(years)?;
            let metric = match metric {
                MetricArg::Count => TrendMetric::Count,
                MetricArg::Sum => TrendMetric::SumCost,
                MetricArg::Mean => TrendMetric::MeanCost,
            };
            let frame = load_input(cli, common)?;
            let slice = parse_filters(&frame, &common.filters)?;
            let series = trend_by_group(&frame, &slice, group, metric, &years, *top).map_err(analytics_error)?;
            let doc = emit_lines(&series, metric, &provenance(&frame, common)).map_err(report_error)?;
            write_document(&common.out, "trend", &doc, common.format)
        }
        Command::Cap { common, threshold, hist_lo, hist_width, hist_bins } => {
            let threshold = dollars("threshold", threshold)?;
            let lo = dollars("hist-lo", hist_lo)?;
            let width = dollars("hist-width", hist_width)?;
            let frame = load_input(cli, common)?;
            let slice = parse_filters(&frame, &common.filters)?;
            let report = cap_analysis(&frame, &slice, threshold, lo, width, *hist_bins).map_err(analytics_error)?;
            let doc = emit_histogram(&report, &provenance(&frame, common)).map_err(report_error)?;
            info!(
                "n={} mean={} fraction below {}: {:.4}",
                report.n,
                Datum::dollars(report.mean),
                Datum::dollars(threshold),
                report.fraction_below.value()
            );
            write_document(&common.out, "cap", &doc, common.format)
        }
        Command::Synth { profile, seed, out } => {
            let mut profile = match profile {
                Some(path) => CohortProfile::from_path(path).map_err(validation)?,
                None => CohortProfile::bundled(),
            };
            if let Some(seed) = seed {
                profile.seed = *seed;
            }
            prepare_out(out)?;
            let path = out.join("discharges.csv");
            let file = File::create(&path)
                .with_context(|| format!("cannot create {}", path.display()))
                .map_err(validation)?;
            let mut writer = BufWriter::new(file);
            let ledger = generate(&profile, &mut writer).map_err(validation)?;
            writer.flush().map_err(validation)?;
            write_json(&out.join("ledger.json"), &ledger)?;
            info!("{} rows ({} corrupted) written to {}", ledger.rows_emitted, ledger.corrupted, path.display());
            Ok(())
        }
    }
}

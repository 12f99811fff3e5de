//! CSV writers and readers shared by the subcommands.
//!
//! Every file starts with `#`-prefixed metadata lines — at minimum a
//! `# command:` line that reproduces the invocation — followed by one
//! header line and data rows. Nothing in the metadata depends on the
//! clock or the machine, so re-running a command rewrites its outputs
//! byte for byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use specgrad_core::solver::{IterateTrace, Status, TildeRow};

use crate::bench::{ReportRow, Summary};
use crate::profile::ProfileCurves;
use crate::{CliError, Result};

/// A float formatted with 17 significant digits (round-trippable).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float in shortest round-trip exponent form, for command echoes.
pub fn fmt_short(x: f64) -> String {
    format!("{x:e}")
}

/// Serializes a run status.
pub fn status_str(s: Status) -> &'static str {
    match s {
        Status::Converged => "converged",
        Status::IterCap => "iter_cap",
        Status::NumericalFailure => "numerical_failure",
    }
}

/// Parses a run status.
pub fn parse_status(s: &str) -> Option<Status> {
    match s {
        "converged" => Some(Status::Converged),
        "iter_cap" => Some(Status::IterCap),
        "numerical_failure" => Some(Status::NumericalFailure),
        _ => None,
    }
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.to_path_buf(), source }
}

/// Writes a metadata block, a header line, and data rows to `path`,
/// overwriting any previous content.
pub fn write_csv<I>(path: &Path, meta: &[(String, String)], header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |line: &str| w.write_all(line.as_bytes()).and_then(|()| w.write_all(b"\n"));
    for (k, v) in meta {
        put(&format!("# {k}: {v}")).map_err(|e| io_err(path, e))?;
    }
    put(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        put(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes a solver trace: `k,f_gap,gnorm,alpha,rule`, plus one
/// `mu_i` column per eigencomponent when the run tracked them. The
/// terminal row has an empty `alpha` field.
pub fn write_trace(path: &Path, meta: &[(String, String)], trace: &IterateTrace) -> Result<()> {
    let mut header = String::from("k,f_gap,gnorm,alpha,rule");
    if let Some(mu) = &trace.mu {
        for i in 1..=mu.n() {
            header.push_str(&format!(",mu_{i}"));
        }
    }
    let rows = trace.rows.iter().enumerate().map(|(idx, r)| {
        let alpha = r.alpha.map(fmt_f64).unwrap_or_default();
        let mut line = format!(
            "{},{},{},{},{}",
            r.k,
            fmt_f64(r.f_gap),
            fmt_f64(r.gnorm),
            alpha,
            r.rule
        );
        if let Some(mu) = &trace.mu {
            for &m in &mu.raw[idx] {
                line.push(',');
                line.push_str(&fmt_f64(m));
            }
        }
        line
    });
    write_csv(path, meta, &header, rows)
}

/// Writes the short-step root series: `k,alpha_tilde,alpha_bar`.
pub fn write_tilde(path: &Path, meta: &[(String, String)], rows: &[TildeRow]) -> Result<()> {
    write_csv(
        path,
        meta,
        "k,alpha_tilde,alpha_bar",
        rows.iter()
            .map(|r| format!("{},{},{}", r.k, fmt_f64(r.short), fmt_f64(r.long))),
    )
}

/// Writes the finite-termination table: `lambda,mean_gnorm,mean_f_gap`.
pub fn write_ft2d(
    path: &Path,
    meta: &[(String, String)],
    rows: &[(f64, f64, f64)],
) -> Result<()> {
    write_csv(
        path,
        meta,
        "lambda,mean_gnorm,mean_f_gap",
        rows.iter()
            .map(|&(l, g, f)| format!("{},{},{}", fmt_f64(l), fmt_f64(g), fmt_f64(f))),
    )
}

/// Writes per-iterate weight dynamics: `k,gamma,theta,q_1..q_n`.
pub fn write_dynamics(
    path: &Path,
    meta: &[(String, String)],
    rows: &[(usize, f64, f64, Vec<f64>)],
) -> Result<()> {
    let n = rows.first().map_or(0, |r| r.3.len());
    let mut header = String::from("k,gamma,theta");
    for i in 1..=n {
        header.push_str(&format!(",q_{i}"));
    }
    let lines = rows.iter().map(|(k, gamma, theta, q)| {
        let mut line = format!("{},{},{}", k, fmt_f64(*gamma), fmt_f64(*theta));
        for &w in q {
            line.push(',');
            line.push_str(&fmt_f64(w));
        }
        line
    });
    write_csv(path, meta, &header, lines)
}

/// Writes a two-column `key,value` summary table.
pub fn write_summary_pairs(
    path: &Path,
    meta: &[(String, String)],
    pairs: &[(String, String)],
) -> Result<()> {
    write_csv(
        path,
        meta,
        "key,value",
        pairs.iter().map(|(k, v)| format!("{k},{v}")),
    )
}

/// Column header of benchmark reports.
pub const REPORT_HEADER: &str = "set,kappa,epsilon,method,params,replicate,iterations,status,phash";

/// Writes a benchmark report.
pub fn write_report(path: &Path, meta: &[(String, String)], rows: &[ReportRow]) -> Result<()> {
    for r in rows {
        if r.method.contains(',') || r.params.contains(',') {
            return Err(CliError::Usage(format!(
                "method label '{}' would corrupt the report CSV",
                r.method
            )));
        }
    }
    write_csv(
        path,
        meta,
        REPORT_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{:016x}",
                r.set,
                fmt_f64(r.kappa),
                fmt_f64(r.epsilon),
                r.method,
                r.params,
                r.replicate,
                r.iterations,
                status_str(r.status),
                r.phash
            )
        }),
    )
}

/// Reads a benchmark report back, skipping metadata lines.
pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    let fmt = |line: usize, reason: String| CliError::Format {
        path: path.to_path_buf(),
        reason: format!("line {line}: {reason}"),
    };
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let lineno = idx + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line != REPORT_HEADER {
                return Err(fmt(lineno, format!("expected header '{REPORT_HEADER}'")));
            }
            saw_header = true;
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 9 {
            return Err(fmt(lineno, format!("expected 9 fields, found {}", parts.len())));
        }
        let field = |i: usize, name: &str| -> Result<&str> {
            parts
                .get(i)
                .copied()
                .ok_or_else(|| fmt(lineno, format!("missing field {name}")))
        };
        let row = ReportRow {
            set: field(0, "set")?
                .parse()
                .map_err(|_| fmt(lineno, "bad set".into()))?,
            kappa: field(1, "kappa")?
                .parse()
                .map_err(|_| fmt(lineno, "bad kappa".into()))?,
            epsilon: field(2, "epsilon")?
                .parse()
                .map_err(|_| fmt(lineno, "bad epsilon".into()))?,
            method: field(3, "method")?.to_string(),
            params: field(4, "params")?.to_string(),
            replicate: field(5, "replicate")?
                .parse()
                .map_err(|_| fmt(lineno, "bad replicate".into()))?,
            iterations: field(6, "iterations")?
                .parse()
                .map_err(|_| fmt(lineno, "bad iterations".into()))?,
            status: parse_status(field(7, "status")?)
                .ok_or_else(|| fmt(lineno, "bad status".into()))?,
            phash: u64::from_str_radix(field(8, "phash")?, 16)
                .map_err(|_| fmt(lineno, "bad phash".into()))?,
        };
        rows.push(row);
    }
    if !saw_header {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            reason: "no header line found".into(),
        });
    }
    Ok(rows)
}

/// Writes the aggregated benchmark table: one row per `(set, eps)`,
/// one column per method, plus `total` rows summing the set means per
/// epsilon. Cells whose runs did not all converge carry a trailing
/// `*`.
pub fn write_bench_summary(path: &Path, meta: &[(String, String)], s: &Summary) -> Result<()> {
    let mut header = String::from("set,eps");
    for m in &s.methods {
        header.push(',');
        header.push_str(m);
    }
    let mut lines = Vec::new();
    for &set in &s.sets {
        for &eps in &s.epsilons {
            let mut line = format!("{},{}", set, fmt_f64(eps));
            for m in &s.methods {
                line.push(',');
                match s.cells.get(&(set, eps.to_bits(), m.clone())) {
                    Some(cell) => {
                        line.push_str(&fmt_f64(cell.mean));
                        if cell.any_unconverged {
                            line.push('*');
                        }
                    }
                    None => line.push_str("na"),
                }
            }
            lines.push(line);
        }
    }
    for &eps in &s.epsilons {
        let mut line = format!("total,{}", fmt_f64(eps));
        for m in &s.methods {
            line.push(',');
            match s.totals.get(&(eps.to_bits(), m.clone())) {
                Some((total, flagged)) => {
                    line.push_str(&fmt_f64(*total));
                    if *flagged {
                        line.push('*');
                    }
                }
                None => line.push_str("na"),
            }
        }
        lines.push(line);
    }
    write_csv(path, meta, &header, lines)
}

/// Writes performance-profile curves: `rho`, one column per method.
pub fn write_profile(path: &Path, meta: &[(String, String)], p: &ProfileCurves) -> Result<()> {
    let mut header = String::from("rho");
    for m in &p.methods {
        header.push(',');
        header.push_str(m);
    }
    let lines = p.rho.iter().enumerate().map(|(j, rho)| {
        let mut line = fmt_f64(*rho);
        for curve in &p.fractions {
            line.push(',');
            line.push_str(&fmt_f64(curve[j]));
        }
        line
    });
    write_csv(path, meta, &header, lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    // The literals are written in the exact 17-digit form under test.
    #[allow(clippy::excessive_precision)]
    fn seventeen_digits_round_trip() {
        for x in [
            1.0 / 3.0,
            1e-9,
            9.9999999999999995e-7,
            3.1622776601683796e1,
            f64::MIN_POSITIVE,
            -2.225_073_858_507_201_4e-308,
            1.7976931348623157e308,
        ] {
            let printed = fmt_f64(x);
            assert_eq!(printed.parse::<f64>().unwrap(), x, "{printed} drifted");
        }
    }

    #[test]
    fn report_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let rows = vec![
            ReportRow {
                set: 3,
                kappa: 1e4,
                epsilon: 1e-6,
                method: "alg1:bb1:sd:*:15:15".into(),
                params: "alg1:bb1:sd:30:15:15".into(),
                replicate: 0,
                iterations: 454,
                status: Status::Converged,
                phash: 0x0d56_166a_4b33_a4c9,
            },
            ReportRow {
                set: 3,
                kappa: 1e4,
                epsilon: 1e-6,
                method: "bb1".into(),
                params: "bb1".into(),
                replicate: 0,
                iterations: 20_000,
                status: Status::IterCap,
                phash: 0x0d56_166a_4b33_a4c9,
            },
        ];
        let meta = [("command".to_string(), "specgrad bench ...".to_string())];
        write_report(&path, &meta, &rows).unwrap();
        assert_eq!(read_report(&path).unwrap(), rows);
    }

    #[test]
    fn report_reader_rejects_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let case = |name: &str, content: &str| {
            let path = dir.path().join(name);
            std::fs::write(&path, content).unwrap();
            let err = read_report(&path).unwrap_err();
            assert!(matches!(err, CliError::Format { .. }), "{name}: {err}");
        };
        case("bad_header.csv", "set,kappa\n");
        case(
            "short_row.csv",
            &format!("{REPORT_HEADER}\n1,1e4,1e-6,bb1,bb1,0,10,converged\n"),
        );
        case(
            "bad_status.csv",
            &format!("{REPORT_HEADER}\n1,1e4,1e-6,bb1,bb1,0,10,finished,0\n"),
        );
        case("empty.csv", "# command: x\n");
    }

    #[test]
    fn report_writer_rejects_labels_that_break_the_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let row = ReportRow {
            set: 1,
            kappa: 1e4,
            epsilon: 1e-6,
            method: "a,b".into(),
            params: "a".into(),
            replicate: 0,
            iterations: 1,
            status: Status::Converged,
            phash: 0,
        };
        assert!(matches!(write_report(&path, &[], &[row]), Err(CliError::Usage(_))));
    }
}

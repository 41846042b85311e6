//! Output formatting: 12-significant-digit numbers, CSV and JSON writers,
//! stdout-or-file plumbing.

use std::io::Write;
use std::path::PathBuf;

use qcorr_core::{MeasureResult, Method, SurfacePointCloud, SweepTable};

pub const SIG_DIGITS: usize = 12;

/// Format with a fixed number of significant digits, locale independent.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // Trim trailing zeros but keep at least one digit after the point.
        if s.contains('.') {
            let t = s.trim_end_matches('0').trim_end_matches('.');
            t.to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.*e}", SIG_DIGITS - 1);
        match s.split_once('e') {
            Some((mantissa, exp)) => {
                let m = mantissa.trim_end_matches('0').trim_end_matches('.');
                format!("{m}e{exp}")
            }
            None => s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

pub fn write_out(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())
        }
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::Numeric => "numeric",
    }
}

const RESULT_CSV_HEADER: &str =
    "method,value,clamped,projective_fallback,basis_n1,basis_n2,basis_n3,iterations,converged";

fn result_csv_row(r: &MeasureResult) -> String {
    let basis = r
        .optimal_basis
        .map(|b| {
            let n = b.bloch();
            format!("{},{},{}", fmt_sig(n[0]), fmt_sig(n[1]), fmt_sig(n[2]))
        })
        .unwrap_or_else(|| ",,".to_string());
    let trace = r
        .optimizer
        .map(|t| format!("{},{}", t.iterations, t.converged))
        .unwrap_or_else(|| ",".to_string());
    format!(
        "{},{},{},{},{},{}",
        method_name(r.method),
        fmt_sig(r.value),
        r.clamped,
        r.projective_fallback,
        basis,
        trace
    )
}

/// A single measure result in the requested format.
pub fn render_result(r: &MeasureResult, format: Format) -> String {
    match format {
        Format::Text => format!("{}\n", fmt_sig(r.value)),
        Format::Csv => format!("{RESULT_CSV_HEADER}\n{}\n", result_csv_row(r)),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("result serializes");
            s.push('\n');
            s
        }
    }
}

/// Closed-form and numeric results side by side with their difference.
pub fn render_both(closed: &MeasureResult, numeric: &MeasureResult, format: Format) -> String {
    let diff = closed.value - numeric.value;
    match format {
        Format::Text => format!(
            "closed_form {}\nnumeric     {}\ndifference  {}\n",
            fmt_sig(closed.value),
            fmt_sig(numeric.value),
            fmt_sig(diff)
        ),
        Format::Csv => format!(
            "{RESULT_CSV_HEADER}\n{}\n{}\n",
            result_csv_row(closed),
            result_csv_row(numeric)
        ),
        Format::Json => {
            let v = serde_json::json!({
                "closed_form": closed,
                "numeric": numeric,
                "difference": diff,
            });
            let mut s = serde_json::to_string_pretty(&v).expect("results serialize");
            s.push('\n');
            s
        }
    }
}

pub fn render_table(table: &SweepTable, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(table).expect("table serializes");
            s.push('\n');
            s
        }
        // Text and CSV coincide for tables.
        _ => {
            let mut s = table.columns.join(",");
            s.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|v| fmt_sig(*v)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
    }
}

pub fn render_surface(cloud: &SurfacePointCloud, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(cloud).expect("cloud serializes");
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::from("c1,c2,c3,residual\n");
            for pt in &cloud.points {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_sig(pt.c[0]),
                    fmt_sig(pt.c[1]),
                    fmt_sig(pt.c[2]),
                    fmt_sig(pt.residual)
                ));
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(0.26248318376373436), "0.262483183764");
        assert_eq!(fmt_sig(-0.26248318376373436), "-0.262483183764");
        assert_eq!(fmt_sig(1.2345e-9), "1.2345e-9");
        assert_eq!(fmt_sig(1e-6), "1e-6");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e14");
    }
}

//! Iteration history as CSV and as a whitespace-separated gnuplot table.

use std::io::Write;

use super::IterationRecord;
use crate::error::Result;

const COLUMNS: [&str; 7] = [
    "j",
    "residual_norm",
    "objective",
    "step",
    "lcp_size",
    "sle_size",
    "sle_count",
];

/// Six significant digits in C `%.5e` style, e.g. `2.32000e+06`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.5e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn cells(r: &IterationRecord, missing: &str) -> Vec<String> {
    let mut out = vec![
        r.j.to_string(),
        format_sci(r.residual_norm),
        format_sci(r.objective),
    ];
    match r.step {
        Some(t) if r.j > 0 => {
            out.push(format_sci(t));
            out.extend([r.lcp_size, r.sle_size, r.sle_count].map(|v| v.to_string()));
        }
        _ => out.extend(std::iter::repeat_n(missing.to_owned(), 4)),
    }
    out
}

/// Header plus one line per record; the starting row shows `-` for step data.
pub fn write_history_csv<W: Write>(mut out: W, records: &[IterationRecord]) -> Result<()> {
    writeln!(out, "{}", COLUMNS.join(","))?;
    for r in records {
        writeln!(out, "{}", cells(r, "-").join(","))?;
    }
    Ok(())
}

/// Same table for gnuplot: `#` header, tab separated, `NaN` for missing cells.
pub fn write_history_dat<W: Write>(mut out: W, records: &[IterationRecord]) -> Result<()> {
    writeln!(out, "# {}", COLUMNS.join("\t"))?;
    for r in records {
        writeln!(out, "{}", cells(r, "NaN").join("\t"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::Variant;

    #[test]
    fn scientific_formatting() {
        assert_eq!(format_sci(2.32e6), "2.32000e+06");
        assert_eq!(format_sci(4.5635e-10), "4.56350e-10");
        assert_eq!(format_sci(1.0), "1.00000e+00");
        assert_eq!(format_sci(-0.5), "-5.00000e-01");
        assert_eq!(format_sci(0.0), "0.00000e+00");
        assert_eq!(format_sci(1.5e123), "1.50000e+123");
    }

    #[test]
    fn csv_layout() {
        let row = |j, step| IterationRecord {
            j,
            residual_norm: 884.61,
            objective: 105.8198,
            step,
            lcp_size: 0,
            sle_size: 6043,
            sle_count: 1,
            backtracks: 0,
            variant_active: Variant::ModBssn,
            lcp_solver: None,
        };
        let mut buf = Vec::new();
        write_history_csv(&mut buf, &[row(0, None), row(1, Some(1.0))]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "j,residual_norm,objective,step,lcp_size,sle_size,sle_count"
        );
        assert_eq!(lines[1], "0,8.84610e+02,1.05820e+02,-,-,-,-");
        assert_eq!(lines[2], "1,8.84610e+02,1.05820e+02,1.00000e+00,0,6043,1");

        let mut buf = Vec::new();
        write_history_dat(&mut buf, &[row(0, None)]).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("NaN"));
    }
}

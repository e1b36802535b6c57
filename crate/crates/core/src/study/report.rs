use std::fmt::Write;

use crate::error::{Error, Result};

use super::run::{ConvergenceTable, TableRow};

pub const CSV_HEADER: &str = "h,dofs,err_energy,err_energy_rec,err_l2_pot,err_flux,iters";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// CSV with [`CSV_HEADER`]; floats in shortest round-trip exponent form,
/// empty cells for columns that do not apply.
pub fn table_to_csv(table: &ConvergenceTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        writeln!(
            out,
            "{:e},{},{},{},{},{},{}",
            r.h,
            r.dofs,
            opt(r.err_energy),
            opt(r.err_energy_rec),
            opt(r.err_l2_pot),
            opt(r.err_flux),
            r.iters
        )
        .expect("write to string");
    }
    Ok(out)
}

/// Parses the output of [`table_to_csv`].
pub fn parse_csv(text: &str) -> Result<ConvergenceTable> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(Error::Format {
                location: "line 1".into(),
                message: format!("expected header '{CSV_HEADER}'"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let loc = || format!("line {}", i + 1);
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 7 {
            return Err(Error::Format {
                location: loc(),
                message: format!("expected 7 cells, found {}", cells.len()),
            });
        }
        let num = |k: usize| -> Result<f64> {
            cells[k].parse().map_err(|_| Error::Format {
                location: format!("{}, column {}", loc(), k + 1),
                message: format!("'{}' is not a number", cells[k]),
            })
        };
        let opt = |k: usize| -> Result<Option<f64>> {
            if cells[k].is_empty() {
                Ok(None)
            } else {
                num(k).map(Some)
            }
        };
        let int = |k: usize| -> Result<usize> {
            cells[k].parse().map_err(|_| Error::Format {
                location: format!("{}, column {}", loc(), k + 1),
                message: format!("'{}' is not a count", cells[k]),
            })
        };
        rows.push(TableRow {
            h: num(0)?,
            dofs: int(1)?,
            err_energy: opt(2)?,
            err_energy_rec: opt(3)?,
            err_l2_pot: opt(4)?,
            err_flux: opt(5)?,
            iters: int(6)?,
        });
    }
    Ok(ConvergenceTable { rows })
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 70.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Log-log plot of every error column against `h`, with slope-1 and
/// slope-2 guide lines. No external assets.
pub fn table_to_svg(table: &ConvergenceTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyData);
    }
    let points: Vec<(f64, f64)> = table
        .rows
        .iter()
        .flat_map(|r| r.errors().into_iter().flatten().map(move |e| (r.h, e)))
        .filter(|&(h, e)| h > 0.0 && e > 0.0)
        .collect();
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(h, e) in &points {
        x0 = x0.min(h.log10());
        x1 = x1.max(h.log10());
        y0 = y0.min(e.log10());
        y1 = y1.max(e.log10());
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |h: f64| MARGIN + (h.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |e: f64| HEIGHT - MARGIN - (e.log10() - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for d in (x0 as i32)..=(x1 as i32) {
        let x = px(10f64.powi(d));
        let _ = writeln!(
            w,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#,
            HEIGHT - MARGIN + 18.0
        );
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let y = py(10f64.powi(d));
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">h</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0
    );

    // guides start at the finest point and stop at the plot edge
    let anchor = points
        .iter()
        .copied()
        .fold((f64::MAX, 0.0), |a, p| if p.0 < a.0 { p } else { a });
    for (slope, dash) in [(1.0, "6,4"), (2.0, "2,4")] {
        let e = |h: f64| anchor.1 * (h / anchor.0).powf(slope);
        let top = anchor.0 * (10f64.powf(y1) / anchor.1).powf(1.0 / slope);
        let end = 10f64.powf(x1).min(top);
        let _ = writeln!(
            w,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="gray" stroke-dasharray="{dash}"/>"#,
            px(anchor.0),
            py(anchor.1),
            px(end),
            py(e(end))
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" fill="gray">slope {slope}</text>"#,
            px(end) + 4.0,
            py(e(end))
        );
    }

    let rates = table.rates();
    let mut legend = 0;
    for (k, name) in TableRow::ERROR_COLUMNS.iter().enumerate() {
        let pts: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter_map(|r| r.errors()[k].map(|e| (r.h, e)))
            .filter(|&(h, e)| h > 0.0 && e > 0.0)
            .collect();
        if pts.is_empty() {
            continue;
        }
        let color = COLORS[k];
        let path: Vec<String> = pts
            .iter()
            .map(|&(h, e)| format!("{:.1},{:.1}", px(h), py(e)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        for &(h, e) in &pts {
            let _ = writeln!(
                w,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                px(h),
                py(e)
            );
        }
        let label = match rates[k] {
            Some(r) => format!("{name} (rate {r:.2})"),
            None => name.to_string(),
        };
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{label}</text>"#,
            MARGIN + 8.0,
            MARGIN + 16.0 + 16.0 * f64::from(legend)
        );
        legend += 1;
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

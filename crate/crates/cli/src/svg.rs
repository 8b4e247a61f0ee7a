//! Polar SVG rendering of gauge sweeps.
//!
//! Consumes the CSV emitted by `rz sweep --format csv` (two-variable sweeps
//! only) and draws the boundary samples of the set and of its relaxation:
//! each ray contributes the points `gauge * direction`. For the unit disk
//! both curves coincide; any relaxation slack shows as the outer curve
//! peeling away.

use rz_core::error::Error;

struct Row {
    dir: [f64; 2],
    gauge_c: Option<f64>,
    gauge_s: Option<f64>,
}

/// Parse the sweep CSV and render a polar scatter/polyline SVG.
pub fn polar_plot_from_csv(text: &str) -> Result<String, Error> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sweep CSV".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if columns.first() != Some(&"ray_index") {
        return Err(Error::Parse(
            "malformed sweep CSV: expected a `ray_index,...` header".into(),
        ));
    }
    let dir_cols = columns
        .iter()
        .filter(|c| c.starts_with("dir_"))
        .count();
    if dir_cols != 2 {
        return Err(Error::Parse(format!(
            "polar plots need 2-variable sweeps, got {dir_cols} direction columns"
        )));
    }
    let parse_gauge = |s: &str| -> Result<Option<f64>, Error> {
        if s == "inf" {
            return Ok(None);
        }
        s.parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Parse(format!("bad gauge value `{s}`")))
    };
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::Parse(format!(
                "malformed sweep CSV row `{line}`"
            )));
        }
        let dx: f64 = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad direction `{}`", fields[1])))?;
        let dy: f64 = fields[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad direction `{}`", fields[2])))?;
        rows.push(Row {
            dir: [dx, dy],
            gauge_c: parse_gauge(fields[3])?,
            gauge_s: parse_gauge(fields[4])?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("sweep CSV has no data rows".into()));
    }
    Ok(render(&rows))
}

fn render(rows: &[Row]) -> String {
    // Sort samples by angle so the polylines trace the boundary.
    let mut indexed: Vec<(f64, &Row)> = rows
        .iter()
        .map(|r| (r.dir[1].atan2(r.dir[0]), r))
        .collect();
    indexed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let finite_max = indexed
        .iter()
        .flat_map(|(_, r)| [r.gauge_c, r.gauge_s])
        .flatten()
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let size = 480.0;
    let margin = 20.0;
    let scale = (size / 2.0 - margin) / finite_max;
    let center = size / 2.0;
    let project = |r: &Row, g: Option<f64>| -> Option<(f64, f64)> {
        let g = g?;
        Some((center + scale * g * r.dir[0], center - scale * g * r.dir[1]))
    };
    let path_of = |pick: &dyn Fn(&Row) -> Option<f64>| -> String {
        let points: Vec<String> = indexed
            .iter()
            .filter_map(|(_, r)| project(r, pick(r)))
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        points.join(" ")
    };
    let set_points = path_of(&|r: &Row| r.gauge_c);
    let relax_points = path_of(&|r: &Row| r.gauge_s);
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" ",
            "viewBox=\"0 0 {s} {s}\">\n",
            "<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n",
            "<line x1=\"0\" y1=\"{c}\" x2=\"{s}\" y2=\"{c}\" stroke=\"#ccc\"/>\n",
            "<line x1=\"{c}\" y1=\"0\" x2=\"{c}\" y2=\"{s}\" stroke=\"#ccc\"/>\n",
            "<polygon points=\"{relax}\" fill=\"none\" stroke=\"#d62728\" ",
            "stroke-width=\"1.5\"/>\n",
            "<polygon points=\"{set}\" fill=\"none\" stroke=\"#1f77b4\" ",
            "stroke-width=\"1.5\"/>\n",
            "<text x=\"8\" y=\"16\" font-size=\"12\" fill=\"#1f77b4\">set gauge</text>\n",
            "<text x=\"8\" y=\"32\" font-size=\"12\" fill=\"#d62728\">relaxation gauge</text>\n",
            "</svg>\n"
        ),
        s = size,
        c = center,
        set = set_points,
        relax = relax_points,
    )
}

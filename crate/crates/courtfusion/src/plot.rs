//! Deterministic SVG rendering of court-frame trajectories.
//!
//! The drawing is laid out in world meters: the viewBox spans the court plus
//! its boundary margin, with a legend gutter on the right. Every trajectory
//! point is clamped into the court-plus-margin box before emission, so the
//! file never references coordinates outside the declared viewBox.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geometry::{CourtModel, Point2};
use crate::tracker::{TrackState, TrajectoryRow};

/// Stroke colors cycled by `track_id % 10`; the assignment never depends on
/// draw order, so a given id keeps its color across runs.
pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Pixels per world meter in the rendered width/height attributes.
const PX_PER_M: f64 = 60.0;
/// Width of the legend strip appended to the right of the court box, meters.
const LEGEND_W: f64 = 2.4;

const CSV_HEADER: &str = "frame_index,track_id,world_x_m,world_y_m,state";

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("trajectory CSV line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
}

/// Looks up the stable stroke color for a track id.
pub fn palette_color(track_id: u64) -> &'static str {
    PALETTE[(track_id % PALETTE.len() as u64) as usize]
}

/// Parses the trajectory CSV emitted by [`crate::tracker::trajectory_csv`].
///
/// A completely blank input parses as zero rows; otherwise the first
/// non-blank line must be the schema header.
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>, PlotError> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim() != CSV_HEADER {
                return Err(PlotError::MalformedCsv {
                    line: line_no,
                    reason: format!("expected header `{CSV_HEADER}`"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(PlotError::MalformedCsv {
                line: line_no,
                reason: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let parse_err = |what: &str| PlotError::MalformedCsv {
            line: line_no,
            reason: format!("invalid {what}"),
        };
        let frame_index: u64 = fields[0].parse().map_err(|_| parse_err("frame_index"))?;
        let track_id: u64 = fields[1].parse().map_err(|_| parse_err("track_id"))?;
        let x: f64 = fields[2].parse().map_err(|_| parse_err("world_x_m"))?;
        let y: f64 = fields[3].parse().map_err(|_| parse_err("world_y_m"))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err("coordinate"));
        }
        let state = match fields[4] {
            "active" => TrackState::Active,
            "exited" => TrackState::Exited,
            other => {
                return Err(PlotError::MalformedCsv {
                    line: line_no,
                    reason: format!("unknown state `{other}`"),
                })
            }
        };
        rows.push(TrajectoryRow {
            frame_index,
            track_id,
            world: Point2::new(x, y),
            state,
        });
    }
    Ok(rows)
}

fn fmt(v: f64) -> String {
    // -0.0 would print with a sign and break byte-stable comparisons.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

/// Renders the court, net, per-id polylines, axis ticks, and legend.
///
/// Ids are drawn in ascending order; each polyline ends in a circle marker at
/// its last point, so a single-sample trajectory still renders visibly.
pub fn render_svg(court: &CourtModel, rows: &[TrajectoryRow]) -> String {
    let m = court.boundary_margin;
    let (w, l) = (court.width, court.length);
    let min_x = -m;
    let min_y = -m;
    let vb_w = w + 2.0 * m + LEGEND_W;
    let vb_h = l + 2.0 * m;
    // World y grows toward the far baseline; SVG y grows downward.
    let sy = |y: f64| l - y;
    let clamp = |p: Point2| {
        Point2::new(
            p.x.clamp(-m, w + m),
            p.y.clamp(-m, l + m),
        )
    };

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
        (vb_w * PX_PER_M).round(),
        (vb_h * PX_PER_M).round(),
        fmt(min_x),
        fmt(min_y),
        fmt(vb_w),
        fmt(vb_h)
    ));
    svg.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#fafaf7\"/>\n",
        fmt(min_x),
        fmt(min_y),
        fmt(vb_w),
        fmt(vb_h)
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\" stroke-width=\"0.05\"/>\n",
        fmt(w),
        fmt(l)
    ));
    svg.push_str(&format!(
        "  <line x1=\"0\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#777\" stroke-width=\"0.04\" stroke-dasharray=\"0.25 0.15\"/>\n",
        fmt(sy(l / 2.0)),
        fmt(w)
    ));

    // Meter ticks along the near baseline and the left sideline.
    let mut x_tick = 0.0;
    while x_tick <= w + 1e-9 {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"0.3\" text-anchor=\"middle\" fill=\"#555\">{}</text>\n",
            fmt(x_tick),
            fmt(sy(-0.38)),
            fmt(x_tick)
        ));
        x_tick += 2.0;
    }
    let mut y_tick = 0.0;
    while y_tick <= l + 1e-9 {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"0.3\" text-anchor=\"end\" fill=\"#555\">{}</text>\n",
            fmt(-0.12),
            fmt(sy(y_tick) + 0.1),
            fmt(y_tick)
        ));
        y_tick += 2.0;
    }

    let mut by_id: BTreeMap<u64, Vec<&TrajectoryRow>> = BTreeMap::new();
    for row in rows {
        by_id.entry(row.track_id).or_default().push(row);
    }

    for (i, (&id, id_rows)) in by_id.iter_mut().enumerate() {
        id_rows.sort_by_key(|r| r.frame_index);
        let color = palette_color(id);
        let points: Vec<String> = id_rows
            .iter()
            .map(|r| {
                let p = clamp(r.world);
                format!("{},{}", fmt(p.x), fmt(sy(p.y)))
            })
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"0.06\" points=\"{}\"/>\n",
            color,
            points.join(" ")
        ));
        let last = clamp(id_rows.last().expect("group is nonempty").world);
        svg.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"0.12\" fill=\"{}\"/>\n",
            fmt(last.x),
            fmt(sy(last.y)),
            color
        ));

        let legend_x = w + m + 0.3;
        let legend_y = min_y + 0.6 + 0.55 * i as f64;
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"0.08\"/>\n",
            fmt(legend_x),
            fmt(legend_y),
            fmt(legend_x + 0.5),
            fmt(legend_y),
            color
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"0.32\" fill=\"#222\">id {}</text>\n",
            fmt(legend_x + 0.65),
            fmt(legend_y + 0.11),
            id
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

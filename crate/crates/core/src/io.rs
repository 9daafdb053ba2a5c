//! CSV and JSON exchange formats.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce identical bytes.

use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::contact::{ContactReport, SampledMap};
use crate::error::{Error, Result};
use crate::horizontal::HorizontalPolyline;
use crate::measure::{BallCovering, DecayTable};

/// `x1,y1,…,xn,yn,t`.
pub fn coordinate_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=n).flat_map(|j| [format!("x{j}"), format!("y{j}")]).collect();
    h.push("t".into());
    h
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

pub fn write_curve_csv<W: Write>(w: W, curve: &HorizontalPolyline) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(coordinate_header(curve.n()))?;
    for p in curve.samples() {
        out.write_record(p.coords().into_iter().map(fmt))?;
    }
    out.flush()?;
    Ok(())
}

/// Curve JSON: `{"samples": [HPoint, …], "closed": bool}`.
pub fn write_curve_json<W: Write>(w: W, curve: &HorizontalPolyline) -> Result<()> {
    serde_json::to_writer_pretty(w, curve)?;
    Ok(())
}

/// Reads curve JSON and re-validates horizontality.
pub fn read_curve_json<R: Read>(r: R) -> Result<HorizontalPolyline> {
    let raw: HorizontalPolyline = serde_json::from_reader(r)?;
    let closed = raw.is_closed();
    HorizontalPolyline::new(raw.into_samples(), closed)
}

/// Report CSV: `idx,residual,rank,isotropy_defect`, the grid index written
/// as `i1:i2:…`; rank and defect are empty at non-contact points.
pub fn write_report_csv<W: Write>(w: W, m: &SampledMap, report: &ContactReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["idx", "residual", "rank", "isotropy_defect"])?;
    for p in &report.points {
        let idx = m
            .multi_index(p.index)
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(":");
        out.write_record([
            idx,
            fmt(p.residual),
            p.rank.map(|r| r.to_string()).unwrap_or_default(),
            p.isotropy_defect.map(fmt).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Covering CSV: center coordinates then `radius`.
pub fn write_covering_csv<W: Write>(w: W, covering: &BallCovering) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let n = covering.balls.first().map_or(1, |b| b.center.n());
    let mut header = coordinate_header(n);
    header.push("radius".into());
    out.write_record(&header)?;
    for b in &covering.balls {
        let mut row: Vec<String> = b.center.coords().into_iter().map(fmt).collect();
        row.push(fmt(b.radius));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Decay table CSV: `mdiv,balls,max_radius,content,c_observed,log_residual`.
pub fn write_decay_csv<W: Write>(w: W, table: &DecayTable) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["mdiv", "balls", "max_radius", "content", "c_observed", "log_residual"])?;
    for (r, res) in table.rows.iter().zip(&table.residuals) {
        out.write_record([
            r.mdiv.to_string(),
            r.balls.to_string(),
            fmt(r.max_radius),
            fmt(r.content),
            fmt(r.c_observed),
            fmt(*res),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Sidecar for a decay table: configuration and fitted constants.
#[derive(Debug, Serialize)]
pub struct DecaySidecar<'a> {
    pub config: &'a crate::measure::DecayConfig,
    pub lipschitz: f64,
    pub side: f64,
    pub slope: f64,
    pub expected_slope: f64,
    pub c_max: f64,
}

impl<'a> From<&'a DecayTable> for DecaySidecar<'a> {
    fn from(t: &'a DecayTable) -> Self {
        DecaySidecar {
            config: &t.config,
            lipschitz: t.lipschitz,
            side: t.side,
            slope: t.slope,
            expected_slope: t.config.j as f64 - t.config.k as f64,
            c_max: t.c_max,
        }
    }
}

/// `path` with its extension replaced by `json`.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("json")
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Opens `path` for buffered writing.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::rank_report;
    use crate::exec::Exec;
    use crate::heisenberg::HPoint;
    use crate::horizontal::{horizontal_lift, PlanarPolyline};
    use crate::measure::Ball;

    fn square() -> HorizontalPolyline {
        let c = PlanarPolyline::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            false,
        )
        .unwrap();
        horizontal_lift(&c, 0.5)
    }

    #[test]
    fn curve_csv() {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &square()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x1,y1,t");
        assert_eq!(text.lines().nth(4).unwrap(), "0,1,-3.5");
        assert_eq!(coordinate_header(2).join(","), "x1,y1,x2,y2,t");
    }

    #[test]
    fn curve_json_roundtrip() {
        let mut buf = Vec::new();
        write_curve_json(&mut buf, &square()).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["closed"], false);
        assert_eq!(v["samples"][1]["z"], serde_json::json!([1.0, 0.0]));
        assert_eq!(read_curve_json(buf.as_slice()).unwrap(), square());
        let bad = br#"{"samples":[{"n":1,"z":[0,0],"t":0},{"n":1,"z":[1,0],"t":1}],"closed":false}"#;
        assert!(read_curve_json(&bad[..]).is_err());
    }

    #[test]
    fn report_csv() {
        let m = SampledMap::from_fn(1, vec![[0.0, 1.0]; 2], vec![5, 5], Exec::Sequential, |x| {
            vec![x[0], x[1], 0.0]
        })
        .unwrap();
        let r = rank_report(&m, 1.0, 1e-8);
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &m, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "idx,residual,rank,isotropy_defect");
        assert!(lines.next().unwrap().starts_with("1:1,"));
        assert_eq!(text.lines().count(), 1 + 9);
    }

    #[test]
    fn covering_csv() {
        let cov = BallCovering {
            balls: vec![Ball {
                center: HPoint::new(vec![0.5, 0.0], 0.25).unwrap(),
                radius: 0.5,
            }],
            s: 1.0,
        };
        let mut buf = Vec::new();
        write_covering_csv(&mut buf, &cov).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x1,y1,t,radius\n0.5,0,0.25,0.5\n");
    }
}

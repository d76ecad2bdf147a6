//! CSV and SVG output for benchmark records.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::fit::FitResult;
use crate::sweep::{BenchRecord, Measurement, Mode};
use crate::BenchError;

pub const CSV_HEADER: [&str; 6] = ["n", "workers", "mode", "rep", "seed", "value"];

fn value_field(m: &Measurement) -> String {
    match m {
        Measurement::Seconds(s) => format!("{s:?}"),
        Measurement::Steps(s) => s.to_string(),
        Measurement::Failed(why) => format!("failed: {why}"),
    }
}

pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.workers.to_string(),
            r.mode.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            value_field(&r.value),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| BenchError::Parse(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(BenchError::Parse(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| BenchError::Parse(e.to_string()))?;
        let line = i + 2;
        let field = |k: usize| row.get(k).unwrap_or_default();
        let bad = |what: &str| BenchError::Parse(format!("line {line}: bad {what}"));
        let mode: Mode = field(2).parse()?;
        let raw = field(5);
        let value = if let Some(why) = raw.strip_prefix("failed") {
            Measurement::Failed(why.trim_start_matches(':').trim_start().to_string())
        } else if mode == Mode::Model {
            Measurement::Steps(raw.parse().map_err(|_| bad("value"))?)
        } else {
            Measurement::Seconds(raw.parse().map_err(|_| bad("value"))?)
        };
        out.push(BenchRecord {
            n: field(0).parse().map_err(|_| bad("n"))?,
            workers: field(1).parse().map_err(|_| bad("workers"))?,
            mode,
            rep: field(3).parse().map_err(|_| bad("rep"))?,
            seed: field(4).parse().map_err(|_| bad("seed"))?,
            value,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesKey {
    pub mode: Mode,
    pub workers: usize,
}

impl SeriesKey {
    pub fn label(&self) -> String {
        format!("{} w={}", self.mode, self.workers)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint {
    pub n: usize,
    pub mean: f64,
    pub reps: usize,
}

/// Arithmetic mean of the successful repetitions of every
/// `(mode, workers, n)` cell, grouped by series and sorted by `n`.
pub fn aggregate(records: &[BenchRecord]) -> BTreeMap<SeriesKey, Vec<SeriesPoint>> {
    let mut cells: BTreeMap<(SeriesKey, usize), (f64, usize)> = BTreeMap::new();
    for r in records {
        if let Some(v) = r.value.value() {
            let key = SeriesKey {
                mode: r.mode,
                workers: r.workers,
            };
            let cell = cells.entry((key, r.n)).or_default();
            cell.0 += v;
            cell.1 += 1;
        }
    }
    let mut out: BTreeMap<SeriesKey, Vec<SeriesPoint>> = BTreeMap::new();
    for ((key, n), (sum, reps)) in cells {
        out.entry(key).or_default().push(SeriesPoint {
            n,
            mean: sum / reps as f64,
            reps,
        });
    }
    out
}

/// `(n, mean)` pairs of one series, ready for `fit_exponent`.
pub fn series_points(points: &[SeriesPoint]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.n as f64, p.mean)).collect()
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
pub const REFERENCE_SLOPES: [u32; 4] = [1, 2, 3, 4];

struct LogAxis {
    lo: f64,
    hi: f64,
    start: f64,
    len: f64,
    flip: bool,
}

impl LogAxis {
    fn new(min: f64, max: f64, start: f64, len: f64, flip: bool) -> Self {
        let (mut lo, mut hi) = (min.ln(), max.ln());
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = (hi - lo) * 0.05;
        Self {
            lo: lo - pad,
            hi: hi + pad,
            start,
            len,
            flip,
        }
    }

    fn map(&self, v: f64) -> f64 {
        let t = (v.ln() - self.lo) / (self.hi - self.lo);
        if self.flip {
            self.start + self.len * (1.0 - t)
        } else {
            self.start + self.len * t
        }
    }

    fn decades(&self) -> impl Iterator<Item = f64> + '_ {
        let first = (self.lo / std::f64::consts::LN_10).ceil() as i32;
        let last = (self.hi / std::f64::consts::LN_10).floor() as i32;
        (first..=last).map(|e| 10f64.powi(e))
    }
}

/// Log-log chart with one polyline per `(mode, workers)` series and dashed
/// power-law references of slope 1 to 4 anchored at the first plotted point.
pub fn emit_plot(
    records: &[BenchRecord],
    fits: &BTreeMap<SeriesKey, FitResult>,
) -> Result<String, BenchError> {
    let series = aggregate(records);
    if series.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let all = || series.values().flatten();
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&SeriesPoint) -> f64| {
        all().map(pick).fold(init, f)
    };
    let (n_min, n_max) = (
        fold(f64::min, f64::INFINITY, |p| p.n as f64),
        fold(f64::max, 0.0, |p| p.n as f64),
    );
    let (y_min, y_max) = (
        fold(f64::min, f64::INFINITY, |p| p.mean),
        fold(f64::max, 0.0, |p| p.mean),
    );

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = LogAxis::new(n_min, n_max, LEFT, plot_w, false);
    let y = LogAxis::new(y_min, y_max, TOP, plot_h, true);

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<defs><clipPath id="plot-area"><rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}"/></clipPath></defs>"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        w,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##
    )
    .unwrap();

    for v in x.decades() {
        let px = x.map(v);
        writeln!(
            w,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            TOP + plot_h
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{v:e}</text>"#,
            TOP + plot_h + 18.0
        )
        .unwrap();
    }
    for v in y.decades() {
        let py = y.map(v);
        writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/>"##,
            LEFT + plot_w
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:e}</text>"#,
            LEFT - 6.0,
            py + 4.0
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n (points)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">mean time (s) or model steps</text>"#,
        TOP + plot_h / 2.0
    )
    .unwrap();

    let anchor = series
        .values()
        .next()
        .and_then(|s| s.first())
        .copied()
        .unwrap();
    writeln!(w, r#"<g clip-path="url(#plot-area)">"#).unwrap();
    for k in REFERENCE_SLOPES {
        let at = |n: f64| anchor.mean * (n / anchor.n as f64).powi(k as i32);
        writeln!(
            w,
            r##"<path class="reference" data-slope="{k}" d="M {:.3} {:.3} L {:.3} {:.3}" stroke="#999" stroke-dasharray="4 4" fill="none"/>"##,
            x.map(n_min),
            y.map(at(n_min)),
            x.map(n_max),
            y.map(at(n_max)),
        )
        .unwrap();
    }
    for (i, (key, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let d: Vec<String> = points
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let cmd = if j == 0 { 'M' } else { 'L' };
                format!("{cmd} {:.3} {:.3}", x.map(p.n as f64), y.map(p.mean))
            })
            .collect();
        writeln!(
            w,
            r#"<path class="series" data-mode="{}" data-workers="{}" d="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            key.mode,
            key.workers,
            d.join(" ")
        )
        .unwrap();
        for p in points {
            writeln!(
                w,
                r#"<circle class="point" data-mode="{}" data-workers="{}" cx="{:.3}" cy="{:.3}" r="3" fill="{color}"/>"#,
                key.mode,
                key.workers,
                x.map(p.n as f64),
                y.map(p.mean)
            )
            .unwrap();
        }
    }
    writeln!(w, "</g>").unwrap();

    let lx = WIDTH - RIGHT + 16.0;
    for (i, key) in series.keys().enumerate() {
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let label = match fits.get(key) {
            Some(fit) => format!("{} (slope {:.2})", key.label(), fit.slope),
            None => key.label(),
        };
        writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}">{label}</text>"#,
            lx + 26.0,
            ly + 4.0
        )
        .unwrap();
    }
    let ly = TOP + 14.0 + 18.0 * series.len() as f64;
    writeln!(w, r##"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="#999" stroke-dasharray="4 4"/>"##, lx + 20.0).unwrap();
    writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}">n^1 .. n^4</text>"#,
        lx + 26.0,
        ly + 4.0
    )
    .unwrap();
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize, workers: usize, mode: Mode, rep: usize, value: Measurement) -> BenchRecord {
        BenchRecord {
            n,
            workers,
            mode,
            rep,
            seed: 17,
            value,
        }
    }

    #[test]
    fn single_record_csv() {
        let csv = emit_csv(&[rec(10, 1, Mode::Seq, 1, Measurement::Seconds(0.25))]);
        assert_eq!(csv, "n,workers,mode,rep,seed,value\n10,1,seq,1,17,0.25\n");
        assert_eq!(emit_csv(&[]), "n,workers,mode,rep,seed,value\n");
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![
            rec(10, 1, Mode::Seq, 1, Measurement::Seconds(1.0 / 3.0)),
            rec(10, 2, Mode::Par, 2, Measurement::Seconds(2.5e-7)),
            rec(64, 1, Mode::Model, 1, Measurement::Steps(u64::MAX)),
            rec(
                1,
                1,
                Mode::Model,
                1,
                Measurement::Failed("degenerate input, n=1".into()),
            ),
        ];
        assert_eq!(parse_csv(&emit_csv(&recs)).unwrap(), recs);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
        assert!(parse_csv("n,workers,mode,rep,seed,value\nx,1,seq,1,0,1.0\n").is_err());
        assert!(parse_csv("n,workers,mode,rep,seed,value\n1,1,warp,1,0,1.0\n").is_err());
    }

    #[test]
    fn duplicates_average() {
        let recs = vec![
            rec(10, 1, Mode::Seq, 1, Measurement::Seconds(1.0)),
            rec(10, 1, Mode::Seq, 2, Measurement::Seconds(3.0)),
            rec(10, 1, Mode::Seq, 3, Measurement::Failed("oom".into())),
            rec(20, 1, Mode::Seq, 1, Measurement::Seconds(8.0)),
        ];
        let agg = aggregate(&recs);
        let s = &agg[&SeriesKey {
            mode: Mode::Seq,
            workers: 1,
        }];
        assert_eq!(s.len(), 2);
        assert_eq!(
            s[0],
            SeriesPoint {
                n: 10,
                mean: 2.0,
                reps: 2
            }
        );
        let svg = emit_plot(&recs, &BTreeMap::new()).unwrap();
        assert_eq!(svg.matches(r#"<circle class="point""#).count(), 2);
    }

    #[test]
    fn one_path_per_series() {
        let recs = vec![
            rec(10, 1, Mode::Par, 1, Measurement::Seconds(1.0)),
            rec(20, 1, Mode::Par, 1, Measurement::Seconds(4.0)),
            rec(10, 2, Mode::Par, 1, Measurement::Seconds(0.6)),
            rec(20, 2, Mode::Par, 1, Measurement::Seconds(2.2)),
        ];
        let svg = emit_plot(&recs, &BTreeMap::new()).unwrap();
        assert_eq!(svg.matches(r#"class="series""#).count(), 2);
        assert!(svg.contains(r#"data-mode="par" data-workers="2""#));
        assert_eq!(svg.matches(r#"class="reference""#).count(), 4);
    }

    #[test]
    fn empty_plot_is_an_error() {
        assert!(matches!(
            emit_plot(&[], &BTreeMap::new()),
            Err(BenchError::EmptyInput)
        ));
        let failed = [rec(5, 1, Mode::Seq, 1, Measurement::Failed("x".into()))];
        assert!(emit_plot(&failed, &BTreeMap::new()).is_err());
    }
}

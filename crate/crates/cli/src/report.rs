//! CSV and text renderings of per-scheme results. Column order is fixed and
//! undefined metrics are written as empty fields.

use std::fmt::Write as _;

use drastic_core::classification::ClassBreaks;
use drastic_core::index::{AreaSummary, Scheme};
use drastic_core::mcda::Consistency;
use drastic_core::validation::{RocResult, ZoneMetrics};

pub const REPORT_HEADER: [&str; 8] = [
    "scheme",
    "auc",
    "n_pos",
    "n_neg",
    "pct_high_area",
    "pct_pos_in_high",
    "pct_neg_in_low",
    "n_skipped",
];

#[derive(Debug, Clone)]
pub struct SchemeResult {
    pub scheme: Scheme,
    /// Parameter and weight as applied to the ratings.
    pub weights: Vec<(String, f64)>,
    pub consistency: Option<Consistency>,
    pub breaks: ClassBreaks,
    pub areas: AreaSummary,
    pub zones: ZoneMetrics,
    /// Present when wells were supplied and both outcomes occur among them.
    pub roc: Option<RocResult>,
    /// Wells were supplied for this run.
    pub validated: bool,
    pub wells_skipped: usize,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn report_csv(results: &[SchemeResult]) -> String {
    csv_string(
        &REPORT_HEADER,
        results.iter().map(|r| {
            let v = r.validated;
            vec![
                r.scheme.to_string(),
                opt(r.roc.as_ref().map(|x| x.auc)),
                opt(v.then_some(r.zones.n_pos)),
                opt(v.then_some(r.zones.n_neg)),
                r.zones.pct_high_area.to_string(),
                opt(r.zones.pct_pos_in_high.filter(|_| v)),
                opt(r.zones.pct_neg_in_low.filter(|_| v)),
                opt(v.then_some(r.wells_skipped)),
            ]
        }),
    )
}

pub fn areas_csv(scheme: Scheme, breaks: &ClassBreaks, areas: &AreaSummary) -> String {
    csv_string(
        &["scheme", "class", "label", "cells", "percent"],
        areas.rows.iter().map(|a| {
            vec![
                scheme.to_string(),
                a.class.to_string(),
                breaks.label(a.class).unwrap_or_default().to_string(),
                a.cells.to_string(),
                a.percent.to_string(),
            ]
        }),
    )
}

/// The first row is the origin, with threshold `inf`.
pub fn roc_csv(roc: &RocResult) -> String {
    csv_string(
        &["threshold", "fpr", "tpr"],
        roc.points
            .iter()
            .map(|p| vec![p.threshold.to_string(), p.fpr.to_string(), p.tpr.to_string()]),
    )
}

pub fn weights_csv(results: &[SchemeResult]) -> String {
    csv_string(
        &["scheme", "parameter", "weight"],
        results.iter().flat_map(|r| {
            r.weights
                .iter()
                .map(|(l, w)| vec![r.scheme.to_string(), l.clone(), w.to_string()])
                .collect::<Vec<_>>()
        }),
    )
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.1}")).unwrap_or_else(|| "-".into())
}

pub fn report_text(results: &[SchemeResult]) -> String {
    let mut s = String::new();
    writeln!(s, "Groundwater vulnerability report").unwrap();
    writeln!(s).unwrap();
    writeln!(
        s,
        "{:<14}{:>4}{:>8}{:>6}{:>6}{:>10}{:>12}{:>11}{:>9}",
        "scheme", "k", "AUC", "pos", "neg", "high %", "pos high %", "neg low %", "skipped"
    )
    .unwrap();
    for r in results {
        let v = r.validated;
        let count = |n: usize| if v { n.to_string() } else { "-".into() };
        writeln!(
            s,
            "{:<14}{:>4}{:>8}{:>6}{:>6}{:>10.1}{:>12}{:>11}{:>9}",
            r.scheme.name(),
            r.breaks.k(),
            r.roc.as_ref().map(|x| format!("{:.4}", x.auc)).unwrap_or_else(|| "-".into()),
            count(r.zones.n_pos),
            count(r.zones.n_neg),
            r.zones.pct_high_area,
            pct(r.zones.pct_pos_in_high.filter(|_| v)),
            pct(r.zones.pct_neg_in_low.filter(|_| v)),
            count(r.wells_skipped),
        )
        .unwrap();
    }
    for r in results {
        writeln!(s).unwrap();
        writeln!(s, "[{}]", r.scheme.name()).unwrap();
        let w: Vec<String> = r
            .weights
            .iter()
            .map(|(l, w)| format!("{l}={}", trim(*w)))
            .collect();
        writeln!(s, "weights: {}", w.join(" ")).unwrap();
        if let Some(c) = &r.consistency {
            writeln!(
                s,
                "consistency: lambda_max={:.4} CI={:.4} CR={:.4} ({})",
                c.lambda_max,
                c.ci,
                c.cr,
                if c.acceptable { "acceptable" } else { "NOT acceptable" }
            )
            .unwrap();
        }
        let b: Vec<String> = r.breaks.breaks.iter().map(|x| trim(*x)).collect();
        writeln!(s, "breaks: {}", if b.is_empty() { "-".into() } else { b.join(" ") }).unwrap();
        for a in &r.areas.rows {
            writeln!(
                s,
                "  class {} {:<10} {:>8} cells {:>6.2}%",
                a.class,
                r.breaks.label(a.class).unwrap_or_default(),
                a.cells,
                a.percent
            )
            .unwrap();
        }
    }
    s
}

fn trim(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(scheme: Scheme, validated: bool) -> SchemeResult {
        SchemeResult {
            scheme,
            weights: vec![("a".into(), 0.25), ("b".into(), 0.75)],
            consistency: None,
            breaks: ClassBreaks::with_default_labels(vec![10.0]).unwrap(),
            areas: AreaSummary {
                rows: vec![],
                valid_cells: 0,
            },
            zones: ZoneMetrics {
                pct_high_area: 40.0,
                pct_pos_in_high: None,
                pct_pos_outside_high: None,
                pct_neg_in_low: Some(75.0),
                n_pos: 0,
                n_neg: 4,
                skipped: 1,
            },
            roc: None,
            validated,
            wells_skipped: 1,
        }
    }

    #[test]
    fn undefined_metrics_are_empty() {
        let csv = report_csv(&[result(Scheme::DrasticLu, true)]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "scheme,auc,n_pos,n_neg,pct_high_area,pct_pos_in_high,pct_neg_in_low,n_skipped"
        );
        assert_eq!(lines.next().unwrap(), "drastic_lu,,0,4,40,,75,1");
        assert!(lines.next().is_none());
    }

    #[test]
    fn without_wells_only_area_is_reported() {
        let csv = report_csv(&[result(Scheme::Drastic, false), result(Scheme::AhpLu, false)]);
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows, ["drastic,,,,40,,,", "ahp_lu,,,,40,,,"]);
    }

    #[test]
    fn weights_rows() {
        let csv = weights_csv(&[result(Scheme::AhpLu, false)]);
        assert_eq!(csv, "scheme,parameter,weight\nahp_lu,a,0.25\nahp_lu,b,0.75\n");
    }

    #[test]
    fn text_mentions_every_scheme() {
        let t = report_text(&[result(Scheme::Drastic, false), result(Scheme::FuzzyAhpLu, true)]);
        assert!(t.contains("[drastic]") && t.contains("[fuzzy_ahp_lu]"));
        assert!(t.contains("weights: a=0.25 b=0.75"));
    }
}

//! JSON and CSV emitters for search reports.

use std::io::Write;

use serde::Serialize;

use crate::interval::Interval;
use crate::reduction::PlanSummary;
use crate::scalar::Endpoint;
use crate::search::{IterationStats, SearchBox, SearchReport, SliceReport, VerdictKind};

#[derive(Serialize)]
#[serde(bound = "")]
struct WitnessJson<'a, T: Endpoint> {
    sigma: Interval<T>,
    thetas: &'a [Interval<T>],
    depth: u32,
}

impl<'a, T: Endpoint> From<&'a SearchBox<T>> for WitnessJson<'a, T> {
    fn from(b: &'a SearchBox<T>) -> Self {
        Self { sigma: b.sigma, thetas: b.thetas.values(), depth: b.depth }
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct SliceJson<'a, T: Endpoint> {
    sigma: Interval<T>,
    verdict: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessJson<'a, T>>,
    stats: &'a [IterationStats],
    seconds: f64,
}

#[derive(Serialize)]
#[serde(bound = "")]
struct SearchJson<'a, T: Endpoint> {
    n: u64,
    plan: &'a PlanSummary,
    slices: Vec<SliceJson<'a, T>>,
    verdict: VerdictKind,
}

fn slice_json<T: Endpoint>(s: &SliceReport<T>) -> SliceJson<'_, T> {
    SliceJson {
        sigma: s.sigma,
        verdict: s.verdict.kind,
        witness: s.verdict.witness.as_ref().map(WitnessJson::from),
        stats: &s.stats,
        seconds: s.seconds,
    }
}

fn search_json<T: Endpoint>(r: &SearchReport<T>) -> SearchJson<'_, T> {
    SearchJson { n: r.n, plan: &r.plan, slices: r.slices.iter().map(slice_json).collect(), verdict: r.verdict }
}

#[derive(Serialize)]
#[serde(bound = "C: Serialize")]
struct Document<'a, C: Serialize, T: Endpoint> {
    config: &'a C,
    reports: Vec<SearchJson<'a, T>>,
}

/// Pretty JSON document: `{ "config": ..., "reports": [...] }`.
pub fn to_json<C: Serialize, T: Endpoint>(config: &C, reports: &[SearchReport<T>]) -> serde_json::Result<String> {
    let doc = Document { config, reports: reports.iter().map(search_json).collect() };
    let mut out = serde_json::to_string_pretty(&doc)?;
    out.push('\n');
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow {
    n: u64,
    slice_lo: f64,
    slice_hi: f64,
    depth: u32,
    boxes: u64,
    coverage_pct: f64,
}

/// One row per (N, slice, depth): `n,slice_lo,slice_hi,depth,boxes,coverage_pct`.
pub fn write_csv<W: Write, T: Endpoint>(writer: W, reports: &[SearchReport<T>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in reports {
        for s in &r.slices {
            for st in &s.stats {
                w.serialize(CsvRow {
                    n: r.n,
                    slice_lo: s.sigma.lo().to_f64_exact(),
                    slice_hi: s.sigma.hi().to_f64_exact(),
                    depth: st.depth,
                    boxes: st.boxes_created,
                    coverage_pct: st.coverage_percent,
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

//! Report shapes shared by every subcommand.
//!
//! One run produces one JSON document on stdout. `--pretty` renders the
//! same data as a table for humans and is never parsed back; golden
//! comparisons use the JSON with `elapsed_seconds` masked out.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// `file:PATH` or `synthetic:SPEC`, echoed exactly as given.
    pub input: String,
    pub seed: u64,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_passed: Option<bool>,
}

/// One construction's outcome. Optional fields are omitted from the JSON
/// when the method has nothing honest to put there — a CUR skeleton has no
/// idempotency defects, a direct Nyström evaluation has no detected rank.
#[derive(Debug, Serialize)]
pub struct MethodRecord {
    pub method: String,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oversample: Option<usize>,
    pub residual_rel: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idem_defect_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idem_defect_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detected_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation_from_identity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub structural_checks_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<TrialSummary>,
    pub elapsed_seconds: f64,
}

/// Aggregate over seeded trials, ordered by trial index. `baseline_rel`
/// is the truncated-SVD residual at the same rank — the best any rank-k
/// method could do.
#[derive(Debug, Serialize)]
pub struct TrialSummary {
    pub count: usize,
    pub residuals: Vec<f64>,
    pub median_rel: f64,
    pub min_rel: f64,
    pub max_rel: f64,
    pub baseline_rel: f64,
}

/// One verification row. Boolean conditions (the rank-reduction suite)
/// carry no measured value or threshold, only the verdict.
#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub passed: bool,
}

pub fn trial_summary(residuals: &[f64], baseline_rel: f64) -> TrialSummary {
    let mut sorted = residuals.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let median_rel = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    TrialSummary {
        count: n,
        residuals: residuals.to_vec(),
        median_rel,
        min_rel: sorted[0],
        max_rel: sorted[n - 1],
        baseline_rel,
    }
}

pub fn emit(report: &RunReport, pretty: bool) {
    assert!(report_is_finite(report), "report contains a non-finite number; this is a bug");
    if pretty {
        print!("{}", render_pretty(report));
    } else {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    }
}

fn report_is_finite(report: &RunReport) -> bool {
    let opt = |x: Option<f64>| x.map_or(true, f64::is_finite);
    report.methods.iter().all(|m| {
        m.residual_rel.is_finite()
            && opt(m.idem_defect_p)
            && opt(m.idem_defect_r)
            && opt(m.deviation_from_identity)
            && m.trials.as_ref().map_or(true, |t| {
                t.residuals.iter().all(|r| r.is_finite())
                    && t.median_rel.is_finite()
                    && t.baseline_rel.is_finite()
            })
    }) && report.checks.iter().all(|c| opt(c.measured) && opt(c.threshold))
}

fn render_pretty(report: &RunReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "metafact {} — {}", report.tool_version, report.command);
    let _ = writeln!(out, "  input: {}", report.input);
    let _ = writeln!(out, "  seed:  {}", report.seed);
    for m in &report.methods {
        let _ = writeln!(out, "  method {} (k = {})", m.method, m.k);
        if let Some(p) = m.oversample {
            let _ = writeln!(out, "    oversample          {p}");
        }
        let _ = writeln!(out, "    residual_rel        {:.3e}", m.residual_rel);
        if let (Some(dp), Some(dr)) = (m.idem_defect_p, m.idem_defect_r) {
            let _ = writeln!(out, "    idem defects        {dp:.3e} / {dr:.3e}");
        }
        if let Some(r) = m.detected_rank {
            let _ = writeln!(out, "    detected rank       {r}");
        }
        if let Some(d) = m.deviation_from_identity {
            let _ = writeln!(out, "    deviation from I    {d:.3e}");
        }
        if let Some(s) = m.steps {
            let _ = writeln!(out, "    steps               {s}");
        }
        let _ = writeln!(
            out,
            "    structural checks   {}",
            if m.structural_checks_passed { "ok" } else { "FAILED" }
        );
        if let Some(t) = &m.trials {
            let _ = writeln!(
                out,
                "    trials              {} (median {:.3e}, min {:.3e}, max {:.3e})",
                t.count, t.median_rel, t.min_rel, t.max_rel
            );
            let _ = writeln!(out, "    svd baseline        {:.3e}", t.baseline_rel);
        }
        let _ = writeln!(out, "    elapsed             {:.3}s", m.elapsed_seconds);
    }
    for c in &report.checks {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        match (c.measured, c.threshold) {
            (Some(v), Some(t)) => {
                let _ = writeln!(out, "  [{verdict}] {:32} {v:.3e} vs {t:.3e}", c.check);
            }
            _ => {
                let _ = writeln!(out, "  [{verdict}] {}", c.check);
            }
        }
    }
    if let Some(all) = report.all_passed {
        let _ = writeln!(out, "  overall: {}", if all { "all checks passed" } else { "FAILURES" });
    }
    out
}

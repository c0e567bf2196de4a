//! JSON and plain-text renderings of core results.

use std::fmt::Write as _;

use contraction_core::certify::{PairEvaluation, PhiCheckNote};
use contraction_core::metric::AxiomViolation;
use contraction_core::phi::{EvidenceMode, Phi2Evidence};
use contraction_core::picard::TheoremVerdict;
use contraction_core::scalar::to_decimal;
use contraction_core::{
    CertificationReport, ClassOutcome, ComparisonReport, ContractionSpec, FixPointReport,
    IterationTrace, MetricReport, MetricSpace, OrbitStats, PointId, Rational, Scalar,
    TheoremReport, TraceStatus,
};
use serde_json::{json, Map, Value};

/// Digits after the decimal point in human-facing decimals.
pub const DECIMALS: usize = 6;

/// Process exit status: 0 success or certified, 1 violated or unmet expectation, 2 error
/// or indeterminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Success = 0,
    Failure = 1,
    Error = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A finished command result in both output formats.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub json: Value,
    pub text: String,
    pub status: Status,
}

impl Rendered {
    pub fn new(json: Value, text: String, status: Status) -> Self {
        Self { json, text, status }
    }

    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            self.text.clone()
        } else {
            let mut s = serde_json::to_string_pretty(&self.json).expect("plain data");
            s.push('\n');
            s
        }
    }
}

pub fn scalar_json(value: &Scalar) -> Value {
    match value {
        Scalar::Exact(r) => Value::String(r.to_string()),
        Scalar::Approx(i) => json!({
            "lower": i.lower().to_string(),
            "upper": i.upper().to_string(),
            "approx": to_decimal(&value.midpoint(), DECIMALS),
        }),
    }
}

pub fn scalar_text(value: &Scalar) -> String {
    match value {
        Scalar::Exact(r) if r.is_integer() => r.to_string(),
        Scalar::Exact(r) => format!("{r} (≈{})", to_decimal(r, DECIMALS)),
        Scalar::Approx(_) => format!("≈{}", value.to_decimal(DECIMALS)),
    }
}

fn labels(space: &MetricSpace, points: &[PointId]) -> Vec<String> {
    points.iter().map(|&p| space.label(p).to_string()).collect()
}

pub fn spec_json(spec: &ContractionSpec) -> Value {
    let c = spec.coefficients();
    let mut out = Map::new();
    out.insert("variant".into(), Value::String(spec.kind().name().into()));
    for (name, value) in [
        ("alpha", c.alpha),
        ("beta", c.beta),
        ("gamma", c.gamma),
        ("delta", c.delta),
        ("mu", c.mu),
    ] {
        if let Some(v) = value {
            out.insert(name.into(), Value::String(v.to_string()));
        }
    }
    Value::Object(out)
}

pub fn spec_text(spec: &ContractionSpec) -> String {
    let c = spec.coefficients();
    let parts: Vec<String> = [
        ("α", c.alpha),
        ("β", c.beta),
        ("γ", c.gamma),
        ("δ", c.delta),
        ("μ", c.mu),
    ]
    .into_iter()
    .filter_map(|(n, v)| v.map(|v| format!("{n}={v}")))
    .collect();
    if parts.is_empty() {
        spec.kind().name().to_string()
    } else {
        format!("{} ({})", spec.kind().name(), parts.join(", "))
    }
}

pub fn metric_json(space: &MetricSpace, report: &MetricReport) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| axiom_json(space, v))
        .collect();
    json!({
        "points": space.len(),
        "window_note": space.window_note(),
        "passed": report.passed(),
        "violations": violations,
    })
}

fn axiom_json(space: &MetricSpace, v: &AxiomViolation) -> Value {
    let l = |p: &PointId| space.label(*p).to_string();
    match v {
        AxiomViolation::NonzeroSelfDistance(p) => json!({"axiom": "identity", "points": [l(p)]}),
        AxiomViolation::ZeroSeparation(a, b) => {
            json!({"axiom": "separation", "points": [l(a), l(b)]})
        }
        AxiomViolation::Asymmetry(a, b) => json!({"axiom": "symmetry", "points": [l(a), l(b)]}),
        AxiomViolation::Triangle(a, b, c) => {
            json!({"axiom": "triangle", "points": [l(a), l(b), l(c)]})
        }
    }
}

pub fn metric_text(space: &MetricSpace, report: &MetricReport) -> String {
    let mut s = format!(
        "{}\nmetric axioms: {}\n",
        space.window_note(),
        if report.passed() { "pass" } else { "FAIL" }
    );
    for v in &report.violations {
        let j = axiom_json(space, v);
        let pts: Vec<&str> = j["points"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p.as_str().unwrap())
            .collect();
        let _ = writeln!(
            s,
            "  {} violated at ({})",
            j["axiom"].as_str().unwrap(),
            pts.join(", ")
        );
    }
    s
}

pub fn evidence_json(ev: &Phi2Evidence) -> Value {
    json!({
        "epsilon": ev.epsilon.to_string(),
        "delta": ev.delta.to_string(),
        "mode": match ev.mode { EvidenceMode::Analytic => "analytic", EvidenceMode::Sampled => "sampled" },
    })
}

pub fn orbit_json(space: &MetricSpace, stats: &OrbitStats) -> Value {
    json!({
        "orbit": labels(space, &stats.orbit),
        "tail_entry": stats.tail_entry,
        "cycle": labels(space, stats.cycle()),
        "diameter": stats.diameter.to_string(),
    })
}

pub fn orbit_text(space: &MetricSpace, stats: &OrbitStats) -> String {
    format!(
        "orbit: {}\ntail entry: {}\ncycle: {}\ndiameter: {}\n",
        labels(space, &stats.orbit).join(" -> "),
        stats.tail_entry,
        labels(space, stats.cycle()).join(" -> "),
        scalar_text(&Scalar::Exact(stats.diameter.clone()))
    )
}

fn evaluation_json(space: &MetricSpace, e: &PairEvaluation) -> Value {
    json!({
        "x": space.label(e.x),
        "y": space.label(e.y),
        "lhs": e.lhs.to_string(),
        "rhs": scalar_json(&e.rhs),
    })
}

fn phi_note(note: PhiCheckNote) -> &'static str {
    match note {
        PhiCheckNote::Analytic => "analytic",
        PhiCheckNote::Sampled => "sampled",
        PhiCheckNote::Skipped => "skipped",
    }
}

/// `limit` caps how many violations are listed; the total count is always reported.
pub fn certification_json(
    space: &MetricSpace,
    r: &CertificationReport,
    limit: Option<usize>,
) -> Value {
    let shown = limit.unwrap_or(usize::MAX);
    let list = |v: &[PairEvaluation]| -> Vec<Value> {
        v.iter()
            .take(shown)
            .map(|e| evaluation_json(space, e))
            .collect()
    };
    let mut out = json!({
        "contraction": spec_json(&r.spec),
        "verdict": r.verdict_label(),
        "pairs_checked": r.pairs_checked,
        "worst_margin": r.worst_margin.as_ref().map(scalar_json),
        "worst_pair": r.worst_pair.map(|(x, y)| json!([space.label(x), space.label(y)])),
        "violation_count": r.violations.len(),
        "violations": list(&r.violations),
        "indeterminate_count": r.indeterminate.len(),
        "indeterminate": list(&r.indeterminate),
        "window_note": r.window_note,
        "excluded_points": labels(space, &r.excluded_points),
        "phi_check": phi_note(r.phi_check),
    });
    if let Some(fc) = &r.fixed_point_check {
        out["fixed_point_check"] = json!({
            "pairs_checked": fc.pairs_checked,
            "holds": fc.holds(),
            "violations": list(&fc.violations),
        });
    }
    out
}

pub fn certification_text(
    space: &MetricSpace,
    r: &CertificationReport,
    limit: Option<usize>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "contraction: {}", spec_text(&r.spec));
    let _ = writeln!(s, "domain: {}", r.window_note);
    if !r.excluded_points.is_empty() {
        let _ = writeln!(
            s,
            "excluded (fixed points): {}",
            labels(space, &r.excluded_points).join(", ")
        );
    }
    let _ = writeln!(s, "φ check: {}", phi_note(r.phi_check));
    let _ = writeln!(s, "verdict: {}", r.verdict_label());
    let _ = writeln!(s, "pairs checked: {}", r.pairs_checked);
    if let (Some(m), Some((x, y))) = (&r.worst_margin, r.worst_pair) {
        let _ = writeln!(
            s,
            "worst margin: {} at ({}, {})",
            scalar_text(m),
            space.label(x),
            space.label(y)
        );
    }
    let shown = limit.unwrap_or(usize::MAX);
    for (title, list) in [
        ("violations", &r.violations),
        ("indeterminate", &r.indeterminate),
    ] {
        if list.is_empty() {
            continue;
        }
        let _ = writeln!(s, "{title}: {}", list.len());
        let _ = writeln!(
            s,
            "  {:>12} {:>12} {:>14} {:>22}",
            "x", "y", "D(fx,fy)", "RHS"
        );
        for e in list.iter().take(shown) {
            let _ = writeln!(
                s,
                "  {:>12} {:>12} {:>14} {:>22}",
                space.label(e.x),
                space.label(e.y),
                e.lhs.to_string(),
                scalar_text(&e.rhs)
            );
        }
        if list.len() > shown {
            let _ = writeln!(s, "  ... {} more", list.len() - shown);
        }
    }
    if let Some(fc) = &r.fixed_point_check {
        let _ = writeln!(
            s,
            "on Fix(f) x Fix(f): {} ({} pairs)",
            if fc.holds() { "holds" } else { "fails" },
            fc.pairs_checked
        );
    }
    s
}

pub fn trace_json(space: &MetricSpace, t: &IterationTrace) -> Value {
    let status = match &t.status {
        TraceStatus::Converged {
            limit,
            steps_to_fix,
        } => {
            json!({"kind": "converged", "limit": space.label(*limit), "steps_to_fix": steps_to_fix})
        }
        TraceStatus::Cycling { cycle } => json!({"kind": "cycling", "cycle": labels(space, cycle)}),
        TraceStatus::BudgetExhausted => json!({"kind": "budget_exhausted"}),
    };
    json!({"start": space.label(t.start), "steps": labels(space, &t.steps), "status": status})
}

pub fn trace_text(space: &MetricSpace, t: &IterationTrace) -> String {
    let path = labels(space, &t.steps).join(" -> ");
    let status = match &t.status {
        TraceStatus::Converged {
            limit,
            steps_to_fix,
        } => {
            format!(
                "converged to {} in {steps_to_fix} steps",
                space.label(*limit)
            )
        }
        TraceStatus::Cycling { cycle } => {
            format!("cycling through {}", labels(space, cycle).join(" -> "))
        }
        TraceStatus::BudgetExhausted => "budget exhausted".to_string(),
    };
    format!("{path}: {status}\n")
}

pub fn fixpoints_json(space: &MetricSpace, r: &FixPointReport) -> Value {
    json!({"fixed_points": labels(space, &r.fixed_points), "unique": r.unique, "window_note": space.window_note()})
}

pub fn fixpoints_text(space: &MetricSpace, r: &FixPointReport) -> String {
    format!(
        "Fix(f) = {{{}}} ({})\n",
        labels(space, &r.fixed_points).join(", "),
        match r.fixed_points.len() {
            0 => "none",
            1 => "unique",
            _ => "not unique",
        }
    )
}

fn theorem_verdict(v: &TheoremVerdict) -> (String, Option<String>) {
    match v {
        TheoremVerdict::NotApplicable(why) => ("not applicable".into(), Some(why.clone())),
        TheoremVerdict::Confirmed => ("confirmed".into(), None),
        TheoremVerdict::Counterexample(why) => ("THEOREM COUNTEREXAMPLE".into(), Some(why.clone())),
    }
}

pub fn theorem_json(space: &MetricSpace, r: &TheoremReport, limit: Option<usize>) -> Value {
    let (verdict, reason) = theorem_verdict(&r.verdict);
    json!({
        "certification": certification_json(space, &r.certification, limit),
        "fixed_points": fixpoints_json(space, &r.fixed_points),
        "uniqueness_asserted": r.uniqueness_asserted,
        "theorem": {"verdict": verdict, "reason": reason},
        "traces": r.traces.iter().map(|t| trace_json(space, t)).collect::<Vec<_>>(),
    })
}

pub fn theorem_text(space: &MetricSpace, r: &TheoremReport, limit: Option<usize>) -> String {
    let (verdict, reason) = theorem_verdict(&r.verdict);
    let mut s = certification_text(space, &r.certification, limit);
    s.push_str(&fixpoints_text(space, &r.fixed_points));
    let conclusion = if r.uniqueness_asserted {
        "unique fixed point, all traces converge"
    } else {
        "at least one fixed point"
    };
    let _ = writeln!(s, "tested conclusion: {conclusion}");
    match reason {
        Some(why) => {
            let _ = writeln!(s, "theorem: {verdict} ({why})");
        }
        None => {
            let _ = writeln!(s, "theorem: {verdict}");
        }
    }
    s
}

pub fn comparison_json(
    space: &MetricSpace,
    a: &ContractionSpec,
    b: &ContractionSpec,
    r: &ComparisonReport,
) -> Value {
    let outcome = match &r.outcome {
        ClassOutcome::BothCertified => json!({"kind": "both_certified"}),
        ClassOutcome::Implies {
            a_certified,
            b_certified,
        } => {
            json!({"kind": "no_separation", "a_certified": a_certified, "b_certified": b_certified})
        }
        ClassOutcome::Separated(w) => json!({
            "kind": "separated",
            "witness": {
                "x": space.label(w.x),
                "y": space.label(w.y),
                "lhs": w.lhs.to_string(),
                "rhs_a": scalar_json(&w.rhs_a),
                "rhs_b": scalar_json(&w.rhs_b),
            },
        }),
    };
    json!({
        "a": spec_json(a),
        "b": spec_json(b),
        "outcome": outcome,
        "pairs_compared": r.pairs_compared,
        "undecided_pairs": r.undecided_pairs,
        "intersected_domain": r.intersected_domain,
    })
}

pub fn comparison_text(
    space: &MetricSpace,
    a: &ContractionSpec,
    b: &ContractionSpec,
    r: &ComparisonReport,
) -> String {
    let (na, nb) = (spec_text(a), spec_text(b));
    let mut s = match &r.outcome {
        ClassOutcome::BothCertified => format!("{na} and {nb} both certified\n"),
        ClassOutcome::Implies {
            a_certified,
            b_certified,
        } => format!(
            "no pair separates {na} from {nb} ({na}: {}, {nb}: {})\n",
            if *a_certified {
                "certified"
            } else {
                "violated"
            },
            if *b_certified {
                "certified"
            } else {
                "violated"
            }
        ),
        ClassOutcome::Separated(w) => format!(
            "{na} holds but {nb} fails at ({}, {}): D(fx,fy) = {}, {na} RHS = {}, {nb} RHS = {}\n",
            space.label(w.x),
            space.label(w.y),
            w.lhs,
            scalar_text(&w.rhs_a),
            scalar_text(&w.rhs_b)
        ),
    };
    let _ = writeln!(s, "pairs compared: {}", r.pairs_compared);
    if r.intersected_domain {
        s.push_str("domain: pairs outside Fix(f), shared by both conditions\n");
    }
    s
}

pub fn rational_decimal(r: &Rational) -> String {
    to_decimal(r, DECIMALS)
}

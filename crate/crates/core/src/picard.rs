//! Picard iteration and empirical checks of the fixed-point conclusions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::certify::{
    certify, CertificationReport, CertifyError, CertifyOptions, ContractionSpec, VariantKind,
};
use crate::metric::{MetricSpace, PointId, Scope};
use crate::orbit::{
    default_max_steps, fixed_points, orbit_diameter_sequence, FixPointReport, OrbitError, SelfMap,
};
use crate::phi::PhiSpec;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStatus {
    /// `steps[steps_to_fix]` is the first fixed point reached.
    Converged {
        limit: PointId,
        steps_to_fix: usize,
    },
    Cycling {
        cycle: Vec<PointId>,
    },
    BudgetExhausted,
}

/// The sequence `x, fx, f²x, ...` up to the first fixed point, cycle, or budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub start: PointId,
    pub steps: Vec<PointId>,
    pub status: TraceStatus,
}

impl IterationTrace {
    pub fn converged(&self) -> bool {
        matches!(self.status, TraceStatus::Converged { .. })
    }

    pub fn limit(&self) -> Option<PointId> {
        match self.status {
            TraceStatus::Converged { limit, .. } => Some(limit),
            _ => None,
        }
    }
}

/// Iterates at most `max_steps` applications of `map`. Never exhausts the budget when
/// `max_steps >= |X|`.
pub fn iterate(map: &SelfMap, x0: PointId, max_steps: usize) -> IterationTrace {
    let mut seen = vec![usize::MAX; map.len()];
    let mut steps = vec![x0];
    seen[x0.0] = 0;
    let mut current = x0;
    for applied in 0..=max_steps {
        if map.is_fixed(current) {
            return IterationTrace {
                start: x0,
                status: TraceStatus::Converged {
                    limit: current,
                    steps_to_fix: steps.len() - 1,
                },
                steps,
            };
        }
        if applied == max_steps {
            break;
        }
        let next = map.apply(current);
        if seen[next.0] != usize::MAX {
            let cycle = steps[seen[next.0]..].to_vec();
            return IterationTrace {
                start: x0,
                steps,
                status: TraceStatus::Cycling { cycle },
            };
        }
        seen[next.0] = steps.len();
        steps.push(next);
        current = next;
    }
    IterationTrace {
        start: x0,
        steps,
        status: TraceStatus::BudgetExhausted,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoremVerdict {
    /// The hypotheses were not established, so the conclusion is not tested.
    NotApplicable(String),
    Confirmed,
    /// Certified, yet the conclusion fails.
    Counterexample(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub certification: CertificationReport,
    pub fixed_points: FixPointReport,
    /// Whether uniqueness and global convergence were part of the tested conclusion.
    pub uniqueness_asserted: bool,
    pub traces: Vec<IterationTrace>,
    pub verdict: TheoremVerdict,
}

impl TheoremReport {
    pub fn is_counterexample(&self) -> bool {
        matches!(self.verdict, TheoremVerdict::Counterexample(_))
    }
}

/// Certifies, then tests the matching conclusion on the finite space.
///
/// Type (I) promises at least one fixed point, and a unique one when the inequality also
/// holds on `Fix(f) × Fix(f)` (`include_fixed_points`). Every other variant promises a
/// unique fixed point that every Picard trace reaches. Windows of larger sets are refused.
pub fn validate_theorem(
    space: &MetricSpace,
    map: &SelfMap,
    phi: &PhiSpec,
    spec: &ContractionSpec,
    options: CertifyOptions,
) -> Result<TheoremReport, CertifyError> {
    let certification = certify(space, map, phi, spec, options)?;
    let fixed = fixed_points(map);
    let budget = default_max_steps(space);
    let traces: Vec<IterationTrace> = space.points().map(|p| iterate(map, p, budget)).collect();
    let uniqueness_asserted = match spec.kind() {
        VariantKind::TypeI => certification
            .fixed_point_check
            .as_ref()
            .is_some_and(|c| c.holds()),
        _ => true,
    };
    let verdict = if let Scope::Window(note) = space.scope() {
        TheoremVerdict::NotApplicable(format!("space is a window ({note}), not a complete space"))
    } else if !certification.certified() {
        TheoremVerdict::NotApplicable(format!(
            "{} is {}",
            spec.kind(),
            certification.verdict_label()
        ))
    } else {
        conclusion(space, &fixed, &traces, uniqueness_asserted)
    };
    Ok(TheoremReport {
        certification,
        fixed_points: fixed,
        uniqueness_asserted,
        traces,
        verdict,
    })
}

fn conclusion(
    space: &MetricSpace,
    fixed: &FixPointReport,
    traces: &[IterationTrace],
    unique: bool,
) -> TheoremVerdict {
    if fixed.fixed_points.is_empty() {
        return TheoremVerdict::Counterexample(String::from("certified but no fixed point exists"));
    }
    if !unique {
        return TheoremVerdict::Confirmed;
    }
    if !fixed.unique {
        let labels: Vec<&str> = fixed.fixed_points.iter().map(|&p| space.label(p)).collect();
        return TheoremVerdict::Counterexample(format!(
            "certified but Fix(f) = {{{}}}",
            labels.join(", ")
        ));
    }
    let target = fixed.fixed_points[0];
    for trace in traces {
        if trace.limit() != Some(target) {
            return TheoremVerdict::Counterexample(format!(
                "trace from {} does not converge to {}",
                space.label(trace.start),
                space.label(target)
            ));
        }
    }
    TheoremVerdict::Confirmed
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauchyDiagnostics {
    /// `[D_f(x), D_f(fx), ..., D_f(f^n x)]`.
    pub diameters: Vec<Rational>,
    pub nonincreasing: bool,
    pub reaches_zero: bool,
    pub trace: IterationTrace,
}

impl CauchyDiagnostics {
    /// Nonincreasing, and zero is reached exactly when the trace converges.
    pub fn consistent(&self) -> bool {
        self.nonincreasing && self.reaches_zero == self.trace.converged()
    }
}

/// Orbit diameters along the Picard sequence over `n` steps, next to the trace itself.
pub fn cauchy_diagnostics(
    space: &MetricSpace,
    map: &SelfMap,
    x0: PointId,
    n: usize,
) -> Result<CauchyDiagnostics, OrbitError> {
    let diameters = orbit_diameter_sequence(space, map, x0, n, default_max_steps(space))?;
    let nonincreasing = diameters.windows(2).all(|w| w[1] <= w[0]);
    let reaches_zero = diameters.last().is_some_and(Zero::is_zero);
    let trace = iterate(map, x0, n);
    Ok(CauchyDiagnostics {
        diameters,
        nonincreasing,
        reaches_zero,
        trace,
    })
}

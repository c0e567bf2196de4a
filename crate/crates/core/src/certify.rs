//! Exhaustive certification of contraction conditions over a finite window.
//!
//! Every condition has the shape `D(fx, fy) <= RHS(x, y)`. The orbit-diameter variants
//! read `D_f(x)`, `D_f(y)`, `D_f(x, y)` and `M_f(x, y)` through a comparison function φ:
//!
//! | variant            | right-hand side                                                   |
//! |--------------------|-------------------------------------------------------------------|
//! | type (I)           | `φ(D_f x)^α · φ(D_f y)^β · φ(D_f(x,y))^γ · φ(M_f(x,y))^(1-λ)`        |
//! | type (II)          | `α φ(D_f x) + β φ(D_f y) + γ φ(D_f(x,y)) + δ φ(M_f(x,y))`          |
//! | type (III)         | `max` of the four φ terms                                         |
//! | Hardy–Rogers       | `α D(x,y) + β D(x,fx) + γ D(y,fy) + δ D(x,fy) + μ D(fx,y)`        |
//! | Hegedüs–Szilágyi   | `φ(D_f(x,y))`                                                     |
//! | max-form           | `max{φ(D_f x), φ(D_f y), φ(D_f(x,y))}`                            |
//!
//! Type (I) is quantified over pairs outside `Fix(f)`; the rest over all pairs. Pairs are
//! unordered and include `x = y`; for a condition that is not symmetric in `x` and `y`,
//! both orientations of each pair are checked.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::metric::{validate_metric, MetricSpace, PointId, Scope};
use crate::orbit::{default_max_steps, fixed_points, OrbitError, OrbitTable, SelfMap};
use crate::phi::{
    check_phi_property1, check_phi_property2, EvidenceMode, PhiSpec, Property2Verdict,
};
use crate::scalar::{
    root_of_product, sort_dedup, Decision, Rational, Scalar, DEFAULT_PRECISION_DIGITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariantKind {
    TypeI,
    TypeII,
    TypeIII,
    HardyRogers,
    HegedusSzilagyi,
    TmMax,
}

impl VariantKind {
    pub const ALL: [VariantKind; 6] = [
        VariantKind::TypeI,
        VariantKind::TypeII,
        VariantKind::TypeIII,
        VariantKind::HardyRogers,
        VariantKind::HegedusSzilagyi,
        VariantKind::TmMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantKind::TypeI => "type1",
            VariantKind::TypeII => "type2",
            VariantKind::TypeIII => "type3",
            VariantKind::HardyRogers => "hardy-rogers",
            VariantKind::HegedusSzilagyi => "hegedus-szilagyi",
            VariantKind::TmMax => "tmmax",
        }
    }

    /// Whether the quantifier ranges over `X \ Fix(f)` only.
    pub fn excludes_fixed_points(self) -> bool {
        self == VariantKind::TypeI
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown contraction variant `{0}`")]
pub struct UnknownVariant(pub String);

impl FromStr for VariantKind {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "type1" | "typei" | "i" => VariantKind::TypeI,
            "type2" | "typeii" | "ii" => VariantKind::TypeII,
            "type3" | "typeiii" | "iii" => VariantKind::TypeIII,
            "hardy-rogers" | "hardyrogers" | "hr" => VariantKind::HardyRogers,
            "hegedus-szilagyi" | "hegedusszilagyi" | "hs" => VariantKind::HegedusSzilagyi,
            "tmmax" | "tm-max" | "max" => VariantKind::TmMax,
            _ => return Err(UnknownVariant(s.into())),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("{variant} takes no coefficient `{name}`")]
    UnexpectedCoefficient {
        variant: VariantKind,
        name: &'static str,
    },
    #[error("{variant} needs coefficient `{name}`")]
    MissingCoefficient {
        variant: VariantKind,
        name: &'static str,
    },
    #[error("{variant}: coefficient `{name}` = {value} is out of range")]
    CoefficientRange {
        variant: VariantKind,
        name: &'static str,
        value: Rational,
    },
    #[error("{variant}: coefficient sum {sum} violates {bound}")]
    CoefficientSum {
        variant: VariantKind,
        sum: Rational,
        bound: &'static str,
    },
}

/// Optional coefficients as they arrive from a command line or a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coefficients {
    pub alpha: Option<Rational>,
    pub beta: Option<Rational>,
    pub gamma: Option<Rational>,
    pub delta: Option<Rational>,
    pub mu: Option<Rational>,
}

/// A contraction condition together with its coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContractionSpec {
    TypeI {
        alpha: Rational,
        beta: Rational,
        gamma: Rational,
    },
    TypeII {
        alpha: Rational,
        beta: Rational,
        gamma: Rational,
        delta: Rational,
    },
    TypeIII,
    HardyRogers {
        alpha: Rational,
        beta: Rational,
        gamma: Rational,
        delta: Rational,
        mu: Rational,
    },
    HegedusSzilagyi,
    TmMax,
}

fn nonneg(variant: VariantKind, name: &'static str, value: &Rational) -> Result<(), SpecError> {
    if value.is_negative() {
        return Err(SpecError::CoefficientRange {
            variant,
            name,
            value: value.clone(),
        });
    }
    Ok(())
}

impl ContractionSpec {
    /// Requires `α, β, γ > 0` and `λ = α + β + γ < 1`.
    pub fn type_i(alpha: Rational, beta: Rational, gamma: Rational) -> Result<Self, SpecError> {
        let v = VariantKind::TypeI;
        for (name, value) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma)] {
            if !value.is_positive() {
                return Err(SpecError::CoefficientRange {
                    variant: v,
                    name,
                    value: value.clone(),
                });
            }
        }
        let sum = &alpha + &beta + &gamma;
        if sum >= Rational::one() {
            return Err(SpecError::CoefficientSum {
                variant: v,
                sum,
                bound: "alpha + beta + gamma < 1",
            });
        }
        Ok(ContractionSpec::TypeI { alpha, beta, gamma })
    }

    /// Requires nonnegative coefficients with `α + β + γ + δ <= 1`.
    pub fn type_ii(
        alpha: Rational,
        beta: Rational,
        gamma: Rational,
        delta: Rational,
    ) -> Result<Self, SpecError> {
        let v = VariantKind::TypeII;
        for (name, value) in [
            ("alpha", &alpha),
            ("beta", &beta),
            ("gamma", &gamma),
            ("delta", &delta),
        ] {
            nonneg(v, name, value)?;
        }
        let sum = &alpha + &beta + &gamma + &delta;
        if sum > Rational::one() {
            return Err(SpecError::CoefficientSum {
                variant: v,
                sum,
                bound: "alpha + beta + gamma + delta <= 1",
            });
        }
        Ok(ContractionSpec::TypeII {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Requires nonnegative coefficients with `α + β + γ + δ + μ < 1`.
    pub fn hardy_rogers(
        alpha: Rational,
        beta: Rational,
        gamma: Rational,
        delta: Rational,
        mu: Rational,
    ) -> Result<Self, SpecError> {
        let v = VariantKind::HardyRogers;
        for (name, value) in [
            ("alpha", &alpha),
            ("beta", &beta),
            ("gamma", &gamma),
            ("delta", &delta),
            ("mu", &mu),
        ] {
            nonneg(v, name, value)?;
        }
        let sum = &alpha + &beta + &gamma + &delta + &mu;
        if sum >= Rational::one() {
            return Err(SpecError::CoefficientSum {
                variant: v,
                sum,
                bound: "alpha + beta + gamma + delta + mu < 1",
            });
        }
        Ok(ContractionSpec::HardyRogers {
            alpha,
            beta,
            gamma,
            delta,
            mu,
        })
    }

    /// Builds a spec from optional coefficients. Missing coefficients default to 0, except
    /// for type (I) where all three are required. Coefficients the variant does not take
    /// are rejected.
    pub fn from_parts(kind: VariantKind, c: &Coefficients) -> Result<Self, SpecError> {
        let or_zero = |v: &Option<Rational>| v.clone().unwrap_or_else(Rational::zero);
        let required = |v: &Option<Rational>, name| {
            v.clone().ok_or(SpecError::MissingCoefficient {
                variant: VariantKind::TypeI,
                name,
            })
        };
        let allowed: &[&str] = match kind {
            VariantKind::TypeI => &["alpha", "beta", "gamma"],
            VariantKind::TypeII => &["alpha", "beta", "gamma", "delta"],
            VariantKind::HardyRogers => &["alpha", "beta", "gamma", "delta", "mu"],
            _ => &[],
        };
        for (name, value) in [
            ("alpha", &c.alpha),
            ("beta", &c.beta),
            ("gamma", &c.gamma),
            ("delta", &c.delta),
            ("mu", &c.mu),
        ] {
            if value.is_some() && !allowed.contains(&name) {
                return Err(SpecError::UnexpectedCoefficient {
                    variant: kind,
                    name,
                });
            }
        }
        match kind {
            VariantKind::TypeI => Self::type_i(
                required(&c.alpha, "alpha")?,
                required(&c.beta, "beta")?,
                required(&c.gamma, "gamma")?,
            ),
            VariantKind::TypeII => Self::type_ii(
                or_zero(&c.alpha),
                or_zero(&c.beta),
                or_zero(&c.gamma),
                or_zero(&c.delta),
            ),
            VariantKind::HardyRogers => Self::hardy_rogers(
                or_zero(&c.alpha),
                or_zero(&c.beta),
                or_zero(&c.gamma),
                or_zero(&c.delta),
                or_zero(&c.mu),
            ),
            VariantKind::TypeIII => Ok(ContractionSpec::TypeIII),
            VariantKind::HegedusSzilagyi => Ok(ContractionSpec::HegedusSzilagyi),
            VariantKind::TmMax => Ok(ContractionSpec::TmMax),
        }
    }

    pub fn kind(&self) -> VariantKind {
        match self {
            ContractionSpec::TypeI { .. } => VariantKind::TypeI,
            ContractionSpec::TypeII { .. } => VariantKind::TypeII,
            ContractionSpec::TypeIII => VariantKind::TypeIII,
            ContractionSpec::HardyRogers { .. } => VariantKind::HardyRogers,
            ContractionSpec::HegedusSzilagyi => VariantKind::HegedusSzilagyi,
            ContractionSpec::TmMax => VariantKind::TmMax,
        }
    }

    pub fn coefficients(&self) -> Coefficients {
        let s = |v: &Rational| Some(v.clone());
        match self {
            ContractionSpec::TypeI { alpha, beta, gamma } => Coefficients {
                alpha: s(alpha),
                beta: s(beta),
                gamma: s(gamma),
                ..Default::default()
            },
            ContractionSpec::TypeII {
                alpha,
                beta,
                gamma,
                delta,
            } => Coefficients {
                alpha: s(alpha),
                beta: s(beta),
                gamma: s(gamma),
                delta: s(delta),
                mu: None,
            },
            ContractionSpec::HardyRogers {
                alpha,
                beta,
                gamma,
                delta,
                mu,
            } => Coefficients {
                alpha: s(alpha),
                beta: s(beta),
                gamma: s(gamma),
                delta: s(delta),
                mu: s(mu),
            },
            _ => Coefficients::default(),
        }
    }

    /// Whether the right-hand side is unchanged when `x` and `y` are swapped. Asymmetric
    /// conditions are checked on both orientations of every pair.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ContractionSpec::TypeI { alpha, beta, .. }
            | ContractionSpec::TypeII { alpha, beta, .. } => alpha == beta,
            ContractionSpec::HardyRogers {
                beta,
                gamma,
                delta,
                mu,
                ..
            } => beta == gamma && delta == mu,
            _ => true,
        }
    }

    /// `λ = α + β + γ` for type (I).
    pub fn lambda(&self) -> Option<Rational> {
        match self {
            ContractionSpec::TypeI { alpha, beta, gamma } => Some(alpha + beta + gamma),
            _ => None,
        }
    }
}

/// Everything a right-hand side may read for one pair `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTerms {
    /// `D_f(x)`
    pub orbit_x: Rational,
    /// `D_f(y)`
    pub orbit_y: Rational,
    /// `D_f(x, y)`
    pub pair_diameter: Rational,
    /// `M_f(x, y)`
    pub mean_diameter: Rational,
    pub d_xy: Rational,
    pub d_x_fx: Rational,
    pub d_y_fy: Rational,
    pub d_x_fy: Rational,
    pub d_fx_y: Rational,
    /// `D(fx, fy)`, the left-hand side.
    pub d_fx_fy: Rational,
}

impl PairTerms {
    pub fn gather(table: &OrbitTable<'_>, x: PointId, y: PointId) -> Self {
        let space = table.space();
        let (fx, fy) = (table.map().apply(x), table.map().apply(y));
        let pair = table.pair(x, y);
        Self {
            orbit_x: table.diameter(x).clone(),
            orbit_y: table.diameter(y).clone(),
            pair_diameter: pair.pair_diameter,
            mean_diameter: pair.mean_diameter,
            d_xy: space.d(x, y),
            d_x_fx: space.d(x, fx),
            d_y_fy: space.d(y, fy),
            d_x_fy: space.d(x, fy),
            d_fx_y: space.d(fx, y),
            d_fx_fy: space.d(fx, fy),
        }
    }
}

fn max_of(values: &[Rational]) -> Rational {
    values.iter().max().cloned().unwrap_or_else(Rational::zero)
}

/// Right-hand side of `spec` at one pair. Exact except for type (I) products with
/// irrational value, which come back as enclosures of relative width `10^-digits`.
pub fn rhs(spec: &ContractionSpec, phi: &PhiSpec, terms: &PairTerms, digits: u32) -> Scalar {
    let p = |t: &Rational| phi.eval_unchecked(t);
    match spec {
        ContractionSpec::TypeI { alpha, beta, gamma } => {
            let rest = Rational::one() - alpha - beta - gamma;
            root_of_product(
                &[
                    (p(&terms.orbit_x), alpha.clone()),
                    (p(&terms.orbit_y), beta.clone()),
                    (p(&terms.pair_diameter), gamma.clone()),
                    (p(&terms.mean_diameter), rest),
                ],
                digits,
            )
        }
        ContractionSpec::TypeII {
            alpha,
            beta,
            gamma,
            delta,
        } => Scalar::Exact(
            alpha * p(&terms.orbit_x)
                + beta * p(&terms.orbit_y)
                + gamma * p(&terms.pair_diameter)
                + delta * p(&terms.mean_diameter),
        ),
        ContractionSpec::TypeIII => Scalar::Exact(max_of(&[
            p(&terms.orbit_x),
            p(&terms.orbit_y),
            p(&terms.pair_diameter),
            p(&terms.mean_diameter),
        ])),
        ContractionSpec::HardyRogers {
            alpha,
            beta,
            gamma,
            delta,
            mu,
        } => Scalar::Exact(
            alpha * &terms.d_xy
                + beta * &terms.d_x_fx
                + gamma * &terms.d_y_fy
                + delta * &terms.d_x_fy
                + mu * &terms.d_fx_y,
        ),
        ContractionSpec::HegedusSzilagyi => Scalar::Exact(p(&terms.pair_diameter)),
        ContractionSpec::TmMax => Scalar::Exact(max_of(&[
            p(&terms.orbit_x),
            p(&terms.orbit_y),
            p(&terms.pair_diameter),
        ])),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Orbit step budget; `None` means `|X| + 1`.
    pub max_steps: Option<usize>,
    pub precision_digits: u32,
    /// Also check type (I) over `Fix(f) × Fix(f)`.
    pub include_fixed_points: bool,
    /// Proceed even if φ fails the Φ checks; recorded in the report.
    pub skip_phi_check: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            max_steps: None,
            precision_digits: DEFAULT_PRECISION_DIGITS,
            include_fixed_points: false,
            skip_phi_check: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("space fails the metric axioms ({0} violations)")]
    NotAMetric(usize),
    #[error("φ is not in Φ: {0}")]
    PhiNotInClass(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// How φ's membership in Φ was established before certifying.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiCheckNote {
    Analytic,
    Sampled,
    /// The caller skipped the check.
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Violated,
    Indeterminate,
}

/// One evaluated inequality `D(fx, fy) <= RHS`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairEvaluation {
    pub x: PointId,
    pub y: PointId,
    pub lhs: Rational,
    pub rhs: Scalar,
    pub decision: Decision,
}

impl PairEvaluation {
    /// `RHS - LHS`.
    pub fn margin(&self) -> Scalar {
        self.rhs.sub(&Scalar::Exact(self.lhs.clone()))
    }
}

/// Partial result for a slice of the pair domain; merged in row order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowResult {
    pub pairs_checked: usize,
    pub worst: Option<(Scalar, PointId, PointId)>,
    pub violations: Vec<PairEvaluation>,
    pub indeterminate: Vec<PairEvaluation>,
}

impl RowResult {
    fn record(&mut self, eval: PairEvaluation) {
        self.pairs_checked += 1;
        let margin = eval.margin();
        let replace = match &self.worst {
            None => true,
            Some((w, _, _)) => margin.reduction_cmp(w).is_lt(),
        };
        if replace {
            self.worst = Some((margin, eval.x, eval.y));
        }
        match eval.decision {
            Decision::Yes => {}
            Decision::No => self.violations.push(eval),
            Decision::Indeterminate => self.indeterminate.push(eval),
        }
    }

    /// Appends `later`, keeping the earlier worst pair on ties.
    pub fn merge(mut self, later: RowResult) -> RowResult {
        self.pairs_checked += later.pairs_checked;
        if let Some((m, x, y)) = later.worst {
            let replace = match &self.worst {
                None => true,
                Some((w, _, _)) => m.reduction_cmp(w).is_lt(),
            };
            if replace {
                self.worst = Some((m, x, y));
            }
        }
        self.violations.extend(later.violations);
        self.indeterminate.extend(later.indeterminate);
        self
    }
}

/// Result of the opt-in type (I) check over `Fix(f) × Fix(f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointCheck {
    pub pairs_checked: usize,
    pub violations: Vec<PairEvaluation>,
    pub indeterminate: Vec<PairEvaluation>,
}

impl FixedPointCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.indeterminate.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificationReport {
    pub spec: ContractionSpec,
    pub verdict: Verdict,
    pub pairs_checked: usize,
    /// Minimum of `RHS - LHS` over the domain; `None` for an empty domain.
    pub worst_margin: Option<Scalar>,
    pub worst_pair: Option<(PointId, PointId)>,
    pub violations: Vec<PairEvaluation>,
    pub indeterminate: Vec<PairEvaluation>,
    pub window_note: String,
    pub on_window: bool,
    /// Points left out of the pair domain (`Fix(f)` for type (I)).
    pub excluded_points: Vec<PointId>,
    pub phi_check: PhiCheckNote,
    pub fixed_point_check: Option<FixedPointCheck>,
}

impl CertificationReport {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn verdict_label(&self) -> &'static str {
        match (self.verdict, self.on_window) {
            (Verdict::Certified, true) => "certified on window",
            (Verdict::Certified, false) => "certified",
            (Verdict::Violated, _) => "violated",
            (Verdict::Indeterminate, _) => "indeterminate",
        }
    }
}

fn positive_distances(space: &MetricSpace) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for x in space.points() {
        for y in space.points() {
            let d = space.d(x, y);
            if d.is_positive() {
                out.push(d);
            }
        }
    }
    sort_dedup(&mut out);
    out
}

/// Runs the Φ checks used as a certification precondition.
pub fn phi_precheck(space: &MetricSpace, phi: &PhiSpec) -> Result<PhiCheckNote, CertifyError> {
    if phi.is_closed_form() {
        return Ok(PhiCheckNote::Analytic);
    }
    let grid = positive_distances(space);
    if let crate::phi::Property1Verdict::Fail(t) = check_phi_property1(phi, &grid) {
        return Err(CertifyError::PhiNotInClass(alloc::format!("φ({t}) >= {t}")));
    }
    match check_phi_property2(phi, &grid) {
        Property2Verdict::Fail(eps) => Err(CertifyError::PhiNotInClass(alloc::format!(
            "no 𝔡 found for ε = {eps}"
        ))),
        Property2Verdict::Evidence(ev) => {
            if ev.iter().all(|e| e.mode == EvidenceMode::Analytic) {
                Ok(PhiCheckNote::Analytic)
            } else {
                Ok(PhiCheckNote::Sampled)
            }
        }
    }
}

/// Prepared certification of one `(space, map, φ, spec)`.
///
/// Rows of the pair domain can be evaluated independently (and in parallel) with
/// [`Certifier::row`]; [`Certifier::assemble`] reduces them in row order, so the report does
/// not depend on how rows were scheduled.
pub struct Certifier<'a> {
    phi: &'a PhiSpec,
    spec: &'a ContractionSpec,
    options: CertifyOptions,
    table: OrbitTable<'a>,
    fixed: Vec<PointId>,
    domain: Vec<PointId>,
    phi_check: PhiCheckNote,
}

impl<'a> Certifier<'a> {
    pub fn new(
        space: &'a MetricSpace,
        map: &'a SelfMap,
        phi: &'a PhiSpec,
        spec: &'a ContractionSpec,
        options: CertifyOptions,
    ) -> Result<Self, CertifyError> {
        let metric = validate_metric(space);
        if !metric.passed() {
            return Err(CertifyError::NotAMetric(metric.violations.len()));
        }
        let phi_check = if options.skip_phi_check {
            PhiCheckNote::Skipped
        } else {
            phi_precheck(space, phi)?
        };
        let max_steps = options
            .max_steps
            .unwrap_or_else(|| default_max_steps(space));
        let table = OrbitTable::build(space, map, max_steps)?;
        let fixed = fixed_points(map).fixed_points;
        let domain = if spec.kind().excludes_fixed_points() {
            space.points().filter(|p| !map.is_fixed(*p)).collect()
        } else {
            space.points().collect()
        };
        Ok(Self {
            phi,
            spec,
            options,
            table,
            fixed,
            domain,
            phi_check,
        })
    }

    pub fn domain(&self) -> &[PointId] {
        &self.domain
    }

    pub fn table(&self) -> &OrbitTable<'a> {
        &self.table
    }

    pub fn evaluate(&self, x: PointId, y: PointId) -> PairEvaluation {
        let terms = PairTerms::gather(&self.table, x, y);
        let rhs = rhs(self.spec, self.phi, &terms, self.options.precision_digits);
        let decision = Scalar::Exact(terms.d_fx_fy.clone()).le(&rhs);
        PairEvaluation {
            x,
            y,
            lhs: terms.d_fx_fy,
            rhs,
            decision,
        }
    }

    /// Pairs `(domain[i], domain[j])` for `j >= i`, followed by `(domain[j], domain[i])`
    /// when the condition is asymmetric.
    pub fn row(&self, i: usize) -> RowResult {
        let mut out = RowResult::default();
        let x = self.domain[i];
        for &y in &self.domain[i..] {
            for (u, v) in oriented(x, y, !self.spec.is_symmetric()) {
                out.record(self.evaluate(u, v));
            }
        }
        out
    }

    fn fixed_point_check(&self) -> Option<FixedPointCheck> {
        if !(self.options.include_fixed_points && self.spec.kind().excludes_fixed_points()) {
            return None;
        }
        let mut rows = RowResult::default();
        for (i, &x) in self.fixed.iter().enumerate() {
            for &y in &self.fixed[i..] {
                for (u, v) in oriented(x, y, !self.spec.is_symmetric()) {
                    rows.record(self.evaluate(u, v));
                }
            }
        }
        Some(FixedPointCheck {
            pairs_checked: rows.pairs_checked,
            violations: rows.violations,
            indeterminate: rows.indeterminate,
        })
    }

    /// Reduces row results (which must be supplied in row order) into a report.
    pub fn assemble(&self, rows: impl IntoIterator<Item = RowResult>) -> CertificationReport {
        let total = rows
            .into_iter()
            .fold(RowResult::default(), RowResult::merge);
        let verdict = if !total.violations.is_empty() {
            Verdict::Violated
        } else if !total.indeterminate.is_empty() {
            Verdict::Indeterminate
        } else {
            Verdict::Certified
        };
        let space = self.table.space();
        let excluded_points = if self.spec.kind().excludes_fixed_points() {
            self.fixed.clone()
        } else {
            Vec::new()
        };
        let (worst_margin, worst_pair) = match total.worst {
            Some((m, x, y)) => (Some(m), Some((x, y))),
            None => (None, None),
        };
        CertificationReport {
            spec: self.spec.clone(),
            verdict,
            pairs_checked: total.pairs_checked,
            worst_margin,
            worst_pair,
            violations: total.violations,
            indeterminate: total.indeterminate,
            window_note: space.window_note(),
            on_window: matches!(space.scope(), Scope::Window(_)),
            excluded_points,
            phi_check: self.phi_check,
            fixed_point_check: self.fixed_point_check(),
        }
    }

    pub fn run(&self) -> CertificationReport {
        self.assemble((0..self.domain.len()).map(|i| self.row(i)))
    }
}

/// Certifies sequentially. See [`Certifier`] for the parallel-friendly form.
pub fn certify(
    space: &MetricSpace,
    map: &SelfMap,
    phi: &PhiSpec,
    spec: &ContractionSpec,
    options: CertifyOptions,
) -> Result<CertificationReport, CertifyError> {
    Ok(Certifier::new(space, map, phi, spec, options)?.run())
}

/// A pair where condition A holds and condition B fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationWitness {
    pub x: PointId,
    pub y: PointId,
    pub lhs: Rational,
    pub rhs_a: Scalar,
    pub rhs_b: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassOutcome {
    BothCertified,
    /// On every compared pair where A holds, B holds too.
    Implies {
        a_certified: bool,
        b_certified: bool,
    },
    Separated(Box<SeparationWitness>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub outcome: ClassOutcome,
    pub pairs_compared: usize,
    /// Pairs skipped because one side could not be decided.
    pub undecided_pairs: usize,
    /// Set when the two quantifier domains differ and their intersection was used.
    pub intersected_domain: bool,
}

/// Evaluates both conditions pair by pair and reports the first (lexicographic by point
/// index) pair where A holds but B fails.
pub fn compare_classes(
    space: &MetricSpace,
    map: &SelfMap,
    phi: &PhiSpec,
    spec_a: &ContractionSpec,
    spec_b: &ContractionSpec,
    options: CertifyOptions,
) -> Result<ComparisonReport, CertifyError> {
    let a = Certifier::new(space, map, phi, spec_a, options.clone())?;
    let b = Certifier::new(space, map, phi, spec_b, options)?;
    let exclude = spec_a.kind().excludes_fixed_points() || spec_b.kind().excludes_fixed_points();
    let intersected_domain =
        spec_a.kind().excludes_fixed_points() != spec_b.kind().excludes_fixed_points();
    let domain: Vec<PointId> = space
        .points()
        .filter(|p| !(exclude && map.is_fixed(*p)))
        .collect();
    let mut pairs_compared = 0;
    let mut undecided_pairs = 0;
    let (mut a_all, mut b_all) = (true, true);
    let mut witness = None;
    let both = !(spec_a.is_symmetric() && spec_b.is_symmetric());
    let pairs = domain
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| domain[i..].iter().map(move |&y| (x, y)));
    for (x, y) in pairs.flat_map(|(x, y)| oriented(x, y, both)) {
        {
            pairs_compared += 1;
            let ea = a.evaluate(x, y);
            let eb = b.evaluate(x, y);
            a_all &= ea.decision == Decision::Yes;
            b_all &= eb.decision == Decision::Yes;
            match (ea.decision, eb.decision) {
                (Decision::Yes, Decision::No) if witness.is_none() => {
                    witness = Some(SeparationWitness {
                        x,
                        y,
                        lhs: ea.lhs,
                        rhs_a: ea.rhs,
                        rhs_b: eb.rhs,
                    });
                }
                (Decision::Indeterminate, _) | (_, Decision::Indeterminate) => undecided_pairs += 1,
                _ => {}
            }
        }
    }
    let outcome = match witness {
        Some(w) => ClassOutcome::Separated(Box::new(w)),
        None if a_all && b_all => ClassOutcome::BothCertified,
        None => ClassOutcome::Implies {
            a_certified: a_all,
            b_certified: b_all,
        },
    };
    Ok(ComparisonReport {
        outcome,
        pairs_compared,
        undecided_pairs,
        intersected_domain,
    })
}

fn oriented(x: PointId, y: PointId, both: bool) -> impl Iterator<Item = (PointId, PointId)> {
    core::iter::once((x, y)).chain((both && x != y).then_some((y, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::scalar::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn type2_example10() -> ContractionSpec {
        ContractionSpec::type_ii(q("0"), q("0"), q("0"), q("5/6")).unwrap()
    }

    #[test]
    fn spec_invariants() {
        assert!(ContractionSpec::type_i(q("1/4"), q("1/4"), q("1/4")).is_ok());
        assert!(ContractionSpec::type_i(q("0"), q("1/4"), q("1/4")).is_err());
        assert!(matches!(
            ContractionSpec::type_i(q("1/2"), q("1/4"), q("1/4")),
            Err(SpecError::CoefficientSum { .. })
        ));
        assert!(ContractionSpec::type_ii(q("1/4"), q("1/4"), q("1/4"), q("1/4")).is_ok());
        assert!(ContractionSpec::type_ii(q("1/2"), q("1/4"), q("1/4"), q("1/4")).is_err());
        assert!(ContractionSpec::type_ii(q("-1/2"), q("0"), q("0"), q("0")).is_err());
        assert!(
            ContractionSpec::hardy_rogers(q("1/5"), q("1/5"), q("1/5"), q("1/5"), q("1/5"))
                .is_err()
        );
        assert!(
            ContractionSpec::hardy_rogers(q("1/5"), q("1/5"), q("1/5"), q("1/5"), q("1/6")).is_ok()
        );
        assert_eq!(
            ContractionSpec::from_parts(VariantKind::TypeI, &Coefficients::default()),
            Err(SpecError::MissingCoefficient {
                variant: VariantKind::TypeI,
                name: "alpha"
            })
        );
        assert_eq!(
            ContractionSpec::from_parts(
                VariantKind::TypeII,
                &Coefficients {
                    delta: Some(q("5/6")),
                    ..Default::default()
                }
            ),
            Ok(type2_example10())
        );
        assert_eq!(
            ContractionSpec::from_parts(
                VariantKind::TypeII,
                &Coefficients {
                    mu: Some(q("1/4")),
                    ..Default::default()
                }
            ),
            Err(SpecError::UnexpectedCoefficient {
                variant: VariantKind::TypeII,
                name: "mu"
            })
        );
    }

    #[test]
    fn variant_names_round_trip() {
        for kind in VariantKind::ALL {
            assert_eq!(kind.name().parse::<VariantKind>(), Ok(kind));
        }
        assert!("type4".parse::<VariantKind>().is_err());
    }

    #[test]
    fn rhs_examples_on_example10() {
        let inst = corpus::example10(12).unwrap();
        let table = OrbitTable::build(&inst.space, &inst.map, 13).unwrap();
        let p = |s: &str| inst.space.find(s).unwrap();
        let t72 = PairTerms::gather(&table, p("7"), p("2"));
        assert_eq!(t72.mean_diameter, q("7/2"));
        assert_eq!(
            rhs(&type2_example10(), &inst.phi, &t72, 30),
            Scalar::Exact(q("175/72"))
        );

        let t75 = PairTerms::gather(&table, p("7"), p("5"));
        assert_eq!(
            rhs(&ContractionSpec::TmMax, &inst.phi, &t75, 30),
            Scalar::zero()
        );
        assert_eq!(
            rhs(&ContractionSpec::TypeIII, &inst.phi, &t75, 30),
            Scalar::Exact(q("25/6"))
        );
        assert_eq!(t75.d_fx_fy, q("1"));
    }

    #[test]
    fn hardy_rogers_rhs_uses_raw_distances() {
        let inst = corpus::example10(12).unwrap();
        let table = OrbitTable::build(&inst.space, &inst.map, 13).unwrap();
        let p = |s: &str| inst.space.find(s).unwrap();
        let terms = PairTerms::gather(&table, p("7"), p("5"));
        // D(7,5)=2, D(7,2)=5, D(5,1)=4, D(7,1)=6, D(2,5)=3
        let spec =
            ContractionSpec::hardy_rogers(q("1/10"), q("1/10"), q("1/10"), q("1/10"), q("1/10"))
                .unwrap();
        assert_eq!(rhs(&spec, &inst.phi, &terms, 30), Scalar::Exact(q("2")));
    }

    #[test]
    fn type_i_zero_factor_is_exactly_zero() {
        let inst = corpus::example10(12).unwrap();
        let table = OrbitTable::build(&inst.space, &inst.map, 13).unwrap();
        let p = |s: &str| inst.space.find(s).unwrap();
        // D_f(7) = 6 is even, so φ(D_f(7)) = 0
        let terms = PairTerms::gather(&table, p("7"), p("5"));
        let spec = ContractionSpec::type_i(q("1/4"), q("1/4"), q("1/4")).unwrap();
        assert_eq!(rhs(&spec, &inst.phi, &terms, 30), Scalar::zero());
    }

    #[test]
    fn example10_type2_certified_tmmax_violated() {
        let inst = corpus::example10(200).unwrap();
        let report = certify(
            &inst.space,
            &inst.map,
            &inst.phi,
            &type2_example10(),
            CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
        assert!(report.on_window);
        assert_eq!(report.verdict_label(), "certified on window");
        let n = inst.space.len();
        assert_eq!(report.pairs_checked, n * (n + 1) / 2);

        let report = certify(
            &inst.space,
            &inst.map,
            &inst.phi,
            &ContractionSpec::TmMax,
            CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let first = &report.violations[0];
        assert_eq!(
            (inst.space.label(first.x), inst.space.label(first.y)),
            ("1", "7")
        );
    }

    #[test]
    fn example7_type1_has_zero_lhs() {
        let inst = corpus::example7_grid(&q("1"), &q("2")).unwrap();
        let spec = ContractionSpec::type_i(q("1/4"), q("1/4"), q("1/4")).unwrap();
        let report = certify(
            &inst.space,
            &inst.map,
            &inst.phi,
            &spec,
            CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
        assert_eq!(report.excluded_points.len(), 2);
        let m = inst.space.len() - 2;
        assert_eq!(report.pairs_checked, m * (m + 1) / 2);
    }

    #[test]
    fn fixed_point_extension_catches_two_fixed_points() {
        let inst = corpus::example7_grid(&q("1"), &q("2")).unwrap();
        let spec = ContractionSpec::type_i(q("1/4"), q("1/4"), q("1/4")).unwrap();
        let options = CertifyOptions {
            include_fixed_points: true,
            ..Default::default()
        };
        let report = certify(&inst.space, &inst.map, &inst.phi, &spec, options).unwrap();
        let check = report.fixed_point_check.unwrap();
        assert_eq!(check.pairs_checked, 3);
        assert_eq!(check.violations.len(), 1);
        assert!(!check.holds());
    }

    #[test]
    fn comparisons() {
        let inst = corpus::example10(40).unwrap();
        let cmp = compare_classes(
            &inst.space,
            &inst.map,
            &inst.phi,
            &ContractionSpec::TypeIII,
            &ContractionSpec::TmMax,
            CertifyOptions::default(),
        )
        .unwrap();
        let ClassOutcome::Separated(w) = cmp.outcome else {
            panic!("expected separation")
        };
        assert_eq!(w.lhs, q("1"));
        assert_eq!(w.rhs_b, Scalar::zero());

        let cmp = compare_classes(
            &inst.space,
            &inst.map,
            &inst.phi,
            &ContractionSpec::TmMax,
            &ContractionSpec::TypeIII,
            CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(
            cmp.outcome,
            ClassOutcome::Implies {
                a_certified: false,
                b_certified: true
            }
        );
    }

    #[test]
    fn rejects_non_metric_and_bad_phi() {
        let labels = alloc::vec!["a".into(), "b".into(), "c".into()];
        let m = |v: i64| Rational::from_integer(v.into());
        let matrix = alloc::vec![
            alloc::vec![m(0), m(1), m(5)],
            alloc::vec![m(1), m(0), m(1)],
            alloc::vec![m(5), m(1), m(0)]
        ];
        let space = MetricSpace::finite_matrix(labels, matrix).unwrap();
        let map = SelfMap::identity(&space);
        let err = certify(
            &space,
            &map,
            &PhiSpec::Zero,
            &ContractionSpec::TypeIII,
            CertifyOptions::default(),
        );
        assert_eq!(err, Err(CertifyError::NotAMetric(2)));

        let inst = corpus::example10(12).unwrap();
        let steep = PhiSpec::piecewise(alloc::vec![q("0")], alloc::vec![q("2")]).unwrap();
        let err = certify(
            &inst.space,
            &inst.map,
            &steep,
            &ContractionSpec::TypeIII,
            CertifyOptions::default(),
        );
        assert!(matches!(err, Err(CertifyError::PhiNotInClass(_))));
        let skipped = CertifyOptions {
            skip_phi_check: true,
            ..Default::default()
        };
        let report = certify(
            &inst.space,
            &inst.map,
            &steep,
            &ContractionSpec::TypeIII,
            skipped,
        )
        .unwrap();
        assert_eq!(report.phi_check, PhiCheckNote::Skipped);
    }
}

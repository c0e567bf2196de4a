//! Comparison functions `φ : [0, ∞) -> [0, ∞)` and evidence of membership in Φ.
//!
//! Φ asks for two properties: `φ(t) < t` for every `t > 0`, and for every `ε > 0` some
//! `𝔡 > 0` with `φ(t) <= ε` whenever `ε < t < ε + 𝔡`. The closed-form families carry
//! analytic certificates for both. Piecewise tables can only be sampled, and every result
//! says which mode produced it.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhiError {
    #[error("slope k = {0} must lie in [0, 1)")]
    SlopeOutOfRange(Rational),
    #[error(
        "piecewise table needs breakpoints starting at 0, strictly increasing, one slope each"
    )]
    MalformedTable,
    #[error("piecewise table takes a negative value")]
    NegativeValue,
    #[error("φ is only defined on [0, ∞), got t = {0}")]
    NegativeInput(Rational),
}

/// A comparison function from one of the supported families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhiSpec {
    /// `φ(t) = k t`.
    Linear {
        k: Rational,
    },
    /// `φ(t) = 0` at even nonnegative integers, `k t` elsewhere.
    ParityLinear {
        k: Rational,
    },
    Zero,
    /// Continuous piecewise-linear with `φ(0) = 0`: slope `slopes[i]` on
    /// `[breakpoints[i], breakpoints[i + 1])`, the last slope extending to infinity.
    PiecewiseTable {
        breakpoints: Vec<Rational>,
        slopes: Vec<Rational>,
    },
}

fn check_slope(k: &Rational) -> Result<(), PhiError> {
    if k.is_negative() || *k >= Rational::one() {
        Err(PhiError::SlopeOutOfRange(k.clone()))
    } else {
        Ok(())
    }
}

impl PhiSpec {
    pub fn linear(k: Rational) -> Result<Self, PhiError> {
        check_slope(&k)?;
        Ok(PhiSpec::Linear { k })
    }

    pub fn parity_linear(k: Rational) -> Result<Self, PhiError> {
        check_slope(&k)?;
        Ok(PhiSpec::ParityLinear { k })
    }

    pub fn piecewise(breakpoints: Vec<Rational>, slopes: Vec<Rational>) -> Result<Self, PhiError> {
        if breakpoints.is_empty()
            || breakpoints.len() != slopes.len()
            || !breakpoints[0].is_zero()
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(PhiError::MalformedTable);
        }
        let phi = PhiSpec::PiecewiseTable {
            breakpoints,
            slopes,
        };
        if let PhiSpec::PiecewiseTable {
            breakpoints,
            slopes,
        } = &phi
        {
            let values_ok = breakpoints
                .iter()
                .all(|b| !phi.eval_unchecked(b).is_negative());
            if !values_ok || slopes.last().is_some_and(|s| s.is_negative()) {
                return Err(PhiError::NegativeValue);
            }
        }
        Ok(phi)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            PhiSpec::Linear { .. } => "linear",
            PhiSpec::ParityLinear { .. } => "parity-linear",
            PhiSpec::Zero => "zero",
            PhiSpec::PiecewiseTable { .. } => "piecewise-table",
        }
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, PhiSpec::PiecewiseTable { .. })
    }

    /// `φ(t)`; exact for rational `t`.
    pub fn eval(&self, t: &Rational) -> Result<Rational, PhiError> {
        if t.is_negative() {
            return Err(PhiError::NegativeInput(t.clone()));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &Rational) -> Rational {
        match self {
            PhiSpec::Linear { k } => k * t,
            PhiSpec::ParityLinear { k } => {
                if is_even_integer(t) {
                    Rational::zero()
                } else {
                    k * t
                }
            }
            PhiSpec::Zero => Rational::zero(),
            PhiSpec::PiecewiseTable {
                breakpoints,
                slopes,
            } => {
                let mut value = Rational::zero();
                for i in 0..breakpoints.len() {
                    let start = &breakpoints[i];
                    if t <= start {
                        break;
                    }
                    let end = match breakpoints.get(i + 1) {
                        Some(next) if next < t => next,
                        _ => t,
                    };
                    value += &slopes[i] * (end - start);
                }
                value
            }
        }
    }
}

pub fn eval_phi(phi: &PhiSpec, t: &Rational) -> Result<Rational, PhiError> {
    phi.eval(t)
}

fn is_even_integer(t: &Rational) -> bool {
    t.is_integer() && num_integer::Integer::is_even(t.numer())
}

/// How a Φ property was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceMode {
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Property1Verdict {
    AnalyticPass,
    SampledPass,
    /// `φ(t) >= t` at this `t > 0`.
    Fail(Rational),
}

impl Property1Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Property1Verdict::Fail(_))
    }
}

/// Checks `φ(t) < t` for `t > 0`.
///
/// Closed forms with `k < 1` pass analytically. Piecewise tables are probed at the positive
/// breakpoints, at every segment midpoint, one unit past the last breakpoint, and on `grid`.
pub fn check_phi_property1(phi: &PhiSpec, grid: &[Rational]) -> Property1Verdict {
    let PhiSpec::PiecewiseTable { breakpoints, .. } = phi else {
        return Property1Verdict::AnalyticPass;
    };
    let two = Rational::from_integer(2.into());
    let mut probes: Vec<Rational> = Vec::new();
    for (i, b) in breakpoints.iter().enumerate() {
        if b.is_positive() {
            probes.push(b.clone());
        }
        if let Some(next) = breakpoints.get(i + 1) {
            probes.push((b + next) / &two);
        }
    }
    probes.push(breakpoints.last().expect("nonempty") + Rational::one());
    probes.extend(grid.iter().filter(|t| t.is_positive()).cloned());
    for t in probes {
        if phi.eval_unchecked(&t) >= t {
            return Property1Verdict::Fail(t);
        }
    }
    Property1Verdict::SampledPass
}

/// A witness `𝔡` for one `ε` of the second Φ property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phi2Evidence {
    pub epsilon: Rational,
    pub delta: Rational,
    pub mode: EvidenceMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Property2Verdict {
    Evidence(Vec<Phi2Evidence>),
    /// No candidate `𝔡` worked for this `ε`.
    Fail(Rational),
}

/// Number of interior sample points per candidate interval in sampled mode.
pub const PROPERTY2_SAMPLES: usize = 1000;
const PROPERTY2_HALVINGS: usize = 40;

/// Produces `𝔡` for each `ε`.
///
/// For `k t` (and its parity variant) every `t < ε / k` has `k t < ε`, so
/// `𝔡 = ε (1 - k) / k`; `k = 0` and the zero function get `𝔡 = ε`. Piecewise tables try
/// `𝔡 = ε, ε/2, ε/4, ...` and sample each candidate interval.
pub fn check_phi_property2(phi: &PhiSpec, epsilons: &[Rational]) -> Property2Verdict {
    let mut evidence = Vec::with_capacity(epsilons.len());
    for epsilon in epsilons {
        let analytic = |delta: Rational| Phi2Evidence {
            epsilon: epsilon.clone(),
            delta,
            mode: EvidenceMode::Analytic,
        };
        let item = match phi {
            PhiSpec::Linear { k } | PhiSpec::ParityLinear { k } if k.is_positive() => {
                analytic(epsilon * (Rational::one() - k) / k)
            }
            PhiSpec::Linear { .. } | PhiSpec::ParityLinear { .. } | PhiSpec::Zero => {
                analytic(epsilon.clone())
            }
            PhiSpec::PiecewiseTable { breakpoints, .. } => {
                match sampled_delta(phi, breakpoints, epsilon) {
                    Some(delta) => Phi2Evidence {
                        epsilon: epsilon.clone(),
                        delta,
                        mode: EvidenceMode::Sampled,
                    },
                    None => return Property2Verdict::Fail(epsilon.clone()),
                }
            }
        };
        evidence.push(item);
    }
    Property2Verdict::Evidence(evidence)
}

fn sampled_delta(phi: &PhiSpec, breakpoints: &[Rational], epsilon: &Rational) -> Option<Rational> {
    if !epsilon.is_positive() {
        return None;
    }
    let two = Rational::from_integer(2.into());
    let steps = Rational::from_integer((PROPERTY2_SAMPLES + 1).into());
    let mut delta = epsilon.clone();
    for _ in 0..PROPERTY2_HALVINGS {
        let upper = epsilon + &delta;
        let interior_breaks = breakpoints.iter().filter(|b| *b > epsilon && *b < &upper);
        let samples = (1..=PROPERTY2_SAMPLES)
            .map(|i| epsilon + &delta * Rational::from_integer(i.into()) / &steps);
        let ok = interior_breaks
            .cloned()
            .chain(samples)
            .all(|t| phi.eval_unchecked(&t) <= *epsilon);
        if ok {
            return Some(delta);
        }
        delta /= &two;
    }
    None
}

//! One function per CLI subcommand, each returning a [`Rendered`] result.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use contraction_core::corpus::{self, EXAMPLE10_WINDOW_MAX};
use contraction_core::falsifier::{InstanceGenerator, Target};
use contraction_core::orbit::default_max_steps;
use contraction_core::phi::{
    check_phi_property1, EvidenceMode, Property1Verdict, Property2Verdict,
};
use contraction_core::picard::TheoremVerdict;
use contraction_core::scalar::DEFAULT_PRECISION_DIGITS;
use contraction_core::{
    check_phi_property2, compare_classes, compute_orbit, fixed_points, iterate, parse_rational,
    validate_metric, validate_theorem, CertifyOptions, Coefficients, ContractionSpec, Instance,
    PointId, Rational, VariantKind, Verdict,
};
use serde_json::json;

use crate::instance::{load_instance, parse_coefficients, save_instance, LoadOptions};
use crate::parallel::{certify_parallel, hunt_parallel};
use crate::report::{self, Rendered, Status};

/// Environment variable holding the digit count for fractional-exponent arithmetic.
pub const PRECISION_ENV: &str = "CONTRACTION_LAB_PRECISION";

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Globals {
    pub window_max: Option<u64>,
    pub max_steps: Option<usize>,
    pub seed: Option<u64>,
    pub precision: Option<u32>,
}

impl Globals {
    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            window_max: self.window_max,
        }
    }

    pub fn certify_options(&self) -> CertifyOptions {
        CertifyOptions {
            max_steps: self.max_steps,
            precision_digits: self.precision.unwrap_or(DEFAULT_PRECISION_DIGITS),
            ..CertifyOptions::default()
        }
    }

    pub fn load(&self, path: &Path) -> Result<Instance> {
        Ok(load_instance(path, self.load_options())?)
    }
}

/// Reads the precision digits from `value` (normally the environment variable).
pub fn precision_from(value: Option<&str>) -> Result<Option<u32>> {
    match value {
        None => Ok(None),
        Some(text) => {
            let digits: u32 = text
                .trim()
                .parse()
                .with_context(|| format!("{PRECISION_ENV}={text:?} is not a digit count"))?;
            if digits == 0 || digits > 10_000 {
                bail!("{PRECISION_ENV}={digits} is outside 1..=10000");
            }
            Ok(Some(digits))
        }
    }
}

/// Coefficients as they arrive from flags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecInput {
    pub variant: Option<String>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub gamma: Option<String>,
    pub delta: Option<String>,
    pub mu: Option<String>,
}

impl SpecInput {
    fn any_coefficient(&self) -> bool {
        [&self.alpha, &self.beta, &self.gamma, &self.delta, &self.mu]
            .iter()
            .any(|c| c.is_some())
    }
}

/// The spec named by flags, falling back to the instance's declared contraction. Flags
/// override the declared coefficients one by one when the variant is the same.
pub fn resolve_spec(inst: &Instance, input: &SpecInput) -> Result<ContractionSpec> {
    let declared = inst.spec.as_ref();
    let kind = match &input.variant {
        Some(v) => v.parse::<VariantKind>()?,
        None => match declared {
            Some(spec) => spec.kind(),
            None => bail!("no --variant given and the instance declares no contraction"),
        },
    };
    if !input.any_coefficient() && input.variant.is_none() {
        return Ok(declared.expect("checked above").clone());
    }
    let flags = parse_coefficients(
        "--",
        [
            &input.alpha,
            &input.beta,
            &input.gamma,
            &input.delta,
            &input.mu,
        ],
    )?;
    let base = declared
        .filter(|s| s.kind() == kind)
        .map(ContractionSpec::coefficients)
        .unwrap_or_default();
    let merged = Coefficients {
        alpha: flags.alpha.or(base.alpha),
        beta: flags.beta.or(base.beta),
        gamma: flags.gamma.or(base.gamma),
        delta: flags.delta.or(base.delta),
        mu: flags.mu.or(base.mu),
    };
    Ok(ContractionSpec::from_parts(kind, &merged)?)
}

/// Parses `variant[:name=value,...]`, e.g. `type2:delta=5/6` or `tmmax`.
pub fn parse_spec(text: &str) -> Result<ContractionSpec> {
    let (variant, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut input = SpecInput {
        variant: Some(variant.to_string()),
        ..SpecInput::default()
    };
    for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected name=value, got {part:?}"))?;
        let slot = match name.trim() {
            "alpha" => &mut input.alpha,
            "beta" => &mut input.beta,
            "gamma" => &mut input.gamma,
            "delta" => &mut input.delta,
            "mu" => &mut input.mu,
            other => bail!("unknown coefficient {other:?} in {text:?}"),
        };
        *slot = Some(value.trim().to_string());
    }
    let kind: VariantKind = variant.parse()?;
    let c = parse_coefficients(
        "",
        [
            &input.alpha,
            &input.beta,
            &input.gamma,
            &input.delta,
            &input.mu,
        ],
    )?;
    Ok(ContractionSpec::from_parts(kind, &c)?)
}

fn point(inst: &Instance, label: &str) -> Result<PointId> {
    inst.space
        .find(label)
        .ok_or_else(|| anyhow!("{label:?} is not a point of the space"))
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::Certified => Status::Success,
        Verdict::Violated => Status::Failure,
        Verdict::Indeterminate => Status::Error,
    }
}

pub fn check_metric(inst: &Instance) -> Rendered {
    let r = validate_metric(&inst.space);
    let status = if r.passed() {
        Status::Success
    } else {
        Status::Failure
    };
    Rendered::new(
        report::metric_json(&inst.space, &r),
        report::metric_text(&inst.space, &r),
        status,
    )
}

/// Default ε values when none are given.
pub fn default_epsilons() -> Vec<Rational> {
    ["1/10", "1", "10"]
        .iter()
        .map(|t| parse_rational(t).expect("literal"))
        .collect()
}

pub fn phi_check(inst: &Instance, epsilons: &[Rational]) -> Rendered {
    let epsilons = if epsilons.is_empty() {
        default_epsilons()
    } else {
        epsilons.to_vec()
    };
    let mut grid = epsilons.clone();
    for x in inst.space.points() {
        for y in inst.space.points() {
            let d = inst.space.distance(x, y).expect("points of the space");
            if d > Rational::from_integer(0.into()) {
                grid.push(d);
            }
        }
    }
    grid.sort();
    grid.dedup();
    let p1 = check_phi_property1(&inst.phi, &grid);
    let p2 = check_phi_property2(&inst.phi, &epsilons);
    let (p1_word, p1_fail) = match &p1 {
        Property1Verdict::AnalyticPass => ("analytic pass", None),
        Property1Verdict::SampledPass => ("sampled pass", None),
        Property1Verdict::Fail(t) => ("fail", Some(t.to_string())),
    };
    let (evidence, p2_fail) = match &p2 {
        Property2Verdict::Evidence(ev) => (
            ev.iter().map(report::evidence_json).collect::<Vec<_>>(),
            None,
        ),
        Property2Verdict::Fail(eps) => (Vec::new(), Some(eps.to_string())),
    };
    let passed = p1.passed() && p2_fail.is_none();
    let json = json!({
        "family": inst.phi.family_name(),
        "property1": {"verdict": p1_word, "counterexample": p1_fail},
        "property2": {"evidence": evidence, "failed_epsilon": p2_fail},
        "in_class": passed,
    });
    let mut text = format!("φ family: {}\nφ(t) < t: {p1_word}", inst.phi.family_name());
    if let Some(t) = &p1_fail {
        text.push_str(&format!(" (fails at t = {t})"));
    }
    text.push('\n');
    if let Property2Verdict::Evidence(ev) = &p2 {
        for e in ev {
            let mode = match e.mode {
                EvidenceMode::Analytic => "analytic",
                EvidenceMode::Sampled => "sampled",
            };
            text.push_str(&format!("ε = {}: 𝔡 = {} ({mode})\n", e.epsilon, e.delta));
        }
    }
    if let Some(eps) = &p2_fail {
        text.push_str(&format!("no 𝔡 found for ε = {eps}\n"));
    }
    Rendered::new(
        json,
        text,
        if passed {
            Status::Success
        } else {
            Status::Failure
        },
    )
}

pub fn orbit(inst: &Instance, label: &str, max_steps: Option<usize>) -> Result<Rendered> {
    let x = point(inst, label)?;
    let stats = compute_orbit(
        &inst.space,
        &inst.map,
        x,
        max_steps.unwrap_or_else(|| default_max_steps(&inst.space)),
    )?;
    let mut json = report::orbit_json(&inst.space, &stats);
    json["point"] = json!(label);
    Ok(Rendered::new(
        json,
        report::orbit_text(&inst.space, &stats),
        Status::Success,
    ))
}

pub fn certify(
    inst: &Instance,
    spec: &ContractionSpec,
    options: CertifyOptions,
    limit: Option<usize>,
) -> Result<Rendered> {
    let r = certify_parallel(&inst.space, &inst.map, &inst.phi, spec, options)?;
    Ok(Rendered::new(
        report::certification_json(&inst.space, &r, limit),
        report::certification_text(&inst.space, &r, limit),
        verdict_status(r.verdict),
    ))
}

pub fn iterate_from(inst: &Instance, label: &str, max_steps: Option<usize>) -> Result<Rendered> {
    let x = point(inst, label)?;
    let t = iterate(&inst.map, x, max_steps.unwrap_or(inst.space.len()));
    Ok(Rendered::new(
        report::trace_json(&inst.space, &t),
        report::trace_text(&inst.space, &t),
        Status::Success,
    ))
}

pub fn fixpoints(inst: &Instance) -> Rendered {
    let r = fixed_points(&inst.map);
    Rendered::new(
        report::fixpoints_json(&inst.space, &r),
        report::fixpoints_text(&inst.space, &r),
        Status::Success,
    )
}

pub fn validate(
    inst: &Instance,
    spec: &ContractionSpec,
    options: CertifyOptions,
    limit: Option<usize>,
) -> Result<Rendered> {
    let r = validate_theorem(&inst.space, &inst.map, &inst.phi, spec, options)?;
    let status = match &r.verdict {
        TheoremVerdict::Counterexample(_) => Status::Failure,
        _ => verdict_status(r.certification.verdict),
    };
    let mut text = report::theorem_text(&inst.space, &r, limit);
    let mut json = report::theorem_json(&inst.space, &r, limit);
    if r.is_counterexample() {
        let dump = crate::instance::instance_to_json(&Instance {
            spec: Some(spec.clone()),
            ..inst.clone()
        });
        text.push_str("instance:\n");
        text.push_str(&dump);
        json["instance"] = serde_json::from_str(&dump).expect("own output");
    }
    Ok(Rendered::new(json, text, status))
}

pub fn compare(
    inst: &Instance,
    a: &ContractionSpec,
    b: &ContractionSpec,
    options: CertifyOptions,
) -> Result<Rendered> {
    let r = compare_classes(&inst.space, &inst.map, &inst.phi, a, b, options)?;
    Ok(Rendered::new(
        report::comparison_json(&inst.space, a, b, &r),
        report::comparison_text(&inst.space, a, b, &r),
        Status::Success,
    ))
}

/// Settings of a falsification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsifyArgs {
    pub trials: u64,
    pub target: Target,
    pub out_dir: Option<PathBuf>,
    /// Corpus entries placed at the start of the instance stream.
    pub inject: Vec<String>,
    pub points: Option<(usize, usize)>,
}

fn injected(name: &str, window_max: u64) -> Result<Instance> {
    let one = parse_rational("1").expect("literal");
    let two = parse_rational("2").expect("literal");
    Ok(match name {
        "example10" => corpus::example10(window_max)?,
        "example13" => corpus::example13(window_max)?,
        "example7" => corpus::example7_grid(&one, &two)?,
        other => bail!(
            "unknown corpus entry {other:?} (known: {})",
            corpus::names().join(", ")
        ),
    })
}

pub fn falsify(globals: &Globals, args: &FalsifyArgs) -> Result<Rendered> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let seed = globals.seed.unwrap_or(1);
    let window = globals.window_max.unwrap_or(EXAMPLE10_WINDOW_MAX);
    let mut gen = InstanceGenerator::new(seed);
    if let Some((lo, hi)) = args.points {
        gen = gen.with_points(lo, hi);
    }
    let inject = args
        .inject
        .iter()
        .map(|n| injected(n, window))
        .collect::<Result<Vec<_>>>()?;
    if !inject.is_empty() {
        gen = gen.with_injected(inject);
    }
    let findings = hunt_parallel(&gen, args.trials, args.target, &globals.certify_options());
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut listed = Vec::new();
    let mut text = String::new();
    for f in &findings {
        let mut files = Vec::new();
        if let Some(dir) = &args.out_dir {
            for (suffix, inst) in [("", &f.instance), ("-shrunk", &f.shrunk)] {
                let path = dir.join(format!("finding-{}{suffix}.json", f.index));
                save_instance(&path, inst)
                    .with_context(|| format!("writing {}", path.display()))?;
                files.push(path.display().to_string());
            }
        }
        text.push_str(&format!(
            "trial {}: {} ({} points, {} after shrinking)\n",
            f.index,
            f.detail,
            f.instance.space.len(),
            f.shrunk.space.len()
        ));
        for file in &files {
            text.push_str(&format!("  wrote {file}\n"));
        }
        listed.push(json!({
            "index": f.index,
            "detail": f.detail,
            "specs": f.specs.iter().map(report::spec_json).collect::<Vec<_>>(),
            "points": f.instance.space.len(),
            "shrunk_points": f.shrunk.space.len(),
            "shrunk_labels": f.shrunk.space.labels(),
            "files": files,
        }));
    }
    text.push_str(&format!(
        "{}: {} findings in {} trials (seed {seed})\n",
        args.target,
        findings.len(),
        args.trials
    ));
    let json = json!({
        "seed": seed,
        "trials": args.trials,
        "target": args.target.to_string(),
        "finding_count": findings.len(),
        "findings": listed,
    });
    let status = match args.target {
        Target::Theorem(_) if !findings.is_empty() => Status::Failure,
        _ => Status::Success,
    };
    Ok(Rendered::new(json, text, status))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_strings() {
        let s = parse_spec("type2:delta=5/6").unwrap();
        assert_eq!(s.kind(), VariantKind::TypeII);
        assert_eq!(s.coefficients().delta, Some(parse_rational("5/6").unwrap()));
        assert_eq!(parse_spec("tmmax").unwrap(), ContractionSpec::TmMax);
        assert!(parse_spec("type2:epsilon=1").is_err());
        assert!(parse_spec("type4").is_err());
        assert!(parse_spec("type2:delta=2").is_err());
    }

    #[test]
    fn flags_override_declared_coefficients() {
        let inst = corpus::example10(10).unwrap();
        let same = resolve_spec(&inst, &SpecInput::default()).unwrap();
        assert_eq!(Some(same), inst.spec.clone());
        let input = SpecInput {
            alpha: Some("1/10".into()),
            ..Default::default()
        };
        let s = resolve_spec(&inst, &input).unwrap();
        let c = s.coefficients();
        assert_eq!(c.alpha, Some(parse_rational("1/10").unwrap()));
        assert_eq!(c.delta, Some(parse_rational("5/6").unwrap()));
        let input = SpecInput {
            variant: Some("type3".into()),
            ..Default::default()
        };
        assert_eq!(
            resolve_spec(&inst, &input).unwrap(),
            ContractionSpec::TypeIII
        );
    }

    #[test]
    fn precision_values() {
        assert_eq!(precision_from(None).unwrap(), None);
        assert_eq!(precision_from(Some("50")).unwrap(), Some(50));
        assert!(precision_from(Some("lots")).is_err());
        assert!(precision_from(Some("0")).is_err());
    }
}

//! JSON instance files.
//!
//! Rationals are written as strings (`"5/6"`, `"3"`, `"0.5"`). A file looks like
//!
//! ```json
//! {
//!   "space": {"kind": "absdiff-window", "naturals": {"max": 200, "exclude": [3]}},
//!   "map": {"kind": "rule", "name": "example10"},
//!   "phi": {"family": "parity-linear", "k": "5/6"},
//!   "contraction": {"variant": "type2", "alpha": "0", "beta": "0", "gamma": "0", "delta": "5/6"}
//! }
//! ```
//!
//! An `absdiff-window` space takes exactly one of `values`, `naturals` or `grid`. Generated
//! point sets are windows of larger spaces; explicit ones are complete unless a `window`
//! description is given.

use std::fs;
use std::path::{Path, PathBuf};

use contraction_core::metric::SpaceKind;
use contraction_core::orbit::MapOrigin;
use contraction_core::{
    parse_rational, Coefficients, ContractionSpec, Instance, MetricSpace, PhiSpec, PointId,
    Rational, Rule, Scope, SelfMap, VariantKind,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {source}")]
    Parse {
        origin: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_error(field: impl Into<String>, message: impl ToString) -> LoadError {
    LoadError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space: SpaceFile,
    pub map: MapFile,
    pub phi: PhiFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionFile>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naturals: Option<NaturalsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    /// Marks the point set as a finite window of a larger space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NaturalsFile {
    pub max: u64,
    #[serde(default)]
    pub exclude: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub start: String,
    pub end: String,
    pub step: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiFile {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slopes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionFile {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
}

/// Settings applied while loading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Replaces `naturals.max` of generated windows.
    pub window_max: Option<u64>,
}

fn rational(field: &str, text: &str) -> Result<Rational, LoadError> {
    parse_rational(text).map_err(|e| field_error(field, e))
}

fn rationals(field: &str, texts: &[String]) -> Result<Vec<Rational>, LoadError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| rational(&format!("{field}[{i}]"), t))
        .collect()
}

fn required<'a, T>(field: &str, value: &'a Option<T>) -> Result<&'a T, LoadError> {
    value.as_ref().ok_or_else(|| field_error(field, "missing"))
}

fn build_space(file: &SpaceFile, options: LoadOptions) -> Result<MetricSpace, LoadError> {
    let space = match file.kind.as_str() {
        "absdiff-window" => {
            let given = [
                file.values.is_some(),
                file.naturals.is_some(),
                file.grid.is_some(),
            ];
            if given.iter().filter(|&&g| g).count() != 1 {
                return Err(field_error(
                    "space",
                    "absdiff-window needs exactly one of values, naturals, grid",
                ));
            }
            if let Some(values) = &file.values {
                MetricSpace::absdiff(rationals("space.values", values)?)
                    .map_err(|e| field_error("space.values", e))?
            } else if let Some(n) = &file.naturals {
                let max = options.window_max.unwrap_or(n.max);
                MetricSpace::naturals_window(max, &n.exclude)
                    .map_err(|e| field_error("space.naturals", e))?
            } else {
                let g = file.grid.as_ref().expect("checked above");
                let start = rational("space.grid.start", &g.start)?;
                let end = rational("space.grid.end", &g.end)?;
                let step = rational("space.grid.step", &g.step)?;
                MetricSpace::grid_window(&start, &end, &step)
                    .map_err(|e| field_error("space.grid", e))?
            }
        }
        "finite-matrix" => {
            let labels = required("space.labels", &file.labels)?.clone();
            let rows = required("space.matrix", &file.matrix)?;
            let matrix = rows
                .iter()
                .enumerate()
                .map(|(i, row)| rationals(&format!("space.matrix[{i}]"), row))
                .collect::<Result<Vec<_>, _>>()?;
            MetricSpace::finite_matrix(labels, matrix)
                .map_err(|e| field_error("space.matrix", e))?
        }
        other => {
            return Err(field_error(
                "space.kind",
                format!("unknown space kind {other:?}"),
            ))
        }
    };
    Ok(match &file.window {
        Some(note) => space.with_scope(Scope::Window(note.clone())),
        None => space,
    })
}

fn build_map(file: &MapFile, space: &MetricSpace) -> Result<SelfMap, LoadError> {
    match file.kind.as_str() {
        "table" => {
            let images = required("map.images", &file.images)?;
            let ids = images
                .iter()
                .enumerate()
                .map(|(i, label)| {
                    space.find(label).ok_or_else(|| {
                        field_error(
                            format!("map.images[{i}]"),
                            format!("image {label:?} is not a point of the space"),
                        )
                    })
                })
                .collect::<Result<Vec<PointId>, _>>()?;
            SelfMap::table(space, ids).map_err(|e| field_error("map.images", e))
        }
        "rule" => {
            let name = required("map.name", &file.name)?;
            let rule = match name.as_str() {
                "example10" => Rule::Example10,
                "example7" => Rule::Example7 {
                    a: rational("map.a", required("map.a", &file.a)?)?,
                    b: rational("map.b", required("map.b", &file.b)?)?,
                },
                other => return Err(field_error("map.name", format!("unknown rule {other:?}"))),
            };
            SelfMap::from_rule(space, rule).map_err(|e| field_error("map", e))
        }
        other => Err(field_error(
            "map.kind",
            format!("unknown map kind {other:?}"),
        )),
    }
}

fn build_phi(file: &PhiFile) -> Result<PhiSpec, LoadError> {
    let k = || rational("phi.k", required("phi.k", &file.k)?);
    match file.family.as_str() {
        "linear" => PhiSpec::linear(k()?).map_err(|e| field_error("phi.k", e)),
        "parity-linear" => PhiSpec::parity_linear(k()?).map_err(|e| field_error("phi.k", e)),
        "zero" => Ok(PhiSpec::Zero),
        "piecewise-table" => {
            let breakpoints = rationals(
                "phi.breakpoints",
                required("phi.breakpoints", &file.breakpoints)?,
            )?;
            let slopes = rationals("phi.slopes", required("phi.slopes", &file.slopes)?)?;
            PhiSpec::piecewise(breakpoints, slopes).map_err(|e| field_error("phi", e))
        }
        other => Err(field_error(
            "phi.family",
            format!("unknown family {other:?}"),
        )),
    }
}

/// Coefficients given as text, parsed with field names for error messages.
pub fn parse_coefficients(
    prefix: &str,
    texts: [&Option<String>; 5],
) -> Result<Coefficients, LoadError> {
    let names = ["alpha", "beta", "gamma", "delta", "mu"];
    let mut parsed: [Option<Rational>; 5] = Default::default();
    for (slot, (name, text)) in parsed.iter_mut().zip(names.iter().zip(texts)) {
        if let Some(t) = text {
            *slot = Some(rational(&format!("{prefix}{name}"), t)?);
        }
    }
    let [alpha, beta, gamma, delta, mu] = parsed;
    Ok(Coefficients {
        alpha,
        beta,
        gamma,
        delta,
        mu,
    })
}

fn build_contraction(file: &ContractionFile) -> Result<ContractionSpec, LoadError> {
    let kind: VariantKind = file
        .variant
        .parse()
        .map_err(|e| field_error("contraction.variant", e))?;
    let c = parse_coefficients(
        "contraction.",
        [&file.alpha, &file.beta, &file.gamma, &file.delta, &file.mu],
    )?;
    ContractionSpec::from_parts(kind, &c).map_err(|e| field_error("contraction", e))
}

impl InstanceFile {
    pub fn build(&self, options: LoadOptions) -> Result<Instance, LoadError> {
        let space = build_space(&self.space, options)?;
        let map = build_map(&self.map, &space)?;
        let phi = build_phi(&self.phi)?;
        let spec = self
            .contraction
            .as_ref()
            .map(build_contraction)
            .transpose()?;
        Ok(Instance {
            space,
            map,
            phi,
            spec,
        })
    }

    /// The file form of `inst`. Point sets are always written out explicitly.
    pub fn from_instance(inst: &Instance) -> Self {
        let space = &inst.space;
        let window = match space.scope() {
            Scope::Complete => None,
            Scope::Window(note) => Some(note.clone()),
        };
        let space_file = match space.kind() {
            SpaceKind::AbsDiff { values } => SpaceFile {
                kind: "absdiff-window".into(),
                values: Some(values.iter().map(ToString::to_string).collect()),
                window,
                ..Default::default()
            },
            SpaceKind::FiniteMatrix { matrix } => SpaceFile {
                kind: "finite-matrix".into(),
                labels: Some(space.labels().to_vec()),
                matrix: Some(
                    matrix
                        .iter()
                        .map(|row| row.iter().map(ToString::to_string).collect())
                        .collect(),
                ),
                window,
                ..Default::default()
            },
        };
        let map = match inst.map.origin() {
            MapOrigin::Rule(Rule::Example10) => MapFile {
                kind: "rule".into(),
                name: Some("example10".into()),
                ..Default::default()
            },
            MapOrigin::Rule(Rule::Example7 { a, b }) => MapFile {
                kind: "rule".into(),
                name: Some("example7".into()),
                a: Some(a.to_string()),
                b: Some(b.to_string()),
                ..Default::default()
            },
            MapOrigin::Table => MapFile {
                kind: "table".into(),
                images: Some(
                    inst.map
                        .images()
                        .iter()
                        .map(|&p| space.label(p).to_string())
                        .collect(),
                ),
                ..Default::default()
            },
        };
        Self {
            space: space_file,
            map,
            phi: phi_file(&inst.phi),
            contraction: inst.spec.as_ref().map(contraction_file),
        }
    }
}

fn phi_file(phi: &PhiSpec) -> PhiFile {
    let family = phi.family_name().to_string();
    match phi {
        PhiSpec::Linear { k } | PhiSpec::ParityLinear { k } => PhiFile {
            family,
            k: Some(k.to_string()),
            ..Default::default()
        },
        PhiSpec::Zero => PhiFile {
            family,
            ..Default::default()
        },
        PhiSpec::PiecewiseTable {
            breakpoints,
            slopes,
        } => PhiFile {
            family,
            breakpoints: Some(breakpoints.iter().map(ToString::to_string).collect()),
            slopes: Some(slopes.iter().map(ToString::to_string).collect()),
            ..Default::default()
        },
    }
}

pub fn contraction_file(spec: &ContractionSpec) -> ContractionFile {
    let c = spec.coefficients();
    let s = |v: Option<Rational>| v.map(|r| r.to_string());
    ContractionFile {
        variant: spec.kind().name().to_string(),
        alpha: s(c.alpha),
        beta: s(c.beta),
        gamma: s(c.gamma),
        delta: s(c.delta),
        mu: s(c.mu),
    }
}

pub fn parse_instance(
    text: &str,
    origin: &str,
    options: LoadOptions,
) -> Result<Instance, LoadError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|source| LoadError::Parse {
        origin: origin.to_string(),
        source,
    })?;
    file.build(options)
}

pub fn load_instance(path: &Path, options: LoadOptions) -> Result<Instance, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_instance(&text, &path.display().to_string(), options)
}

pub fn instance_to_json(inst: &Instance) -> String {
    let mut text =
        serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("plain data");
    text.push('\n');
    text
}

pub fn save_instance(path: &Path, inst: &Instance) -> std::io::Result<()> {
    fs::write(path, instance_to_json(inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use contraction_core::corpus;

    fn parse(text: &str) -> Result<Instance, LoadError> {
        parse_instance(text, "test", LoadOptions::default())
    }

    #[test]
    fn loads_generated_example10() {
        let inst = parse(
            r#"{"space": {"kind": "absdiff-window", "naturals": {"max": 30, "exclude": [3]}},
                "map": {"kind": "rule", "name": "example10"},
                "phi": {"family": "parity-linear", "k": "5/6"},
                "contraction": {"variant": "type2", "alpha": "0", "beta": "0", "gamma": "0", "delta": "5/6"}}"#,
        )
        .unwrap();
        assert_eq!(inst, corpus::example10(30).unwrap());
    }

    #[test]
    fn window_max_overrides_naturals() {
        let text = r#"{"space": {"kind": "absdiff-window", "naturals": {"max": 30, "exclude": [3]}},
                       "map": {"kind": "rule", "name": "example10"}, "phi": {"family": "zero"}}"#;
        let inst = parse_instance(
            text,
            "t",
            LoadOptions {
                window_max: Some(12),
            },
        )
        .unwrap();
        assert_eq!(inst.space.len(), 11);
    }

    #[test]
    fn round_trips() {
        for inst in [
            corpus::example10(25).unwrap(),
            corpus::example10_finite(12).unwrap(),
            corpus::example7_grid(&parse_rational("1").unwrap(), &parse_rational("2").unwrap())
                .unwrap(),
        ] {
            assert_eq!(parse(&instance_to_json(&inst)).unwrap(), inst);
        }
    }

    #[test]
    fn errors_name_the_field() {
        let bad_matrix = r#"{"space": {"kind": "finite-matrix", "labels": ["a", "b"], "matrix": [["0", "5/0"], ["1", "0"]]},
                            "map": {"kind": "table", "images": ["a", "a"]}, "phi": {"family": "zero"}}"#;
        let msg = parse(bad_matrix).unwrap_err().to_string();
        assert!(msg.starts_with("space.matrix[0][1]:"), "{msg}");
        assert!(msg.contains("5/0"), "{msg}");

        let outside = r#"{"space": {"kind": "absdiff-window", "values": ["1", "2"]},
                         "map": {"kind": "table", "images": ["2", "9"]}, "phi": {"family": "zero"}}"#;
        let msg = parse(outside).unwrap_err().to_string();
        assert!(msg.starts_with("map.images[1]:"), "{msg}");

        let family = r#"{"space": {"kind": "absdiff-window", "values": ["1"]},
                        "map": {"kind": "table", "images": ["1"]}, "phi": {"family": "cubic"}}"#;
        assert!(parse(family)
            .unwrap_err()
            .to_string()
            .starts_with("phi.family:"));

        let syntax = "{\"space\": {\n  \"kind\": }";
        let msg = parse(syntax).unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn rule_images_must_stay_inside() {
        let text = r#"{"space": {"kind": "absdiff-window", "values": ["1", "3", "4"]},
                      "map": {"kind": "rule", "name": "example7", "a": "1", "b": "2"}, "phi": {"family": "zero"}}"#;
        assert!(parse(text).unwrap_err().to_string().starts_with("map:"));
    }
}

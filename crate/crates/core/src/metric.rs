//! Finite metric spaces with exact distances.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::scalar::Rational;

/// Index of a point in its space's point table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub usize);

impl PointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("a metric space needs at least one point")]
    Empty,
    #[error("point index {index} out of range for a space of {len} points")]
    OutOfRange { index: usize, len: usize },
    #[error("distance matrix row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("{labels} labels given for a {points}-point matrix")]
    LabelCount { labels: usize, points: usize },
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("negative distance {value} at ({row}, {col})")]
    NegativeDistance {
        row: usize,
        col: usize,
        value: Rational,
    },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
}

/// Whether a space is the whole object of study or a finite window cut from a larger set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    /// A finite space in its own right (hence complete).
    Complete,
    /// A finite window of an infinite set; the string describes the window.
    Window(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceKind {
    /// Abstract points with an explicit distance matrix.
    FiniteMatrix { matrix: Vec<Vec<Rational>> },
    /// Numeric points with distance `|u - v|`.
    AbsDiff { values: Vec<Rational> },
}

/// A finite metric space `(X, D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    labels: Vec<String>,
    kind: SpaceKind,
    scope: Scope,
}

fn check_labels(labels: &[String]) -> Result<(), SpaceError> {
    let mut seen = BTreeMap::new();
    for label in labels {
        if seen.insert(label.as_str(), ()).is_some() {
            return Err(SpaceError::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

impl MetricSpace {
    /// Builds a finite-matrix space. Shape, label uniqueness and nonnegativity are enforced
    /// here; the metric axioms themselves are reported by [`validate_metric`].
    pub fn finite_matrix(
        labels: Vec<String>,
        matrix: Vec<Vec<Rational>>,
    ) -> Result<Self, SpaceError> {
        let n = matrix.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        if labels.len() != n {
            return Err(SpaceError::LabelCount {
                labels: labels.len(),
                points: n,
            });
        }
        for (row, entries) in matrix.iter().enumerate() {
            if entries.len() != n {
                return Err(SpaceError::NotSquare {
                    row,
                    found: entries.len(),
                    expected: n,
                });
            }
            if let Some((col, value)) = entries.iter().enumerate().find(|(_, v)| v.is_negative()) {
                return Err(SpaceError::NegativeDistance {
                    row,
                    col,
                    value: value.clone(),
                });
            }
        }
        check_labels(&labels)?;
        Ok(Self {
            labels,
            kind: SpaceKind::FiniteMatrix { matrix },
            scope: Scope::Complete,
        })
    }

    /// Builds a space of distinct numbers under `|u - v|`, labelled by their rational form.
    pub fn absdiff(values: Vec<Rational>) -> Result<Self, SpaceError> {
        if values.is_empty() {
            return Err(SpaceError::Empty);
        }
        let labels: Vec<String> = values.iter().map(ToString::to_string).collect();
        check_labels(&labels)?;
        Ok(Self {
            labels,
            kind: SpaceKind::AbsDiff { values },
            scope: Scope::Complete,
        })
    }

    /// The window `{1, ..., max} \ exclude` of the naturals under the usual metric.
    pub fn naturals_window(max: u64, exclude: &[u64]) -> Result<Self, SpaceError> {
        let values: Vec<Rational> = (1..=max)
            .filter(|n| !exclude.contains(n))
            .map(|n| Rational::from_integer(n.into()))
            .collect();
        let mut note = String::from("naturals");
        if !exclude.is_empty() {
            let listed: Vec<String> = exclude.iter().map(ToString::to_string).collect();
            note.push_str(&format!(" \\ {{{}}}", listed.join(",")));
        }
        note.push_str(&format!(" intersected with [1, {max}]"));
        Ok(Self::absdiff(values)?.with_scope(Scope::Window(note)))
    }

    /// The grid `start, start + step, ..., end` (inclusive when `end` is on the grid).
    pub fn grid_window(
        start: &Rational,
        end: &Rational,
        step: &Rational,
    ) -> Result<Self, SpaceError> {
        if !step.is_positive() {
            return Err(SpaceError::InvalidWindow(format!(
                "grid step {step} must be positive"
            )));
        }
        if end < start {
            return Err(SpaceError::InvalidWindow(format!(
                "grid end {end} precedes start {start}"
            )));
        }
        let mut values = Vec::new();
        let mut t = start.clone();
        while &t <= end {
            values.push(t.clone());
            t += step;
        }
        let note = format!("grid [{start}, {end}] with step {step}");
        Ok(Self::absdiff(values)?.with_scope(Scope::Window(note)))
    }

    pub fn with_scope(mut self, scope: Scope) -> Self {
        self.scope = scope;
        self
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    /// Human-readable description of the point set, for reports.
    pub fn window_note(&self) -> String {
        match &self.scope {
            Scope::Complete => format!("complete finite space of {} points", self.len()),
            Scope::Window(note) => format!("window of {} points: {note}", self.len()),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p.0]
    }

    pub fn check(&self, p: PointId) -> Result<PointId, SpaceError> {
        if p.0 < self.len() {
            Ok(p)
        } else {
            Err(SpaceError::OutOfRange {
                index: p.0,
                len: self.len(),
            })
        }
    }

    /// Numeric value of a point, for absdiff spaces.
    pub fn value(&self, p: PointId) -> Option<&Rational> {
        match &self.kind {
            SpaceKind::AbsDiff { values } => values.get(p.0),
            SpaceKind::FiniteMatrix { .. } => None,
        }
    }

    /// Looks a point up by label, or by numeric value for absdiff spaces.
    pub fn find(&self, label: &str) -> Option<PointId> {
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Some(PointId(i));
        }
        let wanted = crate::scalar::parse_rational(label).ok()?;
        self.find_value(&wanted)
    }

    pub fn find_value(&self, wanted: &Rational) -> Option<PointId> {
        match &self.kind {
            SpaceKind::AbsDiff { values } => values.iter().position(|v| v == wanted).map(PointId),
            SpaceKind::FiniteMatrix { .. } => None,
        }
    }

    /// `D(x, y)`.
    pub fn distance(&self, x: PointId, y: PointId) -> Result<Rational, SpaceError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.d(x, y))
    }

    /// Unchecked distance; panics on out-of-range ids.
    pub(crate) fn d(&self, x: PointId, y: PointId) -> Rational {
        match &self.kind {
            SpaceKind::FiniteMatrix { matrix } => matrix[x.0][y.0].clone(),
            SpaceKind::AbsDiff { values } => (&values[x.0] - &values[y.0]).abs(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.len()).map(PointId)
    }

    /// Sub-space on the given points, in the given order. Scope is inherited.
    pub fn restrict(&self, keep: &[PointId]) -> Self {
        let labels = keep.iter().map(|&p| self.labels[p.0].clone()).collect();
        let kind = match &self.kind {
            SpaceKind::FiniteMatrix { matrix } => SpaceKind::FiniteMatrix {
                matrix: keep
                    .iter()
                    .map(|&r| keep.iter().map(|&c| matrix[r.0][c.0].clone()).collect())
                    .collect(),
            },
            SpaceKind::AbsDiff { values } => SpaceKind::AbsDiff {
                values: keep.iter().map(|&p| values[p.0].clone()).collect(),
            },
        };
        Self {
            labels,
            kind,
            scope: self.scope.clone(),
        }
    }

    /// The same space with every distance tabulated explicitly.
    pub fn to_finite_matrix(&self) -> Self {
        let matrix = self
            .points()
            .map(|r| self.points().map(|c| self.d(r, c)).collect())
            .collect();
        Self {
            labels: self.labels.clone(),
            kind: SpaceKind::FiniteMatrix { matrix },
            scope: self.scope.clone(),
        }
    }
}

/// Deterministic ordering of the certification window.
pub fn window_points(space: &MetricSpace) -> Vec<PointId> {
    space.points().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `D(x, x) != 0`.
    NonzeroSelfDistance(PointId),
    /// `D(x, y) = 0` with `x != y`.
    ZeroSeparation(PointId, PointId),
    Asymmetry(PointId, PointId),
    /// `D(x, z) > D(x, y) + D(y, z)`, stored as `(x, y, z)`.
    Triangle(PointId, PointId, PointId),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetricReport {
    pub violations: Vec<AxiomViolation>,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively checks identity of indiscernibles, symmetry and the triangle inequality.
pub fn validate_metric(space: &MetricSpace) -> MetricReport {
    let mut violations = Vec::new();
    let n = space.len();
    for i in 0..n {
        let x = PointId(i);
        if !space.d(x, x).is_zero() {
            violations.push(AxiomViolation::NonzeroSelfDistance(x));
        }
        for j in i + 1..n {
            let y = PointId(j);
            let (dxy, dyx) = (space.d(x, y), space.d(y, x));
            if dxy.is_zero() || dyx.is_zero() {
                violations.push(AxiomViolation::ZeroSeparation(x, y));
            }
            if dxy != dyx {
                violations.push(AxiomViolation::Asymmetry(x, y));
            }
        }
    }
    if let SpaceKind::AbsDiff { .. } = space.kind {
        // |u - v| satisfies the triangle inequality
        return MetricReport { violations };
    }
    let matrix: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| space.d(PointId(i), PointId(j))).collect())
        .collect();
    match scaled_integers(&matrix) {
        Some(m) => triangle_violations(&m, |a, b| a + b, &mut violations),
        None => triangle_violations(&matrix, |a, b| a + b, &mut violations),
    }
    MetricReport { violations }
}

/// The distances over a common denominator, if they all fit comfortably in `i128`.
fn scaled_integers(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<i128>>> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let mut lcm = num_bigint::BigInt::from(1);
    for d in matrix.iter().flatten() {
        lcm = lcm.lcm(d.denom());
    }
    let limit = i128::MAX / 4;
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|d| {
                    (d.numer() * (&lcm / d.denom()))
                        .to_i128()
                        .filter(|v| v.abs() <= limit)
                })
                .collect()
        })
        .collect()
}

fn triangle_violations<T: PartialOrd>(
    m: &[Vec<T>],
    add: impl Fn(&T, &T) -> T,
    out: &mut Vec<AxiomViolation>,
) {
    let n = m.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == k || j == i || j == k {
                    continue;
                }
                if m[i][k] > add(&m[i][j], &m[j][k]) {
                    out.push(AxiomViolation::Triangle(PointId(i), PointId(j), PointId(k)));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn matrix(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| q(v)).collect())
            .collect()
    }

    #[test]
    fn discrete_metric_passes() {
        let space = MetricSpace::finite_matrix(
            labels(&["a", "b", "c"]),
            matrix(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]),
        )
        .unwrap();
        assert!(validate_metric(&space).passed());
    }

    #[test]
    fn asymmetric_matrix_names_the_pair() {
        let space =
            MetricSpace::finite_matrix(labels(&["a", "b"]), matrix(&[&[0, 1], &[2, 0]])).unwrap();
        let report = validate_metric(&space);
        assert_eq!(
            report.violations,
            vec![AxiomViolation::Asymmetry(PointId(0), PointId(1))]
        );
    }

    #[test]
    fn triangle_violation_names_the_triple() {
        let space = MetricSpace::finite_matrix(
            labels(&["a", "b", "c"]),
            matrix(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]),
        )
        .unwrap();
        let report = validate_metric(&space);
        // oracle: every ordered triple (x, y, z) with D(x,z) > D(x,y) + D(y,z)
        let mut expected = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    let d = |a: usize, b: usize| space.distance(PointId(a), PointId(b)).unwrap();
                    if x != y && y != z && x != z && d(x, z) > d(x, y) + d(y, z) {
                        expected.push(AxiomViolation::Triangle(PointId(x), PointId(y), PointId(z)));
                    }
                }
            }
        }
        assert_eq!(report.violations, expected);
        assert!(report.violations.contains(&AxiomViolation::Triangle(
            PointId(0),
            PointId(1),
            PointId(2)
        )));
    }

    #[test]
    fn zero_separation_and_self_distance_are_reported() {
        let space =
            MetricSpace::finite_matrix(labels(&["a", "b"]), matrix(&[&[1, 0], &[0, 0]])).unwrap();
        let report = validate_metric(&space);
        assert!(report
            .violations
            .contains(&AxiomViolation::NonzeroSelfDistance(PointId(0))));
        assert!(report
            .violations
            .contains(&AxiomViolation::ZeroSeparation(PointId(0), PointId(1))));
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert_eq!(
            MetricSpace::finite_matrix(vec![], vec![]),
            Err(SpaceError::Empty)
        );
        assert!(matches!(
            MetricSpace::finite_matrix(labels(&["a", "b"]), matrix(&[&[0, 1], &[1]])),
            Err(SpaceError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            MetricSpace::finite_matrix(labels(&["a", "a"]), matrix(&[&[0, 1], &[1, 0]])),
            Err(SpaceError::DuplicateLabel(_))
        ));
        assert!(matches!(
            MetricSpace::finite_matrix(labels(&["a", "b"]), matrix(&[&[0, -1], &[1, 0]])),
            Err(SpaceError::NegativeDistance { .. })
        ));
        assert!(matches!(
            MetricSpace::absdiff(vec![q(1), q(1)]),
            Err(SpaceError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn distance_on_absdiff_and_matrix() {
        let space = MetricSpace::naturals_window(12, &[]).unwrap();
        let seven = space.find("7").unwrap();
        let two = space.find("2").unwrap();
        assert_eq!(space.distance(seven, two).unwrap(), q(5));
        assert_eq!(space.distance(seven, seven).unwrap(), q(0));
        assert_eq!(
            space.distance(PointId(99), two),
            Err(SpaceError::OutOfRange { index: 99, len: 12 })
        );

        let m =
            MetricSpace::finite_matrix(labels(&["a", "b"]), matrix(&[&[0, 3], &[3, 0]])).unwrap();
        assert_eq!(m.distance(PointId(0), PointId(1)).unwrap(), q(3));
    }

    #[test]
    fn windows_enumerate_deterministically() {
        let space = MetricSpace::naturals_window(12, &[3]).unwrap();
        let got: Vec<&str> = window_points(&space)
            .into_iter()
            .map(|p| space.label(p))
            .collect();
        assert_eq!(
            got,
            ["1", "2", "4", "5", "6", "7", "8", "9", "10", "11", "12"]
        );

        let small = MetricSpace::naturals_window(3, &[]).unwrap();
        assert_eq!(
            window_points(&small),
            vec![PointId(0), PointId(1), PointId(2)]
        );

        let half = Rational::new(1.into(), 2.into());
        let grid = MetricSpace::grid_window(&q(0), &q(10), &half).unwrap();
        assert_eq!(window_points(&grid).len(), 21);
        assert!(matches!(grid.scope(), Scope::Window(_)));
    }

    #[test]
    fn restriction_keeps_distances() {
        let space = MetricSpace::naturals_window(6, &[]).unwrap();
        let sub = space.restrict(&[PointId(5), PointId(1)]);
        assert_eq!(sub.labels(), ["6", "2"]);
        assert_eq!(sub.distance(PointId(0), PointId(1)).unwrap(), q(4));
        let tab = space.to_finite_matrix();
        for x in space.points() {
            for y in space.points() {
                assert_eq!(tab.distance(x, y), space.distance(x, y));
            }
        }
    }
}

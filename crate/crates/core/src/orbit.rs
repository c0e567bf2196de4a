//! Self-maps, orbits and the orbit-diameter functionals.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::metric::{MetricSpace, PointId, SpaceError};
use crate::scalar::Rational;

/// Named piecewise rules on numeric spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `f(x) = b` for `x != a`, `f(a) = a`.
    Example7 { a: Rational, b: Rational },
    /// `f(x) = 2` for `x` in `{7, 11, 15, ...}`, `f(x) = 1` otherwise.
    Example10,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Example7 { .. } => "example7",
            Rule::Example10 => "example10",
        }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        match self {
            Rule::Example7 { a, b } => {
                if x == a {
                    a.clone()
                } else {
                    b.clone()
                }
            }
            Rule::Example10 => {
                if in_class_a(x) {
                    Rational::from_integer(2.into())
                } else {
                    Rational::one()
                }
            }
        }
    }
}

/// Membership in `A = {7, 11, 15, ...}`.
pub fn in_class_a(x: &Rational) -> bool {
    x.is_integer() && *x.numer() >= 7.into() && x.numer().mod_floor(&4.into()) == 3.into()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapOrigin {
    Table,
    Rule(Rule),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("map has {images} images for a space of {points} points")]
    LengthMismatch { images: usize, points: usize },
    #[error("image of point {point} is {image}, which is not a point of the space")]
    NotClosed { point: String, image: String },
    #[error("rule `{0}` needs a numeric (absdiff) space")]
    NotNumeric(&'static str),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A total self-map `f : X -> X`, materialized as an image table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMap {
    images: Vec<PointId>,
    origin: MapOrigin,
}

impl SelfMap {
    pub fn table(space: &MetricSpace, images: Vec<PointId>) -> Result<Self, MapError> {
        if images.len() != space.len() {
            return Err(MapError::LengthMismatch {
                images: images.len(),
                points: space.len(),
            });
        }
        for (i, image) in images.iter().enumerate() {
            if space.check(*image).is_err() {
                return Err(MapError::NotClosed {
                    point: space.label(PointId(i)).into(),
                    image: alloc::format!("{image}"),
                });
            }
        }
        Ok(Self {
            images,
            origin: MapOrigin::Table,
        })
    }

    /// Evaluates `rule` on every point; an image outside the window is a closure error.
    pub fn from_rule(space: &MetricSpace, rule: Rule) -> Result<Self, MapError> {
        let mut images = Vec::with_capacity(space.len());
        for p in space.points() {
            let value = space.value(p).ok_or(MapError::NotNumeric(rule.name()))?;
            let image = rule.apply(value);
            let target = space
                .find_value(&image)
                .ok_or_else(|| MapError::NotClosed {
                    point: space.label(p).into(),
                    image: alloc::format!("{image}"),
                })?;
            images.push(target);
        }
        Ok(Self {
            images,
            origin: MapOrigin::Rule(rule),
        })
    }

    pub fn identity(space: &MetricSpace) -> Self {
        Self {
            images: space.points().collect(),
            origin: MapOrigin::Table,
        }
    }

    pub fn apply(&self, x: PointId) -> PointId {
        self.images[x.0]
    }

    pub fn images(&self) -> &[PointId] {
        &self.images
    }

    pub fn origin(&self) -> &MapOrigin {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_fixed(&self, x: PointId) -> bool {
        self.apply(x) == x
    }

    /// Restriction to `keep`, which must be closed under the map. Returns `None` otherwise.
    pub fn restrict(&self, keep: &[PointId]) -> Option<Self> {
        let mut position = vec![usize::MAX; self.images.len()];
        for (new, old) in keep.iter().enumerate() {
            position[old.0] = new;
        }
        let images = keep
            .iter()
            .map(|&p| {
                let target = position[self.apply(p).0];
                (target != usize::MAX).then_some(PointId(target))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self {
            images,
            origin: MapOrigin::Table,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbitError {
    #[error("orbit of point {point} did not repeat within {max_steps} steps")]
    NonPeriodicWithinBudget { point: String, max_steps: usize },
    #[error("map covers {map} points but the space has {space}")]
    SpaceMismatch { map: usize, space: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// The orbit `O_f(x)` in first-visit order and its diameter `D_f(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitStats {
    pub orbit: Vec<PointId>,
    /// Index in `orbit` where the cycle starts.
    pub tail_entry: usize,
    pub diameter: Rational,
}

impl OrbitStats {
    pub fn cycle(&self) -> &[PointId] {
        &self.orbit[self.tail_entry..]
    }
}

/// `D_f(x, y)` and `M_f(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairStats {
    pub pair_diameter: Rational,
    pub mean_diameter: Rational,
}

/// Step budget that guarantees a repeat on a finite space.
pub fn default_max_steps(space: &MetricSpace) -> usize {
    space.len() + 1
}

fn ensure_compatible(space: &MetricSpace, map: &SelfMap) -> Result<(), OrbitError> {
    if space.len() == map.len() {
        Ok(())
    } else {
        Err(OrbitError::SpaceMismatch {
            map: map.len(),
            space: space.len(),
        })
    }
}

/// Iterates `f` from `x` until a point recurs, keeping a running maximum of distances.
pub fn compute_orbit(
    space: &MetricSpace,
    map: &SelfMap,
    x: PointId,
    max_steps: usize,
) -> Result<OrbitStats, OrbitError> {
    ensure_compatible(space, map)?;
    space.check(x)?;
    let mut first_seen = vec![usize::MAX; space.len()];
    let mut orbit = vec![x];
    first_seen[x.0] = 0;
    let mut diameter = Rational::zero();
    let mut current = x;
    for _ in 0..max_steps {
        let next = map.apply(current);
        if first_seen[next.0] != usize::MAX {
            return Ok(OrbitStats {
                tail_entry: first_seen[next.0],
                orbit,
                diameter,
            });
        }
        for &seen in &orbit {
            let d = space.d(seen, next);
            if d > diameter {
                diameter = d;
            }
        }
        first_seen[next.0] = orbit.len();
        orbit.push(next);
        current = next;
    }
    Err(OrbitError::NonPeriodicWithinBudget {
        point: space.label(x).into(),
        max_steps,
    })
}

fn union_diameter(space: &MetricSpace, a: &OrbitStats, b: &OrbitStats) -> Rational {
    let mut best = if a.diameter >= b.diameter {
        a.diameter.clone()
    } else {
        b.diameter.clone()
    };
    for &u in &a.orbit {
        for &v in &b.orbit {
            let d = space.d(u, v);
            if d > best {
                best = d;
            }
        }
    }
    best
}

fn mean(a: &Rational, b: &Rational) -> Rational {
    (a + b) / Rational::from_integer(2.into())
}

/// `D_f(x, y)` and `M_f(x, y)` computed from scratch.
pub fn pair_stats(
    space: &MetricSpace,
    map: &SelfMap,
    x: PointId,
    y: PointId,
    max_steps: usize,
) -> Result<PairStats, OrbitError> {
    let ox = compute_orbit(space, map, x, max_steps)?;
    let oy = compute_orbit(space, map, y, max_steps)?;
    Ok(PairStats {
        pair_diameter: union_diameter(space, &ox, &oy),
        mean_diameter: mean(&ox.diameter, &oy.diameter),
    })
}

/// `Fix(f)` in window order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixPointReport {
    pub fixed_points: Vec<PointId>,
    pub unique: bool,
}

pub fn fixed_points(map: &SelfMap) -> FixPointReport {
    let fixed_points: Vec<PointId> = (0..map.len())
        .map(PointId)
        .filter(|&p| map.is_fixed(p))
        .collect();
    let unique = fixed_points.len() == 1;
    FixPointReport {
        fixed_points,
        unique,
    }
}

/// Orbit statistics for every point, computed once per `(space, map)`.
///
/// Immutable after construction, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct OrbitTable<'a> {
    space: &'a MetricSpace,
    map: &'a SelfMap,
    stats: Vec<OrbitStats>,
}

impl<'a> OrbitTable<'a> {
    pub fn build(
        space: &'a MetricSpace,
        map: &'a SelfMap,
        max_steps: usize,
    ) -> Result<Self, OrbitError> {
        ensure_compatible(space, map)?;
        let stats = space
            .points()
            .map(|p| compute_orbit(space, map, p, max_steps))
            .collect::<Result<_, _>>()?;
        Ok(Self { space, map, stats })
    }

    pub fn space(&self) -> &'a MetricSpace {
        self.space
    }

    pub fn map(&self) -> &'a SelfMap {
        self.map
    }

    pub fn stats(&self, x: PointId) -> &OrbitStats {
        &self.stats[x.0]
    }

    pub fn diameter(&self, x: PointId) -> &Rational {
        &self.stats[x.0].diameter
    }

    pub fn pair(&self, x: PointId, y: PointId) -> PairStats {
        let (a, b) = (&self.stats[x.0], &self.stats[y.0]);
        PairStats {
            pair_diameter: union_diameter(self.space, a, b),
            mean_diameter: mean(&a.diameter, &b.diameter),
        }
    }

    /// `[D_f(x), D_f(fx), ..., D_f(f^n x)]`.
    pub fn diameter_sequence(&self, x: PointId, n: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(n + 1);
        let mut p = x;
        for _ in 0..=n {
            out.push(self.diameter(p).clone());
            p = self.map.apply(p);
        }
        out
    }
}

pub fn orbit_diameter_sequence(
    space: &MetricSpace,
    map: &SelfMap,
    x: PointId,
    n: usize,
    max_steps: usize,
) -> Result<Vec<Rational>, OrbitError> {
    ensure_compatible(space, map)?;
    space.check(x)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut p = x;
    for _ in 0..=n {
        out.push(compute_orbit(space, map, p, max_steps)?.diameter);
        p = map.apply(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn labels(space: &MetricSpace, orbit: &[PointId]) -> Vec<String> {
        orbit.iter().map(|&p| space.label(p).into()).collect()
    }

    #[test]
    fn example10_orbit_of_seven() {
        let inst = corpus::example10(12).unwrap();
        let seven = inst.space.find("7").unwrap();
        let stats = compute_orbit(&inst.space, &inst.map, seven, 13).unwrap();
        assert_eq!(labels(&inst.space, &stats.orbit), ["7", "2", "1"]);
        assert_eq!(stats.tail_entry, 2);
        assert_eq!(stats.diameter, q(6));
    }

    #[test]
    fn fixed_point_orbit_is_singleton() {
        let inst = corpus::example10(12).unwrap();
        let one = inst.space.find("1").unwrap();
        let stats = compute_orbit(&inst.space, &inst.map, one, 13).unwrap();
        assert_eq!(stats.orbit, [one]);
        assert_eq!(stats.diameter, q(0));
    }

    #[test]
    fn example7_orbit_of_five() {
        let inst = corpus::example7_naturals(&q(1), &q(2), 10).unwrap();
        let five = inst.space.find("5").unwrap();
        let stats = compute_orbit(&inst.space, &inst.map, five, 11).unwrap();
        assert_eq!(labels(&inst.space, &stats.orbit), ["5", "2"]);
        assert_eq!(stats.diameter, q(3));
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let inst = corpus::example10(12).unwrap();
        let seven = inst.space.find("7").unwrap();
        assert!(matches!(
            compute_orbit(&inst.space, &inst.map, seven, 2),
            Err(OrbitError::NonPeriodicWithinBudget { max_steps: 2, .. })
        ));
    }

    #[test]
    fn pair_stats_examples() {
        let inst = corpus::example10(12).unwrap();
        let p = |s: &str| inst.space.find(s).unwrap();
        let s = pair_stats(&inst.space, &inst.map, p("7"), p("5"), 13).unwrap();
        assert_eq!((s.pair_diameter, s.mean_diameter), (q(6), q(5)));
        let s = pair_stats(&inst.space, &inst.map, p("7"), p("2"), 13).unwrap();
        assert_eq!(
            (s.pair_diameter, s.mean_diameter),
            (q(6), Rational::new(7.into(), 2.into()))
        );
        let s = pair_stats(&inst.space, &inst.map, p("1"), p("1"), 13).unwrap();
        assert_eq!((s.pair_diameter, s.mean_diameter), (q(0), q(0)));
    }

    #[test]
    fn fixed_point_reports() {
        let inst = corpus::example10(200).unwrap();
        let report = fixed_points(&inst.map);
        assert_eq!(labels(&inst.space, &report.fixed_points), ["1"]);
        assert!(report.unique);

        let inst = corpus::example7_grid(&q(1), &q(2)).unwrap();
        let report = fixed_points(&inst.map);
        assert_eq!(labels(&inst.space, &report.fixed_points), ["1", "2"]);
        assert!(!report.unique);

        let space = MetricSpace::naturals_window(3, &[]).unwrap();
        let report = fixed_points(&SelfMap::identity(&space));
        assert_eq!(report.fixed_points.len(), 3);
        assert!(!report.unique);
    }

    #[test]
    fn diameter_sequences() {
        let inst = corpus::example10(12).unwrap();
        let seven = inst.space.find("7").unwrap();
        assert_eq!(
            orbit_diameter_sequence(&inst.space, &inst.map, seven, 2, 13).unwrap(),
            [q(6), q(1), q(0)]
        );
        let one = inst.space.find("1").unwrap();
        assert_eq!(
            orbit_diameter_sequence(&inst.space, &inst.map, one, 3, 13).unwrap(),
            vec![q(0); 4]
        );

        let inst = corpus::example7_naturals(&q(1), &q(2), 10).unwrap();
        let five = inst.space.find("5").unwrap();
        let table = OrbitTable::build(&inst.space, &inst.map, 11).unwrap();
        assert_eq!(table.diameter_sequence(five, 1), [q(3), q(0)]);
    }

    #[test]
    fn rule_outside_window_is_a_closure_error() {
        let space = MetricSpace::naturals_window(10, &[1]).unwrap();
        assert!(matches!(
            SelfMap::from_rule(&space, Rule::Example10),
            Err(MapError::NotClosed { .. })
        ));
        let labels: Vec<String> = ["a".into(), "b".into()].into();
        let matrix = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        let abstract_space = MetricSpace::finite_matrix(labels, matrix).unwrap();
        assert_eq!(
            SelfMap::from_rule(&abstract_space, Rule::Example10),
            Err(MapError::NotNumeric("example10"))
        );
    }

    #[test]
    fn restriction_requires_closure() {
        let inst = corpus::example10(12).unwrap();
        let p = |s: &str| inst.space.find(s).unwrap();
        assert!(inst.map.restrict(&[p("1"), p("7")]).is_none());
        let sub = inst.map.restrict(&[p("1"), p("2"), p("7")]).unwrap();
        assert_eq!(sub.images(), [PointId(0), PointId(0), PointId(1)]);
    }
}

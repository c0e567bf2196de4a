//! Seeded random search for theorem counterexamples and class separations.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::{certify, CertifyOptions, ContractionSpec, VariantKind, Verdict};
use crate::metric::{MetricSpace, PointId};
use crate::orbit::SelfMap;
use crate::phi::PhiSpec;
use crate::picard::validate_theorem;
use crate::scalar::Rational;
use crate::Instance;

/// Largest denominator used for random weights, slopes and coefficients.
pub const MAX_DENOMINATOR: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceScheme {
    /// Shortest-path closure of a random connected weighted graph.
    RandomGraphMetric,
    RandomIntegersAbsdiff,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapScheme {
    UniformTable,
    /// A random in-tree: every point eventually reaches a single root fixed by the map.
    EventuallyConstant,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiScheme {
    Linear,
    ParityLinear,
    Mixed,
}

/// Deterministic stream of random instances, optionally led by injected instances.
#[derive(Debug, Clone)]
pub struct InstanceGenerator {
    pub seed: u64,
    pub min_points: usize,
    pub max_points: usize,
    pub space_scheme: SpaceScheme,
    pub map_scheme: MapScheme,
    pub phi_scheme: PhiScheme,
    /// Returned for indices `0..injected.len()` before any random instance.
    pub injected: Vec<Instance>,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            min_points: 1,
            max_points: 8,
            space_scheme: SpaceScheme::Mixed,
            map_scheme: MapScheme::Mixed,
            phi_scheme: PhiScheme::Mixed,
            injected: Vec::new(),
        }
    }

    pub fn with_points(mut self, min_points: usize, max_points: usize) -> Self {
        assert!(
            1 <= min_points && min_points <= max_points,
            "need 1 <= min_points <= max_points"
        );
        self.min_points = min_points;
        self.max_points = max_points;
        self
    }

    pub fn with_injected(mut self, injected: Vec<Instance>) -> Self {
        self.injected = injected;
        self
    }

    /// Independent RNG for one index; streams never overlap.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

fn random_weight(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.gen_range(1..=MAX_DENOMINATOR);
    ratio(rng.gen_range(1..=2 * den), den)
}

/// Floyd–Warshall closure; `None` if the graph is disconnected.
fn metric_closure(n: usize, edges: &[(usize, usize, Rational)]) -> Option<Vec<Vec<Rational>>> {
    let mut dist: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = Some(Rational::from_integer(0.into()));
    }
    for (a, b, w) in edges {
        let better = dist[*a][*b].as_ref().is_none_or(|d| w < d);
        if better {
            dist[*a][*b] = Some(w.clone());
            dist[*b][*a] = Some(w.clone());
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = dist[i][k].clone() else {
                continue;
            };
            let row_k = dist[k].clone();
            for (j, dkj) in row_k.iter().enumerate() {
                let Some(dkj) = dkj else { continue };
                let through = &dik + dkj;
                if dist[i][j].as_ref().is_none_or(|d| through < *d) {
                    dist[i][j] = Some(through);
                }
            }
        }
    }
    dist.into_iter()
        .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
        .collect()
}

fn random_graph_metric(rng: &mut ChaCha8Rng, n: usize) -> MetricSpace {
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((a, b, random_weight(rng)));
                }
            }
        }
        if let Some(matrix) = metric_closure(n, &edges) {
            return MetricSpace::finite_matrix(labels, matrix)
                .expect("closure of a connected graph is a metric");
        }
    }
}

fn random_integers(rng: &mut ChaCha8Rng, n: usize) -> MetricSpace {
    let picked = rand::seq::index::sample(rng, 4 * n + 1, n);
    let mut values: Vec<i64> = picked.into_iter().map(|v| v as i64).collect();
    values.sort_unstable();
    MetricSpace::absdiff(
        values
            .into_iter()
            .map(|v| Rational::from_integer(v.into()))
            .collect(),
    )
    .expect("distinct values")
}

fn random_map(rng: &mut ChaCha8Rng, space: &MetricSpace, scheme: MapScheme) -> SelfMap {
    let n = space.len();
    let scheme = match scheme {
        MapScheme::Mixed if rng.gen_bool(0.5) => MapScheme::UniformTable,
        MapScheme::Mixed => MapScheme::EventuallyConstant,
        s => s,
    };
    let images = match scheme {
        MapScheme::UniformTable => (0..n).map(|_| PointId(rng.gen_range(0..n))).collect(),
        _ => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut images = vec![PointId(order[0]); n];
            for k in 1..n {
                images[order[k]] = PointId(order[rng.gen_range(0..k)]);
            }
            images
        }
    };
    SelfMap::table(space, images).expect("images drawn from the space")
}

fn random_phi(rng: &mut ChaCha8Rng, scheme: PhiScheme) -> PhiSpec {
    let den = rng.gen_range(2..=MAX_DENOMINATOR);
    let k = ratio(rng.gen_range(0..den), den);
    let parity = match scheme {
        PhiScheme::Linear => false,
        PhiScheme::ParityLinear => true,
        PhiScheme::Mixed => rng.gen_bool(0.5),
    };
    if parity {
        PhiSpec::parity_linear(k).expect("k < 1")
    } else {
        PhiSpec::linear(k).expect("k < 1")
    }
}

/// Instance number `index` of the stream. The contraction spec is left unset.
pub fn generate(gen: &InstanceGenerator, index: u64) -> Instance {
    if let Some(inst) = gen.injected.get(index as usize) {
        return inst.clone();
    }
    let mut rng = gen.rng(index);
    let n = rng.gen_range(gen.min_points..=gen.max_points);
    let graph = match gen.space_scheme {
        SpaceScheme::RandomGraphMetric => true,
        SpaceScheme::RandomIntegersAbsdiff => false,
        SpaceScheme::Mixed => rng.gen_bool(0.5),
    };
    let space = if graph {
        random_graph_metric(&mut rng, n)
    } else {
        random_integers(&mut rng, n)
    };
    let map = random_map(&mut rng, &space, gen.map_scheme);
    let phi = random_phi(&mut rng, gen.phi_scheme);
    Instance {
        space,
        map,
        phi,
        spec: None,
    }
}

/// `count` nonnegative integers, each at least `min`, summing to at most `total`.
fn split(rng: &mut ChaCha8Rng, count: usize, min: i64, total: i64) -> Vec<i64> {
    let mut parts = vec![min; count];
    let mut left = total - min * count as i64;
    for part in parts.iter_mut() {
        let extra = rng.gen_range(0..=left);
        *part += extra;
        left -= extra;
    }
    parts.shuffle(rng);
    parts
}

/// A random valid spec of the given kind with coefficients over a denominator <= 16.
pub fn random_spec(rng: &mut ChaCha8Rng, kind: VariantKind) -> ContractionSpec {
    match kind {
        VariantKind::TypeI => {
            let den = rng.gen_range(4..=MAX_DENOMINATOR);
            let p = split(rng, 3, 1, den - 1);
            ContractionSpec::type_i(ratio(p[0], den), ratio(p[1], den), ratio(p[2], den))
                .expect("sum < 1")
        }
        VariantKind::TypeII => {
            let den = rng.gen_range(1..=MAX_DENOMINATOR);
            let total = if rng.gen_bool(0.5) {
                den
            } else {
                rng.gen_range(0..=den)
            };
            let mut p = split(rng, 4, 0, total);
            if rng.gen_bool(0.5) {
                // put the whole budget on one coefficient, as in the worked example
                let which = rng.gen_range(0..4);
                p = vec![0; 4];
                p[which] = total;
            }
            ContractionSpec::type_ii(
                ratio(p[0], den),
                ratio(p[1], den),
                ratio(p[2], den),
                ratio(p[3], den),
            )
            .expect("sum <= 1")
        }
        VariantKind::HardyRogers => {
            let den = rng.gen_range(2..=MAX_DENOMINATOR);
            let p = split(rng, 5, 0, den - 1);
            ContractionSpec::hardy_rogers(
                ratio(p[0], den),
                ratio(p[1], den),
                ratio(p[2], den),
                ratio(p[3], den),
                ratio(p[4], den),
            )
            .expect("sum < 1")
        }
        VariantKind::TypeIII => ContractionSpec::TypeIII,
        VariantKind::HegedusSzilagyi => ContractionSpec::HegedusSzilagyi,
        VariantKind::TmMax => ContractionSpec::TmMax,
    }
}

/// What a hunt looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// A certified instance whose fixed-point conclusion fails.
    Theorem(VariantKind),
    /// An instance where the first condition certifies and the second is violated.
    Separation(VariantKind, VariantKind),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Theorem(k) => write!(f, "theorem:{k}"),
            Target::Separation(a, b) => write!(f, "separation:{a},{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad hunt target `{0}`; expected theorem:<variant> or separation:<variant>,<variant>")]
pub struct BadTarget(pub String);

impl FromStr for Target {
    type Err = BadTarget;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadTarget(s.into());
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "theorem" => Ok(Target::Theorem(rest.parse().map_err(|_| bad())?)),
            "separation" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Ok(Target::Separation(
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                ))
            }
            _ => Err(bad()),
        }
    }
}

/// An instance exhibiting the target, before and after shrinking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub index: u64,
    pub target: Target,
    /// The specs the finding is about: one for a theorem, two for a separation.
    pub specs: Vec<ContractionSpec>,
    pub detail: String,
    /// Carries `specs[0]` as its declared spec.
    pub instance: Instance,
    pub shrunk: Instance,
}

fn spec_for(inst: &Instance, kind: VariantKind, rng: &mut ChaCha8Rng) -> ContractionSpec {
    match &inst.spec {
        Some(spec) if spec.kind() == kind => spec.clone(),
        _ => random_spec(rng, kind),
    }
}

fn theorem_detail(
    inst: &Instance,
    spec: &ContractionSpec,
    options: &CertifyOptions,
) -> Option<String> {
    let report = validate_theorem(&inst.space, &inst.map, &inst.phi, spec, options.clone()).ok()?;
    match report.verdict {
        crate::picard::TheoremVerdict::Counterexample(detail) => Some(detail),
        _ => None,
    }
}

fn separation_detail(
    inst: &Instance,
    a: &ContractionSpec,
    b: &ContractionSpec,
    options: &CertifyOptions,
) -> Option<String> {
    let ra = certify(&inst.space, &inst.map, &inst.phi, a, options.clone()).ok()?;
    if !ra.certified() {
        return None;
    }
    let rb = certify(&inst.space, &inst.map, &inst.phi, b, options.clone()).ok()?;
    if rb.verdict != Verdict::Violated {
        return None;
    }
    let v = &rb.violations[0];
    Some(format!(
        "{} certified, {} violated at ({}, {}): {} > {}",
        a.kind(),
        b.kind(),
        inst.space.label(v.x),
        inst.space.label(v.y),
        v.lhs,
        v.rhs
    ))
}

/// Points that no other point maps to. Any set of them can be removed together
/// without breaking closure.
fn leaves(map: &SelfMap) -> Vec<PointId> {
    let mut hit = vec![false; map.len()];
    for (i, &image) in map.images().iter().enumerate() {
        if image.0 != i {
            hit[image.0] = true;
        }
    }
    (0..map.len()).filter(|&i| !hit[i]).map(PointId).collect()
}

/// Removes points while `holds` stays true, trying large batches of leaves first.
pub fn shrink(instance: &Instance, holds: impl Fn(&Instance) -> bool) -> Instance {
    let mut current = instance.clone();
    'outer: loop {
        let removable = leaves(&current.map);
        let mut chunk = removable.len();
        while chunk >= 1 {
            for group in removable.chunks(chunk) {
                let keep: Vec<PointId> = current
                    .space
                    .points()
                    .filter(|p| !group.contains(p))
                    .collect();
                if keep.is_empty() {
                    continue;
                }
                if let Some(sub) = current.restrict(&keep) {
                    if holds(&sub) {
                        current = sub;
                        continue 'outer;
                    }
                }
            }
            chunk /= 2;
        }
        return current;
    }
}

/// Evaluates trial `index`; `Some` when it exhibits `target`.
pub fn run_trial(
    gen: &InstanceGenerator,
    index: u64,
    target: Target,
    options: &CertifyOptions,
) -> Option<Finding> {
    let mut inst = generate(gen, index);
    // coefficient draws use a stream disjoint from instance generation
    let mut rng = gen.rng(index ^ (1 << 63));
    match target {
        Target::Theorem(kind) => {
            let spec = spec_for(&inst, kind, &mut rng);
            let detail = theorem_detail(&inst, &spec, options)?;
            inst.spec = Some(spec.clone());
            let shrunk = shrink(&inst, |sub| theorem_detail(sub, &spec, options).is_some());
            Some(Finding {
                index,
                target,
                specs: vec![spec],
                detail,
                instance: inst,
                shrunk,
            })
        }
        Target::Separation(ka, kb) => {
            let a = spec_for(&inst, ka, &mut rng);
            let b = spec_for(&inst, kb, &mut rng);
            let detail = separation_detail(&inst, &a, &b, options)?;
            inst.spec = Some(a.clone());
            let shrunk = shrink(&inst, |sub| {
                separation_detail(sub, &a, &b, options).is_some()
            });
            Some(Finding {
                index,
                target,
                specs: vec![a, b],
                detail,
                instance: inst,
                shrunk,
            })
        }
    }
}

/// Runs `trials` consecutive indices and returns findings in index order.
pub fn hunt(
    gen: &InstanceGenerator,
    trials: u64,
    target: Target,
    options: &CertifyOptions,
) -> Vec<Finding> {
    (0..trials)
        .filter_map(|i| run_trial(gen, i, target, options))
        .collect()
}

//! The worked examples as ready-made instances.

use alloc::string::String;
use alloc::vec::Vec;

use crate::certify::ContractionSpec;
use crate::metric::{MetricSpace, Scope, SpaceError};
use crate::orbit::{MapError, Rule, SelfMap};
use crate::phi::PhiSpec;
use crate::scalar::Rational;
use crate::Instance;

/// Default right end of the example 10 window.
pub const EXAMPLE10_WINDOW_MAX: u64 = 200;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn from_map_error(e: MapError) -> SpaceError {
    match e {
        MapError::Space(s) => s,
        other => SpaceError::InvalidWindow(alloc::format!("{other}")),
    }
}

/// `X = ℕ \ {3}` cut at `window_max`, `f = 2` on `{7, 11, 15, ...}` and `1` elsewhere,
/// `φ(t) = 0` at even `t` and `5t/6` otherwise, type (II) with `δ = 5/6`.
pub fn example10(window_max: u64) -> Result<Instance, SpaceError> {
    let space = MetricSpace::naturals_window(window_max, &[3])?;
    let map = SelfMap::from_rule(&space, Rule::Example10).map_err(from_map_error)?;
    let phi = PhiSpec::parity_linear(r(5, 6)).expect("5/6 < 1");
    let zero = Rational::from_integer(0.into());
    let spec = ContractionSpec::type_ii(zero.clone(), zero.clone(), zero, r(5, 6))
        .expect("valid coefficients");
    Ok(Instance {
        space,
        map,
        phi,
        spec: Some(spec),
    })
}

/// Example 10's map and φ, declared against type (III).
pub fn example13(window_max: u64) -> Result<Instance, SpaceError> {
    let mut inst = example10(window_max)?;
    inst.spec = Some(ContractionSpec::TypeIII);
    Ok(inst)
}

/// Example 10 cut at `max` as an explicit finite-matrix space with a table map. Being a
/// finite space in its own right, it is complete.
pub fn example10_finite(max: u64) -> Result<Instance, SpaceError> {
    let inst = example10(max)?;
    let space = inst.space.to_finite_matrix().with_scope(Scope::Complete);
    let map = SelfMap::table(&space, inst.map.images().to_vec()).map_err(from_map_error)?;
    Ok(Instance { space, map, ..inst })
}

fn example7_on(space: MetricSpace, a: &Rational, b: &Rational) -> Result<Instance, SpaceError> {
    let map = SelfMap::from_rule(
        &space,
        Rule::Example7 {
            a: a.clone(),
            b: b.clone(),
        },
    )
    .map_err(from_map_error)?;
    let phi = PhiSpec::linear(r(1, 2)).expect("1/2 < 1");
    let q = r(1, 4);
    let spec = ContractionSpec::type_i(q.clone(), q.clone(), q).expect("valid coefficients");
    Ok(Instance {
        space,
        map,
        phi,
        spec: Some(spec),
    })
}

/// `f(x) = b` for `x != a`, `f(a) = a` on the grid `[0, 10]` with step `1/2`, `φ(t) = t/2`.
pub fn example7_grid(a: &Rational, b: &Rational) -> Result<Instance, SpaceError> {
    example7_grid_with(a, b, &r(0, 1), &r(10, 1), &r(1, 2))
}

pub fn example7_grid_with(
    a: &Rational,
    b: &Rational,
    start: &Rational,
    end: &Rational,
    step: &Rational,
) -> Result<Instance, SpaceError> {
    example7_on(MetricSpace::grid_window(start, end, step)?, a, b)
}

/// Example 7's map on the window `{1, ..., max}`.
pub fn example7_naturals(a: &Rational, b: &Rational, max: u64) -> Result<Instance, SpaceError> {
    example7_on(MetricSpace::naturals_window(max, &[])?, a, b)
}

/// Which of the four table cases of example 10 a pair falls in, if any.
///
/// Case 1: both in `A` or both outside. Case 2: one in `A`, the other `1`. Case 3: one in
/// `A`, the other even. Case 4: one in `A`, the other in `{5, 9, 13, ...}`.
pub fn example10_case(x: &Rational, y: &Rational) -> u8 {
    use crate::orbit::in_class_a;
    let (ax, ay) = (in_class_a(x), in_class_a(y));
    if ax == ay {
        return 1;
    }
    let other = if ax { y } else { x };
    if *other == Rational::from_integer(1.into()) {
        2
    } else if other.is_integer() && num_integer::Integer::is_even(other.numer()) {
        3
    } else {
        4
    }
}

/// The decimals printed in the example 10 table for cases 1 to 4.
pub const EXAMPLE10_PRINTED_BOUNDS: [&str; 4] = ["0", "2.066", "2.41", "2.755"];

/// Names of the corpus entries.
pub fn names() -> Vec<String> {
    ["example7", "example10", "example13"]
        .iter()
        .map(|s| String::from(*s))
        .collect()
}

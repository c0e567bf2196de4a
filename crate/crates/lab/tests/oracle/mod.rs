//! Brute-force reference computations, written without the library's orbit and
//! certification code.

#![allow(dead_code)]

use contraction_core::{parse_rational, MetricSpace, PointId, Rational, SelfMap};

pub fn q(text: &str) -> Rational {
    parse_rational(text).unwrap()
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `2` on `{7, 11, 15, ...}`, `1` elsewhere.
pub fn ex10_f(n: i64) -> i64 {
    if n >= 7 && n % 4 == 3 {
        2
    } else {
        1
    }
}

pub fn ex10_in_a(n: i64) -> bool {
    ex10_f(n) == 2
}

/// Iterates until a value repeats.
pub fn ex10_orbit(n: i64) -> Vec<i64> {
    let mut out = vec![n];
    loop {
        let next = ex10_f(*out.last().unwrap());
        if out.contains(&next) {
            return out;
        }
        out.push(next);
    }
}

/// On the line the diameter of a finite set is `max - min`.
pub fn spread(values: &[i64]) -> i64 {
    values.iter().max().unwrap() - values.iter().min().unwrap()
}

/// `0` at even integers, `5t/6` elsewhere.
pub fn ex10_phi(t: &Rational) -> Rational {
    if t.is_integer() && (t.numer() % 2u32) == 0.into() {
        int(0)
    } else {
        t * q("5/6")
    }
}

/// `(D_f(x), D_f(y), D_f(x, y), M_f(x, y))` for example 10.
pub fn ex10_diameters(x: i64, y: i64) -> (Rational, Rational, Rational, Rational) {
    let (ox, oy) = (ex10_orbit(x), ex10_orbit(y));
    let union: Vec<i64> = ox.iter().chain(&oy).copied().collect();
    let (dx, dy) = (int(spread(&ox)), int(spread(&oy)));
    let m = (&dx + &dy) / int(2);
    (dx, dy, int(spread(&union)), m)
}

pub fn ex10_window(max: i64) -> Vec<i64> {
    (1..=max).filter(|&n| n != 3).collect()
}

/// Points visited from `x` before the first repeat.
pub fn brute_orbit(map: &SelfMap, x: PointId) -> Vec<PointId> {
    let mut out = vec![x];
    loop {
        let next = map.apply(*out.last().unwrap());
        if out.contains(&next) {
            return out;
        }
        out.push(next);
    }
}

pub fn brute_diameter(space: &MetricSpace, points: &[PointId]) -> Rational {
    let mut best = int(0);
    for &a in points {
        for &b in points {
            let d = space.distance(a, b).unwrap();
            if d > best {
                best = d;
            }
        }
    }
    best
}

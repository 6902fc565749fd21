//! Admissibility: a polytope is admissible when it is cut out by halfspaces
//! `<u, x> >= a` with `u` integral and `a` in the value group, here `Q`.
//!
//! Cells of the decompositions are rational, so the check is mostly a
//! certificate. To make rejection testable, zonotopes may have coordinates in
//! a real quadratic field `Q(sqrt m)`.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use super::cell::{Cell, Zonotope};
use crate::linalg::{self, Matrix};
use crate::rational::{self, int, Rational};

/// `a + b sqrt(m)` for a fixed non-square `m > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub a: Rational,
    pub b: Rational,
    pub m: i64,
}

impl Surd {
    pub fn rational(a: Rational, m: i64) -> Self {
        Surd {
            a,
            b: Rational::zero(),
            m,
        }
    }

    pub fn new(a: Rational, b: Rational, m: i64) -> Self {
        Surd { a, b, m }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        let (sa, sb) = (self.a.cmp(&Rational::zero()), self.b.cmp(&Rational::zero()));
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // Opposite signs: the larger of a^2 and m b^2 wins.
        match (&self.a * &self.a).cmp(&(&self.b * &self.b * int(self.m))) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("m is not a square"),
        }
    }

    fn conj(&self) -> Surd {
        Surd::new(self.a.clone(), -&self.b, self.m)
    }

    /// `self / other` for nonzero `other`.
    pub fn div(&self, other: &Surd) -> Surd {
        let norm = &other.a * &other.a - &other.b * &other.b * int(self.m);
        let p = self * &other.conj();
        Surd::new(p.a / &norm, p.b / norm, self.m)
    }

    fn scaled(&self, k: &Rational) -> Surd {
        Surd::new(&self.a * k, &self.b * k, self.m)
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, o: &Surd) -> Surd {
        Surd::new(&self.a + &o.a, &self.b + &o.b, self.m)
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, o: &Surd) -> Surd {
        Surd::new(&self.a - &o.a, &self.b - &o.b, self.m)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, o: &Surd) -> Surd {
        Surd::new(
            &self.a * &o.a + &self.b * &o.b * int(self.m),
            &self.a * &o.b + &self.b * &o.a,
            self.m,
        )
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-&self.a, -&self.b, self.m)
    }
}

/// A zonotope with coordinates in `Q(sqrt m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdZonotope {
    pub m: i64,
    pub base: Vec<Surd>,
    pub generators: Vec<Vec<Surd>>,
}

impl SurdZonotope {
    pub fn from_rational(z: &Zonotope, m: i64) -> Self {
        let lift = |v: &Vec<Rational>| v.iter().map(|x| Surd::rational(x.clone(), m)).collect();
        SurdZonotope {
            m,
            base: lift(&z.base),
            generators: z.generators.iter().map(lift).collect(),
        }
    }
}

/// `<u, x> >= bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub bound: Rational,
}

/// Halfspaces with integral normals and rational thresholds cutting out the
/// zonotope, or `None` if no such description exists.
///
/// The affine hull contributes a pair of opposite halfspaces per basis vector
/// of its annihilator; each flat of corank one among the generators
/// contributes a pair of facets.
pub fn admissible_halfspaces(z: &SurdZonotope) -> Option<Vec<Halfspace>> {
    let n = z.base.len();
    let mut directions: Matrix = Vec::new();
    let mut lengths: Vec<Surd> = Vec::new();
    for g in &z.generators {
        let Some(lead) = g.iter().find(|x| !x.is_zero()) else {
            continue;
        };
        let mut dir = Vec::with_capacity(n);
        for x in g {
            let r = x.div(lead);
            if !r.is_rational() {
                return None;
            }
            dir.push(r.a);
        }
        directions.push(dir);
        lengths.push(lead.clone());
    }

    let mut normals: Vec<Vec<Rational>> = linalg::nullspace(&directions, n);
    let r = linalg::rank(&directions);
    if r > 0 {
        linalg::for_each_subset(directions.len(), r - 1, |ix| {
            let flat: Matrix = ix.iter().map(|&i| directions[i].clone()).collect();
            if linalg::rank(&flat) != r - 1 {
                return;
            }
            let u = linalg::nullspace(&flat, n)
                .into_iter()
                .find(|u| directions.iter().any(|d| !linalg::dot(u, d).is_zero()))
                .expect("a corank-one flat has a separating functional");
            normals.push(u);
        });
    }

    let mut out = Vec::new();
    for u in normals {
        let Some(normal) = rational::primitive_direction(&u) else {
            continue;
        };
        let u: Vec<Rational> = normal.iter().map(|x| Rational::from_integer(x.clone())).collect();
        let pair = |x: &[Surd]| {
            x.iter()
                .zip(&u)
                .fold(Surd::rational(Rational::zero(), z.m), |acc, (xi, ui)| {
                    &acc + &xi.scaled(ui)
                })
        };
        let at_base = pair(&z.base);
        let (mut lo, mut hi) = (at_base.clone(), at_base);
        for (d, len) in directions.iter().zip(&lengths) {
            let step = len.scaled(&linalg::dot(&u, d));
            match step.signum() {
                Ordering::Less => lo = &lo + &step,
                Ordering::Greater => hi = &hi + &step,
                Ordering::Equal => {}
            }
        }
        if !lo.is_rational() || !hi.is_rational() {
            return None;
        }
        let neg: Vec<BigInt> = normal.iter().map(|x| -x).collect();
        out.push(Halfspace { normal, bound: lo.a });
        out.push(Halfspace {
            normal: neg,
            bound: -hi.a,
        });
    }
    out.sort_by(|a, b| a.normal.cmp(&b.normal).then_with(|| a.bound.cmp(&b.bound)));
    out.dedup();
    Some(out)
}

pub fn is_admissible(z: &SurdZonotope) -> bool {
    admissible_halfspaces(z).is_some()
}

/// Whether a cell is admissible. Cells built from rational edge lengths
/// always are.
pub fn check_admissible(cell: &Cell) -> bool {
    // Any non-square works for a rational zonotope.
    is_admissible(&SurdZonotope::from_rational(&cell.zonotope, 2))
}

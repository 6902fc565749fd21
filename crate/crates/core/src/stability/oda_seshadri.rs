//! Oda–Seshadri stability and the parameters `q_H`, `q_H^v` that translate
//! polarized stability and `v`-quasistability into it.
//!
//! A degree-0 type `(S, d)` is `q`-semistable when
//! `sum_W d_v <= sum_W q_v + #(boundary of W outside S) / 2` for every
//! nonempty proper `W`, and `q`-stable when all of these are strict.
//!
//! The genus term of `q_H` at a vertex is the genus of that vertex's
//! subcurve normalized along `S`, i.e. `g_v` plus the loops at `v` outside
//! `S`. With loops counted this way the translation is exact on every graph.

use num_traits::{Signed, Zero};

use super::{enumerate_types_with, slack, Limits, Mode, Polarization, SheafType};
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, VertexSet};
use crate::rational::{frac, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OsParameter {
    pub q: Vec<Rational>,
    /// The perturbation used for `q_H^v`, when one was needed.
    pub epsilon: Option<Rational>,
}

impl OsParameter {
    pub fn total(&self) -> Rational {
        self.q.iter().fold(Rational::zero(), |a, x| a + x)
    }
}

/// `q_H` for the type `t`, whose `S` enters through the half-boundary term.
pub fn os_parameter(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    basepoint: usize,
    t: &SheafType,
) -> Result<OsParameter> {
    if basepoint >= g.num_vertices() {
        return Err(Error::UnknownVertex(format!("#{basepoint}")));
    }
    let genus = g.genus();
    let q = (0..g.num_vertices())
        .map(|v| {
            let single = VertexSet::singleton(v);
            let gv = g.normalized_genus(&single, &t.s).expect("nonempty");
            let c = g.boundary_counts(&single, &t.s);
            let shift = if v == basepoint { degree } else { 0 };
            int(gv - 1 - shift)
                + Rational::new(h.on(&single).into(), h.degree().into()) * int(degree + 1 - genus)
                + frac(c.not_in_s as i64, 2)
        })
        .collect();
    Ok(OsParameter { q, epsilon: None })
}

fn os_slacks(g: &MetricGraph, q: &OsParameter, t: &SheafType) -> Result<Vec<Rational>> {
    if t.degree() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: t.degree(),
        });
    }
    Ok(g.subcurves()
        .map(|w| {
            let qw = w.iter().fold(Rational::zero(), |a, v| a + &q.q[v]);
            let bd = g.boundary_counts(&w, &t.s).not_in_s as i64;
            qw + frac(bd, 2) - int(t.d.sum_over(&w))
        })
        .collect())
}

pub fn os_is_semistable(g: &MetricGraph, q: &OsParameter, t: &SheafType) -> Result<bool> {
    Ok(os_slacks(g, q, t)?.iter().all(|s| !s.is_negative()))
}

pub fn os_is_stable(g: &MetricGraph, q: &OsParameter, t: &SheafType) -> Result<bool> {
    Ok(os_slacks(g, q, t)?.iter().all(|s| s.is_positive()))
}

/// `min(1/2, half the least positive slack)` over all semistable types of the
/// given degree and all subcurves; `None` when every `v`-quasistable type is
/// already stable (then `q_H^v = q_H`).
pub fn epsilon_for_quasistability(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    v: usize,
) -> Result<Option<Rational>> {
    let limits = Limits::unbounded();
    let qs = enumerate_types_with(g, h, degree, Mode::Quasistable(v), &limits)?;
    if g.num_vertices() == 1 || qs.iter().all(|t| super::is_stable(g, h, t)) {
        return Ok(None);
    }
    let semistable = enumerate_types_with(g, h, degree, Mode::Semistable, &limits)?;
    let mut least: Option<Rational> = None;
    for t in &semistable {
        for w in g.subcurves() {
            let s = slack(g, h, t, &w);
            if s.is_positive() && least.as_ref().is_none_or(|m| s < *m) {
                least = Some(s);
            }
        }
    }
    let half = frac(1, 2);
    let eps = least.map(|m| m / int(2)).filter(|e| *e < half);
    Ok(Some(eps.unwrap_or(half)))
}

/// `q_H^v`: `q_H` moved by `eps / (|V| - 1)` off `v` and by `-eps` at `v`.
pub fn os_parameter_v(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    basepoint: usize,
    v: usize,
    t: &SheafType,
) -> Result<OsParameter> {
    let eps = epsilon_for_quasistability(g, h, degree, v)?;
    os_parameter_v_with(g, h, degree, basepoint, v, t, eps)
}

/// [`os_parameter_v`] with a caller-chosen perturbation.
pub fn os_parameter_v_with(
    g: &MetricGraph,
    h: &Polarization,
    degree: i64,
    basepoint: usize,
    v: usize,
    t: &SheafType,
    epsilon: Option<Rational>,
) -> Result<OsParameter> {
    if v >= g.num_vertices() {
        return Err(Error::UnknownVertex(format!("#{v}")));
    }
    let mut p = os_parameter(g, h, degree, basepoint, t)?;
    if let Some(eps) = epsilon {
        let share = &eps / int(g.num_vertices() as i64 - 1);
        for (i, q) in p.q.iter_mut().enumerate() {
            if i == v {
                *q -= &eps;
            } else {
                *q += &share;
            }
        }
        p.epsilon = Some(eps);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Divisor;

    fn l2() -> (MetricGraph, Polarization) {
        (
            fixtures::two_vertex_loop(),
            Polarization::new(Divisor(vec![2, 2])).unwrap(),
        )
    }

    #[test]
    fn q_h_on_two_vertex_loop() {
        let (g, h) = l2();
        let t = SheafType::line_bundle(Divisor(vec![0, 2]));
        let q = os_parameter(&g, &h, 2, 0, &t).unwrap();
        assert_eq!(q.q, vec![int(-1), int(1)]);
        assert_eq!(q.total(), int(0));
        let full = SheafType::new(g.all_edges(), Divisor(vec![0, 0]));
        let qf = os_parameter(&g, &h, 2, 0, &full).unwrap();
        assert_eq!(qf.q, vec![int(-2), int(0)]);
    }

    #[test]
    fn os_examples() {
        let (g, h) = l2();
        let t = SheafType::line_bundle(Divisor(vec![0, 2]));
        let q = os_parameter(&g, &h, 2, 0, &t).unwrap();
        let twisted = t.twist(0, -2);
        assert_eq!(twisted.d, Divisor(vec![-2, 2]));
        assert!(os_is_semistable(&g, &q, &twisted).unwrap());
        assert!(!os_is_stable(&g, &q, &twisted).unwrap());
        let zero = OsParameter {
            q: vec![int(0), int(0)],
            epsilon: None,
        };
        assert!(os_is_semistable(&g, &zero, &SheafType::line_bundle(Divisor(vec![0, 0]))).unwrap());
        assert!(os_is_semistable(&g, &zero, &t).is_err());
    }

    #[test]
    fn epsilon_in_unit_interval() {
        let (g, h) = l2();
        let eps = epsilon_for_quasistability(&g, &h, 2, 0).unwrap().unwrap();
        assert!(eps.is_positive() && eps < int(1));
        assert_eq!(epsilon_for_quasistability(&g, &h, 3, 0).unwrap(), None);
    }
}

//! Reduced divisors on a metric graph, and linear equivalence through them.
//!
//! Every divisor `D` is equivalent to a unique `q`-reduced divisor: effective
//! away from `q`, and such that no closed set avoiding `q` can fire. The
//! reduction works directly on the metric graph and never consults the
//! period lattice, so it certifies the Abel–Jacobi computations
//! independently.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{Location, MetricGraph, TropicalDivisor};
use crate::rational::{frac, Rational};

/// Upper bound on firing moves before giving up.
pub const MAX_FIRINGS: usize = 200_000;

/// Consecutive special points along an edge.
#[derive(Debug, Clone)]
struct Segment {
    edge: usize,
    a: usize,
    b: usize,
    /// Offsets of `a` and `b` along the edge.
    start: Rational,
    len: Rational,
}

/// The graph subdivided at the support of the divisor and at `q`.
struct Model {
    nodes: Vec<Location>,
    index: BTreeMap<Location, usize>,
    segments: Vec<Segment>,
    /// Segments incident to each node, once per end.
    incident: Vec<Vec<usize>>,
}

impl Model {
    fn new(g: &MetricGraph, chips: &BTreeMap<Location, i64>, q: &Location) -> Self {
        let mut nodes: Vec<Location> = (0..g.num_vertices()).map(Location::Vertex).collect();
        let mut on_edge: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); g.num_edges()];
        for loc in chips.keys().chain(std::iter::once(q)) {
            if let Location::EdgePoint { edge, offset } = loc {
                on_edge[*edge].insert(offset.clone());
            }
        }
        for (e, offsets) in on_edge.iter().enumerate() {
            for t in offsets {
                nodes.push(Location::EdgePoint {
                    edge: e,
                    offset: t.clone(),
                });
            }
        }
        let index: BTreeMap<Location, usize> = nodes.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut segments = Vec::new();
        for (e, offsets) in on_edge.iter().enumerate() {
            let edge = g.edge(e);
            let mut prev = (edge.tail, Rational::zero());
            for t in offsets.iter().chain(std::iter::once(&edge.length)) {
                let node = if t == &edge.length {
                    edge.head
                } else {
                    index[&Location::EdgePoint {
                        edge: e,
                        offset: t.clone(),
                    }]
                };
                segments.push(Segment {
                    edge: e,
                    a: prev.0,
                    b: node,
                    start: prev.1.clone(),
                    len: t - &prev.1,
                });
                prev = (node, t.clone());
            }
        }
        let mut incident = vec![Vec::new(); nodes.len()];
        for (i, s) in segments.iter().enumerate() {
            incident[s.a].push(i);
            incident[s.b].push(i);
        }
        Model {
            nodes,
            index,
            segments,
            incident,
        }
    }

    /// The point of segment `s` at distance `t` from its `a` end.
    fn point(&self, s: &Segment, t: &Rational) -> Location {
        if t.is_zero() {
            self.nodes[s.a].clone()
        } else if t == &s.len {
            self.nodes[s.b].clone()
        } else {
            Location::EdgePoint {
                edge: s.edge,
                offset: &s.start + t,
            }
        }
    }

    fn distances_from(&self, source: usize) -> Vec<Rational> {
        let n = self.nodes.len();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut done = vec![false; n];
        dist[source] = Some(Rational::zero());
        for _ in 0..n {
            let Some(u) = (0..n)
                .filter(|&i| !done[i] && dist[i].is_some())
                .min_by(|&i, &j| dist[i].cmp(&dist[j]))
            else {
                break;
            };
            done[u] = true;
            let du = dist[u].clone().unwrap();
            for &si in &self.incident[u] {
                let s = &self.segments[si];
                let v = if s.a == u { s.b } else { s.a };
                let alt = &du + &s.len;
                if dist[v].as_ref().is_none_or(|d| alt < *d) {
                    dist[v] = Some(alt);
                }
            }
        }
        dist.into_iter().map(|d| d.expect("the graph is connected")).collect()
    }
}

fn add(chips: &mut BTreeMap<Location, i64>, loc: Location, k: i64) {
    *chips.entry(loc).or_insert(0) += k;
}

/// `div(-phi)` for `phi = clamp(dist_q - r, 0, eps)`: the effect of firing
/// the ball of radius `r` around `q` by `eps`.
fn ball_firing(model: &Model, dist: &[Rational], r: &Rational, eps: &Rational) -> BTreeMap<Location, i64> {
    let phi = |d: Rational| -> Rational {
        let x = d - r;
        if x.is_negative() {
            Rational::zero()
        } else if &x > eps {
            eps.clone()
        } else {
            x
        }
    };
    let mut delta = BTreeMap::new();
    for s in &model.segments {
        let (da, db) = (&dist[s.a], &dist[s.b]);
        let along = |t: &Rational| -> Rational { std::cmp::min(da + t, db + &s.len - t) };
        let mut cuts: BTreeSet<Rational> = BTreeSet::new();
        cuts.insert(Rational::zero());
        cuts.insert(s.len.clone());
        cuts.insert((db + &s.len - da) * frac(1, 2));
        for level in [r.clone(), r + eps] {
            cuts.insert(&level - da);
            cuts.insert(db + &s.len - &level);
        }
        let cuts: Vec<Rational> = cuts.into_iter().filter(|t| !t.is_negative() && t <= &s.len).collect();
        for w in cuts.windows(2) {
            let slope = (phi(along(&w[1])) - phi(along(&w[0]))) / (&w[1] - &w[0]);
            assert!(slope.is_integer(), "firing slopes are integral");
            let k = slope.to_integer();
            let k: i64 = (&k).try_into().expect("small slope");
            // div(-phi) at a point is minus the sum of outgoing slopes of phi.
            if k != 0 {
                add(&mut delta, model.point(s, &w[0]), -k);
                add(&mut delta, model.point(s, &w[1]), k);
            }
        }
    }
    delta.retain(|_, k| *k != 0);
    delta
}

/// Moves every debt away from `q` onto `q`, by repeatedly firing balls
/// around `q` outwards to the farthest debts.
fn clear_debts(g: &MetricGraph, chips: &mut BTreeMap<Location, i64>, q: &Location, budget: &mut usize) -> Result<()> {
    loop {
        chips.retain(|l, k| *k != 0 || l == q);
        let model = Model::new(g, chips, q);
        let qi = model.index[q];
        let dist = model.distances_from(qi);
        let debts: Vec<usize> = chips
            .iter()
            .filter(|(l, k)| **k < 0 && *l != q)
            .map(|(l, _)| model.index[l])
            .collect();
        let Some(far) = debts.iter().map(|&i| dist[i].clone()).max() else {
            return Ok(());
        };
        let mut levels: BTreeSet<Rational> = dist.iter().cloned().collect();
        for s in &model.segments {
            levels.insert((&dist[s.a] + &dist[s.b] + &s.len) * frac(1, 2));
        }
        let r = levels
            .range(..far.clone())
            .next_back()
            .cloned()
            .expect("q is at distance zero");
        let eps = &far - &r;
        let delta = ball_firing(&model, &dist, &r, &eps);
        let mut times = 0i64;
        for &i in debts.iter().filter(|&&i| dist[i] == far) {
            let need = -chips[&model.nodes[i]];
            let gain = delta.get(&model.nodes[i]).copied().unwrap_or(0);
            assert!(gain > 0, "a farthest debt gains from the ball firing");
            times = times.max((need + gain - 1) / gain);
        }
        for (l, k) in delta {
            add(chips, l, k * times);
        }
        *budget = budget
            .checked_sub(1)
            .ok_or_else(|| Error::Cap("divisor reduction".into()))?;
    }
}

/// Dhar's burning algorithm: returns the unburnt nodes, empty when the
/// divisor is reduced.
fn unburnt(model: &Model, chips: &BTreeMap<Location, i64>, qi: usize) -> Vec<bool> {
    let n = model.nodes.len();
    let mut burnt = vec![false; n];
    let mut burning_seg = vec![false; model.segments.len()];
    let mut fire_in = vec![0i64; n];
    let mut queue = VecDeque::from([qi]);
    burnt[qi] = true;
    while let Some(u) = queue.pop_front() {
        for &si in &model.incident[u] {
            if burning_seg[si] {
                continue;
            }
            burning_seg[si] = true;
            let s = &model.segments[si];
            let v = if s.a == u { s.b } else { s.a };
            if burnt[v] {
                continue;
            }
            fire_in[v] += 1;
            if fire_in[v] > chips.get(&model.nodes[v]).copied().unwrap_or(0) {
                burnt[v] = true;
                queue.push_back(v);
            }
        }
    }
    burnt.iter().map(|b| !b).collect()
}

/// The `q`-reduced divisor equivalent to `d`.
pub fn reduce_divisor(g: &MetricGraph, d: &TropicalDivisor, q: &Location) -> Result<TropicalDivisor> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let q = q.clone().normalized(g)?;
    let mut chips: BTreeMap<Location, i64> = d.points().iter().cloned().collect();
    let mut budget = MAX_FIRINGS;
    clear_debts(g, &mut chips, &q, &mut budget)?;
    loop {
        chips.retain(|l, k| *k != 0 || l == &q || matches!(l, Location::Vertex(_)));
        let model = Model::new(g, &chips, &q);
        let qi = model.index[&q];
        let inside = unburnt(&model, &chips, qi);
        if !inside.iter().any(|&b| b) {
            break;
        }
        // Fire the unburnt set by the shortest segment leaving it.
        let mut leaving: Vec<(usize, &Segment, bool)> = Vec::new();
        for s in &model.segments {
            match (inside[s.a], inside[s.b]) {
                (true, false) => leaving.push((s.a, s, true)),
                (false, true) => leaving.push((s.b, s, false)),
                _ => {}
            }
        }
        let step = leaving
            .iter()
            .map(|(_, s, _)| s.len.clone())
            .min()
            .expect("the unburnt set avoids q, so it has a boundary");
        for (x, s, from_a) in leaving {
            add(&mut chips, model.nodes[x].clone(), -1);
            let t = if from_a { step.clone() } else { &s.len - &step };
            add(&mut chips, model.point(s, &t), 1);
        }
        budget = budget
            .checked_sub(1)
            .ok_or_else(|| Error::Cap("divisor reduction".into()))?;
    }
    TropicalDivisor::new(g, chips.into_iter().collect())
}

/// Whether two divisors of the same degree are linearly equivalent.
pub fn is_equivalent(g: &MetricGraph, d1: &TropicalDivisor, d2: &TropicalDivisor) -> Result<bool> {
    if d1.degree() != d2.degree() {
        return Err(Error::DegreeMismatch {
            expected: d1.degree(),
            found: d2.degree(),
        });
    }
    let q = Location::Vertex(0);
    Ok(reduce_divisor(g, d1, &q)? == reduce_divisor(g, d2, &q)?)
}

/// The divisor of the tent function on edge `e` that rises with slope
/// `slope` from offset `a` to the peak and falls back to zero at offset `b`.
/// Adding it to any divisor gives an equivalent one.
pub fn tent_divisor(g: &MetricGraph, e: usize, a: &Rational, b: &Rational, slope: i64) -> Result<TropicalDivisor> {
    let mid = (a + b) * frac(1, 2);
    let at = |t: &Rational| Location::EdgePoint {
        edge: e,
        offset: t.clone(),
    };
    TropicalDivisor::new(g, vec![(at(a), -slope), (at(&mid), 2 * slope), (at(b), -slope)])
}

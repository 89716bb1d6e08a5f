//! Exact coefficients of the graph integrals `I_Γ`.
//!
//! With `max|z| < r_1 < ... < r_b < min|w|` every edge `u -> v` has `|u| < |v|`, so its
//! propagator `uv/(u-v)^2` expands as `Σ_{n≥1} n (u/v)^n`. Each `∮ dx/(2πi x)` then picks
//! the `x^0` coefficient, which is flow conservation at `x`. The coefficient of
//! `∏ z^d ∏ w^{-e}` is therefore a weighted count of positive integer edge flows.

mod numeric;

pub use numeric::{
    contour_mean, default_radii, numeric_contour_check, residue_case1_numeric, residue_case2_numeric,
    series_shell, truncated_series,
};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{aut_order, FeynmanGraph, GraphClassVariant, Vertex};
use crate::perm::Composition;

/// Coefficient of `(u/v)^n` in `uv/(u-v)^2` for `|u| < |v|`.
pub fn propagator_coefficient(n: i64) -> u64 {
    if n >= 1 {
        n as u64
    } else {
        0
    }
}

/// Coefficient of `∏ z_i^{d_i} ∏ w_j^{-e_j}` in `I_Γ`.
pub fn integral_coefficient(g: &FeynmanGraph, d: &Composition, e: &Composition) -> Result<BigUint> {
    if d.len() != g.k() || e.len() != g.l() {
        return Err(Error::InvalidArgument(format!(
            "graph has {} sources and {} sinks but degrees are {d} and {e}",
            g.k(),
            g.l()
        )));
    }
    if !g.is_in_class(GraphClassVariant::Extended) {
        return Err(Error::InvalidArgument(format!("{g} violates the degree rules")));
    }
    if d.total() != e.total() {
        return Ok(BigUint::zero());
    }
    match FlowProblem::new(g, d, e) {
        Some(problem) => Ok(problem.weighted_count()),
        None => Ok(BigUint::zero()),
    }
}

/// `F_Γ` coefficient: `I_Γ / #Aut(Γ)`.
pub fn f_gamma_coefficient(g: &FeynmanGraph, d: &Composition, e: &Composition) -> Result<BigRational> {
    let integral = integral_coefficient(g, d, e)?;
    Ok(BigRational::new(integral.into(), aut_order(g).into()))
}

/// `∮ dx/(2πi x) · xw/(x-w)^2 · x^{-e_left} x^{-e_right} = e w^{-e}` with `e = e_left + e_right`.
/// Returns `(coefficient, exponent of w^{-1})`.
pub fn residue_case1(e_left: usize, e_right: usize) -> Result<(usize, usize)> {
    if e_left == 0 || e_right == 0 {
        return Err(Error::InvalidArgument("split degrees must be positive".into()));
    }
    let e = e_left + e_right;
    Ok((propagator_coefficient(e as i64) as usize, e))
}

/// Terms `(e_1, e_2, e_1 e_2)` of
/// `∮ dx/(2πi x) · xw_1/(x-w_1)^2 · xw_2/(x-w_2)^2 · x^{-e'} = Σ e_1 e_2 w_1^{-e_1} w_2^{-e_2}`.
pub fn residue_case2(e_prime: usize) -> Vec<(usize, usize, usize)> {
    (1..e_prime)
        .map(|e1| {
            let e2 = e_prime - e1;
            let w = propagator_coefficient(e1 as i64) * propagator_coefficient(e2 as i64);
            (e1, e2, w as usize)
        })
        .collect()
}

/// Edge flows with fixed boundary values, solved vertex by vertex in index order.
struct FlowProblem {
    /// Preset values: boundary edges at `z` and `w`.
    preset: Vec<Option<usize>>,
    /// For each `x_i`: indices of incoming and of free (`x -> x`) outgoing edges, and the
    /// sum of its fixed outgoing (`x -> w`) values.
    vertices: Vec<VertexFlow>,
}

struct VertexFlow {
    incoming: Vec<usize>,
    free_out: Vec<usize>,
    fixed_out: usize,
}

impl FlowProblem {
    /// `None` when a direct `z -> w` edge has mismatched ends.
    fn new(g: &FeynmanGraph, d: &Composition, e: &Composition) -> Option<Self> {
        let edges = g.edge_instances();
        let mut preset = vec![None; edges.len()];
        let mut vertices: Vec<VertexFlow> = (0..g.b())
            .map(|_| VertexFlow {
                incoming: Vec::new(),
                free_out: Vec::new(),
                fixed_out: 0,
            })
            .collect();
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if let Vertex::Z(i) = u {
                preset[idx] = Some(d.parts()[i - 1]);
            }
            if let Vertex::W(j) = v {
                let value = e.parts()[j - 1];
                if preset[idx].is_some_and(|p| p != value) {
                    return None;
                }
                preset[idx] = Some(value);
            }
            match (u, v) {
                (Vertex::X(i), Vertex::W(_)) => vertices[i - 1].fixed_out += preset[idx].unwrap(),
                (Vertex::X(i), Vertex::X(_)) => vertices[i - 1].free_out.push(idx),
                _ => {}
            }
            if let Vertex::X(j) = v {
                vertices[j - 1].incoming.push(idx);
            }
        }
        Some(Self { preset, vertices })
    }

    fn weighted_count(&self) -> BigUint {
        let mut values: Vec<usize> = self.preset.iter().map(|p| p.unwrap_or(0)).collect();
        let mut total = BigUint::zero();
        self.solve(0, &mut values, &mut total);
        total
    }

    fn solve(&self, vertex: usize, values: &mut Vec<usize>, total: &mut BigUint) {
        if vertex == self.vertices.len() {
            let weight = values
                .iter()
                .fold(BigUint::one(), |acc, &n| acc * propagator_coefficient(n as i64));
            *total += weight;
            return;
        }
        let vf = &self.vertices[vertex];
        let inflow: usize = vf.incoming.iter().map(|&i| values[i]).sum();
        let Some(remaining) = inflow.checked_sub(vf.fixed_out) else {
            return;
        };
        let slots = vf.free_out.len();
        if slots == 0 {
            if remaining == 0 {
                self.solve(vertex + 1, values, total);
            }
            return;
        }
        if remaining < slots {
            return;
        }
        self.split(vertex, 0, remaining, values, total);
    }

    /// Assigns positive values to the free outgoing edges of `vertex` summing to `remaining`.
    fn split(&self, vertex: usize, slot: usize, remaining: usize, values: &mut Vec<usize>, total: &mut BigUint) {
        let free = &self.vertices[vertex].free_out;
        let edge = free[slot];
        if slot + 1 == free.len() {
            values[edge] = remaining;
            self.solve(vertex + 1, values, total);
            return;
        }
        let later = free.len() - slot - 1;
        for n in 1..=remaining - later {
            values[edge] = n;
            self.split(vertex, slot + 1, remaining - n, values, total);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_graphs;
    use num_bigint::BigInt;

    fn comp(parts: &[usize]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    fn graph(b: usize, k: usize, l: usize, text: &str) -> FeynmanGraph {
        FeynmanGraph::parse(b, k, l, text).unwrap()
    }

    /// Independent route: multiply truncated Laurent series edge by edge and read off
    /// coefficients, integrating each `x_i` by taking its zero exponent.
    fn series_oracle(g: &FeynmanGraph, d: &[usize], e: &[usize]) -> BigUint {
        use std::collections::BTreeMap;
        // Monomials over variables z.., x.., w.. with signed exponents.
        let nvars = g.k() + g.b() + g.l();
        let var = |v: Vertex| match v {
            Vertex::Z(i) => i - 1,
            Vertex::X(i) => g.k() + i - 1,
            Vertex::W(i) => g.k() + g.b() + i - 1,
        };
        let cap = d.iter().sum::<usize>() as i64;
        let mut poly: BTreeMap<Vec<i64>, BigInt> = BTreeMap::from([(vec![0; nvars], BigInt::one())]);
        for (u, v) in g.edge_instances() {
            let mut next = BTreeMap::new();
            for (mono, c) in &poly {
                for n in 1..=cap {
                    let mut m = mono.clone();
                    m[var(u)] += n;
                    m[var(v)] -= n;
                    *next.entry(m).or_insert_with(BigInt::zero) += c * BigInt::from(n);
                }
            }
            poly = next;
        }
        let mut target = vec![0i64; nvars];
        for (i, &di) in d.iter().enumerate() {
            target[i] = di as i64;
        }
        for (j, &ej) in e.iter().enumerate() {
            target[g.k() + g.b() + j] = -(ej as i64);
        }
        poly.get(&target).cloned().unwrap_or_default().try_into().unwrap()
    }

    #[test]
    fn propagator_examples() {
        assert_eq!(propagator_coefficient(1), 1);
        assert_eq!(propagator_coefficient(0), 0);
        assert_eq!(propagator_coefficient(-3), 0);
        assert_eq!(propagator_coefficient(7), 7);
    }

    #[test]
    fn propagator_matches_taylor_expansion() {
        // uv/(u-v)^2 = t/(1-t)^2 with t = u/v; Taylor coefficients by the Cauchy formula.
        let m = 256;
        for n in 0..8 {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for j in 0..m {
                let t = num_complex::Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
                acc += t / (1.0 - t).powi(2) / t.powi(n);
            }
            let c = (acc / m as f64).re;
            assert!((c - propagator_coefficient(n as i64) as f64).abs() < 1e-9, "n={n}: {c}");
        }
    }

    #[test]
    fn integral_examples() {
        let single = graph(0, 1, 1, "z1->w1:1");
        for n in 1..=6 {
            assert_eq!(integral_coefficient(&single, &comp(&[n]), &comp(&[n])).unwrap(), BigUint::from(n));
        }
        let double = graph(2, 1, 1, "z1->x1:1 x1->x2:2 x2->w1:1");
        assert_eq!(integral_coefficient(&double, &comp(&[2]), &comp(&[2])).unwrap(), BigUint::from(4u32));
        assert!(integral_coefficient(&double, &comp(&[3]), &comp(&[2])).unwrap().is_zero());
    }

    #[test]
    fn f_gamma_examples() {
        let double = graph(2, 1, 1, "z1->x1:1 x1->x2:2 x2->w1:1");
        assert_eq!(
            f_gamma_coefficient(&double, &comp(&[2]), &comp(&[2])).unwrap(),
            BigRational::from_integer(2.into())
        );
        let single = graph(0, 1, 1, "z1->w1:1");
        assert_eq!(
            f_gamma_coefficient(&single, &comp(&[3]), &comp(&[3])).unwrap(),
            BigRational::from_integer(3.into())
        );
        let triple = graph(2, 1, 1, "z1->w1:1 x1->x2:3");
        for n in 1..=6 {
            assert!(f_gamma_coefficient(&triple, &comp(&[n]), &comp(&[n])).unwrap().is_zero());
        }
    }

    #[test]
    fn integral_rejects_wrong_shapes() {
        let double = graph(2, 1, 1, "z1->x1:1 x1->x2:2 x2->w1:1");
        assert!(integral_coefficient(&double, &comp(&[1, 1]), &comp(&[2])).is_err());
        let broken = graph(1, 1, 1, "z1->x1:1 x1->w1:1");
        assert!(integral_coefficient(&broken, &comp(&[2]), &comp(&[2])).is_err());
    }

    #[test]
    fn direct_edge_mismatch_vanishes() {
        let g = graph(0, 2, 2, "z1->w1:1 z2->w2:1");
        assert!(integral_coefficient(&g, &comp(&[1, 2]), &comp(&[2, 1])).unwrap().is_zero());
        assert_eq!(integral_coefficient(&g, &comp(&[1, 2]), &comp(&[1, 2])).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn flows_match_series_multiplication() {
        for (b, k, l) in [(2, 1, 1), (3, 2, 1), (2, 2, 2), (4, 1, 1), (3, 1, 2)] {
            for variant in [GraphClassVariant::Standard, GraphClassVariant::Extended] {
                for g in enumerate_graphs(b, k, l, variant) {
                    for total in 1..=4 {
                        for d in Composition::all(total, k) {
                            for e in Composition::all(total, l) {
                                assert_eq!(
                                    integral_coefficient(&g, &d, &e).unwrap(),
                                    series_oracle(&g, d.parts(), e.parts()),
                                    "{g} {d} {e}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn extended_only_graphs_vanish() {
        for (b, k, l) in [(2, 1, 1), (2, 2, 2), (3, 2, 1), (3, 1, 2), (4, 1, 1)] {
            for g in enumerate_graphs(b, k, l, GraphClassVariant::Extended) {
                if !g.is_extended_only() {
                    continue;
                }
                for total in 1..=6 {
                    for d in Composition::all(total, k) {
                        for e in Composition::all(total, l) {
                            assert!(integral_coefficient(&g, &d, &e).unwrap().is_zero(), "{g}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn relabeling_sources_permutes_degrees() {
        let g = graph(1, 2, 1, "z1->x1:1 z2->x1:1 x1->w1:1");
        let swapped = graph(3, 2, 1, "z1->x1:1 z2->x2:1 x1->x2:1 x1->x3:1 x2->x3:1 x3->w1:1");
        let relabeled = graph(3, 2, 1, "z2->x1:1 z1->x2:1 x1->x2:1 x1->x3:1 x2->x3:1 x3->w1:1");
        for total in 2..=6 {
            for d in Composition::all(total, 2) {
                let rev = comp(&[d.parts()[1], d.parts()[0]]);
                let e = comp(&[total]);
                assert_eq!(integral_coefficient(&g, &d, &e).unwrap(), integral_coefficient(&g, &rev, &e).unwrap());
                assert_eq!(
                    integral_coefficient(&swapped, &d, &e).unwrap(),
                    integral_coefficient(&relabeled, &rev, &e).unwrap()
                );
            }
        }
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_case1(1, 1).unwrap(), (2, 2));
        assert_eq!(residue_case1(2, 3).unwrap(), (5, 5));
        assert_eq!(residue_case1(1, 4).unwrap(), (5, 5));
        assert!(residue_case1(0, 4).is_err());
        assert_eq!(residue_case2(2), vec![(1, 1, 1)]);
        assert_eq!(residue_case2(4), vec![(1, 3, 3), (2, 2, 4), (3, 1, 3)]);
        assert!(residue_case2(1).is_empty());
    }
}

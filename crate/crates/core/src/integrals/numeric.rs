//! Floating-point evaluation of `I_Γ` by trapezoidal quadrature on the circles
//! `|x_i| = r_i`, used to validate the exact coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::integral_coefficient;
use crate::error::{Error, Result};
use crate::graph::{FeynmanGraph, Vertex};
use crate::perm::Composition;

/// Largest intermediate tensor the contraction will allocate.
const MAX_TENSOR_ENTRIES: usize = 1 << 24;

fn propagator(u: Complex64, v: Complex64) -> Complex64 {
    u * v / (u - v).powi(2)
}

fn circle_nodes(radius: f64, points: usize) -> Vec<Complex64> {
    (0..points)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / points as f64))
        .collect()
}

/// Trapezoidal approximation of `∮_{|x|=r} f(x) dx/(2πi x)`, the mean of `f` over the circle.
pub fn contour_mean<F: Fn(Complex64) -> Complex64>(radius: f64, points: usize, f: F) -> Complex64 {
    let sum: Complex64 = circle_nodes(radius, points).into_iter().map(f).sum();
    sum / points as f64
}

/// Quadrature of `∮ dx/(2πi x) · xw/(x-w)^2 · x^{-(e_left+e_right)}` on `|x| = radius < |w|`.
pub fn residue_case1_numeric(e_left: usize, e_right: usize, w: Complex64, radius: f64, points: usize) -> Complex64 {
    let e = (e_left + e_right) as i32;
    contour_mean(radius, points, |x| propagator(x, w) * x.powi(-e))
}

/// Quadrature of `∮ dx/(2πi x) · xw_1/(x-w_1)^2 · xw_2/(x-w_2)^2 · x^{-e'}` on `|x| = radius`.
pub fn residue_case2_numeric(e_prime: usize, w1: Complex64, w2: Complex64, radius: f64, points: usize) -> Complex64 {
    contour_mean(radius, points, |x| {
        propagator(x, w1) * propagator(x, w2) * x.powi(-(e_prime as i32))
    })
}

fn max_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn min_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
}

/// Radii spaced geometrically from `1.1·max|z|` to `0.9·min|w|`.
pub fn default_radii(b: usize, z: &[Complex64], w: &[Complex64]) -> Result<Vec<f64>> {
    let lo = 1.1 * max_abs(z);
    let hi = 0.9 * min_abs(w);
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidRadii(format!(
            "no room for contours between 1.1·max|z| = {lo} and 0.9·min|w| = {hi}"
        )));
    }
    Ok(match b {
        0 => Vec::new(),
        1 => vec![(lo * hi).sqrt()],
        _ => (0..b)
            .map(|i| lo * (hi / lo).powf(i as f64 / (b - 1) as f64))
            .collect(),
    })
}

fn check_radii(b: usize, z: &[Complex64], w: &[Complex64], radii: &[f64]) -> Result<()> {
    let (zmax, wmin) = (max_abs(z), min_abs(w));
    if radii.len() != b {
        return Err(Error::InvalidRadii(format!("expected {b} radii, got {}", radii.len())));
    }
    let chain: Vec<f64> = std::iter::once(zmax)
        .chain(radii.iter().copied())
        .chain(std::iter::once(wmin))
        .collect();
    if chain.windows(2).any(|p| p[0].partial_cmp(&p[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::InvalidRadii(format!(
            "max|z| = {zmax}, radii {radii:?}, min|w| = {wmin}"
        )));
    }
    Ok(())
}

/// A dense tensor over a sorted set of contour variables, each sampled at the same nodes.
struct Factor {
    vars: Vec<usize>,
    data: Vec<Complex64>,
}

/// `I_Γ` at the given boundary values by trapezoidal quadrature with `points` nodes per
/// contour. `radii = None` uses [`default_radii`].
///
/// The `N^b`-term quadrature sum is contracted one variable at a time, so the cost is
/// governed by the largest neighbourhood met during elimination rather than by `b`.
pub fn numeric_contour_check(
    g: &FeynmanGraph,
    z: &[Complex64],
    w: &[Complex64],
    radii: Option<&[f64]>,
    points: usize,
) -> Result<Complex64> {
    if z.len() != g.k() || w.len() != g.l() {
        return Err(Error::InvalidArgument(format!(
            "need {} z-values and {} w-values",
            g.k(),
            g.l()
        )));
    }
    if points < 64 {
        return Err(Error::InvalidArgument(format!("{points} quadrature points (minimum 64)")));
    }
    let radii = match radii {
        Some(r) => r.to_vec(),
        None => default_radii(g.b(), z, w)?,
    };
    check_radii(g.b(), z, w, &radii)?;

    let nodes: Vec<Vec<Complex64>> = radii.iter().map(|&r| circle_nodes(r, points)).collect();
    let boundary = |v: Vertex| match v {
        Vertex::Z(i) => Some(z[i - 1]),
        Vertex::W(j) => Some(w[j - 1]),
        Vertex::X(_) => None,
    };

    let mut scalar = Complex64::new(1.0, 0.0);
    let mut factors = Vec::new();
    for ((u, v), m) in g.edges() {
        let m = m as i32;
        match (u, v) {
            (Vertex::X(i), Vertex::X(j)) => {
                let (xi, xj) = (&nodes[i - 1], &nodes[j - 1]);
                let data = xi
                    .iter()
                    .flat_map(|&a| xj.iter().map(move |&c| propagator(a, c).powi(m)))
                    .collect();
                factors.push(Factor {
                    vars: vec![i - 1, j - 1],
                    data,
                });
            }
            (Vertex::X(i), other) | (other, Vertex::X(i)) => {
                let fixed = boundary(other).expect("non-x endpoint");
                let data = nodes[i - 1]
                    .iter()
                    .map(|&x| {
                        if matches!(other, Vertex::Z(_)) {
                            propagator(fixed, x)
                        } else {
                            propagator(x, fixed)
                        }
                        .powi(m)
                    })
                    .collect();
                factors.push(Factor { vars: vec![i - 1], data });
            }
            _ => {
                let (a, c) = (boundary(u).expect("z"), boundary(v).expect("w"));
                scalar *= propagator(a, c).powi(m);
            }
        }
    }

    let mut remaining: Vec<usize> = (0..g.b()).collect();
    while !remaining.is_empty() {
        // Eliminate the variable with the smallest resulting neighbourhood.
        let (pos, var) = remaining
            .iter()
            .copied()
            .enumerate()
            .min_by_key(|&(_, v)| (neighbourhood(&factors, v).len(), v))
            .expect("non-empty");
        remaining.remove(pos);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        factors.push(eliminate(var, &touching, points)?);
    }
    for f in factors {
        debug_assert!(f.vars.is_empty());
        scalar *= f.data[0];
    }
    Ok(scalar)
}

fn neighbourhood(factors: &[Factor], var: usize) -> Vec<usize> {
    let mut vars: Vec<usize> = factors
        .iter()
        .filter(|f| f.vars.contains(&var))
        .flat_map(|f| f.vars.iter().copied())
        .filter(|&v| v != var)
        .collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}

/// Sums the product of `touching` over the nodes of `var`, weighted by `1/points`.
fn eliminate(var: usize, touching: &[Factor], points: usize) -> Result<Factor> {
    let out_vars = neighbourhood(touching, var);
    let out_len = out_vars
        .iter()
        .try_fold(1usize, |acc, _| acc.checked_mul(points))
        .filter(|&n| n <= MAX_TENSOR_ENTRIES)
        .ok_or_else(|| {
            Error::ContractionTooLarge(format!(
                "eliminating x{} couples {} other contours at {points} points",
                var + 1,
                out_vars.len()
            ))
        })?;

    // For each factor: stride of `var` and strides of each output variable.
    let layouts: Vec<(usize, Vec<usize>)> = touching
        .iter()
        .map(|f| {
            let stride_of = |v: usize| {
                let p = f.vars.iter().position(|&u| u == v)?;
                Some(points.pow((f.vars.len() - 1 - p) as u32))
            };
            let own = stride_of(var).expect("factor touches var");
            let outs = out_vars.iter().map(|&v| stride_of(v).unwrap_or(0)).collect();
            (own, outs)
        })
        .collect();

    let weight = 1.0 / points as f64;
    let mut data = vec![Complex64::new(0.0, 0.0); out_len];
    let mut digits = vec![0usize; out_vars.len()];
    for slot in data.iter_mut() {
        let bases: Vec<usize> = layouts
            .iter()
            .map(|(_, outs)| outs.iter().zip(&digits).map(|(s, d)| s * d).sum())
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..points {
            let mut term = Complex64::new(weight, 0.0);
            for ((f, (own, _)), base) in touching.iter().zip(&layouts).zip(&bases) {
                term *= f.data[base + own * t];
            }
            acc += term;
        }
        *slot = acc;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < points {
                break;
            }
            *d = 0;
        }
    }
    Ok(Factor { vars: out_vars, data })
}

/// `Σ integral_coefficient(Γ; d, e) ∏ z^d ∏ w^{-e}` over all degree vectors with total at most
/// `max_total`.
pub fn truncated_series(g: &FeynmanGraph, z: &[Complex64], w: &[Complex64], max_total: usize) -> Result<Complex64> {
    (1..=max_total).try_fold(Complex64::new(0.0, 0.0), |acc, total| Ok(acc + series_shell(g, z, w, total)?))
}

/// The terms of the exact series with total degree exactly `total`.
pub fn series_shell(g: &FeynmanGraph, z: &[Complex64], w: &[Complex64], total: usize) -> Result<Complex64> {
    if z.len() != g.k() || w.len() != g.l() {
        return Err(Error::InvalidArgument(format!(
            "need {} z-values and {} w-values",
            g.k(),
            g.l()
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for d in Composition::all(total, g.k()) {
        for e in Composition::all(total, g.l()) {
            let c = integral_coefficient(g, &d, &e)?;
            if c.bits() == 0 {
                continue;
            }
            let mut term = Complex64::new(c.to_f64().unwrap_or(f64::INFINITY), 0.0);
            for (zi, &di) in z.iter().zip(d.parts()) {
                term *= zi.powi(di as i32);
            }
            for (wj, &ej) in w.iter().zip(e.parts()) {
                term *= wj.powi(-(ej as i32));
            }
            sum += term;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_graphs, GraphClassVariant};
    use crate::integrals::{residue_case1, residue_case2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_edge_closed_form() {
        let g = FeynmanGraph::parse(0, 1, 1, "z1->w1:1").unwrap();
        let v = numeric_contour_check(&g, &[c(0.3)], &[c(1.0)], None, 512).unwrap();
        assert!((v - c(0.3 / 0.49)).norm() < 1e-14);
        assert!((v.re - 0.612_244_897_959).abs() < 1e-9);
    }

    #[test]
    fn double_edge_matches_series() {
        let g = FeynmanGraph::parse(2, 1, 1, "z1->x1:1 x1->x2:2 x2->w1:1").unwrap();
        let (z, w) = ([c(0.2)], [c(1.0)]);
        let num = numeric_contour_check(&g, &z, &w, Some(&[0.4, 0.7]), 512).unwrap();
        let exact = truncated_series(&g, &z, &w, 30).unwrap();
        assert!((num - exact).norm() < 1e-8, "{num} vs {exact}");
    }

    #[test]
    fn extended_graph_integrates_to_zero() {
        for g in enumerate_graphs(2, 1, 1, GraphClassVariant::Extended) {
            if g.is_extended_only() {
                let v = numeric_contour_check(&g, &[c(0.2)], &[c(1.0)], None, 512).unwrap();
                assert!(v.norm() < 1e-8, "{g}: {v}");
            }
        }
    }

    #[test]
    fn radii_are_validated() {
        let g = FeynmanGraph::parse(2, 1, 1, "z1->x1:1 x1->x2:2 x2->w1:1").unwrap();
        let (z, w) = ([c(0.2)], [c(1.0)]);
        for bad in [[0.7, 0.4], [0.1, 0.5], [0.5, 1.2], [0.5, 0.5]] {
            assert!(matches!(
                numeric_contour_check(&g, &z, &w, Some(&bad), 512),
                Err(Error::InvalidRadii(_))
            ));
        }
        assert!(numeric_contour_check(&g, &z, &w, Some(&[0.4]), 512).is_err());
        assert!(numeric_contour_check(&g, &z, &w, None, 32).is_err());
        assert!(default_radii(2, &[c(0.95)], &[c(1.0)]).is_err());
    }

    #[test]
    fn default_radii_are_geometric() {
        let r = default_radii(3, &[c(0.2)], &[c(1.0)]).unwrap();
        assert!((r[0] - 0.22).abs() < 1e-15 && (r[2] - 0.9).abs() < 1e-15);
        assert!((r[1] * r[1] - r[0] * r[2]).abs() < 1e-12);
    }

    #[test]
    fn residue_identities_match_quadrature() {
        let w = c(2.0);
        for a in 1..=6 {
            for b in 1..=6 {
                let (coef, exp) = residue_case1(a, b).unwrap();
                let exact = coef as f64 * w.powi(-(exp as i32));
                let num = residue_case1_numeric(a, b, w, 1.0, 512);
                assert!((num - exact).norm() < 1e-8);
            }
        }
        let (w1, w2) = (c(2.0), c(3.0));
        for e in 1..=6 {
            let exact: Complex64 = residue_case2(e)
                .into_iter()
                .map(|(a, b, wt)| wt as f64 * w1.powi(-(a as i32)) * w2.powi(-(b as i32)))
                .sum();
            let num = residue_case2_numeric(e, w1, w2, 1.0, 512);
            assert!((num - exact).norm() < 1e-8, "e'={e}");
        }
    }
}

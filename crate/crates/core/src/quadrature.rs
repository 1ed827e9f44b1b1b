//! Gauss–Legendre quadrature: fixed composite rules and an adaptive,
//! breakpoint-aware rule for vector-valued integrands.

use std::sync::OnceLock;

use crate::linalg::{vec_norm, CVec};
use crate::{Error, Result, C64};

/// Node count of the reference rule used by the delay solvers.
pub const ORDER: usize = 16;

const MAX_DEPTH: u32 = 24;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1] by Newton iteration on the Legendre
    /// polynomial recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn order16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(ORDER))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule with `panels` equal panels.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                let hi = if p + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Sorted segment edges of `[a, b]` split at every breakpoint strictly inside.
pub fn segment_edges(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let span = (b - a).abs();
    let eps = 1e-13 * span.max(1.0);
    let mut edges: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a + eps && x < b - eps)
        .collect();
    edges.push(a);
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|x, y| (*x - *y).abs() <= eps);
    edges
}

/// Adaptive integration of a vector-valued integrand over `[a, b]`, split at
/// `breaks`. A panel is accepted once the 16-point rule and the rule on its
/// two halves agree to `rel_tol` times the integral of `|f|` over `[a, b]`.
pub fn integrate_vector<F>(a: f64, b: f64, breaks: &[f64], dim: usize, rel_tol: f64, f: F) -> Result<CVec>
where
    F: FnMut(f64) -> CVec,
{
    integrate_vector_with_floor(a, b, breaks, dim, rel_tol, 0.0, f)
}

/// As [`integrate_vector`], but panels are also accepted once the error
/// estimate drops below `abs_floor`, the rounding level of the integrand.
/// Refining below that level only chases noise.
pub fn integrate_vector_with_floor<F>(
    a: f64,
    b: f64,
    breaks: &[f64],
    dim: usize,
    rel_tol: f64,
    abs_floor: f64,
    mut f: F,
) -> Result<CVec>
where
    F: FnMut(f64) -> CVec,
{
    let mut total = CVec::zeros(dim);
    if b <= a {
        return Ok(total);
    }
    let rule = GaussLegendre::order16();
    let edges = segment_edges(a, b, breaks);
    let mut first = Vec::with_capacity(edges.len());
    let mut scale = 0.0;
    for w in edges.windows(2) {
        let (whole, abs) = panel(rule, w[0], w[1], dim, &mut f);
        scale += abs;
        first.push(whole);
    }
    let tol = (rel_tol * scale).max(abs_floor);
    for (w, whole) in edges.windows(2).zip(first) {
        total += adapt(rule, w[0], w[1], whole, dim, tol, 0, &mut f)?;
    }
    Ok(total)
}

fn panel<F: FnMut(f64) -> CVec>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    dim: usize,
    f: &mut F,
) -> (CVec, f64) {
    let mut acc = CVec::zeros(dim);
    let mut abs = 0.0;
    for (x, w) in rule.mapped(a, b) {
        let v = f(x);
        abs += w.abs() * vec_norm(&v);
        acc += v * C64::new(w, 0.0);
    }
    (acc, abs)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: FnMut(f64) -> CVec>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: CVec,
    dim: usize,
    tol: f64,
    depth: u32,
    f: &mut F,
) -> Result<CVec> {
    let mid = 0.5 * (a + b);
    let (left, abs_l) = panel(rule, a, mid, dim, f);
    let (right, abs_r) = panel(rule, mid, b, dim, f);
    let refined = &left + &right;
    let err = vec_norm(&(&refined - &whole));
    if err <= tol || err <= f64::MIN_POSITIVE {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH || (b - a) <= 8.0 * f64::EPSILON * a.abs().max(b.abs()) {
        return Err(Error::Quadrature {
            estimate: err / (abs_l + abs_r).max(f64::MIN_POSITIVE),
        });
    }
    let l = adapt(rule, a, mid, left, dim, tol, depth + 1, f)?;
    let r = adapt(rule, mid, b, right, dim, tol, depth + 1, f)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        let g = GaussLegendre::new(16);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        for i in 0..16 {
            assert!((g.nodes[i] + g.nodes[15 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_for_degree_31() {
        let g = GaussLegendre::order16();
        let v = g.integrate(0.0, 1.0, |x| x.powi(31));
        assert!((v - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn composite_rule_handles_oscillation() {
        let g = GaussLegendre::order16();
        let v = g.integrate_composite(0.0, std::f64::consts::PI, 32, |x| (20.0 * x).sin().powi(2));
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn breakpoints_resolve_kinks() {
        let v = integrate_vector(-1.0, 2.0, &[0.3], 1, 1e-13, |x| {
            CVec::from_element(1, C64::new((x - 0.3).abs(), 0.0))
        })
        .unwrap();
        let exact = 0.5 * 1.3 * 1.3 + 0.5 * 1.7 * 1.7;
        assert!((v[0].re - exact).abs() < 1e-14);
    }

    #[test]
    fn adaptive_rule_handles_unlisted_kink() {
        let v = integrate_vector(0.0, 1.0, &[], 1, 1e-12, |x| {
            CVec::from_element(1, C64::new((x - 1.0 / 3.0).abs(), 0.0))
        })
        .unwrap();
        let exact = 0.5 / 9.0 + 0.5 * 4.0 / 9.0;
        assert!((v[0].re - exact).abs() < 1e-12);
    }

    #[test]
    fn jump_without_breakpoint_reports_failure() {
        let r = integrate_vector(0.0, 1.0, &[], 1, 1e-15, |x| {
            CVec::from_element(1, C64::new(if x < 1.0 / 3.0 { 0.0 } else { 1.0 }, 0.0))
        });
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn noise_floor_stops_refinement() {
        let mut calls = 0usize;
        let r = integrate_vector_with_floor(0.0, 1.0, &[], 1, 1e-15, 1e-3, |x| {
            calls += 1;
            CVec::from_element(1, C64::new(if x < 1.0 / 3.0 { 0.0 } else { 1.0 }, 0.0))
        })
        .unwrap();
        assert!((r[0].re - 2.0 / 3.0).abs() < 1e-3);
        assert!(calls < 2000);
    }

    #[test]
    fn segment_edges_drop_duplicates_and_outside_points() {
        let e = segment_edges(0.0, 1.0, &[0.5, 0.5, -1.0, 2.0, 1.0]);
        assert_eq!(e, vec![0.0, 0.5, 1.0]);
    }
}

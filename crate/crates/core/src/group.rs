//! The full shearlet group `R* × R^(2n-1) × R^(2n)` and discretised (a, s) parameter sets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sg(a)`; `a = 0` never reaches here.
pub fn sg(a: f64) -> f64 {
    a.signum()
}

/// Diagonal entry of the parabolic scaling on the shear axes, `sg(a)|a|^{1/2n}`.
pub fn minor_scale(a: f64, n: usize) -> f64 {
    sg(a) * a.abs().powf(1.0 / (2 * n) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub a: f64,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

impl GroupPoint {
    pub fn new(a: f64, s: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be nonzero and finite, got {a}")));
        }
        if t.len() % 2 != 0 || t.is_empty() || s.len() + 1 != t.len() {
            return Err(Error::InvalidParameter(format!(
                "need t in R^(2n) and s in R^(2n-1); got |s| = {}, |t| = {}",
                s.len(),
                t.len()
            )));
        }
        Ok(Self { a, s, t })
    }

    pub fn identity(n: usize) -> Self {
        Self { a: 1.0, s: vec![0.0; 2 * n - 1], t: vec![0.0; 2 * n] }
    }

    pub fn n(&self) -> usize {
        self.t.len() / 2
    }
}

pub fn mat_a(a: f64, n: usize) -> Result<DMatrix<f64>> {
    if a == 0.0 {
        return Err(Error::InvalidParameter("A_a needs a != 0".into()));
    }
    let b = minor_scale(a, n);
    Ok(DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r, c) {
        (0, 0) => a,
        (r, c) if r == c => b,
        _ => 0.0,
    }))
}

pub fn mat_s(s: &[f64], n: usize) -> Result<DMatrix<f64>> {
    if s.len() != 2 * n - 1 {
        return Err(Error::InvalidParameter(format!("shear needs {} entries", 2 * n - 1)));
    }
    Ok(DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r, c) {
        (r, c) if r == c => 1.0,
        (0, c) => s[c - 1],
        _ => 0.0,
    }))
}

/// `|det(S_s A_a)| = |a|^{2 - 1/2n}`.
pub fn det_sa(a: f64, n: usize) -> f64 {
    a.abs().powf(2.0 - 1.0 / (2 * n) as f64)
}

/// `S_s A_a x`.
pub fn apply_sa(a: f64, s: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len() / 2;
    let b = minor_scale(a, n);
    let mut out = Vec::with_capacity(x.len());
    out.push(a * x[0] + b * s.iter().zip(&x[1..]).map(|(p, q)| p * q).sum::<f64>());
    out.extend(x[1..].iter().map(|&q| b * q));
    out
}

/// `A_a^{-1} S_s^{-1} y`, written into `out`.
pub fn apply_inv_sa_into(a: f64, s: &[f64], y: &[f64], out: &mut [f64]) {
    let n = y.len() / 2;
    let b = minor_scale(a, n);
    let z1 = y[0] - s.iter().zip(&y[1..]).map(|(p, q)| p * q).sum::<f64>();
    out[0] = z1 / a;
    for (o, &q) in out[1..].iter_mut().zip(&y[1..]) {
        *o = q / b;
    }
}

pub fn apply_inv_sa(a: f64, s: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    apply_inv_sa_into(a, s, y, &mut out);
    out
}

/// `A_aᵀ S_sᵀ λ` without forming matrices, written into `out`.
pub fn apply_at_st_into(a: f64, s: &[f64], lambda: &[f64], out: &mut [f64]) {
    let n = lambda.len() / 2;
    let b = minor_scale(a, n);
    let l1 = lambda[0];
    out[0] = a * l1;
    for ((o, &sp), &lp) in out[1..].iter_mut().zip(s).zip(&lambda[1..]) {
        *o = b * (sp * l1 + lp);
    }
}

pub fn apply_at_st(g: &GroupPoint, lambda: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; lambda.len()];
    apply_at_st_into(g.a, &g.s, lambda, &mut out);
    out
}

/// `(a,s,t)∘(a',s',t') = (aa', s + |a|^{1-1/2n} s', t + S_s A_a t')`.
pub fn compose(g: &GroupPoint, h: &GroupPoint) -> GroupPoint {
    let n = g.n();
    let c = g.a.abs().powf(1.0 - 1.0 / (2 * n) as f64);
    let s = g.s.iter().zip(&h.s).map(|(p, q)| p + c * q).collect();
    let sat = apply_sa(g.a, &g.s, &h.t);
    let t = g.t.iter().zip(&sat).map(|(p, q)| p + q).collect();
    GroupPoint { a: g.a * h.a, s, t }
}

/// `(a,s,t)^{-1} = (1/a, -|a|^{1/2n - 1} s, -A_a^{-1} S_s^{-1} t)`.
pub fn invert(g: &GroupPoint) -> GroupPoint {
    let n = g.n();
    let c = g.a.abs().powf(1.0 / (2 * n) as f64 - 1.0);
    let t = apply_inv_sa(g.a, &g.s, &g.t).into_iter().map(|x| -x).collect();
    GroupPoint { a: 1.0 / g.a, s: g.s.iter().map(|x| -c * x).collect(), t }
}

/// Midpoint quadrature of the left Haar measure restricted to the (a, s) marginal.
/// Slices are ordered a-major, s-minor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub n: usize,
    pub a_nodes: Vec<f64>,
    /// Cell length in `a` attached to each node.
    pub a_cells: Vec<f64>,
    pub s_nodes: Vec<Vec<f64>>,
    /// Cell volume in `s` (shared by every node).
    pub s_cell: f64,
    /// `Δa Δs / |a|^{2n+1}`, a-major.
    pub weights: Vec<f64>,
}

fn log_cells(a_min: f64, a_max: f64, n_a: usize) -> (Vec<f64>, Vec<f64>) {
    let (l0, l1) = (a_min.ln(), a_max.ln());
    let h = (l1 - l0) / n_a as f64;
    let nodes: Vec<f64> = (0..n_a).map(|k| (l0 + (k as f64 + 0.5) * h).exp()).collect();
    let cells = nodes.iter().map(|a| h * a).collect();
    (nodes, cells)
}

fn shear_nodes(s_max: f64, n_s: usize, n: usize) -> (Vec<Vec<f64>>, f64) {
    let ds = 2.0 * s_max / n_s as f64;
    let axis: Vec<f64> = (0..n_s).map(|k| -s_max + (k as f64 + 0.5) * ds).collect();
    let dim = 2 * n - 1;
    let mut nodes = vec![Vec::new()];
    for _ in 0..dim {
        nodes = nodes
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    (nodes, ds.powi(dim as i32))
}

fn check_ranges(a_min: f64, a_max: f64, n_a: usize, s_max: f64, n_s: usize, n: usize) -> Result<()> {
    if !(a_min > 0.0 && a_max > a_min && a_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < a_min < a_max, got [{a_min}, {a_max}]")));
    }
    if n_a == 0 || n_s == 0 {
        return Err(Error::InvalidParameter("n_a and n_s must be at least 1".into()));
    }
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need s_max > 0, got {s_max}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("half-dimension n must be at least 1".into()));
    }
    Ok(())
}

impl ParamGrid {
    pub fn from_parts(n: usize, a_nodes: Vec<f64>, a_cells: Vec<f64>, s_nodes: Vec<Vec<f64>>, s_cell: f64) -> Result<Self> {
        if a_nodes.is_empty() || a_nodes.len() != a_cells.len() || s_nodes.is_empty() {
            return Err(Error::InvalidParameter("parameter grid needs matching, non-empty node lists".into()));
        }
        if a_nodes.iter().any(|&a| a == 0.0 || !a.is_finite()) || a_cells.iter().any(|&c| !(c > 0.0)) || !(s_cell > 0.0) {
            return Err(Error::InvalidParameter("scale nodes must be nonzero with positive cells".into()));
        }
        if s_nodes.iter().any(|s| s.len() != 2 * n - 1) {
            return Err(Error::InvalidParameter(format!("shear nodes need {} entries", 2 * n - 1)));
        }
        let p = (2 * n + 1) as i32;
        let weights = a_nodes
            .iter()
            .zip(&a_cells)
            .flat_map(|(&a, &da)| std::iter::repeat(da * s_cell / a.abs().powi(p)).take(s_nodes.len()))
            .collect();
        Ok(Self { n, a_nodes, a_cells, s_nodes, s_cell, weights })
    }

    /// Positive scales only.
    pub fn positive(a_min: f64, a_max: f64, n_a: usize, s_max: f64, n_s: usize, n: usize) -> Result<Self> {
        check_ranges(a_min, a_max, n_a, s_max, n_s, n)?;
        let (a, da) = log_cells(a_min, a_max, n_a);
        let (s, ds) = shear_nodes(s_max, n_s, n);
        Self::from_parts(n, a, da, s, ds)
    }

    pub fn len(&self) -> usize {
        self.a_nodes.len() * self.s_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(a, s)` of slice `idx` (a-major).
    pub fn node(&self, idx: usize) -> (f64, &[f64]) {
        let ns = self.s_nodes.len();
        (self.a_nodes[idx / ns], &self.s_nodes[idx % ns])
    }

    pub fn a_cell(&self, idx: usize) -> f64 {
        self.a_cells[idx / self.s_nodes.len()]
    }

    /// Weight of the group-side admissibility integral, `Δa Δs / |a|^{(4n²-2n+1)/2n}`.
    pub fn group_weight(&self, idx: usize) -> f64 {
        let n = self.n as f64;
        let (a, _) = self.node(idx);
        self.a_cell(idx) * self.s_cell / a.abs().powf((4.0 * n * n - 2.0 * n + 1.0) / (2.0 * n))
    }
}

/// Log-midpoint scales in `±[a_min, a_max]` (`n_a` cells per sign) and linear-midpoint shears in
/// `[-s_max, s_max]^{2n-1}` (`n_s` per axis).
pub fn make_param_grid(a_min: f64, a_max: f64, n_a: usize, s_max: f64, n_s: usize, n: usize) -> Result<ParamGrid> {
    check_ranges(a_min, a_max, n_a, s_max, n_s, n)?;
    let (pos, dpos) = log_cells(a_min, a_max, n_a);
    let a: Vec<f64> = pos.iter().rev().map(|x| -x).chain(pos.iter().copied()).collect();
    let da: Vec<f64> = dpos.iter().rev().chain(dpos.iter()).copied().collect();
    let (s, ds) = shear_nodes(s_max, n_s, n);
    ParamGrid::from_parts(n, a, da, s, ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn scaling_matrix_examples() {
        let a4 = mat_a(4.0, 1).unwrap();
        assert_eq!(a4, DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 2.0]));
        assert!((a4.determinant().abs() - 8.0).abs() < 1e-14);
        assert!((det_sa(4.0, 1) - 8.0).abs() < 1e-14);
        assert_eq!(mat_a(1.0, 2).unwrap(), DMatrix::identity(4, 4));
        assert_eq!(mat_s(&[0.0; 3], 2).unwrap(), DMatrix::identity(4, 4));
        let prod = mat_a(-2.0, 1).unwrap() * mat_a(3.0, 1).unwrap();
        assert!((prod - mat_a(-6.0, 1).unwrap()).abs().max() < 1e-14);
        assert!(mat_a(0.0, 1).is_err());
    }

    #[test]
    fn inverse_example() {
        let g = GroupPoint::new(4.0, vec![1.0], vec![0.0, 0.0]).unwrap();
        let h = invert(&g);
        assert_eq!(h.a, 0.25);
        assert!((h.s[0] + 0.5).abs() < 1e-15);
        let e = compose(&g, &h);
        assert!((e.a - 1.0).abs() < 1e-15 && e.s[0].abs() < 1e-15);
        assert_eq!(invert(&GroupPoint::identity(2)), GroupPoint { a: 1.0, s: vec![-0.0; 3], t: vec![-0.0; 4] });
    }

    #[test]
    fn shear_scaling_product_rule() {
        let (a, s, a2, s2) = (-1.7, [0.3, -0.8, 1.1], 0.6, [-0.2, 0.5, 0.9]);
        let n = 2;
        let lhs = mat_s(&s, n).unwrap() * mat_a(a, n).unwrap() * mat_s(&s2, n).unwrap() * mat_a(a2, n).unwrap();
        let c = a.abs().powf(1.0 - 0.25);
        let sc: Vec<f64> = s.iter().zip(&s2).map(|(p, q)| p + c * q).collect();
        let rhs = mat_s(&sc, n).unwrap() * mat_a(a * a2, n).unwrap();
        assert!((lhs - rhs).abs().max() < 1e-13);
    }

    #[test]
    fn transposed_action_matches_matrices() {
        let (a, s) = (-0.37, vec![1.3, -0.4, 0.25]);
        let lam = [0.7, -1.1, 2.0, 0.3];
        let m = mat_a(a, 2).unwrap().transpose() * mat_s(&s, 2).unwrap().transpose();
        let want = m * nalgebra::DVector::from_row_slice(&lam);
        let g = GroupPoint::new(a, s.clone(), vec![0.0; 4]).unwrap();
        assert!(close(&apply_at_st(&g, &lam), want.as_slice(), 1e-14));
        let fwd = mat_s(&s, 2).unwrap() * mat_a(a, 2).unwrap();
        let x = nalgebra::DVector::from_row_slice(&lam);
        assert!(close(&apply_sa(a, &s, &lam), (&fwd * &x).as_slice(), 1e-14));
        let back = fwd.try_inverse().unwrap() * &x;
        assert!(close(&apply_inv_sa(a, &s, &lam), back.as_slice(), 1e-13));
    }

    #[test]
    fn parameter_grid_single_cell_and_symmetry() {
        let pg = make_param_grid(0.5, 2.0, 1, 1.0, 1, 1).unwrap();
        assert_eq!(pg.a_nodes, vec![-1.0, 1.0]);
        let cell = (4f64).ln() * 1.0 * 2.0;
        assert!((pg.weights[0] - cell).abs() < 1e-14 && pg.weights[0] == pg.weights[1]);

        let pg = make_param_grid(0.125, 2.0, 5, 1.5, 3, 2).unwrap();
        assert_eq!(pg.len(), 10 * 27);
        let ns = pg.s_nodes.len();
        for ia in 0..5 {
            assert_eq!(pg.a_nodes[ia], -pg.a_nodes[9 - ia]);
            assert_eq!(pg.weights[ia * ns + 4], pg.weights[(9 - ia) * ns + 4]);
        }
        assert!(make_param_grid(2.0, 1.0, 4, 1.0, 3, 1).is_err());
        assert!(make_param_grid(0.5, 1.0, 0, 1.0, 3, 1).is_err());
    }

    #[test]
    fn total_weight_converges_to_haar_volume() {
        let (a0, a1, smax) = (0.25, 2.0, 1.5);
        for n in [1usize, 2] {
            let pg = make_param_grid(a0, a1, 64, smax, if n == 1 { 64 } else { 4 }, n).unwrap();
            let total: f64 = pg.weights.iter().sum();
            let k = 2.0 * n as f64;
            let exact = 2.0 * (2.0 * smax).powi(2 * n as i32 - 1) * (a0.powf(-k) - a1.powf(-k)) / k;
            assert!((total - exact).abs() / exact < 1e-2, "n = {n}: {total} vs {exact}");
        }
    }
}

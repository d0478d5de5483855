//! Discrete velocity grid and the velocity-space functionals built on it.
//!
//! The grid is the midpoint rule on `[-V_c, V_c]`. Moments, the projection
//! onto `span{M, vM, v^2 M}` and the weighted norm are all evaluated with this
//! rule, so orthogonality holds at the discrete level the solver sees.

use crate::error::{Result, SolverError};
use crate::state::{b_function, ConservedState, PrimitiveState};

const MAXWELLIAN_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityGrid {
    pub v_cut: f64,
    pub points: Vec<f64>,
    pub dv: f64,
}

impl VelocityGrid {
    pub fn new(v_cut: f64, n_points: usize) -> Result<Self> {
        if !(v_cut > 0.0) || n_points == 0 {
            return Err(SolverError::InvalidArgument(format!(
                "velocity grid needs V_c > 0 and N_v >= 1 (got {v_cut}, {n_points})"
            )));
        }
        let dv = 2.0 * v_cut / n_points as f64;
        let points = (0..n_points)
            .map(|j| -v_cut + (j as f64 + 0.5) * dv)
            .collect();
        Ok(Self { v_cut, points, dv })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the mirrored velocity `-v_j`.
    #[inline]
    pub fn mirror(&self, j: usize) -> usize {
        self.points.len() - 1 - j
    }

    fn check(&self, slice: &[f64]) -> Result<()> {
        if slice.len() != self.points.len() {
            return Err(SolverError::ShapeMismatch(format!(
                "slice has {} entries, grid has {}",
                slice.len(),
                self.points.len()
            )));
        }
        Ok(())
    }
}

fn checked_primitive(state: &ConservedState) -> Result<PrimitiveState> {
    state.to_primitive()
}

/// `dv * sum_j (1, v, v^2/2) f(v_j)`.
pub fn discrete_moments(slice: &[f64], grid: &VelocityGrid) -> Result<ConservedState> {
    grid.check(slice)?;
    Ok(moments_unchecked(slice, grid))
}

#[inline]
pub(crate) fn moments_unchecked(slice: &[f64], grid: &VelocityGrid) -> ConservedState {
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (&f, &v) in slice.iter().zip(&grid.points) {
        m0 += f;
        m1 += v * f;
        m2 += v * v * f;
    }
    ConservedState::new(m0 * grid.dv, m1 * grid.dv, 0.5 * m2 * grid.dv)
}

/// Flux moments `dv * sum_j v (1, v, v^2/2) f(v_j)`.
#[inline]
pub(crate) fn flux_moments_unchecked(slice: &[f64], grid: &VelocityGrid) -> ConservedState {
    let (mut m1, mut m2, mut m3) = (0.0, 0.0, 0.0);
    for (&f, &v) in slice.iter().zip(&grid.points) {
        let vf = v * f;
        m1 += vf;
        m2 += v * vf;
        m3 += v * v * vf;
    }
    ConservedState::new(m1 * grid.dv, m2 * grid.dv, 0.5 * m3 * grid.dv)
}

/// Local Maxwellian sampled on the grid.
pub fn maxwellian_eval(state: &ConservedState, grid: &VelocityGrid) -> Result<Vec<f64>> {
    let prim = checked_primitive(state)?;
    let mut out = vec![0.0; grid.len()];
    maxwellian_into(&prim, grid, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn maxwellian_into(prim: &PrimitiveState, grid: &VelocityGrid, out: &mut [f64]) {
    let norm = prim.rho / (2.0 * std::f64::consts::PI * prim.temp).sqrt();
    let inv2t = 0.5 / prim.temp;
    for (o, &v) in out.iter_mut().zip(&grid.points) {
        let c = v - prim.u;
        *o = norm * (-c * c * inv2t).exp();
    }
}

/// Discrete Gram system of the basis `{1, c, c^2/(2T) - 1/2}` weighted by `M`.
/// Solving it makes the projection exactly orthogonal for the midpoint rule.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Projector {
    u: f64,
    inv2t: f64,
    inv: [[f64; 3]; 3],
}

impl Projector {
    pub(crate) fn new(prim: &PrimitiveState, maxwellian: &[f64], grid: &VelocityGrid) -> Self {
        let inv2t = 0.5 / prim.temp;
        let mut s = [0.0f64; 5];
        for (&m, &v) in maxwellian.iter().zip(&grid.points) {
            let c = v - prim.u;
            let c2 = c * c;
            s[0] += m;
            s[1] += c * m;
            s[2] += c2 * m;
            s[3] += c2 * c * m;
            s[4] += c2 * c2 * m;
        }
        // psi2 = a c^2 - 1/2 with a = 1/(2T)
        let a = inv2t;
        let g00 = s[0];
        let g01 = s[1];
        let g02 = a * s[2] - 0.5 * s[0];
        let g11 = s[2];
        let g12 = a * s[3] - 0.5 * s[1];
        let g22 = a * a * s[4] - a * s[2] + 0.25 * s[0];
        let g = [[g00, g01, g02], [g01, g11, g12], [g02, g12, g22]];
        Self {
            u: prim.u,
            inv2t,
            inv: invert3(&g),
        }
    }

    /// In-place `f <- (I - Pi) f`.
    #[inline]
    pub(crate) fn complement_in_place(&self, f: &mut [f64], maxwellian: &[f64], grid: &VelocityGrid) {
        let mut b = [0.0f64; 3];
        for (&fj, &v) in f.iter().zip(&grid.points) {
            let c = v - self.u;
            b[0] += fj;
            b[1] += c * fj;
            b[2] += (c * c * self.inv2t - 0.5) * fj;
        }
        let mut alpha = [0.0f64; 3];
        for (r, a) in alpha.iter_mut().enumerate() {
            *a = self.inv[r][0] * b[0] + self.inv[r][1] * b[1] + self.inv[r][2] * b[2];
        }
        for ((fj, &m), &v) in f.iter_mut().zip(maxwellian).zip(&grid.points) {
            let c = v - self.u;
            *fj -= (alpha[0] + alpha[1] * c + alpha[2] * (c * c * self.inv2t - 0.5)) * m;
        }
    }
}

fn invert3(g: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    out[0][0] = (g[1][1] * g[2][2] - g[1][2] * g[2][1]) * inv_det;
    out[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) * inv_det;
    out[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) * inv_det;
    out[1][0] = (g[1][2] * g[2][0] - g[1][0] * g[2][2]) * inv_det;
    out[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) * inv_det;
    out[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) * inv_det;
    out[2][0] = (g[1][0] * g[2][1] - g[1][1] * g[2][0]) * inv_det;
    out[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) * inv_det;
    out[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) * inv_det;
    out
}

/// `(I - Pi_M) f` where `M` is the Maxwellian of `state`.
pub fn project_complement(
    slice: &[f64],
    state: &ConservedState,
    grid: &VelocityGrid,
) -> Result<Vec<f64>> {
    grid.check(slice)?;
    let prim = checked_primitive(state)?;
    let mut m = vec![0.0; grid.len()];
    maxwellian_into(&prim, grid, &mut m);
    let proj = Projector::new(&prim, &m, grid);
    let mut out = slice.to_vec();
    proj.complement_in_place(&mut out, &m, grid);
    Ok(out)
}

/// `( dv * sum_j f_j^2 / M_j / rho )^{1/2}`.
pub fn weighted_l2_norm(slice: &[f64], state: &ConservedState, grid: &VelocityGrid) -> Result<f64> {
    grid.check(slice)?;
    let prim = checked_primitive(state)?;
    let mut m = vec![0.0; grid.len()];
    maxwellian_into(&prim, grid, &mut m);
    Ok(weighted_l2_norm_with(slice, &m, prim.rho, grid))
}

#[inline]
pub(crate) fn weighted_l2_norm_sq_with(
    slice: &[f64],
    maxwellian: &[f64],
    rho: f64,
    grid: &VelocityGrid,
) -> f64 {
    let mut acc = 0.0;
    for (&f, &m) in slice.iter().zip(maxwellian) {
        if f != 0.0 {
            acc += f * f / m.max(MAXWELLIAN_FLOOR);
        }
    }
    acc * grid.dv / rho
}

pub(crate) fn weighted_l2_norm_with(
    slice: &[f64],
    maxwellian: &[f64],
    rho: f64,
    grid: &VelocityGrid,
) -> f64 {
    weighted_l2_norm_sq_with(slice, maxwellian, rho, grid).sqrt()
}

/// Near-equilibrium perturbation `-B(V) T_x / sqrt(T) M`, written into `out`.
#[inline]
pub(crate) fn equilibrium_g_into(
    prim: &PrimitiveState,
    temp_x: f64,
    maxwellian: &[f64],
    grid: &VelocityGrid,
    out: &mut [f64],
) {
    let sqrt_t = prim.temp.sqrt();
    let scale = -temp_x / sqrt_t;
    for ((o, &m), &v) in out.iter_mut().zip(maxwellian).zip(&grid.points) {
        *o = scale * b_function((v - prim.u) / sqrt_t) * m;
    }
}

/// Kinetic heat flux `q = -eps <(v-u)^3/2 g>`, signed like `eps kappa T_x`.
pub fn heat_flux_kinetic(
    g: &[f64],
    state: &ConservedState,
    grid: &VelocityGrid,
    eps: f64,
) -> Result<f64> {
    grid.check(g)?;
    let prim = checked_primitive(state)?;
    Ok(heat_flux_kinetic_unchecked(g, prim.u, grid, eps))
}

#[inline]
pub(crate) fn heat_flux_kinetic_unchecked(g: &[f64], u: f64, grid: &VelocityGrid, eps: f64) -> f64 {
    let mut acc = 0.0;
    for (&gj, &v) in g.iter().zip(&grid.points) {
        let c = v - u;
        acc += 0.5 * c * c * c * gj;
    }
    -eps * acc * grid.dv
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sod_grid() -> VelocityGrid {
        VelocityGrid::new(4.5, 100).unwrap()
    }

    /// Moments of a Gaussian truncated to [-V, V], by composite Simpson with
    /// a fine grid: an oracle independent of the midpoint rule.
    fn truncated_gaussian_moments(rho: f64, u: f64, t: f64, v_cut: f64) -> [f64; 3] {
        let n = 200_000;
        let h = 2.0 * v_cut / n as f64;
        let mut acc = [0.0f64; 3];
        for i in 0..=n {
            let v = -v_cut + i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let m = rho / (2.0 * std::f64::consts::PI * t).sqrt() * (-(v - u).powi(2) / (2.0 * t)).exp();
            acc[0] += w * m;
            acc[1] += w * v * m;
            acc[2] += w * 0.5 * v * v * m;
        }
        acc.map(|a| a * h / 3.0)
    }

    #[test]
    fn grid_layout() {
        let g = sod_grid();
        assert_eq!(g.len(), 100);
        assert!((g.dv * 100.0 - 9.0).abs() < 1e-14);
        for j in 0..g.len() {
            assert!((g.points[j] + g.points[g.mirror(j)]).abs() < 1e-14);
            assert!(g.points[j].abs() < 4.5);
        }
        assert!(VelocityGrid::new(0.0, 10).is_err());
        assert!(VelocityGrid::new(1.0, 0).is_err());
    }

    #[test]
    fn zero_moments() {
        let g = sod_grid();
        assert_eq!(discrete_moments(&vec![0.0; 100], &g).unwrap(), ConservedState::ZERO);
        assert!(discrete_moments(&[1.0; 3], &g).is_err());
    }

    #[test]
    fn maxwellian_moments_match_truncated_integral() {
        // On the Sod grid the tails beyond 4.5 thermal speeds are cut off, so
        // the midpoint sums are compared with the truncated integral.
        let g = sod_grid();
        for &(rho, t) in &[(1.0, 1.0), (0.125, 0.8)] {
            let u = ConservedState::from_primitive(rho, 0.0, t);
            let m = discrete_moments(&maxwellian_eval(&u, &g).unwrap(), &g).unwrap();
            let mut oracle = truncated_gaussian_moments(rho, 0.0, t, 4.5);
            // midpoint rule = integral - dv^2/24 [f']_{-V}^{V} + O(dv^4)
            let mw = |v: f64| rho / (2.0 * std::f64::consts::PI * t).sqrt() * (-v * v / (2.0 * t)).exp();
            let d0 = |v: f64| -v / t * mw(v);
            let d2 = |v: f64| v * mw(v) - 0.5 * v * v * v / t * mw(v);
            let h2 = g.dv * g.dv / 24.0;
            oracle[0] -= h2 * (d0(4.5) - d0(-4.5));
            oracle[2] -= h2 * (d2(4.5) - d2(-4.5));
            assert!((m.rho - oracle[0]).abs() < 1e-8 * rho.max(1.0), "{m:?} {oracle:?}");
            assert!(m.mom.abs() < 1e-15);
            assert!((m.energy - oracle[2]).abs() < 1e-8 * rho.max(1.0), "{m:?} {oracle:?}");
            // and against the untruncated value at the truncation level
            assert!((m.rho - u.rho).abs() < 1e-4 && (m.energy - u.energy).abs() < 1e-3);
        }
    }

    #[test]
    fn maxwellian_round_trip_on_wide_grid() {
        for &(rho, u, t) in &[(1.0, 0.0, 1.0), (0.125, 0.0, 0.8), (2.0, 0.7, 0.5), (1.0, -1.0, 2.0)] {
            let s = ConservedState::from_primitive(rho, u, t);
            let v_cut: f64 = u.abs() + 6.5 * t.sqrt();
            let g = VelocityGrid::new(v_cut, 100).unwrap();
            let m = discrete_moments(&maxwellian_eval(&s, &g).unwrap(), &g).unwrap();
            assert!((m - s).max_abs() < 1e-8, "{m:?} vs {s:?}");
        }
    }

    #[test]
    fn maxwellian_peak() {
        let g = VelocityGrid::new(4.0, 2).unwrap(); // points at +-2
        let s = ConservedState::from_primitive(1.0, 2.0, 1.0);
        let m = maxwellian_eval(&s, &g).unwrap();
        assert!((m[1] - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!(m.iter().all(|&x| x > 0.0));
        assert!(maxwellian_eval(&ConservedState::new(1.0, 0.0, -1.0), &g).is_err());
    }

    #[test]
    fn projection_annihilates_null_space() {
        let g = sod_grid();
        let s = ConservedState::from_primitive(1.0, 0.3, 1.0);
        let m = maxwellian_eval(&s, &g).unwrap();
        let r = project_complement(&m, &s, &g).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-10));
        let vm: Vec<f64> = m.iter().zip(&g.points).map(|(a, v)| a * v).collect();
        let r = project_complement(&vm, &s, &g).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn projection_random_slices() {
        let g = sod_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = ConservedState::from_primitive(
                rng.gen_range(0.1..2.0),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.3..1.5),
            );
            let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let p = project_complement(&f, &s, &g).unwrap();
            let mo = discrete_moments(&p, &g).unwrap();
            assert!(mo.max_abs() <= 1e-8 * norm);
            let pp = project_complement(&p, &s, &g).unwrap();
            let diff = pp.iter().zip(&p).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            assert!(diff <= 1e-8 * norm);
        }
    }

    #[test]
    fn moments_are_linear_and_odd_vanish() {
        let g = sod_grid();
        let a: Vec<f64> = g.points.iter().map(|v| (-v * v).exp()).collect();
        let b: Vec<f64> = g.points.iter().map(|v| v.cos()).collect();
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let lhs = discrete_moments(&ab, &g).unwrap();
        let rhs = discrete_moments(&a, &g).unwrap() * 2.0 - discrete_moments(&b, &g).unwrap() * 3.0;
        assert!((lhs - rhs).max_abs() < 1e-13);
        assert!(lhs.mom.abs() < 1e-14);
    }

    #[test]
    fn weighted_norm_examples() {
        let g = VelocityGrid::new(10.0, 100).unwrap();
        let s = ConservedState::from_primitive(1.3, 0.2, 0.9);
        assert_eq!(weighted_l2_norm(&vec![0.0; 100], &s, &g).unwrap(), 0.0);
        let m = maxwellian_eval(&s, &g).unwrap();
        assert!((weighted_l2_norm(&m, &s, &g).unwrap() - 1.0).abs() < 1e-10);
        let f: Vec<f64> = m.iter().zip(&g.points).map(|(a, v)| a * v.sin()).collect();
        let f2: Vec<f64> = f.iter().map(|x| -2.0 * x).collect();
        let n1 = weighted_l2_norm(&f, &s, &g).unwrap();
        let n2 = weighted_l2_norm(&f2, &s, &g).unwrap();
        assert!((n2 - 2.0 * n1).abs() < 1e-14);
    }

    #[test]
    fn kinetic_heat_flux_matches_fluid_closure() {
        let g = VelocityGrid::new(10.0, 100).unwrap();
        let eps = 0.01;
        for &(rho, u, t, tx) in &[(1.0, 0.0, 1.0, 1.0), (0.5, 0.4, 1.5, -2.0)] {
            let s = ConservedState::from_primitive(rho, u, t);
            let prim = s.to_primitive().unwrap();
            let m = maxwellian_eval(&s, &g).unwrap();
            let mut ge = vec![0.0; g.len()];
            equilibrium_g_into(&prim, tx, &m, &g, &mut ge);
            let qk = heat_flux_kinetic(&ge, &s, &g, eps).unwrap();
            let qf = crate::state::heat_flux_fluid(&prim, tx, eps);
            assert!((qk - qf).abs() < 1e-6 * qf.abs(), "{qk} vs {qf}");
        }
        let s = ConservedState::from_primitive(1.0, 0.0, 1.0);
        assert_eq!(heat_flux_kinetic(&vec![0.0; 100], &s, &g, eps).unwrap(), 0.0);
    }
}

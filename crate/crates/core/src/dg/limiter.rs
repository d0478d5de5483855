//! Component-wise TVB minmod limiter on conserved variables.

use crate::quadrature::NodalBasis;
use crate::state::ConservedState;

use super::field::StateField;
use super::mesh::{Boundary, Mesh1D};

#[inline]
fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// TVB-modified minmod: keep `a` when `|a| <= m h^2`.
#[inline]
pub fn modified_minmod(a: f64, b: f64, c: f64, m_tvb: f64, h: f64) -> f64 {
    if a.abs() <= m_tvb * h * h {
        a
    } else {
        minmod3(a, b, c)
    }
}

/// Limits every cell; returns the number of cells that were modified.
pub fn tvb_limit(field: &mut StateField, mesh: &Mesh1D, basis: &NodalBasis, m_tvb: f64) -> usize {
    let mask = vec![true; mesh.n_cells()];
    tvb_limit_masked(field, mesh, basis, m_tvb, &mask)
}

/// Limits the cells with `mask[i]`; the others are left untouched.
pub fn tvb_limit_masked(
    field: &mut StateField,
    mesh: &Mesh1D,
    basis: &NodalBasis,
    m_tvb: f64,
    mask: &[bool],
) -> usize {
    let n = mesh.n_cells();
    let means: Vec<ConservedState> = (0..n).map(|i| field.cell_average(i, basis)).collect();
    let ghost = |s: ConservedState| match mesh.boundary {
        Boundary::Reflective => s.reflected(),
        _ => s,
    };
    let mut count = 0;
    for i in 0..n {
        if !mask[i] {
            continue;
        }
        let (l, r) = mesh.neighbors(i);
        let left_mean = l.map_or_else(|| ghost(means[i]), |j| means[j]);
        let right_mean = r.map_or_else(|| ghost(means[i]), |j| means[j]);
        let h = mesh.width(i);
        let mean = means[i].components();
        let lm = left_mean.components();
        let rm = right_mean.components();
        let lt = field.left_trace(i, basis).components();
        let rt = field.right_trace(i, basis).components();
        let mut slope: [Option<f64>; 3] = [None; 3];
        for c in 0..3 {
            let dp = rm[c] - mean[c];
            let dm = mean[c] - lm[c];
            let ur = rt[c] - mean[c];
            let ul = mean[c] - lt[c];
            let ur_mod = modified_minmod(ur, dp, dm, m_tvb, h);
            let ul_mod = modified_minmod(ul, dp, dm, m_tvb, h);
            if ur_mod != ur || ul_mod != ul {
                slope[c] = Some(modified_minmod(0.5 * (ur + ul), dp, dm, m_tvb, h));
            }
        }
        if slope.iter().all(Option::is_none) {
            continue;
        }
        count += 1;
        for (node, &xi) in field.cell_mut(i).iter_mut().zip(basis.nodes()) {
            let mut comps = node.components();
            for c in 0..3 {
                if let Some(d) = slope[c] {
                    comps[c] = mean[c] + 2.0 * d * xi;
                }
            }
            *node = ConservedState::from_components(comps);
        }
    }
    count
}

//! Curvature and integral functionals of a conformally immersed chart.
//!
//! The induced metric is rho times the identity; mean and Gauss curvature
//! come from the second fundamental form contracted with the unit normal
//! (Weingarten route), with an independent Gauss curvature from the
//! conformal-factor Laplacian (egregium route).

use crate::error::CoreError;
use crate::grid::{integrate, ChartOps};
use crate::{C64, CField, RField};
use ndarray::Array2;

/// Tangent frame e_z = del(x) for each embedding component.
pub fn frames(ops: &ChartOps, x: &[RField; 3]) -> Result<[CField; 3], CoreError> {
    let shape = ops.shape();
    for xi in x {
        if xi.dim() != shape {
            return Err(CoreError::ShapeMismatch { want: shape, got: xi.dim() });
        }
    }
    Ok([
        ops.del_real(&x[0]),
        ops.del_real(&x[1]),
        ops.del_real(&x[2]),
    ])
}

/// Conformal factor recovered from the frame: rho = 2 <e_z, e_zbar>.
pub fn conformal_factor(ez: &[CField; 3]) -> RField {
    let mut rho = Array2::zeros(ez[0].dim());
    for comp in ez {
        for (r, v) in rho.iter_mut().zip(comp.iter()) {
            *r += 2.0 * v.norm_sqr();
        }
    }
    rho
}

/// Exact frame and second-derivative samples for charts with closed-form
/// embeddings; lets curvature be evaluated without spectral differentiation.
pub struct FrameSamples {
    /// del(x) per component.
    pub ez: [CField; 3],
    /// del(del(x)) per component.
    pub dzz: [CField; 3],
    /// del(delbar(x)) per component; real for a real embedding.
    pub dzzbar: [RField; 3],
}

/// Mean and Gauss curvature from the second fundamental form.
pub struct Curvature {
    pub h: RField,
    pub k: RField,
}

fn curvature_from_derivatives(
    ez: &[CField; 3],
    x11: &[RField; 3],
    x12: &[RField; 3],
    x22: &[RField; 3],
) -> Curvature {
    let dim = ez[0].dim();
    let rho = conformal_factor(ez);
    // Real tangent vectors d_a = d x / d q^a and the unit normal.
    let mut d1 = [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    let mut d2 = [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    for c in 0..3 {
        for ((i, j), v) in ez[c].indexed_iter() {
            d1[c][(i, j)] = 2.0 * v.re;
            d2[c][(i, j)] = -2.0 * v.im;
        }
    }
    let mut h = Array2::zeros(dim);
    let mut k = Array2::zeros(dim);
    for ((i, j), hv) in h.indexed_iter_mut() {
        let a = [d1[0][(i, j)], d1[1][(i, j)], d1[2][(i, j)]];
        let b = [d2[0][(i, j)], d2[1][(i, j)], d2[2][(i, j)]];
        let mut n = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        for v in n.iter_mut() {
            *v /= nn;
        }
        let g11: f64 = (0..3).map(|c| n[c] * x11[c][(i, j)]).sum();
        let g12: f64 = (0..3).map(|c| n[c] * x12[c][(i, j)]).sum();
        let g22: f64 = (0..3).map(|c| n[c] * x22[c][(i, j)]).sum();
        let r = rho[(i, j)];
        *hv = (g11 + g22) / (2.0 * r);
        k[(i, j)] = (g11 * g22 - g12 * g12) / (r * r);
    }
    Curvature { h, k }
}

/// Weingarten-route curvature with spectrally differentiated frames.
pub fn curvature_numeric(ops: &ChartOps, x: &[RField; 3]) -> Result<Curvature, CoreError> {
    let ez = frames(ops, x)?;
    let dim = ez[0].dim();
    let zero = || [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    let mut x11 = zero();
    let mut x12 = zero();
    let mut x22 = zero();
    for c in 0..3 {
        let d1: RField = ez[c].mapv(|v| 2.0 * v.re);
        let d2: RField = ez[c].mapv(|v| -2.0 * v.im);
        let dd1 = ops.del_real(&d1);
        let dd2 = ops.del_real(&d2);
        x11[c] = dd1.mapv(|v| 2.0 * v.re);
        x12[c] = dd1.mapv(|v| -2.0 * v.im);
        x22[c] = dd2.mapv(|v| -2.0 * v.im);
    }
    Ok(curvature_from_derivatives(&ez, &x11, &x12, &x22))
}

/// Weingarten-route curvature from exact derivative samples.
pub fn curvature_from_samples(fs: &FrameSamples) -> Curvature {
    let dim = fs.ez[0].dim();
    let zero = || [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    let mut x11 = zero();
    let mut x12 = zero();
    let mut x22 = zero();
    for c in 0..3 {
        for ((i, j), v) in fs.dzz[c].indexed_iter() {
            let mixed = fs.dzzbar[c][(i, j)];
            x11[c][(i, j)] = 2.0 * v.re + 2.0 * mixed;
            x22[c][(i, j)] = -2.0 * v.re + 2.0 * mixed;
            x12[c][(i, j)] = -2.0 * v.im;
        }
    }
    curvature_from_derivatives(&fs.ez, &x11, &x12, &x22)
}

/// Egregium-route Gauss curvature: K = -(2/rho) Re del(delbar(log rho)).
pub fn curvature_egregium(ops: &ChartOps, rho: &RField) -> RField {
    let logr = rho.mapv(|v| C64::new(v.ln(), 0.0));
    let inner = ops.delbar(&logr);
    let outer = ops.del(&inner);
    let mut k = Array2::zeros(rho.dim());
    for ((i, j), v) in k.indexed_iter_mut() {
        *v = -2.0 / rho[(i, j)] * outer[(i, j)].re;
    }
    k
}

/// Mean-curvature potential p = (1/2) rho^{1/2} H.
pub fn mean_curvature_potential(rho: &RField, h: &RField) -> RField {
    let mut p = Array2::zeros(rho.dim());
    for ((i, j), v) in p.indexed_iter_mut() {
        *v = 0.5 * rho[(i, j)].sqrt() * h[(i, j)];
    }
    p
}

/// Integral functionals of one chart.
#[derive(Debug, Clone, Copy)]
pub struct Functionals {
    /// Surface area, integral of rho d^2q.
    pub area: f64,
    /// Willmore energy from the mean curvature, integral of H^2 rho d^2q.
    pub willmore_h: f64,
    /// Willmore energy from the potential, integral of 4 p^2 d^2q.
    pub willmore_p: f64,
    /// Euler characteristic from Gauss-Bonnet, integral of K rho d^2q / 2 pi.
    pub euler_char: f64,
}

/// Evaluate area, both Willmore routes, and the Gauss-Bonnet characteristic.
pub fn functionals(w: &RField, rho: &RField, h: &RField, p: &RField, k: &RField) -> Functionals {
    let area = integrate(w, rho);
    let h2rho = {
        let mut f = rho.clone();
        f.zip_mut_with(h, |a, b| *a *= b * b);
        f
    };
    let p4 = p.mapv(|v| 4.0 * v * v);
    let krho = {
        let mut f = rho.clone();
        f.zip_mut_with(k, |a, b| *a *= *b);
        f
    };
    Functionals {
        area,
        willmore_h: integrate(w, &h2rho),
        willmore_p: integrate(w, &p4),
        euler_char: integrate(w, &krho) / (2.0 * std::f64::consts::PI),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{SphereOps, TorusOps};
    use std::f64::consts::PI;

    #[test]
    fn egregium_vanishes_on_flat_factor() {
        let ops = ChartOps::Torus(TorusOps::new(8, 8, 2.0 * PI, 2.0 * PI));
        let rho = Array2::from_elem((8, 8), 1.0);
        let k = curvature_egregium(&ops, &rho);
        assert!(k.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn round_sphere_weingarten_is_unit() {
        let n = 16;
        let sops = SphereOps::new(n, n);
        let phi = sops.phi();
        let dim = (n, n);
        let mut x = [
            Array2::zeros(dim),
            Array2::zeros(dim),
            Array2::zeros(dim),
        ];
        for i in 0..n {
            let r = sops.r[i];
            let den = 1.0 + r * r;
            for j in 0..n {
                let (q1, q2) = (r * phi[j].cos(), r * phi[j].sin());
                x[0][(i, j)] = 2.0 * q1 / den;
                x[1][(i, j)] = 2.0 * q2 / den;
                x[2][(i, j)] = (r * r - 1.0) / den;
            }
        }
        let ops = ChartOps::Sphere(sops);
        let cv = curvature_numeric(&ops, &x).unwrap();
        let herr = cv.h.iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
        let kerr = cv.k.iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
        assert!(herr < 1e-10, "H err {herr:.3e}");
        assert!(kerr < 1e-10, "K err {kerr:.3e}");
    }
}

//! Built-in surface charts: flat and bumpy tori given by chart data, the
//! torus of revolution in its isothermal chart, the round sphere on a
//! stereographic grid, and a catenoid strip.

use crate::error::CoreError;
use crate::geometry::FrameSamples;
use crate::grid::{ChartOps, SphereOps, StripOps, TorusOps};
use crate::{C64, RField};
use ndarray::Array2;
use std::f64::consts::PI;

/// Closed-form curvature fields for oracle comparisons.
pub struct ExactCurvature {
    pub h: RField,
    pub k: RField,
}

/// A sampled conformal chart: grid machinery, conformal factor, the
/// mean-curvature potential, and optional embedding plus exact references.
pub struct Chart {
    pub ops: ChartOps,
    /// Flat d^2q quadrature weights.
    pub w: RField,
    pub rho: RField,
    pub p: RField,
    pub embedding: Option<[RField; 3]>,
    pub exact: Option<ExactCurvature>,
    /// Exact frame derivatives where the embedding has simple closed forms.
    pub frame_samples: Option<FrameSamples>,
    pub label: String,
}

/// Flat torus chart: rho = 1, p = 0 on `[0, 2 pi)^2`.
pub fn flat_torus(n: usize) -> Chart {
    let ops = ChartOps::Torus(TorusOps::new(n, n, 2.0 * PI, 2.0 * PI));
    let w = ops.weights();
    let dim = (n, n);
    Chart {
        ops,
        w,
        rho: Array2::from_elem(dim, 1.0),
        p: Array2::zeros(dim),
        embedding: None,
        exact: Some(ExactCurvature {
            h: Array2::zeros(dim),
            k: Array2::zeros(dim),
        }),
        frame_samples: None,
        label: "flat-torus".into(),
    }
}

/// Perturbed torus chart data: rho = exp(2 a cos q1 cos q2) and an
/// independently chosen potential p = p0 + b cos q2. The pair (rho, p) is
/// chart data for the operator pipeline rather than an embedded surface.
pub fn bumpy_torus(n: usize, eps_rho: f64, p0: f64, eps_p: f64) -> Chart {
    let tops = TorusOps::new(n, n, 2.0 * PI, 2.0 * PI);
    let q1 = tops.nodes1();
    let q2 = tops.nodes2();
    let dim = (n, n);
    let mut rho = Array2::zeros(dim);
    let mut p = Array2::zeros(dim);
    let mut k = Array2::zeros(dim);
    let mut h = Array2::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            let cc = q1[i].cos() * q2[j].cos();
            let r = (2.0 * eps_rho * cc).exp();
            rho[(i, j)] = r;
            p[(i, j)] = p0 + eps_p * q2[j].cos();
            // K = -lap(log rho)/(2 rho); log rho is a single product mode, so
            // lap(log rho) = -4 eps_rho cos q1 cos q2.
            k[(i, j)] = 2.0 * eps_rho * cc / r;
            h[(i, j)] = 2.0 * p[(i, j)] / r.sqrt();
        }
    }
    let ops = ChartOps::Torus(tops);
    let w = ops.weights();
    Chart {
        ops,
        w,
        rho,
        p,
        embedding: None,
        exact: Some(ExactCurvature { h, k }),
        frame_samples: None,
        label: format!("bumpy-torus-{n}-{eps_rho}-{p0}-{eps_p}"),
    }
}

/// Isothermal coordinate u as a function of the poloidal angle eta for a
/// torus of revolution with aspect ratio a > 1 (tube radius 1). The atan2
/// form stays well conditioned through eta = pi.
fn iso_u(eta: f64, a: f64) -> f64 {
    let s = (a * a - 1.0).sqrt();
    let y = (a - 1.0).sqrt() * (eta / 2.0).sin();
    let x = (a + 1.0).sqrt() * (eta / 2.0).cos();
    2.0 / s * y.atan2(x)
}

/// Invert iso_u on [0, pi] by safeguarded Newton; du/deta = 1/(a + cos eta).
fn eta_of_u_half(u: f64, a: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = PI;
    let mut eta = u; // decent starting scale: u ~ eta near a >> 1
    for _ in 0..80 {
        let f = iso_u(eta, a) - u;
        if f > 0.0 {
            hi = eta;
        } else {
            lo = eta;
        }
        let step = f * (a + eta.cos());
        let mut next = eta - step;
        if !(lo..=hi).contains(&next) {
            next = 0.5 * (lo + hi);
        }
        if (next - eta).abs() < 1e-15 {
            eta = next;
            break;
        }
        eta = next;
    }
    eta
}

fn eta_of_u(u: f64, a: f64) -> f64 {
    let s = (a * a - 1.0).sqrt();
    let period = 2.0 * PI / s;
    let half = period / 2.0;
    let um = u.rem_euclid(period);
    if um <= half {
        eta_of_u_half(um, a)
    } else {
        2.0 * PI - eta_of_u_half(period - um, a)
    }
}

/// Torus of revolution (tube radius 1, center-line radius `aspect`) in the
/// isothermal chart: q1 runs over one poloidal period 2 pi / sqrt(a^2 - 1),
/// q2 is the azimuth.
pub fn revolution_torus(n: usize, aspect: f64) -> Result<Chart, CoreError> {
    let a = aspect;
    if a <= 1.0 {
        return Err(CoreError::InvalidParameter(format!(
            "revolution torus needs aspect > 1, got {a}"
        )));
    }
    let s = (a * a - 1.0).sqrt();
    let period = 2.0 * PI / s;
    let tops = TorusOps::new(n, n, period, 2.0 * PI);
    let u = tops.nodes1();
    let phi = tops.nodes2();
    let dim = (n, n);
    let mut rho = Array2::zeros(dim);
    let mut p = Array2::zeros(dim);
    let mut h = Array2::zeros(dim);
    let mut k = Array2::zeros(dim);
    let mut x = [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    for i in 0..n {
        let eta = eta_of_u(u[i], a);
        let (se, ce) = eta.sin_cos();
        let ring = a + ce;
        for j in 0..n {
            rho[(i, j)] = ring * ring;
            h[(i, j)] = (a + 2.0 * ce) / (2.0 * ring);
            k[(i, j)] = ce / ring;
            p[(i, j)] = (a + 2.0 * ce) / 4.0;
            x[0][(i, j)] = ring * phi[j].cos();
            x[1][(i, j)] = ring * phi[j].sin();
            x[2][(i, j)] = se;
        }
    }
    let ops = ChartOps::Torus(tops);
    let w = ops.weights();
    Ok(Chart {
        ops,
        w,
        rho,
        p,
        embedding: Some(x),
        exact: Some(ExactCurvature { h, k }),
        frame_samples: None,
        label: format!("revolution-torus-{n}-a{aspect}"),
    })
}

/// Clifford aspect ratio sqrt(2): the Willmore-minimizing torus of revolution.
pub fn clifford_torus(n: usize) -> Chart {
    let mut c = revolution_torus(n, 2.0f64.sqrt()).expect("aspect sqrt(2) is valid");
    c.label = format!("clifford-torus-{n}");
    c
}

/// Unit sphere on the stereographic chart z = tan(theta/2) e^{i phi},
/// with exact rational frame derivatives attached.
pub fn unit_sphere(n1: usize, n2: usize) -> Chart {
    let sops = SphereOps::new(n1, n2);
    let phi = sops.phi();
    let dim = (n1, n2);
    let mut rho = Array2::zeros(dim);
    let mut p = Array2::zeros(dim);
    let mut x = [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    let mut ez = [
        Array2::zeros(dim),
        Array2::zeros(dim),
        Array2::zeros(dim),
    ];
    let mut dzz = [
        Array2::zeros(dim),
        Array2::zeros(dim),
        Array2::zeros(dim),
    ];
    let mut dzzbar = [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    for i in 0..n1 {
        let r = sops.r[i];
        for j in 0..n2 {
            let z = C64::from_polar(r, phi[j]);
            let zb = z.conj();
            let den = 1.0 + r * r;
            let d2 = den * den;
            let d3 = d2 * den;
            rho[(i, j)] = 4.0 / d2;
            p[(i, j)] = 1.0 / den;
            let xv = [
                (z + zb).re / den,
                (z - zb).im / den * 1.0,
                (r * r - 1.0) / den,
            ];
            for (c, val) in xv.iter().enumerate() {
                x[c][(i, j)] = *val;
            }
            // First and second Wirtinger derivatives of the embedding; the
            // mixed derivative collapses to -2 x / (1 + |z|^2)^2.
            ez[0][(i, j)] = (C64::new(1.0, 0.0) - zb * zb) / d2;
            ez[1][(i, j)] = -C64::i() * (C64::new(1.0, 0.0) + zb * zb) / d2;
            ez[2][(i, j)] = 2.0 * zb / d2;
            dzz[0][(i, j)] = -2.0 * zb * (C64::new(1.0, 0.0) - zb * zb) / d3;
            dzz[1][(i, j)] = 2.0 * C64::i() * zb * (C64::new(1.0, 0.0) + zb * zb) / d3;
            dzz[2][(i, j)] = -4.0 * zb * zb / d3;
            for c in 0..3 {
                dzzbar[c][(i, j)] = -2.0 * xv[c] / d2;
            }
        }
    }
    let ops = ChartOps::Sphere(sops);
    let w = ops.weights();
    Chart {
        ops,
        w,
        rho,
        p,
        embedding: Some(x),
        exact: Some(ExactCurvature {
            h: Array2::from_elem(dim, 1.0),
            k: Array2::from_elem(dim, 1.0),
        }),
        frame_samples: Some(FrameSamples { ez, dzz, dzzbar }),
        label: format!("unit-sphere-{n1}x{n2}"),
    }
}

/// Catenoid strip: the minimal surface of revolution on v in [-vh, vh],
/// u periodic. rho = cosh^2 v, H = 0, p = 0.
pub fn catenoid_strip(nv: usize, nu: usize, vh: f64) -> Chart {
    let sops = StripOps::new(nv, nu, 2.0 * PI, vh);
    let u = sops.u();
    let v = sops.v.clone();
    let dim = (nv, nu);
    let mut rho = Array2::zeros(dim);
    let mut k = Array2::zeros(dim);
    let mut x = [Array2::zeros(dim), Array2::zeros(dim), Array2::zeros(dim)];
    for i in 0..nv {
        let ch = v[i].cosh();
        for j in 0..nu {
            rho[(i, j)] = ch * ch;
            k[(i, j)] = -1.0 / (ch * ch * ch * ch);
            x[0][(i, j)] = ch * u[j].cos();
            x[1][(i, j)] = ch * u[j].sin();
            x[2][(i, j)] = v[i];
        }
    }
    let ops = ChartOps::Strip(sops);
    let w = ops.weights();
    Chart {
        ops,
        w,
        rho,
        p: Array2::zeros(dim),
        embedding: Some(x),
        exact: Some(ExactCurvature {
            h: Array2::zeros(dim),
            k,
        }),
        frame_samples: None,
        label: format!("catenoid-{nv}x{nu}-vh{vh}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isothermal_inversion_roundtrips() {
        for &a in &[1.3, 2.0f64.sqrt(), 3.0] {
            let s = (a * a - 1.0).sqrt();
            let period = 2.0 * PI / s;
            for m in 0..17 {
                let u = m as f64 / 17.0 * period;
                let eta = eta_of_u(u, a);
                let back = if eta <= PI {
                    iso_u(eta, a)
                } else {
                    period - iso_u(2.0 * PI - eta, a)
                };
                assert!((back - u).abs() < 1e-12, "a={a} u={u}: back={back}");
            }
        }
    }

    #[test]
    fn clifford_chart_period_is_two_pi() {
        let c = clifford_torus(8);
        match &c.ops {
            ChartOps::Torus(t) => assert!((t.l1 - 2.0 * PI).abs() < 1e-14),
            _ => panic!("expected torus ops"),
        }
    }

    #[test]
    fn sphere_frame_samples_give_unit_curvature() {
        let c = unit_sphere(12, 12);
        let cv = crate::geometry::curvature_from_samples(c.frame_samples.as_ref().unwrap());
        for v in cv.h.iter() {
            assert!((v - 1.0).abs() < 1e-13, "H {v}");
        }
        for v in cv.k.iter() {
            assert!((v - 1.0).abs() < 1e-13, "K {v}");
        }
    }

    #[test]
    fn catenoid_numeric_mean_curvature_vanishes() {
        let c = catenoid_strip(20, 16, 1.0);
        let cv = crate::geometry::curvature_numeric(&c.ops, c.embedding.as_ref().unwrap()).unwrap();
        let hmax = cv.h.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        let kerr = cv
            .k
            .iter()
            .zip(c.exact.as_ref().unwrap().k.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(hmax < 1e-10, "H leak {hmax:.3e}");
        assert!(kerr < 1e-9, "K err {kerr:.3e}");
    }
}

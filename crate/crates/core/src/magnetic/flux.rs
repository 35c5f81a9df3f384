//! Exact quadratures for polynomial forms: triangle and parallelogram fluxes, segment circulations.

use super::poly::{MagneticField, VectorPotential};
use crate::grid::{symplectic_form, PhasePoint};
use crate::error::Result;
use num_complex::Complex64 as C64;

// degree-2 exact rule on the reference simplex {s, t >= 0, s + t <= 1}
const SIMPLEX_NODES: [(f64, f64); 3] = [(1.0 / 6.0, 1.0 / 6.0), (2.0 / 3.0, 1.0 / 6.0), (1.0 / 6.0, 2.0 / 3.0)];
const SIMPLEX_WEIGHT: f64 = 1.0 / 6.0;

// two-point Gauss-Legendre on [0, 1]
fn gauss2() -> [f64; 2] {
    let h = 0.5 / 3f64.sqrt();
    [0.5 - h, 0.5 + h]
}

/// Oriented area factors `e1_j e2_k - e1_k e2_j`, `j < k`, row-major over pairs.
fn wedge(e1: &[f64], e2: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let n = e1.len();
    for j in 0..n {
        for k in j + 1..n {
            out.push(e1[j] * e2[k] - e1[k] * e2[j]);
        }
    }
}

/// Flux of `B` through the oriented simplex `<a, b, c>`.
///
/// Vertices are put in a canonical order first, so any permutation changes at most the sign.
pub fn triangle_flux(field: &MagneticField, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let mut v = [a, b, c];
    let mut sign = 1.0;
    for i in 0..3 {
        for j in 0..2 - i {
            if v[j].partial_cmp(v[j + 1]) == Some(std::cmp::Ordering::Greater) {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign * flux_ordered(field, v[0], v[1], v[2])
}

fn flux_ordered(field: &MagneticField, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let n = field.n();
    let e1: Vec<f64> = (0..n).map(|j| b[j] - a[j]).collect();
    let e2: Vec<f64> = (0..n).map(|j| c[j] - a[j]).collect();
    let mut area = Vec::with_capacity(3);
    wedge(&e1, &e2, &mut area);
    if area.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let mut p = vec![0.0; n];
    let mut bv = vec![0.0; area.len()];
    let mut total = 0.0;
    for (s, t) in SIMPLEX_NODES {
        for j in 0..n {
            p[j] = a[j] + s * e1[j] + t * e2[j];
        }
        field.eval_upper(&p, &mut bv);
        total += bv.iter().zip(&area).map(|(b, w)| b * w).sum::<f64>();
    }
    total * SIMPLEX_WEIGHT
}

/// Line integral of `A` along the segment `[x, y]`, run from `x` to `y`.
pub fn circulation(pot: &VectorPotential, x: &[f64], y: &[f64]) -> f64 {
    let n = pot.n();
    let mut p = vec![0.0; n];
    let mut av = vec![0.0; n];
    let mut total = 0.0;
    for u in gauss2() {
        for j in 0..n {
            p[j] = x[j] + u * (y[j] - x[j]);
        }
        pot.eval(&p, &mut av);
        total += (0..n).map(|j| av[j] * (y[j] - x[j])).sum::<f64>();
    }
    total * 0.5
}

/// Flux through the parallelogram `{x + s y + t z : s in [-1/2, 1/2], t in [-1, 0]}`.
pub fn parallelogram_flux(field: &MagneticField, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let n = field.n();
    let mut area = Vec::with_capacity(3);
    wedge(y, z, &mut area);
    if area.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let g = gauss2();
    let mut p = vec![0.0; n];
    let mut bv = vec![0.0; area.len()];
    let mut total = 0.0;
    for gs in g {
        let s = gs - 0.5;
        for gt in g {
            let t = gt - 1.0;
            for j in 0..n {
                p[j] = x[j] + s * y[j] + t * z[j];
            }
            field.eval_upper(&p, &mut bv);
            total += bv.iter().zip(&area).map(|(b, w)| b * w).sum::<f64>();
        }
    }
    total * 0.25
}

/// `e^{(i/2) sigma(X, Y)} e^{-i Gamma^B(<z, z + x, z + x + y>)}`.
pub fn cocycle(field: &MagneticField, x: &PhasePoint, y: &PhasePoint, z: &[f64]) -> Result<C64> {
    let s = symplectic_form(x, y)?;
    let n = field.n();
    let (xc, yc) = (&x.coords()[..n], &y.coords()[..n]);
    let b: Vec<f64> = (0..n).map(|j| z[j] + xc[j]).collect();
    let c: Vec<f64> = (0..n).map(|j| b[j] + yc[j]).collect();
    Ok(C64::from_polar(1.0, 0.5 * s - triangle_flux(field, z, &b, &c)))
}

//! Direct phase-space quadrature of the twisted product integral, used as an oracle.
//!
//! The integral pi^{-2n} int int e^{-2i sigma(X-Y, X-Z)} f(Y) g(Z) dY dZ is summed over
//! a grid refined by two along every axis. Sampling the coarse grid alone aliases:
//! the doubled form 2 sigma is degenerate modulo N and folds half-period copies into
//! the sum. Fields are carried to the fine grid by spectral zero padding.
//!
//! With Y = X + U and Z = X + V the phase factorizes over the xi-displacements, so the
//! sums over those reduce to FFTs along the fine xi-axes. Every node and weight of the
//! double sum is kept.

use crate::error::{MoyalError, Result};
use crate::fft::{self, Plans, Sign};
use crate::grid::{roots_of_unity, PhaseGrid, SymbolField};
use num_complex::Complex64 as C64;

/// Flux phase callback: (x, u, v) in configuration coordinates -> Gamma, applied as e^{-i Gamma}.
pub(crate) type FluxFn<'a> = &'a dyn Fn(&[f64], &[f64], &[f64]) -> f64;

/// Largest N accepted by the direct quadrature per configuration dimension.
pub fn direct_size_limit(n: usize) -> usize {
    match n {
        1 => 32,
        2 => 8,
        _ => 4,
    }
}

/// Per-node constant: pairing_weight^2 / 4^n.
///
/// Calibrated by the unit law 1 # f = f; it equals the normalized-measure prefactor
/// times the square of the fine-grid cell weight.
pub fn direct_prefactor(grid: &PhaseGrid) -> f64 {
    grid.pairing_weight().powi(2) / 4f64.powi(grid.n() as i32)
}

/// Row-major shape with a per-axis length.
fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

/// Spectral zero padding from N to 2N samples along every axis (symmetric Nyquist split).
pub(crate) fn upsample(values: &[C64], points: usize, axes: usize) -> Vec<C64> {
    let coarse = Plans::new(points);
    let fine = Plans::new(2 * points);
    let mut shape = vec![points; axes];
    let mut buf = values.to_vec();
    for a in 0..axes {
        let mut new_shape = shape.clone();
        new_shape[a] = 2 * points;
        let old_str = strides(&shape);
        let new_str = strides(&new_shape);
        let total_new: usize = new_shape.iter().product();
        let mut out = vec![C64::new(0.0, 0.0); total_new];
        let mut line = vec![C64::new(0.0, 0.0); points];
        let mut padded = vec![C64::new(0.0, 0.0); 2 * points];
        let others: usize = shape.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, l)| *l).product();
        for o in 0..others {
            // decode the multi-index of the remaining axes
            let mut rem = o;
            let mut base_old = 0;
            let mut base_new = 0;
            for b in (0..axes).rev() {
                if b == a {
                    continue;
                }
                let i = rem % shape[b];
                rem /= shape[b];
                base_old += i * old_str[b];
                base_new += i * new_str[b];
            }
            for (k, v) in line.iter_mut().enumerate() {
                *v = buf[base_old + k * old_str[a]];
            }
            fft::dft_line(&coarse, &mut line, Sign::Minus);
            padded.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            let h = points / 2;
            padded[..h].copy_from_slice(&line[..h]);
            padded[h + 1 + points..].copy_from_slice(&line[h + 1..]);
            padded[h] = line[h] * 0.5;
            padded[h + points] = line[h] * 0.5;
            fft::dft_line(&fine, &mut padded, Sign::Plus);
            let s = 1.0 / points as f64;
            for (k, v) in padded.iter().enumerate() {
                out[base_new + k * new_str[a]] = v * s;
            }
        }
        buf = out;
        shape = new_shape;
    }
    buf
}

/// The refined double sum, optionally twisted by a flux phase.
pub(crate) fn twisted_quadrature(f: &SymbolField, g: &SymbolField, flux: Option<FluxFn<'_>>) -> Result<SymbolField> {
    f.grid().check_same(g.grid())?;
    let grid = *f.grid();
    let n = grid.n();
    let pts = grid.points();
    if pts > direct_size_limit(n) {
        return Err(MoyalError::SizeGuard(format!(
            "direct quadrature limited to N <= {} at n = {n}",
            direct_size_limit(n)
        )));
    }
    let fine = 2 * pts;
    let axes = grid.axes();
    let fine_plans = Plans::new(fine);
    let mut ff = upsample(f.values(), pts, axes);
    let mut gg = upsample(g.values(), pts, axes);
    // hat f(p, v) = sum_eta e^{-i pi v.eta/N} f(p, eta); hat g(p, u) with the opposite sign
    for a in n..axes {
        fft::for_each_line(&mut ff, fine, axes, a, |l| fft::dft_line(&fine_plans, l, Sign::Minus));
        fft::for_each_line(&mut gg, fine, axes, a, |l| fft::dft_line(&fine_plans, l, Sign::Plus));
    }
    let cfg_fine = fine.pow(n as u32);
    let cfg = pts.pow(n as u32);
    let roots = roots_of_unity(pts);
    let c = direct_prefactor(&grid);
    let half_delta = grid.delta() / 2.0;

    let unravel = |mut i: usize, len: usize, out: &mut [usize]| {
        for a in (0..n).rev() {
            out[a] = i % len;
            i /= len;
        }
    };
    let centered = |i: usize| i as i64 - pts as i64; // fine displacement in [-N, N)

    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let mut xi_idx = vec![0usize; n];
    let mut x_idx = vec![0usize; n];
    let mut u_idx = vec![0usize; n];
    let mut v_idx = vec![0usize; n];
    let mut x_c = vec![0.0; n];
    let mut u_c = vec![0.0; n];
    let mut v_c = vec![0.0; n];
    // phase table over xi for each frequency difference (v - u) mod N
    let mut diff = vec![0i64; n];
    for xf in 0..cfg {
        unravel(xf, pts, &mut x_idx);
        for a in 0..n {
            x_c[a] = grid.coordinate(x_idx[a]);
        }
        for uf in 0..cfg_fine {
            unravel(uf, fine, &mut u_idx);
            // fine configuration position 2x + u, and displacement u centered
            let mut pos_u = 0;
            for a in 0..n {
                let du = centered(u_idx[a]);
                u_c[a] = du as f64 * half_delta;
                pos_u = pos_u * fine + (2 * x_idx[a] as i64 + du).rem_euclid(fine as i64) as usize;
            }
            for vf in 0..cfg_fine {
                unravel(vf, fine, &mut v_idx);
                let mut pos_v = 0;
                let mut v_bin = 0;
                let mut u_bin = 0;
                for a in 0..n {
                    let dv = centered(v_idx[a]);
                    let du = centered(u_idx[a]);
                    v_c[a] = dv as f64 * half_delta;
                    pos_v = pos_v * fine + (2 * x_idx[a] as i64 + dv).rem_euclid(fine as i64) as usize;
                    v_bin = v_bin * fine + dv.rem_euclid(fine as i64) as usize;
                    u_bin = u_bin * fine + du.rem_euclid(fine as i64) as usize;
                    diff[a] = dv - du;
                }
                let phase = match flux {
                    Some(fl) => C64::from_polar(1.0, -fl(&x_c, &u_c, &v_c)),
                    None => C64::new(1.0, 0.0),
                };
                let a_row = &ff[pos_u * cfg_fine..(pos_u + 1) * cfg_fine];
                let b_row = &gg[pos_v * cfg_fine..(pos_v + 1) * cfg_fine];
                let prod = phase * a_row[v_bin] * b_row[u_bin] * c;
                for xi in 0..cfg {
                    unravel(xi, pts, &mut xi_idx);
                    let mut m: i64 = 0;
                    for a in 0..n {
                        m += diff[a] * xi_idx[a] as i64;
                    }
                    out[xf * cfg + xi] += prod * roots[m.rem_euclid(pts as i64) as usize];
                }
            }
        }
    }
    Ok(SymbolField::from_raw(grid, out))
}

/// Direct-quadrature Weyl product (oracle).
pub fn weyl_compose_direct(f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
    twisted_quadrature(f, g, None)
}

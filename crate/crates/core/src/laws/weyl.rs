//! Kernel route for the Weyl calculus: symbol <-> kernel pair and the fast product.
//!
//! Per (x_j, xi_j) axis pair the kernel entry K(j, k) samples the symbol at the
//! midpoint (j + k)/2 taken along the shortest arc of the torus. Half-integer
//! midpoints come from trigonometric interpolation. Antipodal pairs (|j - k| = N/2)
//! have two midpoints and get a fixed conjugation-symmetric mix of both, which keeps
//! the map bijective.

use super::OperatorKernel;
use crate::error::Result;
use crate::fft::{self, Plans, Sign};
use crate::grid::{PhaseGrid, SymbolField};
use crate::linalg;
use num_complex::Complex64 as C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub(crate) struct PairTransform {
    points: usize,
    plans: Plans,
    half: Vec<C64>,
}

impl PairTransform {
    pub fn new(points: usize) -> Self {
        PairTransform { points, plans: Plans::new(points), half: fft::shift_twist(points, 0.5) }
    }

    /// Residue-indexed xi-transform of every row: out[t][r] = (-1)^r sum_m e^{2 pi i r m/N} rows[t][m].
    fn xi_transform(&self, rows: &mut [C64]) {
        let n = self.points;
        for row in rows.chunks_mut(n) {
            fft::dft_line(&self.plans, row, Sign::Plus);
            for (r, v) in row.iter_mut().enumerate() {
                if r % 2 == 1 {
                    *v = -*v;
                }
            }
        }
    }

    /// Doubled midpoint index u = 2s (mod 2N) and residue r of the kernel entry (j, k).
    fn lookup(&self, gi: &[C64], gh: &[C64], u: usize, r: usize) -> C64 {
        let n = self.points;
        if u % 2 == 0 {
            gi[(u / 2) * n + r]
        } else {
            gh[((u - 1) / 2) * n + r]
        }
    }

    /// N x N symbol slice [x][xi] to kernel slice [row][col], without the 1/(N delta) factor.
    pub fn to_kernel(&self, s: &[C64]) -> Vec<C64> {
        let n = self.points;
        let mut gi = s.to_vec();
        let mut gh = s.to_vec();
        fft::for_each_line(&mut gh, n, 2, 0, |col| fft::shift_line(&self.plans, col, &self.half));
        self.xi_transform(&mut gi);
        self.xi_transform(&mut gh);
        let two_n = 2 * n as i64;
        let mut k_out = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                let r = (j + n - k) % n;
                k_out[j * n + k] = if r == n / 2 {
                    let ua = (2 * j as i64 + (n / 2) as i64).rem_euclid(two_n) as usize;
                    let ub = (2 * j as i64 - (n / 2) as i64).rem_euclid(two_n) as usize;
                    let a = self.lookup(&gi, &gh, ua, r);
                    let b = self.lookup(&gi, &gh, ub, r);
                    ((C64::new(1.0, 0.0) + I) * a + (C64::new(1.0, 0.0) - I) * b) * 0.5
                } else {
                    let d = fft::signed_freq(r, n);
                    let u = (2 * j as i64 - d).rem_euclid(two_n) as usize;
                    self.lookup(&gi, &gh, u, r)
                };
            }
        }
        k_out
    }

    /// Exact inverse of [`PairTransform::to_kernel`].
    pub fn to_symbol(&self, k_in: &[C64]) -> Vec<C64> {
        let n = self.points;
        let two_n = 2 * n as i64;
        let mut gi = vec![C64::new(0.0, 0.0); n * n];
        let mut gh = vec![C64::new(0.0, 0.0); n * n];
        let mut store = |u: usize, r: usize, v: C64| {
            if u % 2 == 0 {
                gi[(u / 2) * n + r] = v;
            } else {
                gh[((u - 1) / 2) * n + r] = v;
            }
        };
        for j in 0..n {
            for k in 0..n {
                let r = (j + n - k) % n;
                if r == n / 2 {
                    continue;
                }
                let d = fft::signed_freq(r, n);
                let u = (2 * j as i64 - d).rem_euclid(two_n) as usize;
                store(u, r, k_in[j * n + k]);
            }
        }
        for j in 0..n / 2 {
            let p = k_in[j * n + (j + n / 2)];
            let q = k_in[(j + n / 2) * n + j];
            let a = (p + q - I * (p - q)) * 0.5;
            let b = (p + q + I * (p - q)) * 0.5;
            let ua = (2 * j as i64 + (n / 2) as i64).rem_euclid(two_n) as usize;
            let ub = (2 * j as i64 - (n / 2) as i64).rem_euclid(two_n) as usize;
            store(ua, n / 2, a);
            store(ub, n / 2, b);
        }
        // h[p][r]: DFT over the midpoint index, undoing the half-step twist on odd residues
        let mut h = vec![C64::new(0.0, 0.0); n * n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        for r in 0..n {
            let src = if r % 2 == 0 { &gi } else { &gh };
            for t in 0..n {
                col[t] = src[t * n + r];
            }
            fft::dft_line(&self.plans, &mut col, Sign::Minus);
            for p in 0..n {
                let v = if r % 2 == 1 { col[p] / self.half[p] } else { col[p] };
                h[p * n + r] = v;
            }
        }
        // fx[p][m] = (1/N) sum_r e^{-2 pi i r m/N} (-1)^r h[p][r]
        let inv_n = 1.0 / n as f64;
        for row in h.chunks_mut(n) {
            for (r, v) in row.iter_mut().enumerate() {
                if r % 2 == 1 {
                    *v = -*v;
                }
            }
            fft::dft_line(&self.plans, row, Sign::Minus);
            for v in row.iter_mut() {
                *v *= inv_n;
            }
        }
        fft::for_each_line(&mut h, n, 2, 0, |c| {
            fft::dft_line(&self.plans, c, Sign::Plus);
            for v in c.iter_mut() {
                *v *= inv_n;
            }
        });
        h
    }
}

/// Flat offsets of every N x N slice spanned by axes `a` and `b`.
fn slice_bases(grid: &PhaseGrid, a: usize, b: usize) -> Vec<usize> {
    (0..grid.len())
        .filter(|&flat| {
            let idx = grid.unravel(flat);
            idx[a] == 0 && idx[b] == 0
        })
        .collect()
}

fn apply_pairwise(grid: &PhaseGrid, values: &[C64], op: impl Fn(&[C64]) -> Vec<C64>) -> Vec<C64> {
    let n = grid.n();
    let pts = grid.points();
    let axes = grid.axes();
    let mut buf = values.to_vec();
    let mut slice = vec![C64::new(0.0, 0.0); pts * pts];
    for j in 0..n {
        let sa = pts.pow((axes - 1 - j) as u32);
        let sb = pts.pow((axes - 1 - (n + j)) as u32);
        for base in slice_bases(grid, j, n + j) {
            for p in 0..pts {
                for q in 0..pts {
                    slice[p * pts + q] = buf[base + p * sa + q * sb];
                }
            }
            let out = op(&slice);
            for p in 0..pts {
                for q in 0..pts {
                    buf[base + p * sa + q * sb] = out[p * pts + q];
                }
            }
        }
    }
    buf
}

/// Weyl kernel: K(x, y) = (2 pi)^{-n} delta^n sum_xi e^{i (x - y).xi} f((x + y)/2, xi).
pub fn weyl_op_kernel(f: &SymbolField) -> OperatorKernel {
    let grid = *f.grid();
    let pt = PairTransform::new(grid.points());
    let scale = (grid.points() as f64 * grid.delta()).powi(-(grid.n() as i32));
    let mut m = apply_pairwise(&grid, f.values(), |s| pt.to_kernel(s));
    for v in m.iter_mut() {
        *v *= scale;
    }
    OperatorKernel::from_raw(grid, m)
}

/// Exact inverse of [`weyl_op_kernel`].
pub fn kernel_to_symbol(k: &OperatorKernel) -> SymbolField {
    let grid = *k.grid();
    let pt = PairTransform::new(grid.points());
    let scale = (grid.points() as f64 * grid.delta()).powi(grid.n() as i32);
    let mut v = apply_pairwise(&grid, k.matrix(), |s| pt.to_symbol(s));
    for x in v.iter_mut() {
        *x *= scale;
    }
    SymbolField::from_raw(grid, v)
}

/// Operator product of two kernels on the configuration grid, weighted by delta^n.
pub fn kernel_product(a: &OperatorKernel, b: &OperatorKernel) -> Result<OperatorKernel> {
    a.grid().check_same(b.grid())?;
    let grid = *a.grid();
    let m = grid.config_len();
    let w = grid.delta().powi(grid.n() as i32);
    Ok(OperatorKernel::from_raw(grid, linalg::matmul(a.matrix(), b.matrix(), m, m, m, w)))
}

/// Normative fast Weyl product through the kernel route.
pub fn weyl_compose_fast(f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
    f.grid().check_same(g.grid())?;
    let k = kernel_product(&weyl_op_kernel(f), &weyl_op_kernel(g))?;
    Ok(kernel_to_symbol(&k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, plane_wave, rel_diff, PhasePoint};
    use crate::testkit::gaussian;

    fn sample(grid: &PhaseGrid) -> SymbolField {
        gaussian(grid, 0.4, &vec![0.3; grid.axes()], C64::new(1.0, 0.5))
            .add(&gaussian(grid, 0.6, &vec![-0.5; grid.axes()], C64::new(0.0, -0.7)))
            .unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        for (n, pts) in [(1, 4), (1, 6), (1, 8), (1, 16), (2, 4), (2, 6)] {
            let g = make_grid(n, pts).unwrap();
            let f = SymbolField::from_lattice_fn(&g, |k| {
                C64::new((k.iter().sum::<i64>() as f64 * 0.7).sin(), (k[0] * k[k.len() - 1]) as f64 * 0.13)
            });
            let back = kernel_to_symbol(&weyl_op_kernel(&f));
            assert!(rel_diff(&back, &f) < 1e-12, "n={n} N={pts}");
        }
    }

    #[test]
    fn unit_symbol_gives_identity_kernel() {
        let g = make_grid(1, 16).unwrap();
        let one = SymbolField::constant(&g, C64::new(1.0, 0.0));
        let k = weyl_op_kernel(&one);
        let m = g.config_len();
        let d = 1.0 / g.delta();
        for i in 0..m {
            for j in 0..m {
                let want = if i == j { d } else { 0.0 };
                assert!((k.matrix()[i * m + j] - C64::new(want, 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn kernel_matches_direct_sum_off_antipode() {
        let g = make_grid(1, 8).unwrap();
        let f = sample(&g);
        let k = weyl_op_kernel(&f);
        let pts = g.points();
        let half = crate::grid::midpoint_interpolate(&f, &[0]).unwrap();
        for j in 0..pts {
            for l in 0..pts {
                let r = (j + pts - l) % pts;
                if r == pts / 2 {
                    continue;
                }
                let d = crate::fft::signed_freq(r, pts);
                // midpoint index along the shortest arc
                let two_s = 2 * j as i64 - d;
                let src = if two_s % 2 == 0 { &f } else { &half };
                let s = (two_s.div_euclid(2)).rem_euclid(pts as i64) as usize;
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..pts {
                    let xi = g.coordinate(m);
                    acc += C64::from_polar(1.0, d as f64 * g.delta() * xi) * src.values()[s * pts + m];
                }
                acc *= g.delta() / (2.0 * std::f64::consts::PI);
                assert!((k.matrix()[j * pts + l] - acc).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_symbol_gives_adjoint_kernel() {
        for pts in [6, 8] {
            let g = make_grid(1, pts).unwrap();
            let f = sample(&g);
            let k = weyl_op_kernel(&f);
            let kc = weyl_op_kernel(&f.conj());
            let m = g.config_len();
            for i in 0..m {
                for j in 0..m {
                    assert!((kc.matrix()[i * m + j] - k.matrix()[j * m + i].conj()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn plane_waves_compose_with_weyl_cocycle() {
        let g = make_grid(1, 16).unwrap();
        for (a, b) in [([1i64, 2], [3i64, -1]), ([7, 5], [6, 4]), ([0, 8], [8, 0])] {
            let xa = PhasePoint::on_grid(&g, &a).unwrap();
            let xb = PhasePoint::on_grid(&g, &b).unwrap();
            let lhs = weyl_compose_fast(&plane_wave(&g, &xa).unwrap(), &plane_wave(&g, &xb).unwrap()).unwrap();
            let sig = crate::grid::symplectic_form(&xa, &xb).unwrap();
            let rhs = plane_wave(&g, &xa.add(&xb)).unwrap().scale(C64::from_polar(1.0, sig / 2.0));
            assert!(rel_diff(&lhs, &rhs) < 1e-11, "{a:?} {b:?}");
        }
    }
}

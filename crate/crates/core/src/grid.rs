//! Matched torus model of phase space: grid, fields, plane waves, translations and
//! the symplectic Fourier transform.

use crate::error::{MoyalError, Result};
use crate::fft::{self, Plans, Sign};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Largest configuration dimension accepted by [`PhaseGrid::new`].
pub const MAX_DIM: usize = 3;

/// Discrete torus with `2n` axes of `N` points each and step `delta = sqrt(2 pi / N)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    n: usize,
    points: usize,
    delta: f64,
}

impl PhaseGrid {
    pub fn new(n: usize, points: usize) -> Result<Self> {
        if n == 0 {
            return Err(MoyalError::InvalidGrid("n must be positive".into()));
        }
        if n > MAX_DIM {
            return Err(MoyalError::InvalidGrid(format!("n = {n} exceeds the memory guard {MAX_DIM}")));
        }
        if points % 2 == 1 {
            return Err(MoyalError::InvalidGrid(format!("N = {points} is odd")));
        }
        if points < 4 {
            return Err(MoyalError::InvalidGrid(format!("N = {points} is below 4")));
        }
        Ok(PhaseGrid { n, points, delta: (2.0 * PI / points as f64).sqrt() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    /// Number of phase-space points, `N^{2n}`.
    pub fn len(&self) -> usize {
        self.points.pow(2 * self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of configuration-space points, `N^n`.
    pub fn config_len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn volume_element(&self) -> f64 {
        self.delta.powi(2 * self.n as i32)
    }

    /// `(2 pi)^{-n} delta^{2n} = N^{-n}`.
    pub fn pairing_weight(&self) -> f64 {
        (self.points as f64).powi(-(self.n as i32))
    }

    /// Centered lattice coordinate of an axis index.
    pub fn lattice(&self, index: usize) -> i64 {
        index as i64 - (self.points / 2) as i64
    }

    /// Axis index of a lattice coordinate, wrapped onto the torus.
    pub fn wrap(&self, k: i64) -> usize {
        (k + (self.points / 2) as i64).rem_euclid(self.points as i64) as usize
    }

    pub fn coordinate(&self, index: usize) -> f64 {
        self.lattice(index) as f64 * self.delta
    }

    /// Per-axis indices of a flat phase-space index.
    pub fn unravel(&self, mut flat: usize) -> [usize; 2 * MAX_DIM] {
        let mut out = [0usize; 2 * MAX_DIM];
        for a in (0..self.axes()).rev() {
            out[a] = flat % self.points;
            flat /= self.points;
        }
        out
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Flat index of a point given by lattice coordinates (wrapped).
    pub fn ravel_lattice(&self, k: &[i64]) -> usize {
        k.iter().fold(0, |acc, &v| acc * self.points + self.wrap(v))
    }

    pub(crate) fn check_same(&self, other: &PhaseGrid) -> Result<()> {
        if self != other {
            return Err(MoyalError::GridMismatch(format!(
                "(n={}, N={}) vs (n={}, N={})",
                self.n, self.points, other.n, other.points
            )));
        }
        Ok(())
    }
}

/// Convenience constructor mirroring [`PhaseGrid::new`].
pub fn make_grid(n: usize, points: usize) -> Result<PhaseGrid> {
    PhaseGrid::new(n, points)
}

/// A phase-space point `(x, xi)`; lattice coordinates are kept when it lies on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    coords: Vec<f64>,
    lattice: Option<Vec<i64>>,
}

impl PhasePoint {
    pub fn on_grid(grid: &PhaseGrid, lattice: &[i64]) -> Result<Self> {
        if lattice.len() != grid.axes() {
            return Err(MoyalError::Dimension { expected: grid.axes(), got: lattice.len() });
        }
        Ok(PhasePoint {
            coords: lattice.iter().map(|&k| k as f64 * grid.delta()).collect(),
            lattice: Some(lattice.to_vec()),
        })
    }

    pub fn origin(grid: &PhaseGrid) -> Self {
        PhasePoint::on_grid(grid, &vec![0; grid.axes()]).expect("dimension matches")
    }

    pub fn off_grid(coords: Vec<f64>) -> Self {
        PhasePoint { coords, lattice: None }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Centered lattice coordinates, present for grid points.
    pub fn grid_index(&self) -> Option<&[i64]> {
        self.lattice.as_deref()
    }

    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn neg(&self) -> Self {
        PhasePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
            lattice: self.lattice.as_ref().map(|k| k.iter().map(|v| -v).collect()),
        }
    }

    pub fn add(&self, other: &PhasePoint) -> Self {
        let lattice = match (&self.lattice, &other.lattice) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(p, q)| p + q).collect()),
            _ => None,
        };
        PhasePoint { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(), lattice }
    }

    pub fn sub(&self, other: &PhasePoint) -> Self {
        self.add(&other.neg())
    }

    pub(crate) fn require_lattice(&self, grid: &PhaseGrid) -> Result<&[i64]> {
        let k = self.lattice.as_deref().ok_or(MoyalError::NonGridPoint)?;
        if k.len() != grid.axes() {
            return Err(MoyalError::Dimension { expected: grid.axes(), got: k.len() });
        }
        Ok(k)
    }
}

/// `sigma(X, Y) = y.xi - x.eta`.
pub fn symplectic_form(x: &PhasePoint, y: &PhasePoint) -> Result<f64> {
    if x.coords.len() != y.coords.len() || x.coords.len() % 2 == 1 {
        return Err(MoyalError::Dimension { expected: x.coords.len(), got: y.coords.len() });
    }
    let n = x.n();
    let (xp, xm) = x.coords.split_at(n);
    let (yp, ym) = y.coords.split_at(n);
    Ok((0..n).map(|j| yp[j] * xm[j] - xp[j] * ym[j]).sum())
}

/// Integer symplectic form on lattice coordinates: sigma = delta^2 * this.
pub(crate) fn sigma_lattice(x: &[i64], y: &[i64]) -> i64 {
    let n = x.len() / 2;
    (0..n).map(|j| y[j] * x[n + j] - x[j] * y[n + j]).sum()
}

/// Complex field on the phase-space grid, row-major over (x-axes, xi-axes).
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolField {
    grid: PhaseGrid,
    values: Vec<C64>,
}

impl SymbolField {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        SymbolField { grid: *grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn constant(grid: &PhaseGrid, c: C64) -> Self {
        SymbolField { grid: *grid, values: vec![c; grid.len()] }
    }

    pub fn from_values(grid: &PhaseGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(MoyalError::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(MoyalError::Format("non-finite field value".into()));
        }
        Ok(SymbolField { grid: *grid, values })
    }

    /// Sample `f` at the coordinates of every grid point.
    pub fn from_fn(grid: &PhaseGrid, f: impl Fn(&[f64]) -> C64) -> Self {
        let mut coords = vec![0.0; grid.axes()];
        let values = (0..grid.len())
            .map(|flat| {
                let idx = grid.unravel(flat);
                for (a, c) in coords.iter_mut().enumerate() {
                    *c = grid.coordinate(idx[a]);
                }
                f(&coords)
            })
            .collect();
        SymbolField { grid: *grid, values }
    }

    /// Evaluate `f` on the centered lattice coordinates of every grid point.
    pub fn from_lattice_fn(grid: &PhaseGrid, f: impl Fn(&[i64]) -> C64) -> Self {
        let mut k = vec![0i64; grid.axes()];
        let values = (0..grid.len())
            .map(|flat| {
                let idx = grid.unravel(flat);
                for (a, c) in k.iter_mut().enumerate() {
                    *c = grid.lattice(idx[a]);
                }
                f(&k)
            })
            .collect();
        SymbolField { grid: *grid, values }
    }

    pub(crate) fn from_raw(grid: PhaseGrid, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        SymbolField { grid, values }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, lattice: &[i64]) -> C64 {
        self.values[self.grid.ravel_lattice(lattice)]
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        SymbolField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &SymbolField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymbolField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &SymbolField) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn zip(&self, other: &SymbolField, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(SymbolField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn sum(&self) -> C64 {
        self.values.iter().sum()
    }

    /// Integral under the normalized measure, `pairing_weight * sum`.
    pub fn integral(&self) -> C64 {
        self.sum() * self.grid.pairing_weight()
    }

    /// Hermitian L2 norm under the normalized measure.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.pairing_weight()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Relative L2 distance `|a - b| / |b|`, falling back to `|a - b|` when `b` vanishes.
pub fn rel_diff(a: &SymbolField, b: &SymbolField) -> f64 {
    rel_diff_slices(a.values(), b.values())
}

pub(crate) fn rel_diff_slices(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// Bilinear pairing `<f, g> = pairing_weight * sum f g`.
pub fn pair(f: &SymbolField, g: &SymbolField) -> Result<C64> {
    f.grid.check_same(&g.grid)?;
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<C64>() * f.grid.pairing_weight())
}

/// Sesquilinear pairing, conjugate-linear in the first slot.
pub fn hermitian_pair(f: &SymbolField, g: &SymbolField) -> Result<C64> {
    f.grid.check_same(&g.grid)?;
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum::<C64>() * f.grid.pairing_weight())
}

/// Table of `exp(2 pi i m / N)` for `m` in `0..N`.
pub(crate) fn roots_of_unity(points: usize) -> Vec<C64> {
    (0..points).map(|m| C64::from_polar(1.0, 2.0 * PI * m as f64 / points as f64)).collect()
}

/// `Z -> exp(i sigma(X, Z))`, evaluated with integer arithmetic so it is exactly periodic.
pub fn plane_wave(grid: &PhaseGrid, x: &PhasePoint) -> Result<SymbolField> {
    let k = x.require_lattice(grid)?.to_vec();
    Ok(plane_wave_lattice(grid, &k))
}

pub(crate) fn plane_wave_lattice(grid: &PhaseGrid, k: &[i64]) -> SymbolField {
    let roots = roots_of_unity(grid.points());
    let m = grid.points() as i64;
    SymbolField::from_lattice_fn(grid, |z| roots[sigma_lattice(k, z).rem_euclid(m) as usize])
}

/// Discrete Dirac mass `[. = X] / pairing_weight`.
pub fn delta_field(grid: &PhaseGrid, x: &PhasePoint) -> Result<SymbolField> {
    let k = x.require_lattice(grid)?;
    let mut f = SymbolField::zeros(grid);
    f.values[grid.ravel_lattice(k)] = C64::new(1.0 / grid.pairing_weight(), 0.0);
    Ok(f)
}

/// `(T_Z f)(X) = f(X - Z)` with modular index shifts.
pub fn translate(f: &SymbolField, z: &PhasePoint) -> Result<SymbolField> {
    let k = z.require_lattice(&f.grid)?;
    Ok(translate_lattice(f, k))
}

pub(crate) fn translate_lattice(f: &SymbolField, k: &[i64]) -> SymbolField {
    let grid = f.grid;
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let mut src = [0usize; 2 * MAX_DIM];
    for (flat, o) in out.iter_mut().enumerate() {
        let idx = grid.unravel(flat);
        for a in 0..grid.axes() {
            src[a] = (idx[a] as i64 - k[a]).rem_euclid(grid.points() as i64) as usize;
        }
        *o = f.values[grid.ravel(&src[..grid.axes()])];
    }
    SymbolField { grid, values: out }
}

/// Reflection `f(-X)` on the torus.
pub fn reflect(f: &SymbolField) -> SymbolField {
    let grid = f.grid;
    let n = grid.points();
    let mut src = [0usize; 2 * MAX_DIM];
    let values = (0..grid.len())
        .map(|flat| {
            let idx = grid.unravel(flat);
            for a in 0..grid.axes() {
                src[a] = (n - idx[a]) % n;
            }
            f.values[grid.ravel(&src[..grid.axes()])]
        })
        .collect();
    SymbolField { grid, values }
}

/// Swap the first `half` axes with the last `half` axes of an array with `2 half` axes.
pub(crate) fn swap_halves(values: &[C64], points: usize, half: usize) -> Vec<C64> {
    let block = points.pow(half as u32);
    let mut out = vec![C64::new(0.0, 0.0); values.len()];
    for a in 0..block {
        for b in 0..block {
            out[b * block + a] = values[a * block + b];
        }
    }
    out
}

/// `(F f)(Y) = pairing_weight * sum_Z exp(-i sigma(Y, Z)) f(Z)`.
pub fn symplectic_fourier(f: &SymbolField) -> SymbolField {
    let grid = f.grid;
    let plans = Plans::new(grid.points());
    let mut buf = f.values.clone();
    symplectic_fourier_in_place(&mut buf, &grid, &plans);
    SymbolField { grid, values: buf }
}

pub(crate) fn symplectic_fourier_in_place(buf: &mut Vec<C64>, grid: &PhaseGrid, plans: &Plans) {
    let n = grid.n();
    let axes = grid.axes();
    for a in 0..axes {
        // x-axes carry e^{-i z.eta}, xi-axes carry e^{+i y.zeta}
        let sign = if a < n { Sign::Minus } else { Sign::Plus };
        fft::for_each_line(buf, grid.points(), axes, a, |line| fft::centered_dft_line(plans, line, sign));
    }
    let w = grid.pairing_weight();
    let mut swapped = swap_halves(buf, grid.points(), n);
    for v in swapped.iter_mut() {
        *v *= w;
    }
    *buf = swapped;
}

/// Trigonometric interpolation of `f` at points moved by `shifts[a]` samples along axis `a`.
///
/// The result at index `i` holds the interpolant at lattice coordinate `i - N/2 + shifts[a]`.
pub fn shift_interpolate(f: &SymbolField, shifts: &[f64]) -> Result<SymbolField> {
    let grid = f.grid;
    if shifts.len() != grid.axes() {
        return Err(MoyalError::Dimension { expected: grid.axes(), got: shifts.len() });
    }
    let plans = Plans::new(grid.points());
    let mut buf = f.values.clone();
    for (a, &t) in shifts.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let twist = fft::shift_twist(grid.points(), t);
        fft::for_each_line(&mut buf, grid.points(), grid.axes(), a, |line| fft::shift_line(&plans, line, &twist));
    }
    Ok(SymbolField { grid, values: buf })
}

/// Values at points offset by `delta / 2` along the selected x-axes.
pub fn midpoint_interpolate(f: &SymbolField, x_axes: &[usize]) -> Result<SymbolField> {
    let grid = f.grid;
    let mut shifts = vec![0.0; grid.axes()];
    for &a in x_axes {
        if a >= grid.n() {
            return Err(MoyalError::Invalid(format!("axis {a} is not a configuration axis")));
        }
        shifts[a] = 0.5;
    }
    shift_interpolate(f, &shifts)
}

/// `F(F f)` against `f`.
pub fn check_fourier_involution(f: &SymbolField) -> f64 {
    rel_diff(&symplectic_fourier(&symplectic_fourier(f)), f)
}

/// `<Ff, Fg>` against `<f, g>` (hermitian).
pub fn check_fourier_unitarity(f: &SymbolField, g: &SymbolField) -> Result<f64> {
    let a = hermitian_pair(&symplectic_fourier(f), &symplectic_fourier(g))?;
    let b = hermitian_pair(f, g)?;
    Ok((a - b).norm() / (b.norm() + 1e-300))
}

/// Grids up to this many points use plain plane-wave sums in [`check_resolution_identity`].
const DIRECT_RESOLUTION_LIMIT: usize = 4096;

/// `w sum_Z pair(f, e_{-Z}) pair(e_Z, g)` against `pair(f, g)`.
///
/// Small grids sum the plane waves directly; larger ones use `pair(f, e_{-Z}) = (Ff)(Z)`
/// and `pair(e_Z, g) = (Fg)(-Z)`.
pub fn check_resolution_identity(f: &SymbolField, g: &SymbolField) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    let grid = f.grid;
    let w = grid.pairing_weight();
    let lhs = if grid.len() <= DIRECT_RESOLUTION_LIMIT {
        let roots = roots_of_unity(grid.points());
        let m = grid.points() as i64;
        let axes = grid.axes();
        let lat: Vec<Vec<i64>> = (0..grid.len())
            .map(|flat| {
                let idx = grid.unravel(flat);
                (0..axes).map(|a| grid.lattice(idx[a])).collect()
            })
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for z in &lat {
            let mut a = C64::new(0.0, 0.0);
            let mut b = C64::new(0.0, 0.0);
            for (x, (fv, gv)) in lat.iter().zip(f.values.iter().zip(&g.values)) {
                let s = sigma_lattice(z, x).rem_euclid(m) as usize;
                // e_{-Z}(X) = conj(e_Z(X))
                a += fv * roots[s].conj();
                b += gv * roots[s];
            }
            total += a * b * w * w;
        }
        total * w
    } else {
        pair(&symplectic_fourier(f), &reflect(&symplectic_fourier(g)))?
    };
    let rhs = pair(f, g)?;
    Ok((lhs - rhs).norm() / (rhs.norm() + 1e-300))
}

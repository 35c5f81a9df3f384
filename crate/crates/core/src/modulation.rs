//! Modulation mappings N, M, R, window localization and the induced mixed norms.
//!
//! Every map here is built from one product per grid point, `probe(X) # f`, followed by
//! a Gram-type matrix product. The Weyl law additionally has a closed form for the
//! localized map which replaces the products by shifted correlations.

use crate::doubled::{box_compose, diamond_compose, diamond_involution, double_pair, DoubleField, GroupTables, TensorSum};
use crate::error::{MoyalError, Result};
use crate::fft::{self, Plans, Sign};
use crate::grid::{
    self, hermitian_pair, plane_wave_lattice, roots_of_unity, shift_interpolate, sigma_lattice, symplectic_fourier,
    translate_lattice, PhaseGrid, SymbolField, MAX_DIM,
};
use crate::laws::{direct_size_limit, CompositionLaw, WeylDirect, WeylFast, EPS};
use crate::linalg::matmul;
use crate::par;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Largest number of grid points for which the doubled maps are materialized.
pub const MAX_SIDE: usize = 1296;

/// Promotion threshold for idempotent windows.
pub const IDEMPOTENCY_LIMIT: f64 = 1e-5;

/// A nonzero localizing symbol with its measured defects.
#[derive(Clone, Debug)]
pub struct Window {
    pub h: SymbolField,
    /// `hermitian_pair(h, h)^{1/2}`
    pub norm2: f64,
    /// `max |Im h| / max |h|`
    pub realness_defect: f64,
    /// Relative L2 defect of `h # h - h` under the law used at construction.
    pub idempotency_defect: f64,
}

impl Window {
    pub fn new(law: &dyn CompositionLaw, h: SymbolField) -> Result<Self> {
        let norm2 = hermitian_pair(&h, &h)?.re.max(0.0).sqrt();
        if norm2 == 0.0 {
            return Err(MoyalError::Window("window must be nonzero".into()));
        }
        let max = h.max_abs();
        let realness_defect = h.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max) / max;
        let idempotency_defect = grid::rel_diff(&law.compose(&h, &h)?, &h);
        Ok(Window { h, norm2, realness_defect, idempotency_defect })
    }

    pub fn grid(&self) -> &PhaseGrid {
        self.h.grid()
    }
}

/// `exp(-a |X|^2)` centered at the origin.
pub fn gaussian_window(law: &dyn CompositionLaw, grid: &PhaseGrid, a: f64) -> Result<Window> {
    Window::new(law, crate::testkit::gaussian(grid, a, &vec![0.0; grid.axes()], C64::new(1.0, 0.0)))
}

/// `2^n exp(-|X|^2)`, whose Weyl square is itself.
///
/// The idempotency defect is measured with the direct quadrature when the grid allows it.
pub fn idempotent_window(grid: &PhaseGrid) -> Result<Window> {
    let amp = 2f64.powi(grid.n() as i32);
    let h = crate::testkit::gaussian(grid, 1.0, &vec![0.0; grid.axes()], C64::new(amp, 0.0));
    let w = if grid.points() <= direct_size_limit(grid.n()) {
        Window::new(&WeylDirect, h)?
    } else {
        Window::new(&WeylFast, h)?
    };
    if w.idempotency_defect > IDEMPOTENCY_LIMIT {
        return Err(MoyalError::IdempotencyFailure { defect: w.idempotency_defect });
    }
    Ok(w)
}

/// Mixed-norm exponent in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(MoyalError::Invalid(format!("exponent {p} is below 1")));
        }
        if p.is_infinite() {
            return Ok(Exponent::Infinity);
        }
        Ok(Exponent::Finite(p))
    }
}

impl FromStr for Exponent {
    type Err = MoyalError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "INF" => Ok(Exponent::Infinity),
            t => {
                let p: f64 = t.parse().map_err(|_| MoyalError::Invalid(format!("bad exponent '{t}'")))?;
                Exponent::finite(p)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModNormSpec {
    pub p: Exponent,
    pub q: Exponent,
    pub window: Window,
}

fn guard(grid: &PhaseGrid) -> Result<()> {
    if grid.len() > MAX_SIDE {
        return Err(MoyalError::SizeGuard(format!(
            "doubled maps limited to N^(2n) <= {MAX_SIDE}, got {}",
            grid.len()
        )));
    }
    Ok(())
}

fn lattice_of(grid: &PhaseGrid, flat: usize) -> [i64; 2 * MAX_DIM] {
    let idx = grid.unravel(flat);
    let mut k = [0i64; 2 * MAX_DIM];
    for a in 0..grid.axes() {
        k[a] = grid.lattice(idx[a]);
    }
    k
}

fn neg_lattice(k: &[i64]) -> Vec<i64> {
    k.iter().map(|v| -v).collect()
}

/// Row-major matrix whose row `X` is `probe(X) # f`.
fn probe_products(
    law: &dyn CompositionLaw,
    f: &SymbolField,
    probe: impl Fn(&[i64]) -> SymbolField + Sync,
) -> Result<Vec<C64>> {
    let grid = *f.grid();
    let rows = par::try_map_indexed(grid.len(), |x| {
        let k = lattice_of(&grid, x);
        law.compose(&probe(&k[..grid.axes()]), f).map(SymbolField::into_values)
    })?;
    Ok(rows.concat())
}

/// `w * A B^T` for square row-major matrices of side `s`.
fn gram(a: &[C64], b: &[C64], s: usize, w: f64) -> Vec<C64> {
    let mut bt = vec![C64::new(0.0, 0.0); s * s];
    for i in 0..s {
        for j in 0..s {
            bt[j * s + i] = b[i * s + j];
        }
    }
    matmul(a, &bt, s, s, s, w)
}

fn prepare(f: &SymbolField, g: &SymbolField) -> Result<PhaseGrid> {
    f.grid().check_same(g.grid())?;
    guard(f.grid())?;
    Ok(*f.grid())
}

/// `(X, Y) -> pair(e_X # f, e_Y # g)`.
pub fn map_n(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<DoubleField> {
    let grid = prepare(f, g)?;
    let p = probe_products(law, f, |k| plane_wave_lattice(&grid, k))?;
    let q = probe_products(law, g, |k| plane_wave_lattice(&grid, k))?;
    Ok(DoubleField::from_raw(grid, gram(&p, &q, grid.len(), grid.pairing_weight())))
}

/// `(X, Y) -> pair(e_{-X} # f, e_{X-Y} # g)`, evaluated from its own products.
pub fn map_m(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<DoubleField> {
    let grid = prepare(f, g)?;
    let a = probe_products(law, f, |k| plane_wave_lattice(&grid, &neg_lattice(k)))?;
    let b = probe_products(law, g, |k| plane_wave_lattice(&grid, k))?;
    let s = grid.len();
    // mm[X, A] = pair(e_{-X} # f, e_A # g), then A = X - Y
    let mm = gram(&a, &b, s, grid.pairing_weight());
    let t = GroupTables::new(&grid);
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for x in 0..s {
        for y in 0..s {
            out[x * s + y] = mm[x * s + t.sub(x, y)];
        }
    }
    Ok(DoubleField::from_raw(grid, out))
}

/// `M` extended linearly to a finite sum of tensors.
pub fn map_m_sum(law: &dyn CompositionLaw, t: &TensorSum) -> Result<DoubleField> {
    let mut terms = t.terms.iter();
    let (f, g) = terms.next().ok_or_else(|| MoyalError::Invalid("empty tensor sum".into()))?;
    let mut acc = map_m(law, f, g)?;
    for (f, g) in terms {
        acc = acc.add(&map_m(law, f, g)?)?;
    }
    Ok(acc)
}

/// `R` through the Fourier route: `((F (x) F) N)(-X, -Y)`.
///
/// The plane-wave expansion `delta_X = w sum_Z exp(-i sigma(-X, Z)) e_Z` puts the
/// reflection on both slots.
pub fn map_r(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<DoubleField> {
    let n = map_n(law, f, g)?;
    Ok(crate::doubled::reflect_both(&n.map_both_slots(symplectic_fourier)))
}

/// `R` through discrete Dirac masses: `(X, Y) -> pair(delta_X # f, delta_Y # g)`.
pub fn map_r_delta(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<DoubleField> {
    let grid = prepare(f, g)?;
    let delta = |k: &[i64]| {
        let mut v = vec![C64::new(0.0, 0.0); grid.len()];
        v[grid.ravel_lattice(k)] = C64::new(1.0 / grid.pairing_weight(), 0.0);
        SymbolField::from_raw(grid, v)
    };
    let p = probe_products(law, f, delta)?;
    let q = probe_products(law, g, delta)?;
    Ok(DoubleField::from_raw(grid, gram(&p, &q, grid.len(), grid.pairing_weight())))
}

/// `M_h(f) = M(f (x) h)`; the Weyl laws use the closed form.
pub fn mod_map(law: &dyn CompositionLaw, f: &SymbolField, window: &Window) -> Result<DoubleField> {
    if law.weyl_closed_form() {
        mod_map_closed_form(f, &window.h)
    } else {
        map_m(law, f, &window.h)
    }
}

/// `M_h(f)` straight from the definition, for any law.
pub fn mod_map_generic(law: &dyn CompositionLaw, f: &SymbolField, window: &Window) -> Result<DoubleField> {
    map_m(law, f, &window.h)
}

/// `sum_Z a(Z) b(Z + X)` for every grid point `X`, by FFT.
fn correlate(grid: &PhaseGrid, plans: &Plans, a: &[C64], b: &[C64]) -> Vec<C64> {
    let pts = grid.points();
    let axes = grid.axes();
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    for ax in 0..axes {
        fft::for_each_line(&mut fa, pts, axes, ax, |l| fft::dft_line(plans, l, Sign::Plus));
        fft::for_each_line(&mut fb, pts, axes, ax, |l| fft::dft_line(plans, l, Sign::Minus));
    }
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    for ax in 0..axes {
        fft::for_each_line(&mut fa, pts, axes, ax, |l| fft::dft_line(plans, l, Sign::Plus));
    }
    // fa[raw shift] -> value at lattice X
    let scale = 1.0 / grid.len() as f64;
    let mut raw = [0usize; 2 * MAX_DIM];
    (0..grid.len())
        .map(|x| {
            let k = lattice_of(grid, x);
            for a in 0..axes {
                raw[a] = k[a].rem_euclid(pts as i64) as usize;
            }
            fa[grid.ravel(&raw[..axes])] * scale
        })
        .collect()
}

/// Columns `Y -> [X -> phase(X, Y) w sum_Z e_{-Y}(Z) a(Z) f(Z + X - Y/2)]`.
fn half_shift_transform(
    f: &SymbolField,
    a: &SymbolField,
    phase: impl Fn(&[i64], &[i64]) -> C64 + Sync,
) -> Result<DoubleField> {
    let grid = prepare(f, a)?;
    let axes = grid.axes();
    let plans = Plans::new(grid.points());
    let w = grid.pairing_weight();
    let cols = par::try_map_indexed(grid.len(), |y| -> Result<Vec<C64>> {
        let ky = lattice_of(&grid, y);
        let ky = &ky[..axes];
        let shifts: Vec<f64> = ky.iter().map(|&v| -(v as f64) / 2.0).collect();
        let fy = shift_interpolate(f, &shifts)?;
        let ay = plane_wave_lattice(&grid, &neg_lattice(ky)).mul(a)?;
        let c = correlate(&grid, &plans, ay.values(), fy.values());
        Ok(c.into_iter()
            .enumerate()
            .map(|(x, v)| {
                let kx = lattice_of(&grid, x);
                phase(&kx[..axes], ky) * v * w
            })
            .collect())
    })?;
    let s = grid.len();
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for (y, col) in cols.iter().enumerate() {
        for (x, v) in col.iter().enumerate() {
            out[x * s + y] = *v;
        }
    }
    Ok(DoubleField::from_raw(grid, out))
}

/// Weyl closed form `M_h(f)(X, Y) = e^{(i/2) sigma(X, Y)} w sum_Z e^{-i sigma(Y, Z)} h(Z) f(Z + X - Y/2)`.
///
/// Half-integer shifts use trigonometric interpolation; the half phase is taken on
/// centered lattice representatives.
pub fn mod_map_closed_form(f: &SymbolField, h: &SymbolField) -> Result<DoubleField> {
    let pts = f.grid().points() as f64;
    half_shift_transform(f, h, |kx, ky| C64::from_polar(1.0, PI * sigma_lattice(kx, ky) as f64 / pts))
}

/// Short-time Fourier transform `e^{i sigma(X, Y)} w sum_Z e^{-i sigma(Y, Z)} conj(h(Z)) f(Z + X)`.
pub fn stft(f: &SymbolField, h: &SymbolField) -> Result<DoubleField> {
    let grid = prepare(f, h)?;
    let axes = grid.axes();
    let roots = roots_of_unity(grid.points());
    let m = grid.points() as i64;
    let hc = h.conj();
    let rows = par::try_map_indexed(grid.len(), |x| -> Result<Vec<C64>> {
        let kx = lattice_of(&grid, x);
        let kx = &kx[..axes];
        let b = hc.mul(&translate_lattice(f, &neg_lattice(kx)))?;
        let fb = symplectic_fourier(&b);
        Ok(fb
            .values()
            .iter()
            .enumerate()
            .map(|(y, v)| {
                let ky = lattice_of(&grid, y);
                roots[sigma_lattice(kx, &ky[..axes]).rem_euclid(m) as usize] * v
            })
            .collect())
    })?;
    Ok(DoubleField::from_raw(grid, rows.concat()))
}

/// `V(X - Y/2, Y)`: the STFT on the coordinates of the localized map.
pub fn stft_remapped(f: &SymbolField, h: &SymbolField) -> Result<DoubleField> {
    let roots = roots_of_unity(f.grid().points());
    let m = f.grid().points() as i64;
    half_shift_transform(f, &h.conj(), |kx, ky| roots[sigma_lattice(kx, ky).rem_euclid(m) as usize])
}

/// `M~_h(G) = w^2 sum_{X,Y} G(X, Y) e_X # h # e_{Y-X}`; the Weyl laws use the
/// transpose of the closed form, which keeps the pair exact mutual inverses.
pub fn mod_adjoint(law: &dyn CompositionLaw, g: &DoubleField, window: &Window) -> Result<SymbolField> {
    if law.weyl_closed_form() {
        mod_adjoint_closed_form(g, &window.h)
    } else {
        mod_adjoint_generic(law, g, window)
    }
}

/// Definition of the adjoint map, for any law.
///
/// Summing over `Y` first gives `e_{-X} F(G(X, .)) / w`, so each `X` costs one transform
/// and two products.
pub fn mod_adjoint_generic(law: &dyn CompositionLaw, g: &DoubleField, window: &Window) -> Result<SymbolField> {
    let grid = *g.grid();
    grid.check_same(window.grid())?;
    guard(&grid)?;
    let axes = grid.axes();
    let h = &window.h;
    let parts = par::try_map_indexed(grid.len(), |x| -> Result<Option<Vec<C64>>> {
        let row = g.row(x);
        if row.iter().all(|v| *v == C64::new(0.0, 0.0)) {
            return Ok(None);
        }
        let kx = lattice_of(&grid, x);
        let kx = &kx[..axes];
        let fg = symplectic_fourier(&SymbolField::from_raw(grid, row.to_vec()));
        let right = plane_wave_lattice(&grid, &neg_lattice(kx)).mul(&fg)?;
        let left = law.compose(&plane_wave_lattice(&grid, kx), h)?;
        Ok(Some(law.compose(&left, &right)?.into_values()))
    })?;
    Ok(finish_sum(grid, parts.into_iter().flatten(), grid.pairing_weight()))
}

fn finish_sum(grid: PhaseGrid, parts: impl Iterator<Item = Vec<C64>>, scale: f64) -> SymbolField {
    let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
    for p in parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    SymbolField::from_raw(grid, acc.into_iter().map(|v| v * scale).collect())
}

/// Adjoint through the closed form.
///
/// `pair(M~_h G, g) = w^2 sum G(X, Y) C_h(g)(X - Y, -Y)` where `C_h` is
/// [`mod_map_closed_form`]; each column of `C_h` is a shift followed by a correlation, so
/// the transpose is a convolution followed by the transposed shift.
pub fn mod_adjoint_closed_form(g: &DoubleField, h: &SymbolField) -> Result<SymbolField> {
    let grid = *g.grid();
    grid.check_same(h.grid())?;
    guard(&grid)?;
    let axes = grid.axes();
    let pts = grid.points();
    let plans = Plans::new(pts);
    let t = GroupTables::new(&grid);
    let s = grid.len();
    let parts = par::try_map_indexed(s, |yp| -> Result<Option<Vec<C64>>> {
        let ky = lattice_of(&grid, yp);
        let ky = &ky[..axes];
        // H(X') = G(X' - Y', -Y') phase(X', Y'), placed at the raw shift of X'
        let mut hh = vec![C64::new(0.0, 0.0); s];
        let mut raw = [0usize; 2 * MAX_DIM];
        let col = t.neg(yp);
        let mut any = false;
        for xp in 0..s {
            let v = g.at(t.sub(xp, yp), col);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            any = true;
            let kx = lattice_of(&grid, xp);
            for a in 0..axes {
                raw[a] = kx[a].rem_euclid(pts as i64) as usize;
            }
            let ph = C64::from_polar(1.0, PI * sigma_lattice(&kx[..axes], ky) as f64 / pts as f64);
            hh[grid.ravel(&raw[..axes])] = v * ph;
        }
        if !any {
            return Ok(None);
        }
        let a = plane_wave_lattice(&grid, &neg_lattice(ky)).mul(h)?;
        let mut conv = convolve(&grid, &plans, &hh, a.values());
        for (ax, &k) in ky.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let twist = fft::shift_twist(pts, -(k as f64) / 2.0);
            fft::for_each_line(&mut conv, pts, axes, ax, |l| fft::shift_line_transposed(&plans, l, &twist));
        }
        Ok(Some(conv))
    })?;
    let w = grid.pairing_weight();
    Ok(finish_sum(grid, parts.into_iter().flatten(), w * w))
}

/// Circular convolution `sum_r a[r] b[i - r]` over all axes.
fn convolve(grid: &PhaseGrid, plans: &Plans, a: &[C64], b: &[C64]) -> Vec<C64> {
    let pts = grid.points();
    let axes = grid.axes();
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    for ax in 0..axes {
        fft::for_each_line(&mut fa, pts, axes, ax, |l| fft::dft_line(plans, l, Sign::Minus));
        fft::for_each_line(&mut fb, pts, axes, ax, |l| fft::dft_line(plans, l, Sign::Minus));
    }
    let scale = 1.0 / grid.len() as f64;
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y * scale;
    }
    for ax in 0..axes {
        fft::for_each_line(&mut fa, pts, axes, ax, |l| fft::dft_line(plans, l, Sign::Plus));
    }
    fa
}

/// `M_h(M~_k(G))`.
pub fn cross_window_operator(
    law: &dyn CompositionLaw,
    g: &DoubleField,
    h: &Window,
    k: &Window,
) -> Result<DoubleField> {
    mod_map(law, &mod_adjoint(law, g, k)?, h)
}

fn power_sum(vals: impl Iterator<Item = f64>, p: Exponent, w: f64) -> f64 {
    match p {
        Exponent::Infinity => vals.fold(0.0, f64::max),
        Exponent::Finite(p) => (w * vals.map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p),
    }
}

/// `( w sum_Y ( w sum_X |F(X, Y)|^p )^{q/p} )^{1/q}` with max for infinite exponents.
pub fn lpq_norm(f: &DoubleField, p: Exponent, q: Exponent) -> f64 {
    let s = f.side();
    let w = f.grid().pairing_weight();
    let inner: Vec<f64> = (0..s).map(|y| power_sum((0..s).map(|x| f.at(x, y).norm()), p, w)).collect();
    power_sum(inner.into_iter(), q, w)
}

pub fn modulation_norm(law: &dyn CompositionLaw, f: &SymbolField, spec: &ModNormSpec) -> Result<f64> {
    Ok(lpq_norm(&mod_map(law, f, &spec.window)?, spec.p, spec.q))
}

/// Relative distance between `<<N(f (x) g), g1 (x) g2>>` and `pair(F g1 # f, F g2 # g)`.
pub fn check_n_definition(
    law: &dyn CompositionLaw,
    f: &SymbolField,
    g: &SymbolField,
    g1: &SymbolField,
    g2: &SymbolField,
) -> Result<f64> {
    let lhs = double_pair(&map_n(law, f, g)?, &DoubleField::tensor(g1, g2)?)?;
    let rhs = grid::pair(
        &law.compose(&symplectic_fourier(g1), f)?,
        &law.compose(&symplectic_fourier(g2), g)?,
    )?;
    Ok((lhs - rhs).norm() / (rhs.norm() + EPS))
}

/// Relative distance between `<<R(f1 (x) f2), g1 (x) g2>>` and `pair(g1 # f1, g2 # f2)`.
pub fn check_r_definition(
    law: &dyn CompositionLaw,
    f1: &SymbolField,
    f2: &SymbolField,
    g1: &SymbolField,
    g2: &SymbolField,
) -> Result<f64> {
    let lhs = double_pair(&map_r(law, f1, f2)?, &DoubleField::tensor(g1, g2)?)?;
    let rhs = grid::pair(&law.compose(g1, f1)?, &law.compose(g2, f2)?)?;
    Ok((lhs - rhs).norm() / (rhs.norm() + EPS))
}

/// `M` against the change of variables applied to `N`.
pub fn check_m_relation(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<f64> {
    let m = map_m(law, f, g)?;
    let cn = crate::doubled::change_vars_c(&map_n(law, f, g)?);
    Ok(crate::doubled::rel_diff2(&m, &cn))
}

/// Fourier route of `R` against the Dirac-mass route.
pub fn check_r_relation(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<f64> {
    Ok(crate::doubled::rel_diff2(&map_r(law, f, g)?, &map_r_delta(law, f, g)?))
}

/// `M(T1 box T2)` against `M(T1) <> M(T2)` for elementary tensors.
pub fn check_morphism(
    law: &dyn CompositionLaw,
    f1: &SymbolField,
    f2: &SymbolField,
    g1: &SymbolField,
    g2: &SymbolField,
) -> Result<f64> {
    let lhs = diamond_compose(&map_m(law, f1, f2)?, &map_m(law, g1, g2)?)?;
    let t = box_compose(
        law,
        &TensorSum::elementary(f1.clone(), f2.clone()),
        &TensorSum::elementary(g1.clone(), g2.clone()),
    )?;
    let rhs = map_m_sum(law, &t)?;
    if lhs.norm() == 0.0 && rhs.norm() == 0.0 {
        return Ok(0.0);
    }
    Ok(crate::doubled::rel_diff2(&lhs, &rhs))
}

/// `M(conj f1 (x) conj f2)` against `M(f1 (x) f2)^<>`.
pub fn check_morphism_involution(law: &dyn CompositionLaw, f1: &SymbolField, f2: &SymbolField) -> Result<f64> {
    let lhs = map_m(law, &f1.conj(), &f2.conj())?;
    let rhs = diamond_involution(&map_m(law, f1, f2)?);
    Ok(crate::doubled::rel_diff2(&lhs, &rhs))
}

/// Gram defect `<<conj M(f1 (x) f2), M(g1 (x) g2)>>` against `<f1, g1><f2, g2>` (hermitian).
pub fn check_unitarity(
    law: &dyn CompositionLaw,
    f1: &SymbolField,
    f2: &SymbolField,
    g1: &SymbolField,
    g2: &SymbolField,
) -> Result<f64> {
    let a = map_m(law, f1, f2)?;
    let b = map_m(law, g1, g2)?;
    let lhs = double_pair(&a.map(|v| v.conj()), &b)?;
    let rhs = hermitian_pair(f1, g1)? * hermitian_pair(f2, g2)?;
    Ok((lhs - rhs).norm() / (rhs.norm() + EPS))
}

/// `M~_k M_h f` against `pair(k, h) f`.
pub fn check_inversion(law: &dyn CompositionLaw, f: &SymbolField, h: &Window, k: &Window) -> Result<f64> {
    let back = mod_adjoint(law, &mod_map(law, f, h)?, k)?;
    let want = f.scale(grid::pair(&k.h, &h.h)?);
    Ok(grid::rel_diff(&back, &want))
}

/// Inversion through the definitional map and adjoint only, for any law.
pub fn check_inversion_generic(law: &dyn CompositionLaw, f: &SymbolField, h: &Window, k: &Window) -> Result<f64> {
    let back = mod_adjoint_generic(law, &mod_map_generic(law, f, h)?, k)?;
    let want = f.scale(grid::pair(&k.h, &h.h)?);
    Ok(grid::rel_diff(&back, &want))
}

/// `|| M_h(conj f # f) ||_{2,2}` against `|| M_h f ||_{2,2}^2`.
pub fn check_cstar_norm(law: &dyn CompositionLaw, f: &SymbolField, h: &Window) -> Result<f64> {
    let two = Exponent::Finite(2.0);
    let spec = ModNormSpec { p: two, q: two, window: h.clone() };
    let lhs = modulation_norm(law, &law.compose(&f.conj(), f)?, &spec)?;
    let rhs = modulation_norm(law, f, &spec)?.powi(2);
    Ok((lhs - rhs).abs() / (rhs + EPS))
}

/// Ratio statistics of `|M_h f|` to `|V_h f|` (remapped) over points where `|V| > 1e-8 max |V|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportionality {
    pub mean: f64,
    pub std_dev: f64,
    pub points: usize,
}

pub fn stft_proportionality(law: &dyn CompositionLaw, f: &SymbolField, h: &Window) -> Result<Proportionality> {
    let m = mod_map(law, f, h)?;
    let v = stft_remapped(f, &h.h)?;
    let max = v.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let ratios: Vec<f64> = m
        .values()
        .iter()
        .zip(v.values())
        .filter(|(_, b)| b.norm() > 1e-8 * max)
        .map(|(a, b)| a.norm() / b.norm())
        .collect();
    let k = ratios.len().max(1) as f64;
    let mean = ratios.iter().sum::<f64>() / k;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / k;
    Ok(Proportionality { mean, std_dev: var.sqrt(), points: ratios.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doubled::rel_diff2;
    use crate::grid::make_grid;
    use crate::laws::Pointwise;
    use crate::testkit::FieldSampler;

    fn fields(pts: usize, seed: u64, count: usize) -> Vec<SymbolField> {
        let g = make_grid(1, pts).unwrap();
        let mut s = FieldSampler::new(&g, seed);
        (0..count).map(|_| s.mix()).collect()
    }

    #[test]
    fn m_is_change_of_variables_of_n() {
        let v = fields(8, 1, 2);
        assert!(check_m_relation(&WeylFast, &v[0], &v[1]).unwrap() < 1e-12);
        assert!(check_m_relation(&Pointwise, &v[0], &v[1]).unwrap() < 1e-12);
    }

    #[test]
    fn r_routes_agree_and_satisfy_definition() {
        let v = fields(8, 2, 4);
        assert!(check_r_relation(&WeylFast, &v[0], &v[1]).unwrap() < 1e-12);
        assert!(check_r_definition(&WeylFast, &v[0], &v[1], &v[2], &v[3]).unwrap() < 1e-10);
        assert!(check_n_definition(&WeylFast, &v[0], &v[1], &v[2], &v[3]).unwrap() < 1e-10);
    }

    #[test]
    fn pointwise_m_is_constant_in_first_slot() {
        let v = fields(8, 3, 2);
        let m = map_m(&Pointwise, &v[0], &v[1]).unwrap();
        let want = symplectic_fourier(&v[0].mul(&v[1]).unwrap());
        for x in 0..m.side() {
            assert!(grid::rel_diff_slices(m.row(x), want.values()) < 1e-10);
        }
        let swapped = map_m(&Pointwise, &v[1], &v[0]).unwrap();
        assert!(rel_diff2(&m, &swapped) < 1e-14);
    }

    #[test]
    fn closed_form_tracks_generic_and_converges() {
        let mut last = f64::INFINITY;
        for pts in [16usize, 32] {
            let g = make_grid(1, pts).unwrap();
            let f = FieldSampler::new(&g, 4).mix();
            let h = gaussian_window(&WeylFast, &g, 0.5).unwrap();
            let d = rel_diff2(&mod_map_closed_form(&f, &h.h).unwrap(), &map_m(&WeylFast, &f, &h.h).unwrap());
            assert!(d < last / 4.0);
            last = d;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn closed_form_adjoint_is_the_transpose() {
        let g = make_grid(1, 8).unwrap();
        let mut s = FieldSampler::new(&g, 9);
        let h = s.mix();
        let f = s.mix();
        let gg = DoubleField::tensor(&s.mix(), &s.mix()).unwrap();
        let lhs = grid::pair(&mod_adjoint_closed_form(&gg, &h).unwrap(), &f).unwrap();
        let c = mod_map_closed_form(&f, &h).unwrap();
        let t = GroupTables::new(&g);
        let mut rhs = C64::new(0.0, 0.0);
        for x in 0..g.len() {
            for y in 0..g.len() {
                rhs += gg.at(x, y) * c.at(t.sub(x, y), t.neg(y));
            }
        }
        rhs *= g.pairing_weight().powi(2);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn generic_inversion_is_exact() {
        let g = make_grid(1, 8).unwrap();
        let mut s = FieldSampler::new(&g, 10);
        let f = s.mix();
        let h = Window::new(&WeylFast, s.mix()).unwrap();
        let k = Window::new(&WeylFast, s.mix()).unwrap();
        let back = mod_adjoint_generic(&WeylFast, &mod_map_generic(&WeylFast, &f, &h).unwrap(), &k).unwrap();
        let want = f.scale(grid::pair(&k.h, &h.h).unwrap());
        assert!(grid::rel_diff(&back, &want) < 1e-12);
    }

    #[test]
    fn closed_form_is_an_isometry() {
        let g = make_grid(1, 16).unwrap();
        let f = FieldSampler::new(&g, 11).mix();
        let h = gaussian_window(&WeylFast, &g, 0.7).unwrap();
        let two = Exponent::Finite(2.0);
        let n = lpq_norm(&mod_map(&WeylFast, &f, &h).unwrap(), two, two);
        assert!((n - h.norm2 * f.norm()).abs() < 1e-12 * n);
    }

    #[test]
    fn zero_inputs_give_zero() {
        let g = make_grid(1, 8).unwrap();
        let v = fields(8, 5, 1);
        let z = SymbolField::zeros(&g);
        assert_eq!(map_n(&WeylFast, &z, &v[0]).unwrap().norm(), 0.0);
        assert_eq!(map_r(&WeylFast, &z, &v[0]).unwrap().norm(), 0.0);
        let h = gaussian_window(&WeylFast, &g, 0.5).unwrap();
        assert_eq!(mod_map(&WeylFast, &z, &h).unwrap().norm(), 0.0);
        assert_eq!(mod_adjoint(&WeylFast, &DoubleField::zeros(&g), &h).unwrap().norm(), 0.0);
        assert!(Window::new(&WeylFast, z).is_err());
    }

    #[test]
    fn lpq_basics() {
        let g = make_grid(1, 4).unwrap();
        let mut d = DoubleField::zeros(&g);
        let mut v = d.clone().into_values();
        v[17] = C64::new(1.0, 0.0);
        d = DoubleField::from_values(&g, v).unwrap();
        let w = g.pairing_weight();
        let one = Exponent::Finite(1.0);
        assert!((lpq_norm(&d, one, one) - w * w).abs() < 1e-15);
        let two = Exponent::Finite(2.0);
        let v = fields(8, 6, 2);
        let t = DoubleField::tensor(&v[0], &v[1]).unwrap();
        let l2 = double_pair(&t.map(|z| z.conj()), &t).unwrap().re.sqrt();
        assert!((lpq_norm(&t, two, two) - l2).abs() < 1e-12 * l2);
        assert_eq!(lpq_norm(&d, Exponent::Infinity, Exponent::Infinity), 1.0);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("0".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
    }

    #[test]
    fn stft_at_origin_is_squared_norm() {
        let g = make_grid(1, 16).unwrap();
        let h = crate::testkit::gaussian(&g, 0.5, &[0.0, 0.0], C64::new(1.0, 0.0));
        let v = stft(&h, &h).unwrap();
        let o = GroupTables::new(&g).origin();
        let n2 = hermitian_pair(&h, &h).unwrap().re;
        assert!((v.at(o, o).norm() - n2).abs() < 1e-8 * n2);
    }
}

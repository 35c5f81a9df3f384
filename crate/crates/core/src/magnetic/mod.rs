//! Magnetic Weyl calculus: gauge-route product, direct oracle, magnetic translations.

mod flux;
mod poly;

pub use flux::{circulation, cocycle, parallelogram_flux, triangle_flux};
pub use poly::{MagneticField, Monomial, Polynomial, VectorPotential, MAX_FIELD_DEGREE, MAX_POTENTIAL_DEGREE};

use crate::error::{MoyalError, Result};
use crate::grid::{self, plane_wave_lattice, roots_of_unity, translate_lattice, PhaseGrid, PhasePoint, SymbolField};
use crate::laws::{
    hypothesis_c_with, kernel_product, kernel_to_symbol, theta_lattice, twisted_quadrature, weyl_op_kernel,
    CompositionLaw, HypothesisC, OperatorKernel,
};
use crate::par;
use num_complex::Complex64 as C64;
use std::sync::{Arc, Mutex};

/// Largest grid the oracle product accepts.
pub const DIRECT_LIMIT: usize = 6;

fn check_dims(grid: &PhaseGrid, n: usize) -> Result<()> {
    if grid.n() != n {
        return Err(MoyalError::Dimension { expected: n, got: grid.n() });
    }
    Ok(())
}

/// Configuration-space coordinates of every row of a kernel matrix.
fn config_points(grid: &PhaseGrid) -> Vec<Vec<f64>> {
    let n = grid.n();
    let pts = grid.points();
    (0..grid.config_len())
        .map(|mut flat| {
            let mut x = vec![0.0; n];
            for a in (0..n).rev() {
                x[a] = grid.coordinate(flat % pts);
                flat /= pts;
            }
            x
        })
        .collect()
}

/// `e^{-i Gamma^A([x_j, x_k])}` over all pairs of configuration points.
pub fn circulation_phases(pot: &VectorPotential, grid: &PhaseGrid) -> Result<Vec<C64>> {
    check_dims(grid, pot.n())?;
    let xs = config_points(grid);
    let m = xs.len();
    let rows = par::map_indexed(m, |j| {
        (0..m).map(|k| C64::from_polar(1.0, -circulation(pot, &xs[j], &xs[k]))).collect::<Vec<_>>()
    });
    Ok(rows.concat())
}

fn with_phases(k: OperatorKernel, phases: &[C64], conj: bool) -> OperatorKernel {
    let grid = *k.grid();
    let mut m = k.into_matrix();
    for (v, p) in m.iter_mut().zip(phases) {
        *v *= if conj { p.conj() } else { *p };
    }
    OperatorKernel::from_raw(grid, m)
}

/// Magnetic quantization: the Weyl kernel times the circulation phase matrix.
pub fn op_magnetic(pot: &VectorPotential, f: &SymbolField) -> Result<OperatorKernel> {
    let phases = circulation_phases(pot, f.grid())?;
    Ok(with_phases(weyl_op_kernel(f), &phases, false))
}

/// Inverse of [`op_magnetic`].
pub fn symbol_magnetic(pot: &VectorPotential, k: &OperatorKernel) -> Result<SymbolField> {
    let phases = circulation_phases(pot, k.grid())?;
    Ok(kernel_to_symbol(&with_phases(k.clone(), &phases, true)))
}

fn compose_with_phases(phases: &[C64], f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
    f.grid().check_same(g.grid())?;
    let kf = with_phases(weyl_op_kernel(f), phases, false);
    let kg = with_phases(weyl_op_kernel(g), phases, false);
    Ok(kernel_to_symbol(&with_phases(kernel_product(&kf, &kg)?, phases, true)))
}

/// Magnetic product through the gauge route; `A` must generate `B`.
pub fn magnetic_compose(
    field: &MagneticField,
    pot: &VectorPotential,
    f: &SymbolField,
    g: &SymbolField,
) -> Result<SymbolField> {
    pot.check_generates(field)?;
    let phases = circulation_phases(pot, f.grid())?;
    compose_with_phases(&phases, f, g)
}

/// Oracle: the twisted double quadrature with the triangle-flux phase.
pub fn magnetic_compose_direct(field: &MagneticField, f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
    check_dims(f.grid(), field.n())?;
    if f.grid().points() > DIRECT_LIMIT {
        return Err(MoyalError::SizeGuard(format!("magnetic oracle limited to N <= {DIRECT_LIMIT}")));
    }
    let n = field.n();
    let flux = |x: &[f64], u: &[f64], v: &[f64]| {
        let a: Vec<f64> = (0..n).map(|j| x[j] - u[j] + v[j]).collect();
        let b: Vec<f64> = (0..n).map(|j| x[j] + u[j] - v[j]).collect();
        let c: Vec<f64> = (0..n).map(|j| x[j] + u[j] + v[j]).collect();
        triangle_flux(field, &a, &b, &c)
    };
    twisted_quadrature(f, g, Some(&flux))
}

/// `(2 pi)^{-n} delta^n sum_y e^{-i y.xi} e^{-i Gamma^B(P(x; -y, -z))}` on the grid.
///
/// Both edges are reversed because plane waves here carry `e^{+i sigma(X, .)}`, which makes
/// `e_{-Z} #^B f #^B e_Z` sweep the parallelogram forward along `z`. With constant `B` the
/// reversal is invisible.
pub fn parallelogram_weight(field: &MagneticField, grid: &PhaseGrid, z: &[i64]) -> Result<SymbolField> {
    check_dims(grid, field.n())?;
    let n = grid.n();
    if z.len() != n {
        return Err(MoyalError::Dimension { expected: n, got: z.len() });
    }
    let pts = grid.points();
    let delta = grid.delta();
    let zc: Vec<f64> = z.iter().map(|&k| -(k as f64) * delta).collect();
    let xs = config_points(grid);
    let ys: Vec<Vec<i64>> = (0..grid.config_len())
        .map(|mut flat| {
            let mut k = vec![0i64; n];
            for a in (0..n).rev() {
                k[a] = grid.lattice(flat % pts);
                flat /= pts;
            }
            k
        })
        .collect();
    let roots = roots_of_unity(pts);
    let scale = (2.0 * std::f64::consts::PI).powi(-(n as i32)) * delta.powi(n as i32);
    let m = xs.len();
    let rows = par::map_indexed(m, |xi| {
        let omega: Vec<C64> = ys
            .iter()
            .map(|y| {
                let yc: Vec<f64> = y.iter().map(|&k| -(k as f64) * delta).collect();
                C64::from_polar(1.0, -parallelogram_flux(field, &xs[xi], &yc, &zc))
            })
            .collect();
        (0..m)
            .map(|e| {
                let ke = &ys[e];
                let s: C64 = ys
                    .iter()
                    .zip(&omega)
                    .map(|(y, o)| {
                        let d: i64 = y.iter().zip(ke).map(|(a, b)| a * b).sum();
                        o * roots[(-d).rem_euclid(pts as i64) as usize]
                    })
                    .sum();
                s * scale
            })
            .collect::<Vec<_>>()
    });
    Ok(SymbolField::from_raw(*grid, rows.concat()))
}

/// `(f * g)(x, xi) = delta^n sum_eta f(x, xi - eta) g(x, eta)`, modular in eta.
pub fn mixed_product(f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
    f.grid().check_same(g.grid())?;
    let grid = *f.grid();
    let n = grid.n();
    let pts = grid.points();
    let m = grid.config_len();
    let weight = grid.delta().powi(n as i32);
    // raw index of the lattice difference xi - eta, per axis
    let unr = |mut flat: usize| {
        let mut k = [0usize; grid::MAX_DIM];
        for a in (0..n).rev() {
            k[a] = flat % pts;
            flat /= pts;
        }
        k
    };
    let diff: Vec<usize> = (0..m * m)
        .map(|p| {
            let (a, b) = (unr(p / m), unr(p % m));
            (0..n).fold(0, |acc, ax| acc * pts + (a[ax] + pts + pts / 2 - b[ax]) % pts)
        })
        .collect();
    let rows = par::map_indexed(m, |x| {
        let fr = &f.values()[x * m..(x + 1) * m];
        let gr = &g.values()[x * m..(x + 1) * m];
        (0..m)
            .map(|xi| (0..m).map(|eta| fr[diff[xi * m + eta]] * gr[eta]).sum::<C64>() * weight)
            .collect::<Vec<_>>()
    });
    Ok(SymbolField::from_raw(grid, rows.concat()))
}

/// Magnetic translation through the mixed product: `W[z] * f(. + Z)`.
pub fn magnetic_theta(field: &MagneticField, z: &PhasePoint, f: &SymbolField) -> Result<SymbolField> {
    let k = z.require_lattice(f.grid())?.to_vec();
    let w = parallelogram_weight(field, f.grid(), &k[..field.n()])?;
    theta_with_weight(&w, f, &k)
}

fn theta_with_weight(w: &SymbolField, f: &SymbolField, k: &[i64]) -> Result<SymbolField> {
    let neg: Vec<i64> = k.iter().map(|v| -v).collect();
    mixed_product(w, &translate_lattice(f, &neg))
}

/// Translation averaging with magnetic translations; weights cached per configuration shift.
pub fn check_magnetic_hypothesis_c(field: &MagneticField, f: &SymbolField, g: &SymbolField) -> Result<HypothesisC> {
    let grid = *f.grid();
    check_dims(&grid, field.n())?;
    if grid.points() > 8 {
        return Err(MoyalError::SizeGuard("magnetic Hypothesis C limited to N <= 8".into()));
    }
    let n = grid.n();
    let cache: Mutex<std::collections::HashMap<Vec<i64>, Arc<SymbolField>>> = Mutex::new(Default::default());
    hypothesis_c_with(f, g, |k| {
        let key = k[..n].to_vec();
        let hit = cache.lock().expect("cache").get(&key).cloned();
        let w = match hit {
            Some(w) => w,
            None => {
                let w = Arc::new(parallelogram_weight(field, &grid, &key)?);
                cache.lock().expect("cache").insert(key, w.clone());
                w
            }
        };
        theta_with_weight(&w, f, k)
    })
}

/// Multiplication symbol `(x, xi) -> Omega^B(X, Y; x)`.
pub fn cocycle_field(field: &MagneticField, grid: &PhaseGrid, x: &PhasePoint, y: &PhasePoint) -> Result<SymbolField> {
    check_dims(grid, field.n())?;
    x.require_lattice(grid)?;
    y.require_lattice(grid)?;
    let n = grid.n();
    // validates dimensions once; the flux part is evaluated per point below
    cocycle(field, x, y, &vec![0.0; n])?;
    Ok(SymbolField::from_fn(grid, |p| cocycle(field, x, y, &p[..n]).expect("dimensions checked")))
}

/// Defects of the plane-wave cocycle relation under both readings of the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CocycleDefect {
    /// `Omega #^B e_{X+Y}`.
    pub composed: f64,
    /// `Omega e_{X+Y}` pointwise.
    pub pointwise: f64,
}

pub fn check_cocycle(law: &MagneticLaw, grid: &PhaseGrid, x: &[i64], y: &[i64]) -> Result<CocycleDefect> {
    let px = PhasePoint::on_grid(grid, x)?;
    let py = PhasePoint::on_grid(grid, y)?;
    let sum: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let lhs = law.compose(&plane_wave_lattice(grid, x), &plane_wave_lattice(grid, y))?;
    let omega = cocycle_field(&law.field, grid, &px, &py)?;
    let exy = plane_wave_lattice(grid, &sum);
    Ok(CocycleDefect {
        composed: grid::rel_diff(&lhs, &law.compose(&omega, &exy)?),
        pointwise: grid::rel_diff(&lhs, &omega.mul(&exy)?),
    })
}

/// Largest relative spread of `f #^B g` across the given potentials of one field.
pub fn check_gauge_covariance(
    field: &MagneticField,
    potentials: &[VectorPotential],
    f: &SymbolField,
    g: &SymbolField,
) -> Result<f64> {
    let mut products = Vec::with_capacity(potentials.len());
    for a in potentials {
        products.push(magnetic_compose(field, a, f, g)?);
    }
    let mut worst: f64 = 0.0;
    for p in products.iter().skip(1) {
        worst = worst.max(grid::rel_diff(p, &products[0]));
    }
    Ok(worst)
}

/// Worst Stokes defect `|sum of edge circulations - flux|` on the given triangles.
pub fn check_stokes(pot: &VectorPotential, triangles: &[[Vec<f64>; 3]]) -> f64 {
    let field = pot.curl();
    triangles
        .iter()
        .map(|[a, b, c]| {
            let lhs = circulation(pot, a, b) + circulation(pot, b, c) + circulation(pot, c, a);
            let rhs = triangle_flux(&field, a, b, c);
            (lhs - rhs).abs() / (1.0 + rhs.abs())
        })
        .fold(0.0, f64::max)
}

/// Magnetic translation through the mixed product against `e_{-Z} #^B f #^B e_Z`.
pub fn check_theta_routes(law: &MagneticLaw, f: &SymbolField, z: &[i64]) -> Result<f64> {
    let pz = PhasePoint::on_grid(f.grid(), z)?;
    let a = magnetic_theta(&law.field, &pz, f)?;
    let b = theta_lattice(law, f, z)?;
    Ok(grid::rel_diff(&a, &b))
}

/// A magnetic product bound to one field and one generating potential.
pub struct MagneticLaw {
    name: String,
    field: MagneticField,
    potential: VectorPotential,
    phases: Mutex<Option<(PhaseGrid, Arc<Vec<C64>>)>>,
}

impl std::fmt::Debug for MagneticLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MagneticLaw").field("name", &self.name).finish()
    }
}

impl MagneticLaw {
    pub fn new(name: impl Into<String>, field: MagneticField, potential: VectorPotential) -> Result<Self> {
        potential.check_generates(&field)?;
        Ok(MagneticLaw { name: name.into(), field, potential, phases: Mutex::new(None) })
    }

    pub fn field(&self) -> &MagneticField {
        &self.field
    }

    pub fn potential(&self) -> &VectorPotential {
        &self.potential
    }

    fn phases(&self, grid: &PhaseGrid) -> Result<Arc<Vec<C64>>> {
        let mut slot = self.phases.lock().expect("phase cache");
        if let Some((g, p)) = slot.as_ref() {
            if g == grid {
                return Ok(p.clone());
            }
        }
        let p = Arc::new(circulation_phases(&self.potential, grid)?);
        *slot = Some((*grid, p.clone()));
        Ok(p)
    }
}

impl CompositionLaw for MagneticLaw {
    fn name(&self) -> &str {
        &self.name
    }

    fn compose(&self, f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
        check_dims(f.grid(), self.field.n())?;
        let phases = self.phases(f.grid())?;
        compose_with_phases(&phases, f, g)
    }

    fn is_commutative(&self) -> bool {
        false
    }

    fn satisfies_c_expected(&self) -> bool {
        true
    }
}

/// Identifiers of the shipped magnetic laws.
pub const SHIPPED: [&str; 8] = [
    "magnetic-b0",
    "magnetic-b0.5",
    "magnetic-b1",
    "magnetic-b0-landau",
    "magnetic-b0.5-landau",
    "magnetic-b1-landau",
    "magnetic-linear",
    "magnetic-linear-alt",
];

/// `B_12 = x_1`.
pub fn linear_field() -> MagneticField {
    MagneticField::new(2, vec![Polynomial::linear(2, 0, 1.0)]).expect("closed")
}

/// Potentials `(0, x_1^2 / 2)` and `(-x_1 x_2, 0)` of [`linear_field`].
pub fn linear_potentials() -> [VectorPotential; 2] {
    [
        VectorPotential::new(vec![Polynomial::zero(), Polynomial::monomial(vec![2, 0], 0.5)]).expect("valid"),
        VectorPotential::new(vec![Polynomial::monomial(vec![1, 1], -1.0), Polynomial::zero()]).expect("valid"),
    ]
}

/// Potentials of `law`'s field: its own, the shipped ones for the same field, and a
/// gradient shift `A + d(rho)` with a cubic `rho`.
pub fn gauge_variants(law: &MagneticLaw) -> Vec<VectorPotential> {
    let mut out = vec![law.potential.clone()];
    for id in SHIPPED {
        if let Some(other) = magnetic_law_by_name(id) {
            if other.field == law.field && !out.contains(&other.potential) {
                out.push(other.potential);
            }
        }
    }
    let n = law.field.n();
    let mut p = vec![0u32; n];
    p[0] = 2;
    p[1] = 1;
    let mut rho = Polynomial::monomial(p, 0.25);
    let mut q = vec![0u32; n];
    q[n - 1] = 3;
    rho = rho.add(&Polynomial::monomial(q, -0.1));
    let shifted: Vec<Polynomial> =
        (0..n).map(|j| law.potential.component(j).add(&rho.derivative(j))).collect();
    if let Ok(a) = VectorPotential::new(shifted) {
        out.push(a);
    }
    out
}

/// Look up a shipped magnetic law.
pub fn magnetic_law_by_name(name: &str) -> Option<MagneticLaw> {
    let (field, pot) = match name {
        "magnetic-linear" => (linear_field(), linear_potentials()[0].clone()),
        "magnetic-linear-alt" => (linear_field(), linear_potentials()[1].clone()),
        _ => {
            let rest = name.strip_prefix("magnetic-b")?;
            let (b, landau) = match rest.strip_suffix("-landau") {
                Some(b) => (b, true),
                None => (rest, false),
            };
            let b: f64 = match b {
                "0" => 0.0,
                "0.5" => 0.5,
                "1" => 1.0,
                _ => return None,
            };
            let pot = if landau { VectorPotential::landau(b) } else { VectorPotential::symmetric(b) };
            (MagneticField::constant(b), pot)
        }
    };
    MagneticLaw::new(name, field, pot).ok()
}

//! Composition laws on symbols and the checks of their axioms.

mod quadrature;
mod weyl;

pub use quadrature::{direct_prefactor, direct_size_limit, weyl_compose_direct};
pub(crate) use quadrature::twisted_quadrature;
pub use weyl::{kernel_product, kernel_to_symbol, weyl_compose_fast, weyl_op_kernel};

use crate::error::{MoyalError, Result};
use crate::grid::{self, plane_wave_lattice, PhaseGrid, PhasePoint, SymbolField};
use num_complex::Complex64 as C64;

/// Guard against division by zero in relative defects.
pub const EPS: f64 = 1e-300;

/// A bilinear product on symbols with the metadata the verification suite needs.
pub trait CompositionLaw: Send + Sync {
    fn name(&self) -> &str;
    fn compose(&self, f: &SymbolField, g: &SymbolField) -> Result<SymbolField>;
    fn is_commutative(&self) -> bool;
    /// Whether the translation-averaging identity is expected to hold.
    fn satisfies_c_expected(&self) -> bool;
    /// Whether plane-wave sandwiches have the Weyl closed form (translation plus phase).
    fn weyl_closed_form(&self) -> bool {
        false
    }
}

/// Pointwise multiplication.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pointwise;

/// Weyl product through the operator kernel (normative).
#[derive(Clone, Copy, Debug, Default)]
pub struct WeylFast;

/// Weyl product through direct quadrature (oracle).
#[derive(Clone, Copy, Debug, Default)]
pub struct WeylDirect;

pub fn pointwise_compose(f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
    f.mul(g)
}

impl CompositionLaw for Pointwise {
    fn name(&self) -> &str {
        "pointwise"
    }
    fn compose(&self, f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
        pointwise_compose(f, g)
    }
    fn is_commutative(&self) -> bool {
        true
    }
    fn satisfies_c_expected(&self) -> bool {
        false
    }
}

impl CompositionLaw for WeylFast {
    fn name(&self) -> &str {
        "weyl"
    }
    fn compose(&self, f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
        weyl_compose_fast(f, g)
    }
    fn is_commutative(&self) -> bool {
        false
    }
    fn satisfies_c_expected(&self) -> bool {
        true
    }
    fn weyl_closed_form(&self) -> bool {
        true
    }
}

impl CompositionLaw for WeylDirect {
    fn name(&self) -> &str {
        "weyl-direct"
    }
    fn compose(&self, f: &SymbolField, g: &SymbolField) -> Result<SymbolField> {
        weyl_compose_direct(f, g)
    }
    fn is_commutative(&self) -> bool {
        false
    }
    fn satisfies_c_expected(&self) -> bool {
        true
    }
    fn weyl_closed_form(&self) -> bool {
        true
    }
}

/// Integral kernel on the configuration grid, row-major over (x, y).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorKernel {
    grid: PhaseGrid,
    matrix: Vec<C64>,
}

impl OperatorKernel {
    pub fn from_matrix(grid: &PhaseGrid, matrix: Vec<C64>) -> Result<Self> {
        if matrix.len() != grid.len() {
            return Err(MoyalError::GridMismatch(format!(
                "kernel of {} entries for {} configuration points",
                matrix.len(),
                grid.config_len()
            )));
        }
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(MoyalError::Format("non-finite kernel entry".into()));
        }
        Ok(OperatorKernel { grid: *grid, matrix })
    }

    pub(crate) fn from_raw(grid: PhaseGrid, matrix: Vec<C64>) -> Self {
        OperatorKernel { grid, matrix }
    }

    /// `Id / delta^n`, the kernel of the unit symbol.
    pub fn identity(grid: &PhaseGrid) -> Self {
        let m = grid.config_len();
        let mut matrix = vec![C64::new(0.0, 0.0); m * m];
        let d = grid.delta().powi(-(grid.n() as i32));
        for i in 0..m {
            matrix[i * m + i] = C64::new(d, 0.0);
        }
        OperatorKernel { grid: *grid, matrix }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    pub fn into_matrix(self) -> Vec<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        let m = self.grid.config_len();
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..m {
                out[j * m + i] = self.matrix[i * m + j].conj();
            }
        }
        OperatorKernel { grid: self.grid, matrix: out }
    }
}

/// `e_{-Z} # f # e_Z`.
pub fn theta_translate(law: &dyn CompositionLaw, f: &SymbolField, z: &PhasePoint) -> Result<SymbolField> {
    let k = z.require_lattice(f.grid())?.to_vec();
    theta_lattice(law, f, &k)
}

pub(crate) fn theta_lattice(law: &dyn CompositionLaw, f: &SymbolField, k: &[i64]) -> Result<SymbolField> {
    let grid = f.grid();
    let neg: Vec<i64> = k.iter().map(|v| -v).collect();
    let left = law.compose(&plane_wave_lattice(grid, &neg), f)?;
    law.compose(&left, &plane_wave_lattice(grid, k))
}

/// `|sum(f # g) - sum(f g)| / |sum(f g)|`.
pub fn check_integral_identity(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<f64> {
    let lhs = law.compose(f, g)?.sum();
    let rhs = f.mul(g)?.sum();
    Ok((lhs - rhs).norm() / (rhs.norm() + EPS))
}

/// Largest relative spread among the three cyclic pairings.
pub fn check_cyclicity(law: &dyn CompositionLaw, f1: &SymbolField, f2: &SymbolField, f3: &SymbolField) -> Result<f64> {
    let a = grid::pair(&law.compose(f1, f2)?, f3)?;
    let b = grid::pair(f1, &law.compose(f2, f3)?)?;
    let c = grid::pair(f2, &law.compose(f3, f1)?)?;
    let scale = a.norm().max(b.norm()).max(c.norm()) + EPS;
    Ok([(a - b).norm(), (b - c).norm(), (a - c).norm()].into_iter().fold(0.0, f64::max) / scale)
}

/// `conj(f # g)` against `conj(g) # conj(f)`.
pub fn check_involution(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<f64> {
    let lhs = law.compose(f, g)?.conj();
    let rhs = law.compose(&g.conj(), &f.conj())?;
    Ok(grid::rel_diff(&lhs, &rhs))
}

/// Two-sided unit defect of the constant symbol 1.
pub fn check_unit(law: &dyn CompositionLaw, f: &SymbolField) -> Result<f64> {
    let one = SymbolField::constant(f.grid(), C64::new(1.0, 0.0));
    let l = grid::rel_diff(&law.compose(&one, f)?, f);
    let r = grid::rel_diff(&law.compose(f, &one)?, f);
    Ok(l.max(r))
}

pub fn check_associativity(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField, k: &SymbolField) -> Result<f64> {
    let a = law.compose(&law.compose(f, g)?, k)?;
    let b = law.compose(f, &law.compose(g, k)?)?;
    Ok(grid::rel_diff(&a, &b))
}

/// Outcome of the translation-averaging check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypothesisC {
    pub lhs: C64,
    pub rhs: C64,
    pub defect: f64,
}

/// Compares `w^2 sum_Z sum_Y Theta_Z(f)(Y) g(Y)` with `(w sum f)(w sum g)`.
pub fn check_hypothesis_c(law: &dyn CompositionLaw, f: &SymbolField, g: &SymbolField) -> Result<HypothesisC> {
    hypothesis_c_with(f, g, |k| theta_lattice(law, f, k))
}

pub(crate) fn hypothesis_c_with(
    f: &SymbolField,
    g: &SymbolField,
    theta: impl Fn(&[i64]) -> Result<SymbolField>,
) -> Result<HypothesisC> {
    f.grid().check_same(g.grid())?;
    let grid = *f.grid();
    let w = grid.pairing_weight();
    let mut lhs = C64::new(0.0, 0.0);
    let mut k = vec![0i64; grid.axes()];
    for flat in 0..grid.len() {
        let idx = grid.unravel(flat);
        for (a, v) in k.iter_mut().enumerate() {
            *v = grid.lattice(idx[a]);
        }
        let t = theta(&k)?;
        lhs += t.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<C64>();
    }
    lhs *= w * w;
    let rhs = f.integral() * g.integral();
    Ok(HypothesisC { lhs, rhs, defect: (lhs - rhs).norm() / (rhs.norm() + EPS) })
}

/// Parse a law identifier, including the shipped magnetic laws.
pub fn law_by_name(name: &str) -> Option<Box<dyn CompositionLaw>> {
    match name {
        "pointwise" => Some(Box::new(Pointwise)),
        "weyl" => Some(Box::new(WeylFast)),
        "weyl-direct" => Some(Box::new(WeylDirect)),
        _ => crate::magnetic::magnetic_law_by_name(name).map(|l| Box::new(l) as Box<dyn CompositionLaw>),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, rel_diff, translate};
    use crate::testkit::{gaussian, FieldSampler};

    #[test]
    fn pointwise_basics() {
        let g = make_grid(1, 8).unwrap();
        let mut s = FieldSampler::new(&g, 1);
        let (f, h) = (s.mix(), s.mix());
        let one = SymbolField::constant(&g, C64::new(1.0, 0.0));
        assert_eq!(pointwise_compose(&f, &one).unwrap(), f);
        assert_eq!(pointwise_compose(&f, &h).unwrap(), pointwise_compose(&h, &f).unwrap());
        assert_eq!(check_integral_identity(&Pointwise, &f, &h).unwrap(), 0.0);
        let z = PhasePoint::on_grid(&g, &[1, 2]).unwrap();
        assert!(rel_diff(&theta_translate(&Pointwise, &f, &z).unwrap(), &f) < 1e-15);
        assert!(check_cyclicity(&Pointwise, &f, &h, &s.mix()).unwrap() < 1e-14);
    }

    #[test]
    fn weyl_fast_algebra_is_exact() {
        let g = make_grid(1, 16).unwrap();
        let mut s = FieldSampler::new(&g, 3);
        let (f, h, k) = (s.mix(), s.mix(), s.mix());
        assert!(check_associativity(&WeylFast, &f, &h, &k).unwrap() < 1e-10);
        assert!(check_involution(&WeylFast, &f, &h).unwrap() < 1e-10);
        assert!(check_unit(&WeylFast, &f).unwrap() < 1e-10);
        assert!(check_integral_identity(&WeylFast, &f, &h).unwrap() < 1e-10);
        assert!(check_cyclicity(&WeylFast, &f, &h, &k).unwrap() < 1e-10);
    }

    #[test]
    fn theta_is_forward_shift() {
        let g = make_grid(1, 16).unwrap();
        let f = gaussian(&g, 0.4, &[0.3, -0.2], C64::new(1.0, 0.2));
        for k in [[1i64, 0], [0, 1], [-2, 3], [4, -4]] {
            let z = PhasePoint::on_grid(&g, &k).unwrap();
            let t = theta_translate(&WeylFast, &f, &z).unwrap();
            // f(. + Z) is the translate by -Z
            let want = translate(&f, &z.neg()).unwrap();
            assert!(rel_diff(&t, &want) < 1e-10, "{k:?}");
        }
        let zero = PhasePoint::origin(&g);
        assert!(rel_diff(&theta_translate(&WeylFast, &f, &zero).unwrap(), &f) < 1e-12);
        assert!(theta_translate(&WeylFast, &f, &PhasePoint::off_grid(vec![0.1, 0.0])).is_err());
    }

    #[test]
    fn hypothesis_c_separates_the_laws() {
        let g = make_grid(1, 8).unwrap();
        let mut s = FieldSampler::new(&g, 5);
        let (f, h) = (s.gaussian(), s.gaussian());
        assert!(check_hypothesis_c(&WeylFast, &f, &h).unwrap().defect < 1e-10);
        assert!(check_hypothesis_c(&Pointwise, &f, &h).unwrap().defect > 0.1);
        let z = SymbolField::zeros(&g);
        let r = check_hypothesis_c(&WeylFast, &z, &h).unwrap();
        assert_eq!((r.lhs, r.rhs), (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }

    #[test]
    fn fast_and_direct_are_close_at_fine_grids() {
        let g = make_grid(1, 32).unwrap();
        let f = gaussian(&g, 0.35, &[0.4, 0.0], C64::new(1.0, 0.0));
        let h = gaussian(&g, 0.35, &[0.0, -0.4], C64::new(0.0, 1.0));
        let a = weyl_compose_fast(&f, &h).unwrap();
        let b = weyl_compose_direct(&f, &h).unwrap();
        assert!(rel_diff(&a, &b) < 1e-7);
    }
}

//! Fields on the doubled phase space and the products and dualities living there.

use crate::error::{MoyalError, Result};
use crate::grid::{PhaseGrid, SymbolField};
use crate::laws::CompositionLaw;
use crate::linalg;
use num_complex::Complex64 as C64;

/// Complex field on Xi x Xi, row-major over (first point, second point).
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleField {
    grid: PhaseGrid,
    values: Vec<C64>,
}

impl DoubleField {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        DoubleField { grid: *grid, values: vec![C64::new(0.0, 0.0); grid.len() * grid.len()] }
    }

    pub fn from_values(grid: &PhaseGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() * grid.len() {
            return Err(MoyalError::GridMismatch(format!(
                "{} values for a doubled grid of {} points",
                values.len(),
                grid.len() * grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(MoyalError::Format("non-finite field value".into()));
        }
        Ok(DoubleField { grid: *grid, values })
    }

    pub(crate) fn from_raw(grid: PhaseGrid, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len() * grid.len());
        DoubleField { grid, values }
    }

    /// `(X, Y) -> f(X) g(Y)`.
    pub fn tensor(f: &SymbolField, g: &SymbolField) -> Result<Self> {
        f.grid().check_same(g.grid())?;
        let mut values = Vec::with_capacity(f.values().len() * g.values().len());
        for a in f.values() {
            values.extend(g.values().iter().map(|b| a * b));
        }
        Ok(DoubleField { grid: *f.grid(), values })
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

    /// Side length of the value matrix, `N^{2n}`.
    pub fn side(&self) -> usize {
        self.grid.len()
    }

    pub fn at(&self, x: usize, y: usize) -> C64 {
        self.values[x * self.side() + y]
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        DoubleField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn zip(&self, other: &DoubleField, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(DoubleField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &DoubleField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    /// Hermitian L2 norm under the doubled normalized measure.
    pub fn norm(&self) -> f64 {
        let w = self.grid.pairing_weight();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w * w).sqrt()
    }

    /// First-slot slice `Y -> F(X, Y)` at flat index `x`.
    pub fn row(&self, x: usize) -> &[C64] {
        let s = self.side();
        &self.values[x * s..(x + 1) * s]
    }

    /// Apply a map to every first-slot slice.
    pub fn map_second_slot(&self, op: impl Fn(&SymbolField) -> SymbolField) -> Self {
        let s = self.side();
        let mut values = Vec::with_capacity(s * s);
        for x in 0..s {
            let f = SymbolField::from_raw(self.grid, self.row(x).to_vec());
            values.extend_from_slice(op(&f).values());
        }
        DoubleField { grid: self.grid, values }
    }

    pub fn transpose(&self) -> Self {
        let s = self.side();
        let mut values = vec![C64::new(0.0, 0.0); s * s];
        for x in 0..s {
            for y in 0..s {
                values[y * s + x] = self.values[x * s + y];
            }
        }
        DoubleField { grid: self.grid, values }
    }

    /// Apply a map to both slots.
    pub fn map_both_slots(&self, op: impl Fn(&SymbolField) -> SymbolField) -> Self {
        self.map_second_slot(&op).transpose().map_second_slot(&op).transpose()
    }
}

/// Relative L2 distance between doubled fields.
pub fn rel_diff2(a: &DoubleField, b: &DoubleField) -> f64 {
    crate::grid::rel_diff_slices(a.values(), b.values())
}

/// Finite sum of elementary tensors.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TensorSum {
    pub terms: Vec<(SymbolField, SymbolField)>,
}

impl TensorSum {
    pub fn elementary(f: SymbolField, g: SymbolField) -> Self {
        TensorSum { terms: vec![(f, g)] }
    }

    pub fn push(&mut self, f: SymbolField, g: SymbolField) {
        self.terms.push((f, g));
    }

    pub fn conj(&self) -> Self {
        TensorSum { terms: self.terms.iter().map(|(a, b)| (a.conj(), b.conj())).collect() }
    }

    fn grid(&self) -> Result<PhaseGrid> {
        let first = self.terms.first().ok_or_else(|| MoyalError::Invalid("empty tensor sum".into()))?;
        let grid = *first.0.grid();
        for (a, b) in &self.terms {
            grid.check_same(a.grid())?;
            grid.check_same(b.grid())?;
        }
        Ok(grid)
    }
}

pub fn materialize(t: &TensorSum) -> Result<DoubleField> {
    let grid = t.grid()?;
    let mut out = DoubleField::zeros(&grid);
    for (a, b) in &t.terms {
        let s = grid.len();
        for (x, av) in a.values().iter().enumerate() {
            let row = &mut out.values[x * s..(x + 1) * s];
            for (o, bv) in row.iter_mut().zip(b.values()) {
                *o += av * bv;
            }
        }
    }
    Ok(out)
}

/// `(f (x) h) box (g (x) k) = (f # g) (x) (k # h)`, extended bilinearly.
pub fn box_compose(law: &dyn CompositionLaw, t1: &TensorSum, t2: &TensorSum) -> Result<TensorSum> {
    t1.grid()?.check_same(&t2.grid()?)?;
    let mut out = TensorSum::default();
    for (f, h) in &t1.terms {
        for (g, k) in &t2.terms {
            out.push(law.compose(f, g)?, law.compose(k, h)?);
        }
    }
    Ok(out)
}

pub fn box_involution(f: &DoubleField) -> DoubleField {
    f.map(|v| v.conj())
}

/// Flat-index tables for the torus group of the grid.
pub(crate) struct GroupTables {
    side: usize,
    /// sub[a * side + b] = flat(X_a - X_b)
    sub: Vec<u32>,
    neg: Vec<u32>,
}

impl GroupTables {
    pub fn new(grid: &PhaseGrid) -> Self {
        let side = grid.len();
        let pts = grid.points();
        let axes = grid.axes();
        let idx: Vec<_> = (0..side).map(|f| grid.unravel(f)).collect();
        let mut sub = vec![0u32; side * side];
        for a in 0..side {
            for b in 0..side {
                let mut flat = 0;
                for (ka, kb) in idx[a][..axes].iter().zip(&idx[b][..axes]) {
                    // lattice difference k_a - k_b, stored at index (k + N/2) mod N
                    flat = flat * pts + (ka + pts + pts / 2 - kb) % pts;
                }
                sub[a * side + b] = flat as u32;
            }
        }
        let zero = (0..side).find(|&f| (0..axes).all(|ax| idx[f][ax] == pts / 2)).unwrap_or(0);
        let neg = (0..side).map(|a| sub[zero * side + a]).collect();
        GroupTables { side, sub, neg }
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.sub[a * self.side + b] as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    /// Flat index of the group origin (all lattice coordinates zero).
    pub fn origin(&self) -> usize {
        self.sub(0, 0)
    }
}

/// `(F <> G)(X, Y) = w sum_Z F(X, Z) G(X - Z, Y - Z)` with modular index arithmetic.
pub fn diamond_compose(f: &DoubleField, g: &DoubleField) -> Result<DoubleField> {
    f.grid.check_same(&g.grid)?;
    let grid = f.grid;
    if grid.len() > 1296 {
        return Err(MoyalError::SizeGuard("crossed product limited to N^{2n} <= 1296".into()));
    }
    let t = GroupTables::new(&grid);
    let s = grid.len();
    let w = grid.pairing_weight();
    // subt[z * s + y] = flat(Y - Z)
    let mut subt = vec![0u32; s * s];
    for y in 0..s {
        for z in 0..s {
            subt[z * s + y] = t.sub(y, z) as u32;
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for x in 0..s {
        let orow = &mut out[x * s..(x + 1) * s];
        for z in 0..s {
            let fv = f.values[x * s + z] * w;
            if fv == C64::new(0.0, 0.0) {
                continue;
            }
            let grow = &g.values[t.sub(x, z) * s..(t.sub(x, z) + 1) * s];
            let map = &subt[z * s..(z + 1) * s];
            for (o, &yz) in orow.iter_mut().zip(map) {
                *o += fv * grow[yz as usize];
            }
        }
    }
    Ok(DoubleField::from_raw(grid, out))
}

/// `F^<>(X, Y) = conj F(X - Y, -Y)`.
pub fn diamond_involution(f: &DoubleField) -> DoubleField {
    let t = GroupTables::new(&f.grid);
    let s = f.side();
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for x in 0..s {
        for y in 0..s {
            out[x * s + y] = f.values[t.sub(x, y) * s + t.neg(y)].conj();
        }
    }
    DoubleField::from_raw(f.grid, out)
}

/// Left and right unit of the crossed product: `[Y = 0] / w`.
pub fn diamond_unit(grid: &PhaseGrid) -> DoubleField {
    let t = GroupTables::new(grid);
    let s = grid.len();
    let o = t.origin();
    let mut out = DoubleField::zeros(grid);
    for x in 0..s {
        out.values[x * s + o] = C64::new(1.0 / grid.pairing_weight(), 0.0);
    }
    out
}

/// `(K ~<> L)(X, Y) = w sum_Z K(X, Z) L(Z, Y)`.
pub fn kernel_compose(k: &DoubleField, l: &DoubleField) -> Result<DoubleField> {
    k.grid.check_same(&l.grid)?;
    let s = k.side();
    let v = linalg::matmul(&k.values, &l.values, s, s, s, k.grid.pairing_weight());
    Ok(DoubleField::from_raw(k.grid, v))
}

/// `K^~(X, Y) = conj K(Y, X)`.
pub fn kernel_involution(k: &DoubleField) -> DoubleField {
    k.transpose().map(|v| v.conj())
}

/// Unit of the kernel product: `[X = Y] / w`.
pub fn kernel_unit(grid: &PhaseGrid) -> DoubleField {
    let s = grid.len();
    let mut out = DoubleField::zeros(grid);
    for x in 0..s {
        out.values[x * s + x] = C64::new(1.0 / grid.pairing_weight(), 0.0);
    }
    out
}

/// `(X, Y) -> K(X, X - Y)`, which carries the kernel product to the crossed product.
pub fn kernel_to_crossed(k: &DoubleField) -> DoubleField {
    let t = GroupTables::new(&k.grid);
    let s = k.side();
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for x in 0..s {
        for y in 0..s {
            out[x * s + y] = k.values[x * s + t.sub(x, y)];
        }
    }
    DoubleField::from_raw(k.grid, out)
}

/// `w^2 sum F(X, Y) G(X, Y)`.
pub fn double_pair(f: &DoubleField, g: &DoubleField) -> Result<C64> {
    f.grid.check_same(&g.grid)?;
    let w = f.grid.pairing_weight();
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<C64>() * w * w)
}

/// `w^2 sum F(X, X - Y) G(Y, Y - X)`.
pub fn twisted_pair(f: &DoubleField, g: &DoubleField) -> Result<C64> {
    f.grid.check_same(&g.grid)?;
    let t = GroupTables::new(&f.grid);
    let s = f.side();
    let w = f.grid.pairing_weight();
    let mut acc = C64::new(0.0, 0.0);
    for x in 0..s {
        for y in 0..s {
            acc += f.values[x * s + t.sub(x, y)] * g.values[y * s + t.sub(y, x)];
        }
    }
    Ok(acc * w * w)
}

/// `(C F)(X, Y) = F(-X, X - Y)`.
pub fn change_vars_c(f: &DoubleField) -> DoubleField {
    let t = GroupTables::new(&f.grid);
    let s = f.side();
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for x in 0..s {
        for y in 0..s {
            out[x * s + y] = f.values[t.neg(x) * s + t.sub(x, y)];
        }
    }
    DoubleField::from_raw(f.grid, out)
}

/// `(X, Y) -> F(-X, -Y)`.
pub fn reflect_both(f: &DoubleField) -> DoubleField {
    let t = GroupTables::new(&f.grid);
    let s = f.side();
    let mut out = vec![C64::new(0.0, 0.0); s * s];
    for x in 0..s {
        for y in 0..s {
            out[x * s + y] = f.values[t.neg(x) * s + t.neg(y)];
        }
    }
    DoubleField::from_raw(f.grid, out)
}

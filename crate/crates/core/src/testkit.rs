//! Deterministic test fields: Gaussians and random unit-modulus mixes of Gaussians.

use crate::grid::{PhaseGrid, SymbolField};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `amp * exp(-a |X - center|^2)` sampled on the grid.
pub fn gaussian(grid: &PhaseGrid, a: f64, center: &[f64], amp: C64) -> SymbolField {
    SymbolField::from_fn(grid, |c| {
        let r2: f64 = c.iter().zip(center).map(|(x, y)| (x - y) * (x - y)).sum();
        amp * (-a * r2).exp()
    })
}

/// Seeded generator of localized test fields.
pub struct FieldSampler {
    rng: ChaCha8Rng,
    grid: PhaseGrid,
    /// Centers are drawn from lattice coordinates with |k| <= band.
    band: i64,
    width: (f64, f64),
}

impl FieldSampler {
    pub fn new(grid: &PhaseGrid, seed: u64) -> Self {
        FieldSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            grid: *grid,
            band: (grid.points() as i64 / 8).max(1),
            width: (0.3, 0.5),
        }
    }

    pub fn with_band(mut self, band: i64) -> Self {
        self.band = band;
        self
    }

    pub fn with_width(mut self, lo: f64, hi: f64) -> Self {
        self.width = (lo, hi);
        self
    }

    fn center(&mut self) -> Vec<f64> {
        let d = self.grid.delta();
        (0..self.grid.axes())
            .map(|_| self.rng.gen_range(-self.band..=self.band) as f64 * d)
            .collect()
    }

    fn phase(&mut self) -> C64 {
        C64::from_polar(1.0, self.rng.gen_range(0.0..std::f64::consts::TAU))
    }

    /// One Gaussian with a grid-point center and random width.
    pub fn gaussian(&mut self) -> SymbolField {
        let a = self.rng.gen_range(self.width.0..=self.width.1);
        let c = self.center();
        gaussian(&self.grid, a, &c, C64::new(1.0, 0.0))
    }

    /// Real Gaussian (unit amplitude) with a grid-point center.
    pub fn real_gaussian(&mut self) -> SymbolField {
        self.gaussian()
    }

    /// Sum of three Gaussians with unit-modulus random coefficients.
    pub fn mix(&mut self) -> SymbolField {
        let mut f = SymbolField::zeros(&self.grid);
        for _ in 0..3 {
            let a = self.rng.gen_range(self.width.0..=self.width.1);
            let c = self.center();
            let amp = self.phase();
            f = f.add(&gaussian(&self.grid, a, &c, amp)).expect("same grid");
        }
        f
    }
}

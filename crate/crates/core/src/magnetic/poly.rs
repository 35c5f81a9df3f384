//! Polynomial 2-forms and 1-forms on configuration space.

use crate::error::{MoyalError, Result};
use serde::{Deserialize, Serialize};

/// Largest total degree accepted for field components.
pub const MAX_FIELD_DEGREE: u32 = 2;
/// Largest total degree accepted for potential components.
pub const MAX_POTENTIAL_DEGREE: u32 = 3;

const COEFF_TOL: f64 = 1e-12;

/// `coeff * prod_j x_j^{var_powers[j]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub var_powers: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Polynomial { terms: vec![Monomial { var_powers: vec![0; n], coeff: c }] }
    }

    /// `c * x_var`.
    pub fn linear(n: usize, var: usize, c: f64) -> Self {
        let mut p = vec![0; n];
        p[var] = 1;
        Polynomial { terms: vec![Monomial { var_powers: p, coeff: c }] }
    }

    pub fn monomial(var_powers: Vec<u32>, coeff: f64) -> Self {
        Polynomial { terms: vec![Monomial { var_powers, coeff }] }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().filter(|m| m.coeff != 0.0).map(|m| m.var_powers.iter().sum()).max().unwrap_or(0)
    }

    fn check_vars(&self, n: usize) -> Result<()> {
        for m in &self.terms {
            if m.var_powers.len() != n {
                return Err(MoyalError::Dimension { expected: n, got: m.var_powers.len() });
            }
            if !m.coeff.is_finite() {
                return Err(MoyalError::Format("non-finite polynomial coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| m.coeff * m.var_powers.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product::<f64>())
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|m| m.var_powers.get(var).copied().unwrap_or(0) > 0)
            .map(|m| {
                let mut p = m.var_powers.clone();
                let e = p[var];
                p[var] -= 1;
                Monomial { var_powers: p, coeff: m.coeff * e as f64 }
            })
            .collect();
        Polynomial { terms }.normalized()
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Polynomial { terms }.normalized()
    }

    pub fn scale(&self, c: f64) -> Self {
        let terms = self.terms.iter().map(|m| Monomial { var_powers: m.var_powers.clone(), coeff: m.coeff * c }).collect();
        Polynomial { terms }.normalized()
    }

    /// Like terms merged, zero terms dropped, sorted by exponent vector.
    pub fn normalized(&self) -> Self {
        let mut terms: Vec<Monomial> = Vec::new();
        for m in &self.terms {
            match terms.iter_mut().find(|t| t.var_powers == m.var_powers) {
                Some(t) => t.coeff += m.coeff,
                None => terms.push(m.clone()),
            }
        }
        terms.retain(|m| m.coeff.abs() > COEFF_TOL);
        terms.sort_by(|a, b| a.var_powers.cmp(&b.var_powers));
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.normalized().terms.is_empty()
    }
}

/// Closed polynomial 2-form, stored by its upper-triangular components `B_jk`, `j < k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagneticField {
    n: usize,
    /// Row-major over pairs `(0,1), (0,2), ..., (n-2, n-1)`.
    upper: Vec<Polynomial>,
}

fn pair_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n);
    // pairs before row j: sum_{r<j} (n - 1 - r)
    j * (2 * n - j - 1) / 2 + (k - j - 1)
}

impl MagneticField {
    /// Build from upper-triangular components; checks degree and closedness.
    pub fn new(n: usize, upper: Vec<Polynomial>) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(MoyalError::Dimension { expected: 2, got: n });
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(MoyalError::Format(format!(
                "expected {} field components for n = {n}, got {}",
                n * (n - 1) / 2,
                upper.len()
            )));
        }
        for p in &upper {
            p.check_vars(n)?;
            if p.degree() > MAX_FIELD_DEGREE {
                return Err(MoyalError::Format(format!("field component degree {} exceeds {MAX_FIELD_DEGREE}", p.degree())));
            }
        }
        let b = MagneticField { n, upper: upper.into_iter().map(|p| p.normalized()).collect() };
        if !b.is_closed() {
            return Err(MoyalError::Gauge("magnetic field is not closed (dB != 0)".into()));
        }
        Ok(b)
    }

    /// Constant `B_12 = b` at `n = 2`.
    pub fn constant(b: f64) -> Self {
        MagneticField { n: 2, upper: vec![Polynomial::constant(2, b).normalized()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `B_jk` with antisymmetry; zero on the diagonal.
    pub fn component(&self, j: usize, k: usize) -> Polynomial {
        use std::cmp::Ordering::*;
        match j.cmp(&k) {
            Equal => Polynomial::zero(),
            Less => self.upper[pair_index(self.n, j, k)].clone(),
            Greater => self.upper[pair_index(self.n, k, j)].scale(-1.0),
        }
    }

    /// `B_jk(x)` for `j < k`, row-major over pairs.
    pub fn eval_upper(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.upper) {
            *o = p.eval(x);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(Polynomial::is_zero)
    }

    /// `d_i B_jk + d_j B_ki + d_k B_ij = 0` for all `i < j < k`.
    pub fn is_closed(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let s = self
                        .component(j, k)
                        .derivative(i)
                        .add(&self.component(k, i).derivative(j))
                        .add(&self.component(i, j).derivative(k));
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Parse and validate a field description.
    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            upper: Vec<Polynomial>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| MoyalError::Format(e.to_string()))?;
        MagneticField::new(raw.n, raw.upper)
    }
}

/// Polynomial 1-form `A = sum_j A_j dx_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorPotential {
    components: Vec<Polynomial>,
}

impl VectorPotential {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        if !(2..=3).contains(&n) {
            return Err(MoyalError::Dimension { expected: 2, got: n });
        }
        for p in &components {
            p.check_vars(n)?;
            if p.degree() > MAX_POTENTIAL_DEGREE {
                return Err(MoyalError::Format(format!(
                    "potential component degree {} exceeds {MAX_POTENTIAL_DEGREE}",
                    p.degree()
                )));
            }
        }
        Ok(VectorPotential { components: components.into_iter().map(|p| p.normalized()).collect() })
    }

    pub fn zero(n: usize) -> Self {
        VectorPotential { components: vec![Polynomial::zero(); n] }
    }

    /// `(-b x_2 / 2, b x_1 / 2)`.
    pub fn symmetric(b: f64) -> Self {
        VectorPotential { components: vec![Polynomial::linear(2, 1, -b / 2.0), Polynomial::linear(2, 0, b / 2.0)] }
    }

    /// `(-b x_2, 0)`.
    pub fn landau(b: f64) -> Self {
        VectorPotential { components: vec![Polynomial::linear(2, 1, -b), Polynomial::zero()] }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, j: usize) -> &Polynomial {
        &self.components[j]
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.components) {
            *o = p.eval(x);
        }
    }

    /// `(dA)_jk = d_j A_k - d_k A_j`.
    pub fn curl(&self) -> MagneticField {
        let n = self.n();
        let mut upper = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                upper.push(self.components[k].derivative(j).add(&self.components[j].derivative(k).scale(-1.0)));
            }
        }
        MagneticField { n, upper }
    }

    /// Symbolic check of `dA = B`.
    pub fn check_generates(&self, b: &MagneticField) -> Result<()> {
        if self.n() != b.n() {
            return Err(MoyalError::Dimension { expected: b.n(), got: self.n() });
        }
        let c = self.curl();
        for (p, q) in c.upper.iter().zip(&b.upper) {
            if !p.add(&q.scale(-1.0)).is_zero() {
                return Err(MoyalError::Gauge("dA does not equal B".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            components: Vec<Polynomial>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| MoyalError::Format(e.to_string()))?;
        VectorPotential::new(raw.components)
    }
}

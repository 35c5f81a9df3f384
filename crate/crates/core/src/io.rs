//! Field files: a JSON manifest next to a little-endian binary of interleaved (re, im) pairs.

use crate::doubled::DoubleField;
use crate::error::{MoyalError, Result};
use crate::grid::{PhaseGrid, SymbolField};
use crate::laws::OperatorKernel;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: u32 = 1;
pub const DTYPE: &str = "complex128-interleaved-le";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Symbol,
    Double,
    Kernel,
}

impl FieldKind {
    /// Index order written in the manifest.
    pub fn order(self) -> &'static str {
        match self {
            FieldKind::Symbol => "row-major-x-then-xi",
            FieldKind::Double => "row-major-X-then-Y",
            FieldKind::Kernel => "row-major-x-then-y",
        }
    }

    fn len(self, grid: &PhaseGrid) -> Option<usize> {
        let pts = grid.points();
        let exp = match self {
            FieldKind::Symbol | FieldKind::Kernel => 2 * grid.n(),
            FieldKind::Double => 4 * grid.n(),
        };
        pts.checked_pow(exp as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub kind: FieldKind,
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    pub delta: f64,
    pub dtype: String,
    pub order: String,
}

impl Manifest {
    pub fn new(kind: FieldKind, grid: &PhaseGrid) -> Self {
        Manifest {
            format_version: FORMAT_VERSION,
            kind,
            n: grid.n(),
            points: grid.points(),
            delta: grid.delta(),
            dtype: DTYPE.into(),
            order: kind.order().into(),
        }
    }

    /// Validated grid; checks version, dtype, order and the recorded step.
    pub fn grid(&self) -> Result<PhaseGrid> {
        if self.format_version != FORMAT_VERSION {
            return Err(MoyalError::Format(format!("unsupported format_version {}", self.format_version)));
        }
        if self.dtype != DTYPE {
            return Err(MoyalError::Format(format!("unsupported dtype {:?}", self.dtype)));
        }
        if self.order != self.kind.order() {
            return Err(MoyalError::Format(format!("order {:?} does not match kind", self.order)));
        }
        let grid = PhaseGrid::new(self.n, self.points).map_err(|e| MoyalError::Format(e.to_string()))?;
        if !self.delta.is_finite() || (self.delta - grid.delta()).abs() > 1e-12 * grid.delta() {
            return Err(MoyalError::Format(format!("delta {} does not match N = {}", self.delta, self.points)));
        }
        Ok(grid)
    }

    pub fn value_count(&self) -> Result<usize> {
        let grid = self.grid()?;
        self.kind.len(&grid).ok_or_else(|| MoyalError::SizeGuard("field size overflows".into()))
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let m: Manifest = serde_json::from_str(text).map_err(|e| MoyalError::Format(e.to_string()))?;
    m.grid()?;
    Ok(m)
}

/// Decode interleaved little-endian pairs; the byte count must match exactly.
pub fn decode_values(bytes: &[u8], count: usize) -> Result<Vec<C64>> {
    let want = count.checked_mul(16).ok_or_else(|| MoyalError::SizeGuard("field size overflows".into()))?;
    if bytes.len() != want {
        return Err(MoyalError::Format(format!("expected {want} bytes, found {}", bytes.len())));
    }
    let mut out = Vec::with_capacity(count);
    for c in bytes.chunks_exact(16) {
        let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
        if !re.is_finite() || !im.is_finite() {
            return Err(MoyalError::Format("non-finite value".into()));
        }
        out.push(C64::new(re, im));
    }
    Ok(out)
}

pub fn encode_values(values: &[C64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 16);
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

/// Any of the three field kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Symbol(SymbolField),
    Double(DoubleField),
    Kernel(OperatorKernel),
}

impl Field {
    pub fn kind(&self) -> FieldKind {
        match self {
            Field::Symbol(_) => FieldKind::Symbol,
            Field::Double(_) => FieldKind::Double,
            Field::Kernel(_) => FieldKind::Kernel,
        }
    }

    pub fn grid(&self) -> &PhaseGrid {
        match self {
            Field::Symbol(f) => f.grid(),
            Field::Double(f) => f.grid(),
            Field::Kernel(f) => f.grid(),
        }
    }

    fn values(&self) -> &[C64] {
        match self {
            Field::Symbol(f) => f.values(),
            Field::Double(f) => f.values(),
            Field::Kernel(f) => f.matrix(),
        }
    }
}

/// Build a field from manifest text and raw bytes.
pub fn decode_field(manifest: &str, bytes: &[u8]) -> Result<Field> {
    let m = parse_manifest(manifest)?;
    let grid = m.grid()?;
    let values = decode_values(bytes, m.value_count()?)?;
    Ok(match m.kind {
        FieldKind::Symbol => Field::Symbol(SymbolField::from_values(&grid, values)?),
        FieldKind::Double => Field::Double(DoubleField::from_values(&grid, values)?),
        FieldKind::Kernel => Field::Kernel(OperatorKernel::from_matrix(&grid, values)?),
    })
}

/// Manifest text and binary payload of a field.
pub fn encode_field(field: &Field) -> (String, Vec<u8>) {
    let m = Manifest::new(field.kind(), field.grid());
    (serde_json::to_string_pretty(&m).expect("serializable"), encode_values(field.values()))
}

/// Binary file paired with a manifest: same stem, `.bin` extension.
pub fn data_path(manifest: &Path) -> PathBuf {
    manifest.with_extension("bin")
}

pub fn read_field(manifest: &Path) -> Result<Field> {
    let text = std::fs::read_to_string(manifest)?;
    let bytes = std::fs::read(data_path(manifest))?;
    decode_field(&text, &bytes)
}

pub fn write_field(manifest: &Path, field: &Field) -> Result<()> {
    let (text, bytes) = encode_field(field);
    std::fs::write(manifest, text)?;
    std::fs::write(data_path(manifest), bytes)?;
    Ok(())
}

pub fn read_symbol(manifest: &Path) -> Result<SymbolField> {
    match read_field(manifest)? {
        Field::Symbol(f) => Ok(f),
        other => Err(MoyalError::Format(format!("expected a symbol field, found {:?}", other.kind()))),
    }
}

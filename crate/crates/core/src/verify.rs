//! The conformance suite: every registered check run against one law on one grid.

use crate::doubled::{rel_diff2, twisted_pair};
use crate::error::{MoyalError, Result};
use crate::grid::{self, make_grid, PhaseGrid, PhasePoint, SymbolField};
use crate::laws::{self, law_by_name, CompositionLaw, WeylDirect, WeylFast};
use crate::magnetic::{self, MagneticLaw};
use crate::modulation::{self, Window, MAX_SIDE};
use crate::testkit::{gaussian, FieldSampler};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Bumped whenever a check id, tolerance or field recipe changes.
pub const REGISTRY_VERSION: u32 = 1;

/// Check ids in report order.
pub const CHECK_IDS: [&str; 27] = [
    "fourier_involution",
    "fourier_unitarity",
    "plancherel",
    "crichi",
    "cyclicity",
    "involution",
    "unit",
    "associativity",
    "theta_translation",
    "hypothesis_c",
    "n_definition",
    "m_relation",
    "r_definition",
    "r_relation",
    "unitarity",
    "morphism",
    "morphism_involution",
    "inversion",
    "cstar_norm",
    "completeness",
    "stft_proportionality",
    "closed_form_gap",
    "oracle_gap",
    "gauge_covariance",
    "stokes",
    "cocycle",
    "aut_theta",
];

/// Largest grid side per dimension the suite accepts.
pub fn suite_limit(n: usize) -> usize {
    match n {
        1 => 32,
        2 => 8,
        _ => 4,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ExpectedFail,
    NonCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub status: Status,
    pub defect: f64,
    pub tolerance: f64,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub registry_version: u32,
    pub law: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    /// No check failed unexpectedly.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check_id == id)
    }

    /// Same report with runtimes zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.runtime_ms = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite defects serialize")
    }

    /// Parse and validate a report: known version, each registry id exactly once.
    pub fn from_json(text: &str) -> Result<Self> {
        let r: CheckReport = serde_json::from_str(text).map_err(|e| MoyalError::Format(e.to_string()))?;
        if r.registry_version != REGISTRY_VERSION {
            return Err(MoyalError::Format(format!("registry version {} is not {REGISTRY_VERSION}", r.registry_version)));
        }
        if r.checks.len() != CHECK_IDS.len() || CHECK_IDS.iter().any(|id| r.checks.iter().filter(|c| c.check_id == *id).count() != 1) {
            return Err(MoyalError::Format("report does not list every registered check exactly once".into()));
        }
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum LawKind {
    Weyl,
    Magnetic,
    /// Laws without translation averaging, such as pointwise multiplication.
    Plain,
}

/// What a check is expected to do under one law.
#[derive(Clone, Copy, Debug)]
enum Expect {
    Below(f64),
    /// The failure is the known outcome; defects under `floor` are reported as a real failure.
    FailAbove(f64),
    Skip,
}

struct Outcome {
    defect: f64,
    note: Option<String>,
    /// False when a guard stopped the check before it measured anything.
    measured: bool,
}

impl Outcome {
    fn of(defect: f64) -> Self {
        Outcome { defect, note: None, measured: true }
    }

    fn noted(defect: f64, note: impl Into<String>) -> Self {
        Outcome { defect, note: Some(note.into()), measured: true }
    }

    fn skipped(note: impl Into<String>) -> Self {
        Outcome { defect: 0.0, note: Some(note.into()), measured: false }
    }
}

struct Suite<'a> {
    law: &'a dyn CompositionLaw,
    magnetic: Option<&'a MagneticLaw>,
    kind: LawKind,
    grid: PhaseGrid,
    seed: u64,
}

impl Suite<'_> {
    fn sampler(&self, slot: usize) -> FieldSampler {
        FieldSampler::new(&self.grid, self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(slot as u64))
    }

    fn doubled_fits(&self) -> bool {
        self.grid.len() <= MAX_SIDE
    }

    fn expectation(&self, id: &str) -> Expect {
        use Expect::*;
        use LawKind::*;
        let k = self.kind;
        match id {
            "fourier_involution" | "fourier_unitarity" => Below(1e-12),
            "plancherel" => Below(1e-10),
            "crichi" | "cyclicity" => Below(1e-6),
            "involution" => Below(1e-10),
            "unit" | "associativity" => Below(1e-8),
            "theta_translation" if k == Weyl => Below(1e-8),
            "hypothesis_c" => match k {
                Weyl => Below(1e-6),
                Magnetic => Below(1e-3),
                Plain => FailAbove(0.1),
            },
            "unitarity" => match k {
                Plain => FailAbove(0.1),
                _ => Below(1e-4),
            },
            "n_definition" | "r_definition" | "r_relation" => Below(1e-6),
            "m_relation" => Below(1e-10),
            // consequences of translation averaging: no claim without it
            "morphism" | "morphism_involution" | "inversion" | "cstar_norm" if k == Plain => Skip,
            "morphism" => Below(1e-3),
            "morphism_involution" => Below(1e-6),
            "inversion" => Below(1e-4),
            "cstar_norm" => Below(1e-3),
            "stft_proportionality" if k == Weyl => Below(1e-3),
            "gauge_covariance" if k == Magnetic => Below(1e-6),
            "stokes" if k == Magnetic => Below(1e-12),
            "cocycle" | "aut_theta" if k == Magnetic => Below(1e-3),
            _ => Skip,
        }
    }

    fn run(&self, id: &str) -> Result<Outcome> {
        let law = self.law;
        let grid = self.grid;
        let slot = CHECK_IDS.iter().position(|c| *c == id).expect("registered id");
        let mut s = self.sampler(slot);
        let needs_doubled = matches!(
            id,
            "n_definition" | "m_relation" | "r_definition" | "r_relation" | "unitarity" | "morphism" | "morphism_involution"
                | "inversion" | "cstar_norm" | "stft_proportionality" | "closed_form_gap"
        );
        if needs_doubled && !self.doubled_fits() {
            return Ok(Outcome::skipped(format!("doubled grid side {} exceeds {MAX_SIDE}", grid.len())));
        }
        Ok(match id {
            "fourier_involution" => Outcome::of(grid::check_fourier_involution(&s.mix())),
            "fourier_unitarity" => Outcome::of(grid::check_fourier_unitarity(&s.mix(), &s.mix())?),
            "plancherel" => Outcome::of(grid::check_resolution_identity(&s.mix(), &s.mix())?),
            "crichi" => Outcome::of(laws::check_integral_identity(law, &s.mix(), &s.mix())?),
            "cyclicity" => Outcome::of(laws::check_cyclicity(law, &s.mix(), &s.mix(), &s.mix())?),
            "involution" => Outcome::of(laws::check_involution(law, &s.mix(), &s.mix())?),
            "unit" => Outcome::of(laws::check_unit(law, &s.mix())?),
            "associativity" => Outcome::of(laws::check_associativity(law, &s.mix(), &s.mix(), &s.mix())?),
            "theta_translation" => {
                let f = s.mix();
                let mut worst: f64 = 0.0;
                for z in self.lattice_shifts(3) {
                    let pz = PhasePoint::on_grid(&grid, &z)?;
                    let t = laws::theta_translate(law, &f, &pz)?;
                    worst = worst.max(grid::rel_diff(&t, &grid::translate(&f, &pz.neg())?));
                }
                Outcome::of(worst)
            }
            "hypothesis_c" => {
                let (f, g) = (s.mix(), s.mix());
                let h = match self.magnetic {
                    Some(m) => {
                        if grid.points() > 8 {
                            return Ok(Outcome::skipped("magnetic translations limited to N <= 8"));
                        }
                        magnetic::check_magnetic_hypothesis_c(m.field(), &f, &g)?
                    }
                    None => laws::check_hypothesis_c(law, &f, &g)?,
                };
                Outcome::of(h.defect)
            }
            "n_definition" => {
                Outcome::of(modulation::check_n_definition(law, &s.mix(), &s.mix(), &s.mix(), &s.mix())?)
            }
            "m_relation" => Outcome::of(modulation::check_m_relation(law, &s.mix(), &s.mix())?),
            "r_definition" => {
                Outcome::of(modulation::check_r_definition(law, &s.mix(), &s.mix(), &s.mix(), &s.mix())?)
            }
            "r_relation" => Outcome::of(modulation::check_r_relation(law, &s.mix(), &s.mix())?),
            "unitarity" => {
                let f: Vec<SymbolField> = (0..4).map(|_| s.gaussian()).collect();
                let d = modulation::check_unitarity(law, &f[0], &f[1], &f[2], &f[3])?;
                // the same Gram defect under the twisted pairing, recorded alongside
                let a = modulation::map_m(law, &f[0], &f[1])?.map(|v| v.conj());
                let b = modulation::map_m(law, &f[2], &f[3])?;
                let want = grid::hermitian_pair(&f[0], &f[2])? * grid::hermitian_pair(&f[1], &f[3])?;
                let t = (twisted_pair(&a, &b)? - want).norm() / (want.norm() + laws::EPS);
                Outcome::noted(d, format!("twisted pairing defect {t:.3e}"))
            }
            "morphism" => {
                let f: Vec<SymbolField> = (0..4).map(|_| s.mix()).collect();
                Outcome::of(modulation::check_morphism(law, &f[0], &f[1], &f[2], &f[3])?)
            }
            "morphism_involution" => Outcome::of(modulation::check_morphism_involution(law, &s.mix(), &s.mix())?),
            "inversion" => {
                let h = modulation::gaussian_window(law, &grid, 0.5)?;
                let k = modulation::gaussian_window(law, &grid, 0.7)?;
                Outcome::of(modulation::check_inversion_generic(law, &s.mix(), &h, &k)?)
            }
            "cstar_norm" => {
                // rank-one symbol: a shifted coherent state, with the unshifted one as window
                let amp = C64::new(2f64.powi(grid.n() as i32), 0.0);
                let origin = vec![0.0; grid.axes()];
                let h = Window::new(&WeylFast, gaussian(&grid, 1.0, &origin, amp))?;
                if self.kind == LawKind::Magnetic {
                    // the coherent-state projection belongs to the Weyl product
                    let d = Window::new(law, h.h.clone())?.idempotency_defect;
                    return Ok(Outcome::skipped(format!("no idempotent window for this law (coherent state defect {d:.3e})")));
                }
                let center: Vec<f64> = self.lattice_shifts(1)[0].iter().map(|k| *k as f64 * grid.delta()).collect();
                let f = gaussian(&grid, 1.0, &center, amp);
                Outcome::of(modulation::check_cstar_norm(law, &f, &h)?)
            }
            "completeness" => Outcome::noted(0.0, "continuum statement; no finite-grid check"),
            "stft_proportionality" => {
                let h = modulation::gaussian_window(law, &grid, 0.5)?;
                let p = modulation::stft_proportionality(law, &s.mix(), &h)?;
                Outcome::noted(p.std_dev / p.mean.max(1e-300), format!("mean ratio {:.6e} over {} points", p.mean, p.points))
            }
            "closed_form_gap" => {
                if self.kind != LawKind::Weyl {
                    return Ok(Outcome::skipped("closed form exists for the Weyl law only"));
                }
                let f = s.mix();
                let h = modulation::gaussian_window(law, &grid, 0.5)?;
                let a = modulation::mod_map_generic(law, &f, &h)?;
                let b = modulation::mod_map_closed_form(&f, &h.h)?;
                Outcome::noted(rel_diff2(&a, &b), "measurement: closed form against the definitional map")
            }
            "oracle_gap" => {
                if self.kind != LawKind::Weyl {
                    return Ok(Outcome::skipped("oracle exists for the Weyl law only"));
                }
                if grid.points() > laws::direct_size_limit(grid.n()) {
                    return Ok(Outcome::skipped("grid above the direct quadrature limit"));
                }
                let (f, g) = (s.mix(), s.mix());
                let d = grid::rel_diff(&WeylFast.compose(&f, &g)?, &WeylDirect.compose(&f, &g)?);
                Outcome::noted(d, "measurement: fast product against direct quadrature")
            }
            "gauge_covariance" => {
                let m = self.magnetic.expect("magnetic law");
                let pots = magnetic::gauge_variants(m);
                let d = magnetic::check_gauge_covariance(m.field(), &pots, &s.mix(), &s.mix())?;
                Outcome::noted(d, format!("{} potentials", pots.len()))
            }
            "stokes" => {
                let m = self.magnetic.expect("magnetic law");
                let half = 0.5 * grid.points() as f64 * grid.delta();
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ slot as u64);
                let tris: Vec<[Vec<f64>; 3]> = (0..20)
                    .map(|_| {
                        let mut v = || (0..grid.n()).map(|_| rng.gen_range(-half..half)).collect::<Vec<f64>>();
                        [v(), v(), v()]
                    })
                    .collect();
                Outcome::of(magnetic::check_stokes(m.potential(), &tris))
            }
            "cocycle" => {
                let m = self.magnetic.expect("magnetic law");
                if grid.points() > 8 {
                    return Ok(Outcome::skipped("limited to N <= 8"));
                }
                let mut x = vec![0i64; grid.axes()];
                let mut y = vec![0i64; grid.axes()];
                x[0] = 1;
                y[1] = 1;
                let c = magnetic::check_cocycle(m, &grid, &x, &y)?;
                Outcome::noted(c.composed, format!("pointwise reading {:.3e}", c.pointwise))
            }
            "aut_theta" => {
                let m = self.magnetic.expect("magnetic law");
                if grid.points() > magnetic::DIRECT_LIMIT {
                    return Ok(Outcome::skipped(format!("limited to N <= {}", magnetic::DIRECT_LIMIT)));
                }
                let f = s.mix();
                let mut worst: f64 = 0.0;
                for z in self.lattice_shifts(3) {
                    worst = worst.max(magnetic::check_theta_routes(m, &f, &z)?);
                }
                Outcome::of(worst)
            }
            _ => unreachable!("unregistered check {id}"),
        })
    }

    /// Small nonzero lattice shifts drawn from the seed.
    fn lattice_shifts(&self, count: usize) -> Vec<Vec<i64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.rotate_left(17));
        (0..count)
            .map(|_| loop {
                let z: Vec<i64> = (0..self.grid.axes()).map(|_| rng.gen_range(-1..=1)).collect();
                if z.iter().any(|v| *v != 0) {
                    break z;
                }
            })
            .collect()
    }
}

/// Run every registered check for `law_id` on the `(n, N)` grid.
pub fn run_suite(law_id: &str, n: usize, points: usize, seed: u64) -> Result<CheckReport> {
    let grid = make_grid(n, points)?;
    if points > suite_limit(n) {
        return Err(MoyalError::SizeGuard(format!("suite runs with N <= {} for n = {n}", suite_limit(n))));
    }
    let magnetic = magnetic::magnetic_law_by_name(law_id);
    let boxed = if magnetic.is_none() {
        Some(law_by_name(law_id).ok_or_else(|| MoyalError::Invalid(format!("unknown law {law_id:?}")))?)
    } else {
        None
    };
    let law: &dyn CompositionLaw = match (&magnetic, &boxed) {
        (Some(m), _) => m,
        (None, Some(b)) => b.as_ref(),
        _ => unreachable!(),
    };
    if let Some(m) = &magnetic {
        if m.field().n() != n {
            return Err(MoyalError::Dimension { expected: m.field().n(), got: n });
        }
    }
    let kind = if magnetic.is_some() {
        LawKind::Magnetic
    } else if law.satisfies_c_expected() {
        LawKind::Weyl
    } else {
        LawKind::Plain
    };
    let suite = Suite { law, magnetic: magnetic.as_ref(), kind, grid, seed };
    let mut checks = Vec::with_capacity(CHECK_IDS.len());
    for id in CHECK_IDS {
        let expect = suite.expectation(id);
        let start = Instant::now();
        let (status, defect, tolerance, note) = match expect {
            Expect::Skip => {
                let note = if suite.kind == LawKind::Plain && matches!(id, "morphism" | "morphism_involution" | "inversion" | "cstar_norm") {
                    Some("law does not average over translations; no claim".to_string())
                } else if matches!(id, "closed_form_gap" | "oracle_gap" | "completeness") {
                    None
                } else {
                    Some("not applicable to this law".to_string())
                };
                match note {
                    Some(n) => (Status::NonCheck, 0.0, 0.0, Some(n)),
                    None => {
                        let o = suite.run(id)?;
                        (Status::NonCheck, o.defect, 0.0, o.note)
                    }
                }
            }
            Expect::Below(tol) => {
                let o = suite.run(id)?;
                let status = if !o.measured {
                    Status::NonCheck
                } else if o.defect <= tol {
                    Status::Pass
                } else {
                    Status::Fail
                };
                (status, o.defect, tol, o.note)
            }
            Expect::FailAbove(floor) => {
                let o = suite.run(id)?;
                let status = if !o.measured {
                    Status::NonCheck
                } else if o.defect >= floor {
                    Status::ExpectedFail
                } else {
                    Status::Fail
                };
                (status, o.defect, floor, o.note)
            }
        };
        checks.push(CheckResult {
            check_id: id.to_string(),
            status,
            defect,
            tolerance,
            runtime_ms: start.elapsed().as_millis() as u64,
            note,
        });
    }
    Ok(CheckReport { registry_version: REGISTRY_VERSION, law: law_id.to_string(), n, points, seed, checks })
}

/// One line of a report comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "change", rename_all = "snake_case")]
pub enum ReportDiff {
    Status { check_id: String, from: Status, to: Status },
    Defect { check_id: String, from: f64, to: f64 },
}

impl ReportDiff {
    pub fn check_id(&self) -> &str {
        match self {
            ReportDiff::Status { check_id, .. } | ReportDiff::Defect { check_id, .. } => check_id,
        }
    }
}

/// Defects below this are treated as equal to it when measuring moves.
const DEFECT_FLOOR: f64 = 1e-14;

/// Checks whose status changed or whose defect moved by more than a factor of ten.
pub fn compare_reports(a: &CheckReport, b: &CheckReport) -> Result<Vec<ReportDiff>> {
    if a.registry_version != b.registry_version {
        return Err(MoyalError::Invalid(format!(
            "registry mismatch: {} against {}",
            a.registry_version, b.registry_version
        )));
    }
    let ids = |r: &CheckReport| r.checks.iter().map(|c| c.check_id.clone()).collect::<Vec<_>>();
    if ids(a) != ids(b) {
        return Err(MoyalError::Invalid("registry mismatch: check lists differ".into()));
    }
    let mut out = Vec::new();
    for (x, y) in a.checks.iter().zip(&b.checks) {
        if x.status != y.status {
            out.push(ReportDiff::Status { check_id: x.check_id.clone(), from: x.status, to: y.status });
            continue;
        }
        let (p, q) = (x.defect.max(DEFECT_FLOOR), y.defect.max(DEFECT_FLOOR));
        if p / q > 10.0 || q / p > 10.0 {
            out.push(ReportDiff::Defect { check_id: x.check_id.clone(), from: x.defect, to: y.defect });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_once_and_json_round_trip() {
        let r = run_suite("pointwise", 1, 8, 3).unwrap();
        assert_eq!(r.checks.len(), CHECK_IDS.len());
        let back = CheckReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let mut broken = r.clone();
        broken.checks.pop();
        assert!(CheckReport::from_json(&broken.to_json()).is_err());
    }

    #[test]
    fn guards_and_unknown_laws() {
        assert!(run_suite("nope", 1, 8, 1).is_err());
        assert!(run_suite("weyl", 1, 64, 1).is_err());
        assert!(run_suite("weyl", 1, 15, 1).is_err());
        assert!(matches!(run_suite("magnetic-b1", 1, 8, 1), Err(MoyalError::Dimension { .. })));
    }

    #[test]
    fn pointwise_expected_failures() {
        let r = run_suite("pointwise", 1, 16, 7).unwrap();
        assert!(r.ok(), "{}", r.to_json());
        for id in ["hypothesis_c", "unitarity"] {
            assert_eq!(r.get(id).unwrap().status, Status::ExpectedFail);
        }
        for id in ["crichi", "cyclicity", "associativity"] {
            assert_eq!(r.get(id).unwrap().status, Status::Pass);
        }
    }

    #[test]
    fn comparison() {
        let a = run_suite("pointwise", 1, 8, 1).unwrap();
        assert!(compare_reports(&a, &a).unwrap().is_empty());
        let mut b = a.clone();
        b.registry_version += 1;
        assert!(compare_reports(&a, &b).is_err());
        let mut c = a.clone();
        c.checks[3].defect = 1.0;
        c.checks[4].status = Status::Fail;
        let d = compare_reports(&a, &c).unwrap();
        assert_eq!(d.iter().map(|x| x.check_id()).collect::<Vec<_>>(), ["crichi", "cyclicity"]);
    }
}

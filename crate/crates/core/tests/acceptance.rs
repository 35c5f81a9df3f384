//! Acceptance run: one PASS/FAIL line per criterion, with measured values.
//!
//! Criteria that the discretization cannot reach are still evaluated at their stated
//! tolerance and print FAIL; the process exits nonzero only on an internal error.

use moyal::doubled::{self, diamond_compose, kernel_compose, kernel_to_crossed, rel_diff2, twisted_pair, DoubleField};
use moyal::grid::{self, make_grid, rel_diff, PhaseGrid, PhasePoint, SymbolField};
use moyal::laws::{self, weyl_compose_direct, weyl_compose_fast, CompositionLaw, Pointwise, WeylDirect, WeylFast};
use moyal::magnetic::{self, MagneticLaw};
use moyal::modulation::{self, Exponent, ModNormSpec};
use moyal::testkit::{gaussian, FieldSampler};
use moyal::verify::{run_suite, Status};
use moyal::{Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    summary: String,
    info: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Verdict { pass, summary: summary.into(), info: Vec::new() }
    }

    fn info(mut self, line: impl Into<String>) -> Self {
        self.info.push(line.into());
        self
    }
}

fn grid(n: usize, points: usize) -> PhaseGrid {
    make_grid(n, points).expect("valid grid")
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn in_time(t: Duration, limit_s: f64) -> bool {
    t.as_secs_f64() < limit_s
}

fn fourier() -> Result<Verdict> {
    let start = Instant::now();
    let mut inv: f64 = 0.0;
    let mut uni: f64 = 0.0;
    for points in [16, 32] {
        let g = grid(1, points);
        let mut s = FieldSampler::new(&g, 1);
        for _ in 0..5 {
            let (f, h) = (s.mix(), s.mix());
            inv = inv.max(grid::check_fourier_involution(&f));
            uni = uni.max(grid::check_fourier_unitarity(&f, &h)?);
        }
    }
    let t = start.elapsed();
    Ok(Verdict::new(
        inv <= 1e-12 && uni <= 1e-12 && in_time(t, 1.0),
        format!("F^2 = id {inv:.2e}, unitarity {uni:.2e} (tol 1e-12), {t:.2?}"),
    ))
}

fn plancherel() -> Result<Verdict> {
    let start = Instant::now();
    let g = grid(1, 16);
    let mut s = FieldSampler::new(&g, 2);
    let mut d: f64 = 0.0;
    for _ in 0..10 {
        d = d.max(grid::check_resolution_identity(&s.mix(), &s.mix())?);
    }
    let t = start.elapsed();
    Ok(Verdict::new(d <= 1e-10 && in_time(t, 5.0), format!("resolution identity {d:.2e} over 10 pairs (tol 1e-10), {t:.2?}")))
}

fn hypothesis_a() -> Result<Verdict> {
    let start = Instant::now();
    let g = grid(1, 32);
    let mut s = FieldSampler::new(&g, 3);
    let (mut crichi, mut cyc, mut inv, mut unit) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..3 {
        let (f1, f2, f3) = (s.mix(), s.mix(), s.mix());
        crichi = crichi.max(laws::check_integral_identity(&WeylFast, &f1, &f2)?);
        cyc = cyc.max(laws::check_cyclicity(&WeylFast, &f1, &f2, &f3)?);
        inv = inv.max(laws::check_involution(&WeylFast, &f1, &f2)?);
        unit = unit.max(laws::check_unit(&WeylFast, &f1)?);
    }
    let g16 = grid(1, 16);
    let mut s16 = FieldSampler::new(&g16, 3);
    let (f, h, k) = (s16.mix(), s16.mix(), s16.mix());
    let oc = laws::check_integral_identity(&WeylDirect, &f, &h)?;
    let oy = laws::check_cyclicity(&WeylDirect, &f, &h, &k)?;
    let t = start.elapsed();
    let pass = crichi <= 1e-6 && cyc <= 1e-6 && inv <= 1e-10 && unit <= 1e-8 && in_time(t, 60.0);
    Ok(Verdict::new(
        pass,
        format!("N=32 crichi {crichi:.2e}, cyclicity {cyc:.2e}, involution {inv:.2e}, unit {unit:.2e}, {t:.2?}"),
    )
    .info(format!("direct quadrature at N=16: crichi {oc:.2e}, cyclicity {oy:.2e}")))
}

fn fast_vs_oracle() -> Result<Verdict> {
    let start = Instant::now();
    let gap = |points: usize| -> Result<f64> {
        let g = grid(1, points);
        let mut s = FieldSampler::new(&g, 4);
        let mut d: f64 = 0.0;
        for _ in 0..5 {
            let (f, h) = (s.gaussian(), s.gaussian());
            d = d.max(rel_diff(&weyl_compose_fast(&f, &h)?, &weyl_compose_direct(&f, &h)?));
        }
        Ok(d)
    };
    let d16 = gap(16)?;
    let t = start.elapsed();
    let d32 = gap(32)?;
    Ok(Verdict::new(d16 <= 1e-6 && in_time(t, 30.0), format!("N=16 worst of 5 Gaussian pairs {d16:.2e} (tol 1e-6), {t:.2?}"))
        .info(format!("same pairs at N=32: {d32:.2e}")))
}

fn theta_translation() -> Result<Verdict> {
    let g = grid(1, 16);
    let f = FieldSampler::new(&g, 5).mix();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut d: f64 = 0.0;
    for _ in 0..10 {
        let k: Vec<i64> = (0..2).map(|_| rng.gen_range(-8..8)).collect();
        let z = PhasePoint::on_grid(&g, &k)?;
        let t = laws::theta_translate(&WeylFast, &f, &z)?;
        d = d.max(rel_diff(&t, &grid::translate(&f, &z.neg())?));
    }
    Ok(Verdict::new(d <= 1e-8, format!("e_-Z # f # e_Z against f(. + Z), 10 points: {d:.2e} (tol 1e-8)")))
}

fn hypothesis_c() -> Result<Verdict> {
    let g = grid(1, 32);
    let mut s = FieldSampler::new(&g, 6);
    let (f, h) = (s.mix(), s.mix());
    let weyl = laws::check_hypothesis_c(&WeylFast, &f, &h)?.defect;
    let point = laws::check_hypothesis_c(&Pointwise, &f, &h)?.defect;
    let report = run_suite("pointwise", 1, 16, 7)?;
    let status = report.get("hypothesis_c").map(|c| c.status);
    Ok(Verdict::new(
        weyl <= 1e-6 && point >= 0.1 && status == Some(Status::ExpectedFail),
        format!("Weyl {weyl:.2e} (tol 1e-6); pointwise {point:.2e} (>= 0.1), suite status {status:?}"),
    ))
}

fn idempotent_window() -> Result<Verdict> {
    let w = modulation::idempotent_window(&grid(1, 32))?;
    let norm_err = (w.norm2 - 1.0).abs();
    let coarse = match modulation::idempotent_window(&grid(1, 16)) {
        Ok(w) => format!("{:.2e}", w.idempotency_defect),
        Err(e) => e.to_string(),
    };
    Ok(Verdict::new(
        w.idempotency_defect <= 1e-6 && w.realness_defect <= 1e-6 && norm_err <= 1e-8,
        format!(
            "N=32 idempotency {:.2e}, realness {:.2e}, |norm2 - 1| {norm_err:.2e}",
            w.idempotency_defect, w.realness_defect
        ),
    )
    .info(format!("N=16: {coarse}")))
}

fn mapping_structure() -> Result<Verdict> {
    let g = grid(1, 16);
    let mut s = FieldSampler::new(&g, 8);
    let (f, h, g1, g2) = (s.mix(), s.mix(), s.mix(), s.mix());
    let m = modulation::check_m_relation(&WeylFast, &f, &h)?;
    let r = modulation::check_r_definition(&WeylFast, &f, &h, &g1, &g2)?;
    let rd = modulation::check_r_relation(&WeylFast, &f, &h)?;
    Ok(Verdict::new(
        m <= 1e-10 && r <= 1e-10 && rd <= 1e-6,
        format!("M = N after C {m:.2e}, Fourier route of R against its pairing {r:.2e} (tol 1e-10); delta route {rd:.2e} (tol 1e-6)"),
    ))
}

fn unitarity() -> Result<Verdict> {
    let g = grid(1, 32);
    let mut s = FieldSampler::new(&g, 9);
    let mut d: f64 = 0.0;
    let mut twisted: f64 = 0.0;
    for _ in 0..3 {
        let f: Vec<SymbolField> = (0..4).map(|_| s.gaussian()).collect();
        d = d.max(modulation::check_unitarity(&WeylFast, &f[0], &f[1], &f[2], &f[3])?);
        let a = modulation::map_m(&WeylFast, &f[0], &f[1])?.map(|v| v.conj());
        let b = modulation::map_m(&WeylFast, &f[2], &f[3])?;
        let want = grid::hermitian_pair(&f[0], &f[2])? * grid::hermitian_pair(&f[1], &f[3])?;
        twisted = twisted.max((twisted_pair(&a, &b)? - want).norm() / want.norm());
    }
    let point = {
        let g16 = grid(1, 16);
        let mut s = FieldSampler::new(&g16, 9);
        let f: Vec<SymbolField> = (0..4).map(|_| s.gaussian()).collect();
        modulation::check_unitarity(&Pointwise, &f[0], &f[1], &f[2], &f[3])?
    };
    let status = run_suite("pointwise", 1, 16, 7)?.get("unitarity").map(|c| c.status);
    Ok(Verdict::new(
        d <= 1e-4 && point >= 0.1 && status == Some(Status::ExpectedFail),
        format!("Weyl N=32 Gram defect {d:.2e} (tol 1e-4); pointwise {point:.2e}, suite status {status:?}"),
    )
    .info(format!("Gram defect under the twisted pairing: {twisted:.2e}")))
}

fn morphism() -> Result<Verdict> {
    let start = Instant::now();
    let g = grid(1, 16);
    let mut s = FieldSampler::new(&g, 10);
    let f: Vec<SymbolField> = (0..4).map(|_| s.mix()).collect();
    let m = modulation::check_morphism(&WeylFast, &f[0], &f[1], &f[2], &f[3])?;
    let i = modulation::check_morphism_involution(&WeylFast, &f[0], &f[1])?;
    let t = start.elapsed();
    Ok(Verdict::new(
        m <= 1e-3 && i <= 1e-6 && in_time(t, 120.0),
        format!("N=16 morphism {m:.2e} (tol 1e-3), involution {i:.2e} (tol 1e-6), {t:.2?}"),
    ))
}

fn inversion() -> Result<Verdict> {
    let g = grid(1, 32);
    let f = FieldSampler::new(&g, 11).mix();
    let pairs = [(0.5, 0.5), (0.5, 0.8), (0.3, 1.0)];
    let mut d: f64 = 0.0;
    let mut generic: f64 = 0.0;
    for (a, b) in pairs {
        let h = modulation::gaussian_window(&WeylFast, &g, a)?;
        let k = modulation::gaussian_window(&WeylFast, &g, b)?;
        d = d.max(modulation::check_inversion(&WeylFast, &f, &h, &k)?);
        generic = generic.max(modulation::check_inversion_generic(&WeylFast, &f, &h, &k)?);
    }
    Ok(Verdict::new(d <= 1e-4, format!("N=32 closed-form route, 3 window pairs: {d:.2e} (tol 1e-4)"))
        .info(format!("definitional route: {generic:.2e}")))
}

fn random_double(g: &PhaseGrid, seed: u64) -> DoubleField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = g.len();
    let v = (0..s * s).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    DoubleField::from_values(g, v).expect("sized")
}

fn crossed_product() -> Result<Verdict> {
    let g = grid(1, 8);
    let (f, h, k) = (random_double(&g, 1), random_double(&g, 2), random_double(&g, 3));
    let assoc = rel_diff2(
        &diamond_compose(&diamond_compose(&f, &h)?, &k)?,
        &diamond_compose(&f, &diamond_compose(&h, &k)?)?,
    );
    let l = twisted_pair(&diamond_compose(&f, &h)?, &k)?;
    let r = twisted_pair(&f, &diamond_compose(&h, &k)?)?;
    let duality = (l - r).norm() / r.norm();
    let mut remap: f64 = 0.0;
    for i in 0..20 {
        let (a, b) = (random_double(&g, 100 + 2 * i), random_double(&g, 101 + 2 * i));
        let lhs = diamond_compose(&kernel_to_crossed(&a), &kernel_to_crossed(&b))?;
        let rhs = kernel_to_crossed(&kernel_compose(&a, &b)?);
        remap = remap.max(rel_diff2(&lhs, &rhs));
        let inv = rel_diff2(
            &kernel_to_crossed(&doubled::kernel_involution(&a)),
            &doubled::diamond_involution(&kernel_to_crossed(&a)),
        );
        remap = remap.max(inv);
    }
    Ok(Verdict::new(
        assoc <= 1e-12 && duality <= 1e-12 && remap <= 1e-12,
        format!("N=8 associativity {assoc:.2e}, duality {duality:.2e}, remap over 20 pairs {remap:.2e} (tol 1e-12)"),
    ))
}

fn cstar_norm() -> Result<Verdict> {
    let g = grid(1, 32);
    let h = modulation::idempotent_window(&g)?;
    let f = FieldSampler::new(&g, 12).mix();
    let d = modulation::check_cstar_norm(&WeylFast, &f, &h)?;
    let self_case = modulation::check_cstar_norm(&WeylFast, &h.h, &h)?;
    let shifted = gaussian(&g, 1.0, &[2.0 * g.delta(), -g.delta()], C64::new(2.0, 0.0));
    let projection = modulation::check_cstar_norm(&WeylFast, &shifted, &h)?;
    let spec = ModNormSpec { p: Exponent::Finite(2.0), q: Exponent::Finite(2.0), window: h.clone() };
    let lhs = modulation::modulation_norm(&WeylFast, &WeylFast.compose(&f.conj(), &f)?, &spec)?;
    let rhs = modulation::modulation_norm(&WeylFast, &f, &spec)?.powi(2);
    Ok(Verdict::new(d <= 1e-3, format!("N=32 generic field: {d:.2e} (tol 1e-3)"))
        .info(format!("generic field: ||conj f # f|| = {lhs:.6e}, ||f||^2 = {rhs:.6e}"))
        .info(format!("f = h: {self_case:.2e}; shifted coherent state: {projection:.2e}")))
}

fn stft() -> Result<Verdict> {
    let g = grid(1, 16);
    let h = modulation::gaussian_window(&WeylFast, &g, 0.5)?;
    let mut s = FieldSampler::new(&g, 13);
    let mut spread: f64 = 0.0;
    let mut means = Vec::new();
    for _ in 0..5 {
        let p = modulation::stft_proportionality(&WeylFast, &s.mix(), &h)?;
        spread = spread.max(p.std_dev);
        means.push(format!("{:.6}", p.mean));
    }
    Ok(Verdict::new(spread <= 1e-3, format!("5 fields, worst standard deviation {spread:.2e} (tol 1e-3)"))
        .info(format!("measured constant c per field: {}", means.join(", "))))
}

fn magnetic_suite() -> Result<Verdict> {
    let start = Instant::now();
    let law = |id: &str| magnetic::magnetic_law_by_name(id).expect("shipped");
    let shipped = [law("magnetic-b1"), law("magnetic-linear")];
    let mut info = Vec::new();
    let mut all = true;
    let mut record = |name: &str, values: Vec<(String, f64)>, tol: f64, info: &mut Vec<String>| {
        let w = worst(values.iter().map(|v| v.1));
        all &= w <= tol;
        let parts: Vec<String> = values.iter().map(|(l, v)| format!("{l} {v:.2e}")).collect();
        info.push(format!("{} {name}: {} (tol {tol:.0e})", if w <= tol { "pass" } else { "FAIL" }, parts.join(", ")));
    };

    let fields = |points: usize, seed: u64| {
        let g = grid(2, points);
        let mut s = FieldSampler::new(&g, seed);
        (s.mix(), s.mix())
    };
    let eval = |f: &dyn Fn(&MagneticLaw) -> Result<f64>| -> Result<Vec<(String, f64)>> {
        shipped.iter().map(|l| Ok((l.name().to_string(), f(l)?))).collect()
    };

    let (f8, g8) = fields(8, 14);
    let gauge = eval(&|l| magnetic::check_gauge_covariance(l.field(), &magnetic::gauge_variants(l), &f8, &g8))?;
    record("gauge covariance, N=8", gauge, 1e-6, &mut info);

    let (f4, g4) = fields(4, 15);
    let oracle = eval(&|l| Ok(rel_diff(&l.compose(&f4, &g4)?, &magnetic::magnetic_compose_direct(l.field(), &f4, &g4)?)))?;
    record("oracle agreement, N=4", oracle, 1e-3, &mut info);

    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let tris: Vec<[Vec<f64>; 3]> = (0..20)
        .map(|_| {
            let mut v = || (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect::<Vec<f64>>();
            [v(), v(), v()]
        })
        .collect();
    let stokes = magnetic::SHIPPED
        .iter()
        .map(|id| (id.to_string(), magnetic::check_stokes(law(id).potential(), &tris)))
        .collect();
    record("Stokes, 20 triangles", stokes, 1e-12, &mut info);

    let (f6, _) = fields(6, 17);
    let aut = eval(&|l| Ok(worst([magnetic::check_theta_routes(l, &f6, &[1, 0, 0, 0])?, magnetic::check_theta_routes(l, &f6, &[0, 1, 0, 0])?, magnetic::check_theta_routes(l, &f6, &[1, -1, 1, 0])?])))?;
    record("translation routes, N=6", aut, 1e-3, &mut info);

    let hyp = eval(&|l| Ok(magnetic::check_magnetic_hypothesis_c(l.field(), &f8, &g8)?.defect))?;
    record("Hypothesis C, N=8", hyp, 1e-3, &mut info);

    let g8grid = grid(2, 8);
    let mut pointwise = Vec::new();
    let cocycle = eval(&|l| Ok(magnetic::check_cocycle(l, &g8grid, &[1, 0, 0, 0], &[0, 1, 0, 0])?.composed))?;
    for l in &shipped {
        let c = magnetic::check_cocycle(l, &g8grid, &[1, 0, 0, 0], &[0, 1, 0, 0])?;
        pointwise.push(format!("{} {:.2e}", l.name(), c.pointwise));
    }
    record("cocycle, N=8, composed reading", cocycle, 1e-3, &mut info);
    info.push(format!("cocycle pointwise reading: {}", pointwise.join(", ")));

    let t = start.elapsed();
    let mut v = Verdict::new(all && in_time(t, 600.0), format!("n=2, fields B = 1 and B_12 = x_1, {t:.2?}"));
    v.info = info;
    Ok(v)
}

fn determinism() -> Result<Verdict> {
    let a = run_suite("weyl", 1, 16, 7)?;
    let b = run_suite("weyl", 1, 16, 7)?;
    let same = a.without_timing().to_json() == b.without_timing().to_json();
    let bits = a.checks.iter().zip(&b.checks).all(|(x, y)| x.defect.to_bits() == y.defect.to_bits());
    Ok(Verdict::new(same && bits, format!("two weyl n=1 N=16 seed 7 runs identical: {}", same && bits))
        .info(format!("suite ok: {}", a.ok())))
}

type Criterion = (&'static str, fn() -> Result<Verdict>);

fn main() {
    let criteria: [Criterion; 16] = [
        ("symplectic Fourier", fourier),
        ("Plancherel resolution", plancherel),
        ("Weyl Hypothesis A", hypothesis_a),
        ("fast product against oracle", fast_vs_oracle),
        ("translation by plane-wave sandwich", theta_translation),
        ("Hypothesis C", hypothesis_c),
        ("idempotent window", idempotent_window),
        ("modulation mapping structure", mapping_structure),
        ("unitarity", unitarity),
        ("morphism", morphism),
        ("inversion", inversion),
        ("crossed product exactness", crossed_product),
        ("C*-norm identity", cstar_norm),
        ("STFT proportionality", stft),
        ("magnetic suite", magnetic_suite),
        ("verify determinism", determinism),
    ];
    let mut failed = Vec::new();
    let mut broken = false;
    for (name, run) in criteria {
        match run() {
            Ok(v) => {
                println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.summary);
                for line in &v.info {
                    println!("     {line}");
                }
                if !v.pass {
                    failed.push(name);
                }
            }
            Err(e) => {
                println!("FAIL {name}: error {e}");
                failed.push(name);
                broken = true;
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failing: {}", failed.join("; "));
    }
    if broken {
        std::process::exit(1);
    }
}

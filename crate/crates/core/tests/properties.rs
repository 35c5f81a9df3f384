use moyal::doubled::{diamond_compose, diamond_involution, rel_diff2, DoubleField};
use moyal::grid::{self, make_grid, rel_diff, PhasePoint, SymbolField};
use moyal::io::{decode_field, decode_values, encode_values, parse_manifest};
use moyal::laws::{self, CompositionLaw, Pointwise, WeylFast};
use moyal::magnetic::{self, triangle_flux, MagneticField, Polynomial, VectorPotential};
use moyal::modulation::Exponent;
use moyal::testkit::{gaussian, FieldSampler};
use moyal::C64;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

/// A localized Gaussian with a random lattice center, width and phase.
fn bump(points: usize, k: (i64, i64), a: f64, phase: f64) -> SymbolField {
    let g = make_grid(1, points).unwrap();
    let d = g.delta();
    gaussian(&g, a, &[k.0 as f64 * d, k.1 as f64 * d], C64::from_polar(1.0, phase))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn fourier_is_an_involution_and_unitary(k in (-2i64..=2, -2i64..=2), a in 0.3f64..0.6, p in 0.0f64..std::f64::consts::TAU, seed in 0u64..1000) {
        let f = bump(16, k, a, p);
        let h = FieldSampler::new(f.grid(), seed).mix();
        prop_assert!(grid::check_fourier_involution(&f) < 1e-13);
        prop_assert!(grid::check_fourier_unitarity(&f, &h).unwrap() < 1e-13);
        prop_assert!(grid::check_resolution_identity(&f, &h).unwrap() < 1e-12);
    }

    #[test]
    fn weyl_product_axioms(seed in 0u64..10_000) {
        let g = make_grid(1, 8).unwrap();
        let mut s = FieldSampler::new(&g, seed);
        let (f, h, k) = (s.mix(), s.mix(), s.mix());
        prop_assert!(laws::check_associativity(&WeylFast, &f, &h, &k).unwrap() < 1e-12);
        prop_assert!(laws::check_involution(&WeylFast, &f, &h).unwrap() < 1e-12);
        prop_assert!(laws::check_integral_identity(&WeylFast, &f, &h).unwrap() < 1e-12);
        prop_assert!(laws::check_unit(&WeylFast, &f).unwrap() < 1e-12);
    }

    #[test]
    fn plane_wave_sandwich_translates(seed in 0u64..1000, z in (-4i64..4, -4i64..4)) {
        let g = make_grid(1, 8).unwrap();
        let f = FieldSampler::new(&g, seed).mix();
        let pz = PhasePoint::on_grid(&g, &[z.0, z.1]).unwrap();
        let t = laws::theta_translate(&WeylFast, &f, &pz).unwrap();
        prop_assert!(rel_diff(&t, &grid::translate(&f, &pz.neg()).unwrap()) < 1e-12);
        // pointwise multiplication by e_-Z and e_Z cancels
        prop_assert!(rel_diff(&laws::theta_translate(&Pointwise, &f, &pz).unwrap(), &f) < 1e-14);
    }

    #[test]
    fn pointwise_law_is_commutative(seed in 0u64..1000) {
        let g = make_grid(1, 8).unwrap();
        let mut s = FieldSampler::new(&g, seed);
        let (f, h) = (s.mix(), s.mix());
        prop_assert_eq!(Pointwise.compose(&f, &h).unwrap(), Pointwise.compose(&h, &f).unwrap());
    }

    #[test]
    fn crossed_product_associative(vals in prop::collection::vec(-1.0f64..1.0, 3 * 2 * 256)) {
        let g = make_grid(1, 4).unwrap();
        let field = |i: usize| {
            let v = vals[i * 512..(i + 1) * 512].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
            DoubleField::from_values(&g, v).unwrap()
        };
        let (a, b, c) = (field(0), field(1), field(2));
        let l = diamond_compose(&diamond_compose(&a, &b).unwrap(), &c).unwrap();
        let r = diamond_compose(&a, &diamond_compose(&b, &c).unwrap()).unwrap();
        prop_assert!(rel_diff2(&l, &r) < 1e-12);
        prop_assert_eq!(diamond_involution(&diamond_involution(&a)), a);
    }

    #[test]
    fn values_round_trip(vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 0..64)) {
        let v: Vec<C64> = vals.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        prop_assert_eq!(decode_values(&encode_values(&v), v.len()).unwrap(), v);
    }

    #[test]
    fn decoders_reject_garbage_without_panicking(text in ".{0,200}", bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = parse_manifest(&text);
        let _ = decode_field(&text, &bytes);
        let _ = MagneticField::from_json(&text);
        let _ = VectorPotential::from_json(&text);
        let _ = text.parse::<Exponent>();
    }

    #[test]
    fn exponent_display_round_trips(p in 1.0f64..1e6) {
        let e = Exponent::finite(p).unwrap();
        prop_assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
    }

    #[test]
    fn exponents_below_one_are_rejected(p in -1e3f64..0.999) {
        prop_assert!(Exponent::finite(p).is_err());
        prop_assert!(p.to_string().parse::<Exponent>().is_err());
    }

    #[test]
    fn triangle_flux_is_alternating(v in prop::collection::vec(-3.0f64..3.0, 6), b in -2.0f64..2.0, c in -1.0f64..1.0) {
        let field = MagneticField::new(2, vec![Polynomial::constant(2, b).add(&Polynomial::linear(2, 0, c))]).unwrap();
        let (p, q, r) = (&v[0..2], &v[2..4], &v[4..6]);
        let f = triangle_flux(&field, p, q, r);
        prop_assert_eq!(triangle_flux(&field, q, p, r), -f);
        prop_assert_eq!(triangle_flux(&field, q, r, p), f);
        prop_assert_eq!(triangle_flux(&field, p, r, q), -f);
    }

    #[test]
    fn stokes_holds_for_shipped_potentials(v in prop::collection::vec(-3.0f64..3.0, 6), which in 0usize..magnetic::SHIPPED.len()) {
        let law = magnetic::magnetic_law_by_name(magnetic::SHIPPED[which]).unwrap();
        let tri = [v[0..2].to_vec(), v[2..4].to_vec(), v[4..6].to_vec()];
        prop_assert!(magnetic::check_stokes(law.potential(), &[tri]) < 1e-12);
    }

    #[test]
    fn polynomial_json_round_trips(coeffs in prop::collection::vec(-5.0f64..5.0, 3)) {
        let a = VectorPotential::new(vec![
            Polynomial::monomial(vec![1, 1], coeffs[0]),
            Polynomial::monomial(vec![2, 0], coeffs[1]).add(&Polynomial::constant(2, coeffs[2])),
        ]).unwrap();
        prop_assert_eq!(VectorPotential::from_json(&a.to_json()).unwrap(), a.clone());
        let b = a.curl();
        prop_assert_eq!(MagneticField::from_json(&b.to_json()).unwrap(), b.clone());
        prop_assert!(a.check_generates(&b).is_ok());
    }
}

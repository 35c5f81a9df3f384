#![no_main]

use libfuzzer_sys::fuzz_target;
use moyal::magnetic::{MagneticField, VectorPotential};

fuzz_target!(|data: &str| {
    if let Ok(b) = MagneticField::from_json(data) {
        assert_eq!(MagneticField::from_json(&b.to_json()).unwrap(), b);
    }
    if let Ok(a) = VectorPotential::from_json(data) {
        assert_eq!(VectorPotential::from_json(&a.to_json()).unwrap(), a);
        let _ = a.check_generates(&a.curl());
    }
});

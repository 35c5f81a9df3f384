#![no_main]

use libfuzzer_sys::fuzz_target;
use moyal::modulation::Exponent;

fuzz_target!(|data: &str| {
    if let Ok(e) = data.parse::<Exponent>() {
        assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
    }
});

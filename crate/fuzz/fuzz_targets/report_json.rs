#![no_main]

use libfuzzer_sys::fuzz_target;
use moyal::verify::{compare_reports, CheckReport};

fuzz_target!(|data: &str| {
    if let Ok(r) = CheckReport::from_json(data) {
        assert_eq!(CheckReport::from_json(&r.to_json()).unwrap(), r);
        assert!(compare_reports(&r, &r).unwrap().is_empty());
    }
});

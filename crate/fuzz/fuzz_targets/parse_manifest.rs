#![no_main]

use libfuzzer_sys::fuzz_target;
use moyal::io::parse_manifest;

fuzz_target!(|data: &str| {
    if let Ok(m) = parse_manifest(data) {
        // an accepted manifest always describes a valid grid
        let _ = m.value_count();
    }
});

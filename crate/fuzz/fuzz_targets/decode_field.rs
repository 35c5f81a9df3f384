#![no_main]

use libfuzzer_sys::fuzz_target;
use moyal::io::{decode_field, encode_field};

// Input layout: manifest text, a zero byte, then the binary payload.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|b| *b == 0) else { return };
    let Ok(manifest) = std::str::from_utf8(&data[..split]) else { return };
    if let Ok(field) = decode_field(manifest, &data[split + 1..]) {
        let (text, bytes) = encode_field(&field);
        assert_eq!(decode_field(&text, &bytes).unwrap(), field);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::circuit::Circuit;
use ptm_core::io;

// File references resolve against an empty directory, so only inline circuits load.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = io::parse_circuit_json(text) {
        let _ = Circuit::from_json(&c, std::path::Path::new("/nonexistent"));
    }
});

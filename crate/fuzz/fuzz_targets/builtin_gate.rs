#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::circuit::builtin_gate;

fuzz_target!(|data: &[u8]| {
    if let Ok(name) = std::str::from_utf8(data) {
        let _ = builtin_gate(name);
    }
});

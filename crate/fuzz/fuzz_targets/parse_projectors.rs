#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ps) = io::parse_projectors(text) {
        io::parse_projectors(&io::write_projectors(&ps)).expect("written projectors reparse");
    }
});

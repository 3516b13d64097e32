#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(gens) = io::parse_generators(text) {
        let back =
            io::parse_generators(&io::write_generators(&gens)).expect("written generators reparse");
        assert_eq!(back, gens);
    }
});

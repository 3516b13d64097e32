#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = io::parse_state(text) {
        let back = io::parse_state(&io::write_state(&s)).expect("written state reparses");
        assert_eq!(back.coeffs(), s.coeffs());
    }
});

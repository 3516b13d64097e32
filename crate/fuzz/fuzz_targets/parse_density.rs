#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rho) = io::parse_density(text) {
        let back = io::parse_density(&io::write_density(&rho)).expect("written density reparses");
        assert_eq!(back.data(), rho.data());
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = io::parse_gate(text) {
        let back = io::parse_gate(&io::write_gate(&g)).expect("written gate reparses");
        assert_eq!(back.matrix(), g.matrix());
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::channel::kraus_to_gate;
use ptm_core::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ch) = io::parse_kraus(text) {
        let _ = kraus_to_gate(&ch);
        io::parse_kraus(&io::write_kraus(&ch)).expect("written kraus set reparses");
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = io::parse_truth_table(text) {
        let back =
            io::parse_truth_table(&io::write_truth_table(&g)).expect("written table reparses");
        assert_eq!(back, g);
    }
});

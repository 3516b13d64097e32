#![no_main]

use libfuzzer_sys::fuzz_target;
use ptm_core::mv_logic::LogicExpr;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(e) = LogicExpr::parse(text) {
        let again = LogicExpr::parse(&e.to_string()).expect("display output reparses");
        assert_eq!(e.to_gate(Some(3)).ok(), again.to_gate(Some(3)).ok());
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;
use ncilw_core::insertions::parse_insertions;
use ncilw_core::params::ModelParams;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let params = ModelParams::default();
        if let Ok(parsed) = parse_insertions(text, &params) {
            // accepted insertions must carry integral Klein charges
            for p in &parsed {
                let _ = p.insertion.charge(&params).unwrap();
            }
        }
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;
use ncilw_core::config::Config;

fuzz_target!(|data: &[u8]| {
    // The config parser must never panic on arbitrary input; accepted
    // configs must produce a valid parameter set.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = Config::parse(text) {
            let _ = cfg.model();
            let _ = cfg.truncation();
        }
    }
});

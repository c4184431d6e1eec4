#![no_main]
use libfuzzer_sys::fuzz_target;
use ncilw_core::params::ModelParams;
use ncilw_core::transforms::{apply_t, parse_samples_csv, PeriodicField};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(samples) = parse_samples_csv(text) {
            // accepted sample sets must round-trip through the transform
            // machinery without panicking (cap the size to keep runs fast)
            if samples.len() <= 256 {
                let params = ModelParams::default();
                if let Ok(field) = PeriodicField::from_samples(params.ell, &samples) {
                    let _ = apply_t(&field, &params);
                }
            }
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = crmgg::io::read_samples(data) {
        if let Ok(curve) = crmgg::powerlaw::ccdf(&samples) {
            assert!(curve.survival.windows(2).all(|w| w[1] <= w[0]));
            let _ = crmgg::powerlaw::fit_ccdf(&curve, 0.0, 0.8);
        }
    }
});

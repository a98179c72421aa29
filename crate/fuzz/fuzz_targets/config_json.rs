#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = crmgg::experiment::ExperimentConfig::from_json(text) {
        let json = cfg.to_json().unwrap();
        assert_eq!(crmgg::experiment::ExperimentConfig::from_json(&json).unwrap(), cfg);
    }
});

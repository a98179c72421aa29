#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = crmgg::io::read_measure_csv(data) {
        assert!(m.weights().iter().all(|&w| w > 0.0 && w < 1.0));
        let mut buf = Vec::new();
        crmgg::io::write_measure_csv(&m, &mut buf).unwrap();
        assert_eq!(crmgg::io::read_measure_csv(&buf[..]).unwrap(), m);
    }
});

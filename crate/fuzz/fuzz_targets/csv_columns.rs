#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cols) = crmgg::io::read_csv_columns(data, &["V", "E"]) {
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0].len(), cols[1].len());
        let _ = crmgg::powerlaw::fit_loglog(&cols[0], &cols[1], 0.5, 1.0);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = crmgg::io::read_edge_list(data) {
        let stats = crmgg::stats::summarize(&g, 0).unwrap();
        stats.check_invariants().unwrap();
    }
});

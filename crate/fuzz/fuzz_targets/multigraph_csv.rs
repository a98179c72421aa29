#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = crmgg::io::read_multigraph_csv(data, None) {
        let mut buf = Vec::new();
        crmgg::io::write_multigraph_csv(&g, &mut buf).unwrap();
        let again = crmgg::io::read_multigraph_csv(&buf[..], Some(g.n_rounds())).unwrap();
        assert_eq!(again.iter().collect::<Vec<_>>(), g.iter().collect::<Vec<_>>());
    }
});

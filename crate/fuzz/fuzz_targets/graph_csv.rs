#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(g) = z2sync::io::parse_graph_csv(text) {
            // anything we accept must survive a write/parse round trip
            let rt = z2sync::io::write_graph_csv(&g);
            let g2 = z2sync::io::parse_graph_csv(&rt).expect("serialized graph must re-parse");
            assert_eq!(g, g2);
        }
    }
});

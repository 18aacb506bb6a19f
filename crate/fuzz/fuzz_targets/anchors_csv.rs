#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(a) = z2sync::io::parse_anchors_csv(text) {
            let rt = z2sync::io::write_anchors_csv(&a);
            let a2 = z2sync::io::parse_anchors_csv(&rt).expect("serialized anchors must re-parse");
            assert_eq!(a, a2);
        }
    }
});

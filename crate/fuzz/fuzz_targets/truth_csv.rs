#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(t) = z2sync::io::parse_truth_csv(text) {
            let rt = z2sync::io::write_truth_csv(&t);
            let t2 = z2sync::io::parse_truth_csv(&rt).expect("serialized truth must re-parse");
            assert_eq!(t, t2);
        }
    }
});

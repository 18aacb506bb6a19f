#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = z2sync::io::parse_partition_csv(text) {
            let rt = z2sync::io::write_partition_csv(&p);
            let p2 =
                z2sync::io::parse_partition_csv(&rt).expect("serialized partition must re-parse");
            assert_eq!(p, p2);
        }
    }
});

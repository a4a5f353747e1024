#![no_main]

use libfuzzer_sys::fuzz_target;
use yukawa_ewald::io::{parse_target_spec, TargetSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(TargetSpec::Grid { nx, ny }) = parse_target_spec(text) {
        assert!(nx > 0 && ny > 0);
        assert!(nx.checked_mul(ny).is_some());
    }
});

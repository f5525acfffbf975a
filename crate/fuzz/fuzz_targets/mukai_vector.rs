#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_cli::parse_vector;
use mukai_core::MukaiVector;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(coords) = parse_vector(text) else { return };
    if let Ok(v) = MukaiVector::from_coords(&coords) {
        assert_eq!(v.to_coords(), coords);
    }
});

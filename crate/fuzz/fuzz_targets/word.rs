#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_cli::commands::parse_generator;
use mukai_core::{Lattice, MukaiLattice, Transform};

fuzz_target!(|data: &[u8]| {
    if data.len() > 4096 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(serde_json::Value::Array(items)) = serde_json::from_str::<serde_json::Value>(text) else { return };
    let Ok(word) = items.iter().map(parse_generator).collect::<Result<Vec<_>, _>>() else { return };
    let l = MukaiLattice::new(Lattice::from_i64(&[&[2, 1], &[1, -2]]).unwrap());
    if let Ok(t) = Transform::from_word(&l, word) {
        assert!(t.replays_exactly(&l).unwrap());
    }
});

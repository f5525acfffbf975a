#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_core::zeta::{GaloisField, Hypersurface};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1024 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(h) = Hypersurface::parse(text, None) else { return };
    if h.nvars() <= 4 && h.degree() <= 12 {
        let f = GaloisField::new(3, None).unwrap();
        let n = h.count_points(&f).unwrap();
        assert!(n <= 40);
    }
});

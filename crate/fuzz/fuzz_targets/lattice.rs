#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_cli::Document;
use mukai_core::Lattice;

fuzz_target!(|data: &[u8]| {
    if data.len() > 4096 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(Document::Lattice { gram }) = Document::parse(text) else { return };
    if gram.rows() > 24 {
        return;
    }
    if let Ok(l) = Lattice::new(gram) {
        let d = l.discriminant_group();
        assert_eq!(d.order(), num_bigint::BigInt::from(l.determinant().magnitude().clone()));
        let s = l.signature();
        assert_eq!(s.positive + s.negative, l.rank());
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_cli::Document;
use mukai_core::{IntMatrix, Lattice, RootSet};
use num_bigint::BigInt;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(Document::RootSet { roots }) = Document::parse(text) else { return };
    let n = roots.first().map_or(1, Vec::len);
    if n == 0 || n > 24 {
        return;
    }
    let diag: Vec<BigInt> = (0..n).map(|i| BigInt::from(if i == 0 { 2 } else { -2 })).collect();
    let ns = Lattice::new(IntMatrix::diagonal(&diag)).expect("diagonal lattice");
    if let Ok(rs) = RootSet::new(&ns, roots) {
        for r in rs.roots() {
            assert_eq!(ns.norm(r).unwrap(), BigInt::from(-2));
        }
    }
});

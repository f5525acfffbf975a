#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_cli::Document;
use mukai_core::FrobeniusData;

fuzz_target!(|data: &[u8]| {
    if data.len() > 8192 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(Document::Frobenius { p, q, charpoly }) = Document::parse(text) else { return };
    if p.bits() > 64 || q.bits() > 128 {
        return;
    }
    let Ok(f) = FrobeniusData::from_either_order(p, q, charpoly) else { return };
    let _ = f.duality_failure();
    let _ = f.power_sums(4);
    let np = f.newton_polygon();
    assert_eq!(np.slopes.len(), 22);
});

#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_cli::parse_rows;
use mukai_core::IntMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_rows(text) else { return };
    let cols = rows.first().map_or(0, Vec::len);
    let m = IntMatrix::from_rows_with_cols(rows.clone(), cols).expect("parsed rows are rectangular");
    assert_eq!(m.to_rows(), rows);
    if m.rows() <= 8 && m.cols() <= 8 {
        let _ = m.hermite();
    }
});

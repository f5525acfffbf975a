#![no_main]
use libfuzzer_sys::fuzz_target;
use mukai_cli::Document;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = Document::parse(text) {
        let printed = doc.print();
        assert_eq!(Document::parse(&printed).expect("printed documents parse"), doc);
    }
});

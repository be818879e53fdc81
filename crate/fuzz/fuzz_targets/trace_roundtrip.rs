//! Accepted trace documents must survive an emit/reparse cycle unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use selgames::gamefile::parse_trace_document;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_trace_document(text) else {
        return;
    };
    let reparsed = parse_trace_document(&doc.to_json()).expect("emitted documents parse");
    assert_eq!(reparsed, doc);
    assert_eq!(reparsed.all_pass(), doc.all_pass());
});

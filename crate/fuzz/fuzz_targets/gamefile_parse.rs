//! Accepted game files must validate, serialize, and reparse to themselves.

#![no_main]

use libfuzzer_sys::fuzz_target;
use selgames::gamefile::parse_game_file;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = parse_game_file(text) else {
        return;
    };
    file.validate().expect("parsed game files validate");
    let emitted = serde_json::to_string(&file).expect("game files serialize");
    let reparsed = parse_game_file(&emitted).expect("emitted game files parse");
    assert_eq!(reparsed, file);
});

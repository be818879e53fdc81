//! Accepted sequence specs must load their built-in variants totally; file
//! variants are parsed but never read from disk here.

#![no_main]

use libfuzzer_sys::fuzz_target;
use selgames::sources::SequenceSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = SequenceSpec::parse(text) else {
        return;
    };
    if matches!(spec, SequenceSpec::File(_)) {
        return;
    }
    let x = spec.load().expect("built-in specs load");
    let _ = x.at(3);
});

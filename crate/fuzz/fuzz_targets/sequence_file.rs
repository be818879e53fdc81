//! Accepted sequence files must yield total sequences staying in [0, 1].

#![no_main]

use libfuzzer_sys::fuzz_target;
use num_rational::BigRational;
use num_traits::{One, Zero};
use selgames::sources::parse_sequence_file;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(x) = parse_sequence_file(text) else {
        return;
    };
    for i in 0..8 {
        let v = x.at(i);
        assert!(v >= BigRational::zero() && v <= BigRational::one());
    }
});

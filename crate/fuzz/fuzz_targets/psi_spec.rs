//! Accepted counterexample specs must build total, probe-safe functionals.

#![no_main]

use libfuzzer_sys::fuzz_target;
use selgames::eps::PaddedSequence;
use selgames::sources::PsiSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = PsiSpec::parse(text) else {
        return;
    };
    let psi = spec.build();
    let value = psi(&PaddedSequence::zeros(), &mut |i| i.saturating_add(1));
    if let PsiSpec::ReadB { cap, .. } = spec {
        assert!(value <= cap);
    }
});

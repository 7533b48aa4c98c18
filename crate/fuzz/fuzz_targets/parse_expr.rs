#![no_main]

use libfuzzer_sys::fuzz_target;

// The parser must reject arbitrary input with a structured error, never a
// panic. Errors are fine; crashes are bugs.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = derksen::expr::parse_expr(text);
    }
});

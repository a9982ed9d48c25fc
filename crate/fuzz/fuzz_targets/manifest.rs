#![no_main]
use libfuzzer_sys::fuzz_target;
use polyframe::io::parse_manifest_str;
use std::path::Path;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_manifest_str(text, "fuzz.toml", Path::new("/data"));
    }
});

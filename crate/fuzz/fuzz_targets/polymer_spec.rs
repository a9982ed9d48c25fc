#![no_main]
use libfuzzer_sys::fuzz_target;
use polyframe::io::{parse_polymer_spec_str, serialize_polymer_spec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_polymer_spec_str(text, "fuzz.toml") else { return };
    if spec.build_graph().is_ok() {
        // a spec that builds must survive its own serialization
        let again = parse_polymer_spec_str(&serialize_polymer_spec(&spec), "again.toml").expect("reparse");
        assert_eq!(again, spec);
    }
});

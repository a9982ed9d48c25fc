#![no_main]
use libfuzzer_sys::fuzz_target;
use polyframe::io::{parse_polymer_spec_str, decomposition_from_json};
use polyframe::polymer::PolymerGraph;
use std::sync::LazyLock;

// Same chain as the seed files.
static GRAPH: LazyLock<PolymerGraph> = LazyLock::new(|| {
    let spec = parse_polymer_spec_str(include_str!("../seeds/chain.toml"), "chain.toml").unwrap();
    spec.build_graph().unwrap()
});

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = decomposition_from_json(text, "fuzz.json") {
        let _ = file.to_result(&GRAPH, "fuzz.json");
    }
});

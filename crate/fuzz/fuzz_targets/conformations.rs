#![no_main]
use libfuzzer_sys::fuzz_target;
use polyframe::io::{parse_polymer_spec_str, read_conformations_str};
use polyframe::polymer::PolymerGraph;
use std::sync::LazyLock;

// Same chain as the seed files.
static GRAPH: LazyLock<PolymerGraph> = LazyLock::new(|| {
    let spec = parse_polymer_spec_str(include_str!("../seeds/chain.toml"), "chain.toml").unwrap();
    spec.build_graph().unwrap()
});

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(confs) = read_conformations_str(text, "fuzz.txt", &GRAPH) {
            assert!(confs.iter().all(|c| c.coords.len() == GRAPH.total_atoms()));
        }
    }
});

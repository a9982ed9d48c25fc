use polyframe::io::{
    read_conformations, report_from_json, round12, serialize_polymer_spec, write_conformations, PolymerSpec,
};
use polyframe::metrics::{evaluate_polymer, ConformationSet, EvalOptions, PolymerPair, SetRole, ToyEnergy};
use polyframe::polymer::PolymerGraph;
use polyframe::testing;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;
use tempfile::TempDir;

fn polyframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyframe")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    graph: PolymerGraph,
    spec: PathBuf,
}

impl Fixture {
    fn new(n_units: usize) -> Self {
        let dir = TempDir::new().unwrap();
        let graph = PolymerGraph::homopolymer(testing::butane_unit(), n_units).unwrap();
        let spec = dir.path().join("chain.toml");
        let text = serialize_polymer_spec(&PolymerSpec::from_graph(&graph, Some("chain".into())).unwrap());
        std::fs::write(&spec, text).unwrap();
        Fixture { dir, graph, spec }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn random_confs(&self, name: &str, n: usize, seed: u64) -> PathBuf {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let confs: Vec<_> = (0..n).map(|_| testing::random_conformation(&self.graph, &mut rng)).collect();
        let path = self.path(name);
        write_conformations(&path, &self.graph, &confs).unwrap();
        path
    }
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(code(&polyframe(&["--help"])), 0);
    assert_eq!(code(&polyframe(&["sample", "--help"])), 0);
    assert_eq!(code(&polyframe(&["schedule", "--no-such-flag"])), 1);
    assert_eq!(code(&polyframe(&[])), 1);
}

#[test]
fn roundtrip_reports_tiny_residual() {
    let f = Fixture::new(6);
    let confs = f.random_confs("c.txt", 4, 1);
    let out = polyframe(&["roundtrip", "--spec", path_str(&f.spec), "--in", path_str(&confs)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let last = stdout.lines().last().unwrap();
    let worst: f64 = last.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(worst < 1e-9, "{last}");
    assert_eq!(stdout.lines().count(), 5);
}

#[test]
fn sample_is_reproducible() {
    let f = Fixture::new(5);
    let run = |name: &str| {
        let out_path = f.path(name);
        let out = polyframe(&[
            "sample",
            "--spec",
            path_str(&f.spec),
            "--out",
            path_str(&out_path),
            "--seed",
            "7",
            "--timesteps",
            "50",
            "--n-samples",
            "2",
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(out_path).unwrap()
    };
    let a = run("a.txt");
    assert_eq!(a, run("b.txt"));
    let confs = read_conformations(&f.path("a.txt"), &f.graph).unwrap();
    assert_eq!(confs.len(), 2);
}

#[test]
fn evaluate_report_matches_library() {
    let f = Fixture::new(4);
    let gen = f.random_confs("gen.txt", 3, 2);
    let refs = f.random_confs("ref.txt", 2, 3);
    let report = f.path("report.json");
    let out = polyframe(&[
        "evaluate",
        "--spec",
        path_str(&f.spec),
        "--in",
        path_str(&gen),
        "--ref",
        path_str(&refs),
        "--coverage",
        "--seed",
        "11",
        "--report",
        path_str(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let file = report_from_json(&std::fs::read_to_string(&report).unwrap(), "report.json").unwrap();

    let graph = Arc::new(f.graph.clone());
    let set = |p: &Path, role| ConformationSet::new(Arc::clone(&graph), read_conformations(p, &graph).unwrap(), role).unwrap();
    let pair = PolymerPair {
        name: "chain".into(),
        generated: set(&gen, SetRole::Generated),
        reference: set(&refs, SetRole::Reference),
    };
    let options = EvalOptions {
        coverage: true,
        ..EvalOptions::default()
    };
    let m = evaluate_polymer(&pair, &ToyEnergy, &options).unwrap();
    let p = &file.polymers[0];
    assert_eq!(p.name, "chain");
    assert_eq!((p.n_generated, p.n_reference), (3, 2));
    assert_eq!(p.s_mat_r, round12(m.s_mat.recall));
    assert_eq!(p.s_mat_p, round12(m.s_mat.precision));
    assert_eq!(p.e_mat_r, round12(m.e_mat.recall));
    assert_eq!(p.e_mat_p, round12(m.e_mat.precision));
    assert_eq!(p.s_cov_r, m.s_cov.as_ref().map(|c| round12(c.recall)));
    assert_eq!(file.run.seed, Some(11));
}

#[test]
fn evaluate_rejects_foreign_conformations() {
    let f = Fixture::new(4);
    let other = Fixture::new(5);
    let gen = f.random_confs("gen.txt", 2, 4);
    let foreign = other.random_confs("foreign.txt", 2, 5);
    let out = polyframe(&[
        "evaluate",
        "--spec",
        path_str(&f.spec),
        "--in",
        path_str(&gen),
        "--ref",
        path_str(&foreign),
    ]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("foreign.txt") && err.contains("hash mismatch"), "{err}");
}

#[test]
fn malformed_spec_exits_with_validation_error() {
    let f = Fixture::new(3);
    let bad = f.path("bad.toml");
    std::fs::write(&bad, "name = \"x\"\nn_units = 3\n[unit]\natoms = [\n").unwrap();
    let confs = f.random_confs("c.txt", 1, 6);
    let out = polyframe(&["roundtrip", "--spec", path_str(&bad), "--in", path_str(&confs)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml"));
    let missing = f.path("missing.toml");
    assert_eq!(code(&polyframe(&["roundtrip", "--spec", path_str(&missing), "--in", path_str(&confs)])), 1);
}

#[test]
fn schedule_table_has_one_row_per_step() {
    let out = polyframe(&["schedule", "--timesteps", "20", "--schedule", "linear"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "t\talpha_bar\tsigma_rot\tsigma_tor");
    assert_eq!(rows.len(), 22);
    let first: Vec<f64> = rows[1].split('\t').skip(1).map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, vec![1.0, 0.01, 0.0]);
    assert_eq!(code(&polyframe(&["schedule", "--timesteps", "0"])), 1);
}

#[test]
fn decompose_then_assemble_doubled() {
    let f = Fixture::new(5);
    let confs = f.random_confs("c.txt", 2, 8);
    let dec = f.path("dec.json");
    let out = polyframe(&[
        "decompose",
        "--spec",
        path_str(&f.spec),
        "--in",
        path_str(&confs),
        "--out",
        path_str(&dec),
        "--index",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let rebuilt = f.path("rebuilt.txt");
    let out = polyframe(&["assemble", "--spec", path_str(&f.spec), "--in", path_str(&dec), "--out", path_str(&rebuilt)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = polyframe(&["roundtrip", "--spec", path_str(&f.spec), "--in", path_str(&rebuilt)]);
    assert_eq!(code(&out), 0);

    let doubled = f.path("doubled.txt");
    let doubled_spec = f.path("doubled.toml");
    let out = polyframe(&[
        "assemble",
        "--spec",
        path_str(&f.spec),
        "--in",
        path_str(&dec),
        "--out",
        path_str(&doubled),
        "--double",
        "--out-spec",
        path_str(&doubled_spec),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let graph = polyframe::io::parse_polymer_spec(&doubled_spec).unwrap();
    assert_eq!(graph.n_units(), 10);
    assert_eq!(read_conformations(&doubled, &graph).unwrap().len(), 1);

    let out = polyframe(&[
        "decompose",
        "--spec",
        path_str(&f.spec),
        "--in",
        path_str(&confs),
        "--out",
        path_str(&dec),
        "--index",
        "3",
    ]);
    assert_eq!(code(&out), 1);
}

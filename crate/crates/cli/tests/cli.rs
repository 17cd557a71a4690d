//! End-to-end tests of the command surface, against the in-process runner.

use std::io::Write as _;

fn run_cli(args: &[&str]) -> (String, String, i32) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cotree_cli::run(&args, &mut out, &mut err);
    (String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap(), code)
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

#[test]
fn enumerate_counts() {
    let (out, _, code) = run_cli(&["enumerate", "--nodes", "4", "--count-only"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1 1 2 4\n");

    let (out, _, code) = run_cli(&["enumerate", "--nodes", "5", "--count-only", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{\"counts\":[1,1,2,4,9]}\n");
}

#[test]
fn enumerate_t1_filter_keeps_only_the_singleton() {
    let (out, _, code) = run_cli(&["enumerate", "--nodes", "8", "--in-t", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1 ()\n");
}

#[test]
fn leq_witness_and_none() {
    let (out, _, code) = run_cli(&["leq", "@comb:1", "@hcomb:1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("# source="));
    assert!(lines[1..].iter().all(|l| l.contains(" -> ")));

    let (out, _, code) = run_cli(&["leq", "@hcomb:1", "@comb:1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "none\n");

    // A chain never maps onto a branching target.
    let (out, _, code) = run_cli(&["leq", "@comb:2", "@chain:9"]);
    assert_eq!(code, 0);
    assert_eq!(out, "none\n");
}

#[test]
fn embed_directions() {
    let (out, _, code) = run_cli(&["embed", "@comb:1", "@comb:2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# order embedding\n"));

    let (out, _, code) = run_cli(&["embed", "@comb:2", "@chain:9"]);
    assert_eq!(code, 0);
    assert_eq!(out, "none\n");
}

#[test]
fn comb_number_of_inputs() {
    let (out, _, code) = run_cli(&["comb", "@comb:3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "3\n");

    // The 4-element comb as a poset file: spine 0 < 1, leaves 2 < 0, 3 < 1.
    let f = write_temp("# comb(2)\nposet 4\n0 1\n2 0\n3 1\n");
    let (out, _, code) = run_cli(&["comb", f.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, "2\n");
}

#[test]
fn decompose_chain_case() {
    let (out, _, code) = run_cli(&["decompose", "@chain:3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "m 1\nk 0\npart ()\n");

    let (out, _, code) = run_cli(&["decompose", "@chain:1"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
}

#[test]
fn dual_and_back_round_trip() {
    for literal in ["@comb:2", "@chain:3", "@tau:0,2"] {
        let (dump, _, code) = run_cli(&["dual", literal]);
        assert_eq!(code, 0);
        let f = write_temp(&dump);
        let (poset_text, _, code) = run_cli(&["dualize-back", f.path().to_str().unwrap()]);
        assert_eq!(code, 0);
        let original = cotree_cli::load_poset(literal).unwrap();
        let recovered = cotree_core::Poset::from_text(&poset_text).unwrap();
        assert!(recovered.is_isomorphic(&original), "round trip failed for {literal}");
    }
}

#[test]
fn dual_and_back_on_coforests() {
    // Every co-forest with up to 4 elements survives the pipe.
    for poset in cotree_core::enumerate_posets(4) {
        if !poset.classify().is_coforest() {
            continue;
        }
        let input = write_temp(&poset.to_text());
        let (dump, _, code) = run_cli(&["dual", input.path().to_str().unwrap()]);
        assert_eq!(code, 0);
        let f = write_temp(&dump);
        let (poset_text, _, code) = run_cli(&["dualize-back", f.path().to_str().unwrap()]);
        assert_eq!(code, 0);
        let recovered = cotree_core::Poset::from_text(&poset_text).unwrap();
        assert!(recovered.is_isomorphic(&poset), "pipe broke {}", poset.to_text());
    }
}

#[test]
fn validity_queries() {
    let (out, _, code) = run_cli(&["valid", "@chain:2", "--axiom", "prelinearity"]);
    assert_eq!(code, 0);
    assert_eq!(out, "valid\n");

    let lambda = write_temp("poset 3\n0 1\n0 2\n");
    let (out, _, code) = run_cli(&["valid", lambda.path().to_str().unwrap(), "--axiom", "prelinearity"]);
    assert_eq!(code, 0);
    assert_eq!(out, "invalid\np = {1}\nq = {2}\nrefuted at 0\n");

    let (out, _, code) = run_cli(&["valid", "@chain:3", "--formula", "(p -> q) | (q -> p)"]);
    assert_eq!(code, 0);
    assert_eq!(out, "valid\n");

    let (_, err, code) = run_cli(&["valid", "@chain:2", "--formula", "p -> q <- r"]);
    assert_eq!(code, 2);
    assert!(err.contains("parse error"));

    let (_, err, code) = run_cli(&["valid", "@chain:2", "--axiom", "nonsense"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown axiom"));
}

#[test]
fn subframe_criterion() {
    let (out, _, code) = run_cli(&["subframe", "@comb:2", "--omit", "@comb:1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "refuted\n");

    let (out, _, code) = run_cli(&["subframe", "@chain:5", "--omit", "@comb:2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "validated\n");

    // Not a co-forest: usage error.
    let lambda = write_temp("poset 3\n0 1\n0 2\n");
    let (_, err, code) =
        run_cli(&["subframe", lambda.path().to_str().unwrap(), "--omit", "@comb:1"]);
    assert_eq!(code, 2);
    assert!(err.contains("co-forest"));
}

#[test]
fn antichain_diagonal() {
    let (out, _, code) = run_cli(&["antichain", "--in-t", "2", "--nodes", "5"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("size 4\n"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn verify_single_checks() {
    let (out, _, code) = run_cli(&["verify", "--check", "counterexample"]);
    assert_eq!(code, 0);
    assert_eq!(out, "[PASS] counterexample (3 instances)\n");

    let (out, _, code) = run_cli(&["verify", "--check", "t1-singleton", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], serde_json::Value::Bool(true));
    assert_eq!(v["checks"][0]["name"], "t1-singleton");
    assert!(v["checks"][0].get("wall_ms").is_none());

    let (_, err, code) = run_cli(&["verify", "--check", "no-such-check"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown check"));
}

#[test]
fn usage_errors() {
    let (_, err, code) = run_cli(&["enumerate", "--nodes", "4", "--bogus"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());

    let (_, _, code) = run_cli(&["comb"]);
    assert_eq!(code, 2);

    // A poset that is not a co-tree is rejected where a co-tree is required.
    let lambda = write_temp("poset 3\n0 1\n0 2\n");
    let (_, err, code) = run_cli(&["comb", lambda.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("not a co-tree"));

    let (_, err, code) = run_cli(&["comb", "/no/such/file.poset"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
}

#[test]
fn enumeration_bound_is_enforced() {
    let (_, err, code) = run_cli(&["enumerate", "--nodes", "40", "--count-only"]);
    assert_eq!(code, 2);
    assert!(err.contains("at most"));
}

#[test]
fn help_is_not_a_usage_error() {
    let (out, _, code) = run_cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("enumerate"));

    let (_, err, code) = run_cli(&[]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn output_is_reproducible() {
    for args in [
        vec!["enumerate", "--nodes", "6"],
        vec!["leq", "@tau:1,1", "@tau:2,1"],
        vec!["dual", "@tau:0,2"],
        vec!["verify", "--check", "antichain-table"],
        vec!["antichain", "--in-t", "2", "--nodes", "6", "--json"],
    ] {
        let first = run_cli(&args);
        let second = run_cli(&args);
        assert_eq!(first, second, "output drifted for {args:?}");
    }
}

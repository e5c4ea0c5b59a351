use serde_json::Value;
use seqtc_wasm::{cohomology, fixture, fixture_names, tc_bounds, tc_series};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn fixtures_are_bundled() {
    let names = parse(&fixture_names());
    assert_eq!(names.as_array().unwrap().len(), 6);
    assert!(fixture("ky").contains("z = x*y"));
    assert_eq!(fixture("nope"), "");
}

#[test]
fn ky_cohomology() {
    let v = parse(&cohomology(&fixture("ky"), 40));
    let dims: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, [1, 2, 2, 1]);
    assert_eq!(v["status"], "exact");
}

#[test]
fn stiefel_bounds() {
    let v = parse(&tc_bounds(&fixture("stiefel_n2"), 2, "x, z", 40));
    assert_eq!(v["exact"], 3);
}

#[test]
fn ky_series() {
    let v = parse(&tc_series(&fixture("ky"), 3, 60));
    assert_eq!(v["fit"]["p_at_1"], 3);
}

#[test]
fn errors_are_json() {
    let v = parse(&cohomology("[generators]\n", 10));
    assert!(v["error"].as_str().unwrap().contains("no generators"));
    let v = parse(&tc_bounds("[generators]\nx = 3\n", 2, "", 10));
    assert!(v["error"].is_string());
}

use opcalc::acceptance::{run_all, Verdict};

#[test]
fn acceptance_criteria() {
    let verdicts = run_all(|v: &Verdict| {
        let mark = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {:<15} {mark}  {:.2}s  {}", v.id, v.name, v.seconds, v.detail);
    });
    let failed: Vec<_> = verdicts.iter().filter(|v| !v.passed).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

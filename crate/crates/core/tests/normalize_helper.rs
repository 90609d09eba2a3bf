//! One-off normalizer invoked manually: `cargo test --test normalize_helper -- --ignored`.

use std::path::PathBuf;

use gridplan_core::io::{parse_case_file, save_case};

#[test]
#[ignore]
fn rewrite_bundled_cases_in_canonical_form() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../cases");
    for name in ["tiny3.json", "garver6.json", "ieee118-lite.json"] {
        let path = dir.join(name);
        let parsed = parse_case_file(&path).unwrap();
        save_case(&parsed, &path).unwrap();
    }
}

//! Suite reports against the JSON files in `fixtures/`, one per (suite, q, N).
//! Set `UPDATE_FIXTURES=1` to rewrite them.

use std::path::PathBuf;

use drinfeld_cli::suite_outcome;
use drinfeld_core::suites::{default_order, run_suite, SUITES};

fn fixture(suite: &str, q: u64, n: i64) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{suite}_q{q}_N{n}.json"))
}

#[test]
fn reports_match_fixtures() {
    let update = std::env::var_os("UPDATE_FIXTURES").is_some();
    for q in [2u64, 3] {
        for suite in SUITES {
            let n = default_order(suite, q, false);
            let json = suite_outcome(&run_suite(suite, q, n, None).unwrap()).json;
            let path = fixture(suite, q, n);
            if update {
                std::fs::write(&path, &json).unwrap();
                continue;
            }
            let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(json, expected, "{}", path.display());
        }
    }
}

#[test]
fn expansions_match_fixtures() {
    use clap::Parser;
    use drinfeld_cli::{run, Cli};
    let update = std::env::var_os("UPDATE_FIXTURES").is_some();
    let cases: [(&str, &[&str]); 4] = [
        ("expand_h-product_q3_N20.json", &["--form", "h-product", "--q", "3", "--order", "20"]),
        ("expand_h-aexp_q4_N20.json", &["--form", "h-aexp", "--q", "4", "--order", "20"]),
        ("expand_E01_q3_N20.json", &["--form", "E", "--v", "0,1", "--q", "3", "--order", "20"]),
        ("expand_jtilde_q3_N12.json", &["--form", "jtilde", "--q", "3", "--order", "12"]),
    ];
    for (file, args) in cases {
        let cli = Cli::parse_from(["drinfeld", "expand"].iter().chain(args));
        let json = run(&cli).unwrap().json;
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(file);
        if update {
            std::fs::write(&path, &json).unwrap();
            continue;
        }
        assert_eq!(json, std::fs::read_to_string(&path).unwrap(), "{file}");
    }
}

//! Replays the checked-in fuzz seeds through the parsers on stable.

use std::path::PathBuf;

use yukawa_ewald::io::{parse_points, parse_target_spec, TargetSpec};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn point_seeds_parse_or_fail_cleanly() {
    let mut accepted = 0;
    for (path, text) in seeds("parse_points") {
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        match parse_points(&text) {
            Ok(d) => {
                accepted += 1;
                if let Some(s) = &d.strengths {
                    assert_eq!(s.len(), d.positions.len(), "{name}");
                }
            }
            Err(e) => assert!(
                name.starts_with("bad")
                    || ["short_row.csv", "nan.csv", "empty.csv"].contains(&name.as_str()),
                "{name}: {e}"
            ),
        }
    }
    assert_eq!(accepted, 4);
}

#[test]
fn target_spec_seeds_parse_or_fail_cleanly() {
    let got: Vec<(String, bool)> = seeds("parse_target_spec")
        .into_iter()
        .map(|(p, t)| {
            (
                p.file_name().unwrap().to_str().unwrap().to_string(),
                parse_target_spec(&t).is_ok(),
            )
        })
        .collect();
    let ok: Vec<&str> = got
        .iter()
        .filter(|(_, ok)| *ok)
        .map(|(n, _)| n.as_str())
        .collect();
    assert_eq!(ok, ["file", "grid", "grid_upper", "random"]);
    assert_eq!(
        parse_target_spec("grid:3X7").unwrap(),
        TargetSpec::Grid { nx: 3, ny: 7 }
    );
}

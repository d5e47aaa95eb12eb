use std::path::PathBuf;
use std::process::Command;

fn header() -> (PathBuf, String) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/graphconc.h");
    let text = std::fs::read_to_string(&path).expect("build script writes the header");
    (path, text)
}

#[test]
fn declares_every_export() {
    let (_, text) = header();
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(
            text.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for item in [
        "typedef struct GcGraph GcGraph;",
        "typedef struct GcExact GcExact;",
        "GC_STATUS_BUFFER_TOO_SMALL = 9",
    ] {
        assert!(text.contains(item), "{item}");
    }
}

#[test]
fn compiles_as_c() {
    let (path, _) = header();
    let Ok(cc) = std::env::var("CC").or_else(|_| which("cc")) else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let dir = tempfile_dir();
    let main = dir.join("use_header.c");
    std::fs::write(
        &main,
        r#"#include "graphconc.h"
int main(void) {
    GcGraph *g = 0;
    size_t len = 0;
    double v[8];
    if (gc_graph_new(3, false, &g) != GC_STATUS_OK) return 1;
    gc_graph_distribution(g, GC_KIND_DEGREE, v, 8, &len);
    gc_graph_free(g);
    return 0;
}
"#,
    )
    .unwrap();
    let status = Command::new(cc)
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-pedantic",
            "-fsyntax-only",
            "-I",
        ])
        .arg(path.parent().unwrap())
        .arg(&main)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which(name: &str) -> Result<String, ()> {
    let ok = Command::new(name)
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success());
    if ok {
        Ok(name.to_string())
    } else {
        Err(())
    }
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("header-check");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

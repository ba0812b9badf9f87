use std::path::Path;
use std::process::Command;

const HEADER: &str = include_str!("../include/georot.h");

#[test]
fn header_declares_the_api() {
    for name in [
        "georot_last_error_message",
        "georot_field_from_json",
        "georot_field_linear",
        "georot_field_free",
        "georot_field_rotate_outer",
        "georot_field_l2_norm",
        "georot_correlate",
        "georot_detect",
        "georot_report_alpha",
        "georot_report_plane",
        "georot_report_iterations",
        "georot_report_converged",
        "georot_report_corrected_pattern",
        "georot_report_free",
        "georot_run_trials",
        "typedef struct GeorotField GeorotField",
        "typedef struct GeorotReport GeorotReport",
        "GEOROT_STATUS_OK = 0",
    ] {
        assert!(HEADER.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"georot.h\"\nint main(void) { GeorotTrialStats s; (void)s; return georot_last_error_message() != 0; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("no C compiler on PATH; skipping");
            return;
        }
    };
    assert!(status.success());
}

use std::path::PathBuf;
use std::process::Command;

/// The cdylib sits next to the `deps` directory holding this test binary.
fn library() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    ["libhmhd.so", "libhmhd.dylib", "hmhd.dll"].iter().map(|n| dir.join(n)).find(|p| p.exists())
}

#[test]
fn python_smoke_script_passes() {
    let Some(lib) = library() else {
        eprintln!("skipping: extension library not built");
        return;
    };
    if Command::new("python3").arg("--version").output().is_err() {
        eprintln!("skipping: python3 not available");
        return;
    }
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../python/smoke_test.py");
    let out = Command::new("python3").arg(&script).env("HMHD_LIBRARY", &lib).output().unwrap();
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("smoke test passed"));
}

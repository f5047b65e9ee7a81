//! Compiles a small C program against the generated header and the static library.
use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <stdlib.h>
#include "smoothcx.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    rewind(f);
    char *buf = malloc(n + 1);
    fread(buf, 1, n, f);
    buf[n] = 0;
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    char *text = slurp(argv[1]);
    smx_instance *inst = NULL;
    if (smx_instance_parse(text, &inst) != SMX_STATUS_OK) {
        fprintf(stderr, "%s\n", smx_last_error());
        return 2;
    }
    smx_report *rep = NULL;
    if (smx_decide(inst, true, &rep) != SMX_STATUS_OK) return 3;
    smx_verdict v;
    smx_report_verdict(rep, &v);
    int rc = smx_check_witness(inst, smx_report_json(rep));
    printf("verdict=%d degree=%u check=%d\n", (int)v, smx_report_witness_degree(rep), rc);
    smx_report_free(rep);
    smx_instance_free(inst);
    free(text);
    return v == SMX_VERDICT_SMOOTHABLE ? 0 : 1;
}
"#;

fn find_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
}

/// target/<profile>/ holding the static library, found from this test binary's path.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = find_cc() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let lib = profile_dir().join("libsmoothcx_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = std::env::temp_dir().join(format!("smoothcx-c-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("client.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.join("client");
    let out = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let run = |name: &str| Command::new(&bin).arg(manifest.join("../core/data").join(name)).output().unwrap();
    let pos = run("ebif.json");
    let stdout = String::from_utf8_lossy(&pos.stdout).to_string();
    assert_eq!(pos.status.code(), Some(0), "{stdout}");
    assert!(stdout.starts_with("verdict=3 degree="), "{stdout}");
    assert!(stdout.trim_end().ends_with("check=0"), "{stdout}");
    let neg = run("beta_forcing.json");
    assert_eq!(neg.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&neg.stdout).contains("verdict=2"));
    std::fs::remove_dir_all(&dir).ok();
}

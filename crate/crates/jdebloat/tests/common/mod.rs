#![allow(dead_code)]

use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::Command;

use jdebloat::core::archive::Archive;
use jdebloat::zip::write_archive;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn jdebloat<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_jdebloat"))
        .args(args)
        .output()
        .expect("run jdebloat");
    Output {
        code: out.status.code().expect("exit status"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn write_jar(dir: &Path, archive: &Archive) -> PathBuf {
    let path = dir.join(&archive.label);
    std::fs::write(&path, write_archive(archive.entries()).unwrap()).unwrap();
    path
}

#[derive(Clone)]
pub struct F1 {
    pub app: PathBuf,
    pub lib: PathBuf,
    pub kb: PathBuf,
}

/// Materializes F1 through the `fixtures` command.
pub fn f1(dir: &Path) -> F1 {
    let out = jdebloat([OsStr::new("fixtures"), OsStr::new("--out"), dir.as_os_str()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    F1 {
        app: dir.join("app.jar"),
        lib: dir.join("lib.jar"),
        kb: dir.join("kb.json"),
    }
}

/// Runs `debloat` on F1 with extra flags and returns the used-class list.
pub fn debloat_f1(f: &F1, out: &Path, extra: &[&str]) -> String {
    let mut args: Vec<&OsStr> = vec![
        "debloat".as_ref(),
        "--app".as_ref(),
        f.app.as_os_str(),
        "--dep".as_ref(),
        f.lib.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ];
    args.extend(extra.iter().map(OsStr::new));
    let run = jdebloat(args);
    assert_eq!(run.code, 0, "{}", run.stderr);
    std::fs::read_to_string(out.join("used-classes.txt")).unwrap()
}

pub fn lines(text: &str) -> Vec<&str> {
    text.lines().collect()
}

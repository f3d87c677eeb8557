use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghost-slopes"))
        .args(args)
        .env_remove("GHOST_SLOPES_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn thresholds_at_24() {
    let text = stdout(&["thresholds", "-p", "7", "-a", "2", "-e", "1", "-k", "24", "--format", "json"]);
    assert_eq!(
        text,
        "{\"global_mult\":1,\"k\":24,\"local\":[\"9\",\"6\",\"2\",\"1\",\"6\",\"9\"],\
         \"provenance\":[\"closed\",\"closed\",\"sweep\",\"sweep\",\"closed\",\"closed\"]}\n"
    );
}

#[test]
fn slopes_above_top_threshold() {
    let text = stdout(&["slopes", "-k", "24", "-r", "10", "--format", "csv"]);
    assert_eq!(text, "index,slope\n1,11\n2,11\n3,11\n4,11\n5,11\n6,11\n");
}

#[test]
fn ghost_rendering() {
    assert_eq!(stdout(&["ghost", "-n", "1"]), "g_1(w) = (w - w_6)\n");
    assert_eq!(stdout(&["ghost", "-n", "0", "--format", "json"]), "[]\n");
    let g8 = stdout(&["ghost", "-n", "8"]);
    assert!(g8.lines().nth(3).unwrap().contains("(w - w_24)^3"));
    assert!(g8.lines().nth(7).unwrap().contains("(w - w_48)^6"));
    assert_eq!(g8, stdout(&["ghost", "-n", "8"]));
}

#[test]
fn dist_is_canonical() {
    let args = ["dist", "--k-range", "1000:1200", "--stride", "10", "-n", "2"];
    let a = stdout(&args);
    assert!(a.starts_with("k,kind,n,moment_num"));
    assert_eq!(a, stdout(&args));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["-p", "4", "ghost", "-n", "1"]).status.code(), Some(1));
    assert_eq!(run(&["thresholds", "--k-range", "9:1"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["thresholds", "-k", "25"]).status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

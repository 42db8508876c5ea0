use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const ZERO_KEY: &str = "00000000000000000000000000000000";
const ZERO_NONCE: &str = "000000000000000000000000";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_grain-ple"));
    c.env_remove("GRAIN_PLE_STORE_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn core_golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(name);
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn keystream_matches_golden_on_both_backends() {
    let golden = core_golden("zero_keystream.txt");
    let z0 = golden.trim().strip_prefix("z[0..128)=").unwrap();
    for backend in ["reference", "optimized"] {
        let o = run(&["keystream", "--key", ZERO_KEY, "--nonce", ZERO_NONCE, "--bits", "128", "--backend", backend]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), z0);
    }
}

#[test]
fn zero_bit_keystream_is_empty() {
    let o = run(&["keystream", "--key", ZERO_KEY, "--nonce", ZERO_NONCE, "--bits", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["keystream", "--key", "abc", "--nonce", ZERO_NONCE, "--bits", "8"],
        vec!["keystream", "--key", ZERO_KEY, "--nonce", "zz0000000000000000000000", "--bits", "8"],
        vec!["simulate", "--p", "1.5"],
        vec!["simulate", "--p", "0.1", "--codec", "ldpc"],
        vec!["simulate", "--p", "0.1", "--trials", "0"],
        vec!["keystream", "--key", ZERO_KEY, "--nonce", ZERO_NONCE, "--bits", "8", "--backend", "fast"],
        vec!["nonsense"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_1() {
    let o = run(&["decrypt", "--key", ZERO_KEY, "--nonce", ZERO_NONCE, "--in", "/nonexistent/f", "--out", "/tmp/x"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["simulate", "--p", "0.1", "--bits", "5"]);
    assert_eq!(o.status.code(), Some(1), "5 bits is not a multiple of k = 4");
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn noiseless_simulation_has_no_frame_errors() {
    let o = run(&["simulate", "--p", "0", "--ple", "on", "--trials", "4", "--bits", "800"]);
    assert!(o.status.success());
    let fer = column(&stdout(&o), "post_fer");
    assert_eq!(fer.len(), 4);
    assert!(fer.iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn ple_toggle_leaves_post_fer_unchanged() {
    let base = ["simulate", "--p", "0.01,0.05", "--trials", "5", "--seed", "9", "--codec", "repetition3", "--bits", "900"];
    let on = run(&[&base[..], &["--ple", "on"]].concat());
    let off = run(&[&base[..], &["--ple", "off"]].concat());
    let (on, off) = (stdout(&on), stdout(&off));
    for col in ["post_fer", "raw_ber", "errors_injected", "seed"] {
        assert_eq!(column(&on, col), column(&off, col), "{col}");
    }
    assert_ne!(column(&on, "eve_ber"), column(&off, "eve_ber"));
}

#[test]
fn pinned_sweep_reproduces_golden_csv() {
    let args = [
        "simulate", "--key", "000102030405060708090a0b0c0d0e0f", "--nonce", ZERO_NONCE,
        "--codec", "hamming74", "--p", "0,0.01,0.05", "--trials", "3", "--bits", "400",
        "--seed", "2024", "--ple", "on",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&first), core_golden("sweep.csv"));
}

#[test]
fn vectors_match_golden_files() {
    let o = run(&["vectors"]);
    assert!(o.status.success());
    let expected = core_golden("zero_state.txt") + &core_golden("zero_keystream.txt");
    assert_eq!(stdout(&o), expected);
    let o = run(&["vectors", "--backend", "optimized"]);
    assert_eq!(stdout(&o), expected);
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn encrypt_decrypt_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let raw = tmp(&dir, "raw.bin");
    std::fs::write(&raw, b"header and payload bytes").unwrap();
    let plain = tmp(&dir, "plain.ple");
    let enc = tmp(&dir, "enc.ple");
    let dec = tmp(&dir, "dec.ple");
    let s = |p: &PathBuf| p.to_str().unwrap().to_string();

    assert!(run(&["frame", "--in", &s(&raw), "--out", &s(&plain), "--codeword-len", "8", "--disclosed-prefix", "48"]).status.success());
    let key = "2b7e151628aed2a6abf7158809cf4f3c";
    let nonce = "000000000000000000000005";
    assert!(run(&["encrypt", "--key", key, "--nonce", nonce, "--in", &s(&plain), "--out", &s(&enc)]).status.success());
    assert!(run(&["decrypt", "--key", key, "--nonce", nonce, "--in", &s(&enc), "--out", &s(&dec), "--backend", "reference"]).status.success());

    let plain_bytes = std::fs::read(&plain).unwrap();
    let enc_bytes = std::fs::read(&enc).unwrap();
    assert_eq!(std::fs::read(&dec).unwrap(), plain_bytes);
    assert_eq!(enc_bytes.len(), plain_bytes.len());
    // header and the 6 disclosed bytes are in the clear, the rest is not
    assert_eq!(enc_bytes[..18], plain_bytes[..18]);
    assert_ne!(enc_bytes[18..], plain_bytes[18..]);
}

#[test]
fn session_store_issues_fresh_nonces_and_blocks_replays() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let raw = tmp(&dir, "raw.bin");
    std::fs::write(&raw, [0xa5u8; 16]).unwrap();
    let plain = tmp(&dir, "plain.ple");
    let s = |p: &PathBuf| p.to_str().unwrap().to_string();
    assert!(run(&["frame", "--in", &s(&raw), "--out", &s(&plain), "--codeword-len", "4"]).status.success());
    let key = "00112233445566778899aabbccddeeff";

    let mut nonces = Vec::new();
    for i in 0..3 {
        let enc = tmp(&dir, &format!("enc{i}.ple"));
        let o = bin()
            .env("GRAIN_PLE_STORE_DIR", &store)
            .args(["encrypt", "--key", key, "--in", &s(&plain), "--out", &s(&enc)])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        nonces.push(stdout(&o).trim().strip_prefix("nonce=").unwrap().to_string());
    }
    assert_eq!(nonces, ["000000000000000000000000", "000000000000000000000001", "000000000000000000000002"]);

    let decrypt = |i: usize| {
        bin()
            .env("GRAIN_PLE_STORE_DIR", &store)
            .args([
                "decrypt", "--key", key, "--nonce", &nonces[i],
                "--in", &s(&tmp(&dir, &format!("enc{i}.ple"))),
                "--out", &s(&tmp(&dir, &format!("dec{i}.ple"))),
            ])
            .output()
            .unwrap()
    };
    assert!(decrypt(0).status.success());
    assert!(decrypt(2).status.success());
    assert!(decrypt(1).status.success(), "out of order within the window");
    let replay = decrypt(1);
    assert_eq!(replay.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&replay.stderr).contains("Duplicate"));
    assert_eq!(std::fs::read(tmp(&dir, "dec2.ple")).unwrap(), std::fs::read(&plain).unwrap());

    // encrypting without a nonce or a store is refused
    let o = run(&["encrypt", "--key", key, "--in", &s(&plain), "--out", &s(&tmp(&dir, "x.ple"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_reports_two_positive_rates() {
    let o = run(&["bench", "--bits", "20000"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rates: Vec<f64> = out
        .lines()
        .filter(|l| l.starts_with("reference:") || l.starts_with("optimized:"))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rates.len(), 2);
    assert!(rates.iter().all(|&r| r > 0.0));
}

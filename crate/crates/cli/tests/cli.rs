//! End-to-end runs of the `grpd` binary against the fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn grpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grpd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_fixture(subcommand: &str, names: &[&str], extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec![subcommand.to_string()];
    for name in names {
        args.push(fixture(name).to_string_lossy().into_owned());
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    let arg_refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    grpd(&arg_refs)
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn validate_b_z2_exits_zero() {
    let out = run_fixture("validate", &["b_z2.grpd"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all groupoid and chart axioms hold"));
}

#[test]
fn validate_broken_groupoid_exits_one_with_witness() {
    let out = run_fixture("validate", &["broken_inv.grpd"], &[]);
    assert_eq!(exit_code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("inv missing"), "{text}");
}

#[test]
fn validate_action_fixture() {
    let out = run_fixture("validate", &["z3_rotation.act"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all action axioms hold"));
}

#[test]
fn validate_missing_file_exits_two() {
    let out = run_fixture("validate", &["no_such_file.grpd"], &[]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn parse_error_cites_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.grpd");
    std::fs::write(&path, "GRPD v1\nobjects: a a\n").unwrap();
    let out = grpd(&["validate", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn equiv_distinguishes_stabilizer_types() {
    let out = run_fixture("equiv", &["b_z4.grpd", "b_v4.grpd"], &[]);
    assert_eq!(exit_code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("stabilizer types differ"), "{text}");
}

#[test]
fn equiv_pair_groupoid_with_point() {
    let out = run_fixture("equiv", &["pair3.grpd", "point.grpd"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("equivalent: yes"));
}

#[test]
fn present_emits_a_verifiable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("b_z4_swap.cert");
    let out = run_fixture(
        "present",
        &["b_z4_swap.grpd"],
        &["--out", cert.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let verify = grpd(&["verify", cert.to_str().unwrap()]);
    assert_eq!(
        exit_code(&verify),
        0,
        "{}",
        String::from_utf8_lossy(&verify.stdout)
    );
    let text = String::from_utf8_lossy(&verify.stdout);
    assert!(text.contains("verdict: pass"));
}

#[test]
fn corrupted_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert");
    let out = run_fixture("present", &["b_z2.grpd"], &["--out", cert.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    // Corrupt one ract line: swap its result with a different point.
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let ract_at = lines.iter().position(|l| l == "ract:").unwrap();
    let entry: Vec<&str> = lines[ract_at + 1].split_whitespace().collect();
    let (p, h, q): (u32, u32, u32) =
        (entry[0].parse().unwrap(), entry[1].parse().unwrap(), entry[2].parse().unwrap());
    lines[ract_at + 1] = format!("{p} {h} {}", if q == 0 { 1 } else { 0 });
    std::fs::write(&cert, lines.join("\n") + "\n").unwrap();
    let verify = grpd(&["verify", cert.to_str().unwrap()]);
    assert_eq!(exit_code(&verify), 1);
    let text = String::from_utf8_lossy(&verify.stdout);
    assert!(text.contains("fail"), "{text}");
}

#[test]
fn regenerated_certificate_after_relabeling_verifies() {
    // The same groupoid with permuted arrow ids: the regenerated certificate
    // still verifies (checks are relabel-invariant), though its bytes differ.
    let dir = tempfile::tempdir().unwrap();
    let original = dir.path().join("orig.cert");
    let relabeled = dir.path().join("relab.cert");
    let out = run_fixture(
        "present",
        &["b_z4_swap.grpd"],
        &["--out", original.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0);
    let out = run_fixture(
        "present",
        &["b_z4_swap_relabeled.grpd"],
        &["--out", relabeled.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0);
    assert_eq!(exit_code(&grpd(&["verify", original.to_str().unwrap()])), 0);
    assert_eq!(exit_code(&grpd(&["verify", relabeled.to_str().unwrap()])), 0);
    assert_ne!(
        std::fs::read(&original).unwrap(),
        std::fs::read(&relabeled).unwrap()
    );
}

#[test]
fn frames_and_band_emit_verifiable_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("frames.cert");
    let out = run_fixture(
        "frames",
        &["b_z4_swap.grpd"],
        &["--out", cert.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0);
    assert_eq!(exit_code(&grpd(&["verify", cert.to_str().unwrap()])), 0);

    let cert = dir.path().join("band.cert");
    let out = run_fixture("band", &["b_z2.grpd"], &["--out", cert.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(exit_code(&grpd(&["verify", cert.to_str().unwrap()])), 0);
}

#[test]
fn present_set_reduces_trivial_center_bands() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("s3.cert");
    let out = run_fixture(
        "present",
        &["b_s3.grpd"],
        &["--set", "--out", cert.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("set presentation: 1 points"), "{text}");
    assert_eq!(exit_code(&grpd(&["verify", cert.to_str().unwrap()])), 0);
    // A nontrivial band center is refused.
    let out = run_fixture("present", &["b_z2.grpd"], &["--set"]);
    assert_eq!(exit_code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("nontrivial center"), "{text}");
}

#[test]
fn band_refuses_effective_input() {
    let out = run_fixture("band", &["b_z4_swap.grpd"], &[]);
    assert_eq!(exit_code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("not purely ineffective"), "{text}");
}

#[test]
fn effectivize_collapses_the_swap_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eff.grpd");
    let out = run_fixture(
        "effectivize",
        &["b_z4_swap.grpd"],
        &["--out", path.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("4 arrows -> 2 classes"), "{text}");
    let validate = grpd(&["validate", path.to_str().unwrap()]);
    assert_eq!(exit_code(&validate), 0);
}

#[test]
fn glue_good_datum_and_refuse_negated_one() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("glued.grpd");
    let out = run_fixture(
        "glue",
        &["desc_good.desc"],
        &["--out", bundle.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let validate = grpd(&["validate", bundle.to_str().unwrap()]);
    assert_eq!(exit_code(&validate), 0);

    let out = run_fixture("glue", &["desc_bad.desc"], &[]);
    assert_eq!(exit_code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("cocycle violated on triple"), "{text}");
}

#[test]
fn validate_descent_fixture() {
    let out = run_fixture("validate", &["desc_good.desc"], &[]);
    assert_eq!(exit_code(&out), 0);
    let out = run_fixture("validate", &["desc_bad.desc"], &[]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn compose_round_trip_through_files() {
    // Glue the good datum twice and compose the bundle with an identity-like
    // partner produced from the same file: a quick end-to-end composition.
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("glued.grpd");
    let out = run_fixture(
        "glue",
        &["desc_good.desc"],
        &["--out", bundle.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0);
    // Identity bibundle of B(Z/2) as the second factor.
    let id_file = dir.path().join("id.grpd");
    let id_text = {
        use grpd_core::bibundle::identity_bibundle;
        use grpd_core::format::write_bibundle_file;
        use grpd_core::group::FiniteGroup;
        use grpd_core::groupoid::b_group;
        write_bibundle_file(&identity_bibundle(&b_group(&FiniteGroup::cyclic(2))))
    };
    std::fs::write(&id_file, id_text).unwrap();
    let composed = dir.path().join("composed.grpd");
    let out = grpd(&[
        "compose",
        bundle.to_str().unwrap(),
        id_file.to_str().unwrap(),
        "--out",
        composed.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(exit_code(&grpd(&["validate", composed.to_str().unwrap()])), 0);
}

#[test]
fn stackcheck_on_the_circle_cover() {
    let out = run_fixture("stackcheck", &["cover2.cover", "b_z2_plain.grpd"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("mode: exhaustive"));
    assert!(text.contains("verdict: pass"));
}

#[test]
fn max_size_guardrail_rejects_large_jobs() {
    let out = run_fixture("present", &["b_z4_swap.grpd"], &["--max-size", "3"]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--max-size"), "{err}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> (String, Vec<u8>) {
        let cert = dir.path().join(name);
        let out = run_fixture(
            "present",
            &["b_z4_swap.grpd"],
            &["--out", cert.to_str().unwrap()],
        );
        assert_eq!(exit_code(&out), 0);
        // Drop the `wrote <path>` trailer, which names the output file.
        let report: String = String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("wrote "))
            .map(|l| format!("{l}\n"))
            .collect();
        (report, std::fs::read(&cert).unwrap())
    };
    let (report1, cert1) = run("one.cert");
    let (report2, cert2) = run("two.cert");
    assert_eq!(report1, report2);
    assert_eq!(cert1, cert2);
}

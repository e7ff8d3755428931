use std::path::{Path, PathBuf};
use std::process::Command;

use disjhull::families::gen_hyperrect;
use disjhull::random::{random_boxes, random_instance};
use disjhull::{enumerate_facets, LinearInequality};
use disjhull_cli::format::{read_json, FacetFile, InstanceFile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn disjhull(args: &[&str], env: &[(&str, &str)]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_disjhull"))
        .args(args)
        .env_remove("DISJHULL_ORACLE_CAP")
        .envs(env.iter().copied())
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", s(&path)]);
    let r = disjhull(&all, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    path
}

fn reflected(dir: &Path) -> PathBuf {
    gen(dir, "rs.json", &["reflected-simplex", "--d", "3", "--a", "1", "--b", "5"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn instance_files_round_trip(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=3) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), d, n, 5);
        let file = InstanceFile::from_instance(&inst, None);
        let text = serde_json::to_string(&file).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_instance().unwrap(), inst);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn facet_files_round_trip(seed in any::<u64>(), d in 1usize..=2, n in 1usize..=2) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), d, n, 5);
        let list = enumerate_facets(&inst).unwrap();
        let file = FacetFile::from_list(&list, "signature");
        let text = serde_json::to_string(&file).unwrap();
        let back: FacetFile = serde_json::from_str(&text).unwrap();
        let relisted = back.to_list().unwrap();
        prop_assert_eq!(relisted.inequalities(), list.inequalities());
        for (a, b) in relisted.iter().zip(list.iter()) {
            prop_assert_eq!(a.provenance, b.provenance);
            prop_assert_eq!(a.signatures.first(), b.signatures.first());
        }
        prop_assert_eq!(FacetFile::from_list(&relisted, "signature"), file);
    }
}

#[test]
fn reflected_simplex_hull_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = reflected(dir.path());
    let out = dir.path().join("hull.json");
    let r = disjhull(&["hull", s(&inst), "--out", s(&out)], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim(), "16 facets (nonvertical 2, lifting 8, other 6)");
    let file: FacetFile = read_json(&out).unwrap();
    assert_eq!(file.meta.generator, "signature");
    assert_eq!(file.meta.counts["other"], 6);

    let v = disjhull(&["verify", s(&inst)], &[]);
    assert_eq!(v.code, 0, "{}", v.stdout);
    assert!(v.stdout.contains("signature vs oracle: equal"));
    assert!(v.stdout.contains("lifting vs oracle: lifting misses 6"));
    assert_eq!(v.stdout.matches("  missed: ").count(), 6);
    assert!(v.stdout.contains("closed-form vs oracle: equal"));
}

#[test]
fn hull_methods_agree_on_a_box() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "box.json", &["hyperrect", "--bounds", "0,2;0,2", "3,4;3,4"]);
    let mut sets = Vec::new();
    for method in ["signature", "lifting", "closed-form", "oracle"] {
        let r = disjhull(&["hull", s(&inst), "--method", method], &[]);
        assert_eq!(r.code, 0, "{method}: {}", r.stderr);
        let file: FacetFile = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(file.meta.generator, method);
        sets.push(file.to_list().unwrap().inequalities());
    }
    assert!(sets.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(sets[0].len(), 6);
    assert_eq!(disjhull(&["check-phi", s(&inst)], &[]).code, 0);
}

#[test]
fn negative_bounds_use_the_equals_form() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "neg.json", &["hyperrect", "--bounds=-3,-1", "--bounds", "2,5"]);
    let file: InstanceFile = read_json(&inst).unwrap();
    let expected = gen_hyperrect(&[
        (disjhull::RatVector::from_ints(&[-3]), disjhull::RatVector::from_ints(&[-1])),
        (disjhull::RatVector::from_ints(&[2]), disjhull::RatVector::from_ints(&[5])),
    ])
    .unwrap();
    assert_eq!(file.to_instance().unwrap(), expected);
}

#[test]
fn padded_simplex_fails_phi() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "pad.json", &["padded-simplex"]);
    let r = disjhull(&["check-phi", s(&inst)], &[]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("witness tau=(1,2,3)"));
    assert!(r.stdout.contains("P0: x = (5, 5, 5) feasible"));
    assert!(r.stdout.contains("P1: x = (1, 1, 1) infeasible"));
    let cf = disjhull(&["hull", s(&inst), "--method", "closed-form"], &[]);
    assert_eq!(cf.code, 3, "{}", cf.stderr);

    let skewed = dir.path().join("skewed.json");
    let g = disjhull(&["gen", "padded-simplex", "--skewed-row", "--out", s(&skewed)], &[]);
    assert_eq!(g.code, 0);
    assert!(g.stderr.contains("P0 is empty"));
    let info = disjhull(&["info", s(&skewed)], &[]);
    assert_eq!(info.code, 2);
    assert!(info.stdout.contains("P0: 8 rows, polytope is empty"));
    assert_eq!(disjhull(&["hull", s(&skewed)], &[]).code, 2);
}

#[test]
fn mir_from_weighted_liftings() {
    let dir = tempfile::tempdir().unwrap();
    let inst = reflected(dir.path());
    let r = disjhull(&["hull", s(&inst), "--method", "lifting"], &[]);
    let lifting: FacetFile = serde_json::from_str(&r.stdout).unwrap();
    let list = lifting.to_list().unwrap();
    let pos = |q: LinearInequality| list.iter().position(|f| f.inequality == q).unwrap();
    let s1 = pos(LinearInequality::from_ints(&[1, 0, 0], &[4], 5));
    let t = pos(LinearInequality::from_ints(&[-1, -1, -1], &[-14], -14));
    let combine = format!("{s1}:1/10,{t}:1/10");
    let m = disjhull(&["mir", s(&inst), "--combine", &combine], &[]);
    assert_eq!(m.code, 0, "{}", m.stderr);
    let cut = serde_json::from_str::<FacetFile>(&m.stdout).unwrap().to_list().unwrap();
    assert_eq!(cut.len(), 1);
    assert_eq!(cut.facets()[0].inequality, LinearInequality::from_ints(&[0, -1, -1], &[-9], -9));

    let bad = disjhull(&["mir", s(&inst), "--combine", "99:1"], &[]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("out of range"));
}

#[test]
fn mir_refuses_negative_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "neg.json", &["hyperrect", "--bounds=-2,1", "--bounds", "3,4"]);
    let r = disjhull(&["mir", s(&inst), "--combine", "0:1"], &[]);
    assert_eq!(r.code, 2);
}

#[test]
fn reflected_simplex_cuts_are_certified() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "r4.json", &["reflected-simplex", "--d", "4", "--a", "1", "--b", "3"]);
    let out = dir.path().join("cuts.json");
    let r = disjhull(&["mir", s(&inst), "--reflected-simplex", "--out", s(&out)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("certified: 20 of 20"));
    let cuts: FacetFile = read_json(&out).unwrap();
    assert_eq!(cuts.facets.len(), 20);
    assert!(cuts.facets.iter().all(|f| f.provenance == "mir"));

    let boxed = gen(dir.path(), "box.json", &["hyperrect", "--bounds", "0,1", "2,3"]);
    assert_eq!(disjhull(&["mir", s(&boxed), "--reflected-simplex"], &[]).code, 2);
}

#[test]
fn oracle_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let inst = reflected(dir.path());
    let small = disjhull(&["hull", s(&inst), "--method", "oracle"], &[("DISJHULL_ORACLE_CAP", "10")]);
    assert_eq!(small.code, 2);
    assert!(small.stderr.contains("cap is 10"));
    let bad = disjhull(&["verify", s(&inst)], &[("DISJHULL_ORACLE_CAP", "lots")]);
    assert_eq!(bad.code, 2);
    let ok = disjhull(&["hull", s(&inst), "--method", "oracle"], &[("DISJHULL_ORACLE_CAP", "70")]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
}

#[test]
fn one_dimensional_instances_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("three.json");
    std::fs::write(
        &path,
        r#"{"d":1,"n":2,"polytopes":[
            {"A":[[1],[-1]],"b":[1,0]},
            {"A":[[1],[-1]],"b":[3,-2]},
            {"A":[[1],[-1]],"b":["5","-4"]}]}"#,
    )
    .unwrap();
    let v = disjhull(&["verify", s(&path)], &[]);
    assert_eq!(v.code, 0);
    assert!(v.stdout.contains("lifting vs oracle: equal"));
    let r = disjhull(&["hull", s(&path)], &[]);
    let list = serde_json::from_str::<FacetFile>(&r.stdout).unwrap().to_list().unwrap();
    assert!(list.contains(&LinearInequality::from_ints(&[1], &[-2, -4], 1)));
    assert!(list.contains(&LinearInequality::from_ints(&[-1], &[2, 4], 0)));
    assert_eq!(list.len(), 5);
}

#[test]
fn random_boxes_verify() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..4 {
        let bounds = random_boxes(&mut ChaCha8Rng::seed_from_u64(seed), 2, 2);
        let inst = gen_hyperrect(&bounds).unwrap();
        let path = dir.path().join(format!("box{seed}.json"));
        std::fs::write(&path, serde_json::to_string(&InstanceFile::from_instance(&inst, None)).unwrap()).unwrap();
        let v = disjhull(&["verify", s(&path)], &[]);
        assert_eq!(v.code, 0);
        assert!(v.stdout.contains("closed-form vs oracle: equal"), "{}", v.stdout);
    }
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(disjhull(&["info", s(&missing)], &[]).code, 2);

    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, r#"{"d":1,"n":1,"polytopes":[{"A":[["x"]],"b":["1"]}]}"#).unwrap();
    assert_eq!(disjhull(&["hull", s(&garbled)], &[]).code, 2);

    let mixed = dir.path().join("mixed.json");
    std::fs::write(
        &mixed,
        r#"{"d":1,"n":1,"polytopes":[{"A":[[1],[-1]],"b":[1,0]},{"A":[[2],[-1]],"b":[6,-2]}]}"#,
    )
    .unwrap();
    let phi = disjhull(&["check-phi", s(&mixed)], &[]);
    assert_eq!(phi.code, 2);
    assert!(phi.stderr.contains("share one constraint matrix"));
    assert_eq!(disjhull(&["hull", s(&mixed), "--method", "closed-form"], &[]).code, 2);

    let r = disjhull(&["gen", "reflected-simplex", "--d", "2", "--a", "1", "--b", "5"], &[]);
    assert_eq!(r.code, 2);
    assert!(!r.stderr.is_empty());
    assert_eq!(disjhull(&["gen", "reflected-simplex", "--d", "3", "--a", "1/0", "--b", "5"], &[]).code, 2);
    assert_eq!(disjhull(&["hull"], &[]).code, 2);
}

#[test]
fn info_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let inst = reflected(dir.path());
    let r = disjhull(&["info", s(&inst)], &[]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("d = 3, n = 1\n"));
    assert!(r.stdout.contains("P0: 4 rows (0 redundant), 4 vertices, full dimensional"));
}

#[test]
fn perturbation_respects_phi() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("quad.json");
    std::fs::write(
        &base,
        r#"{"d":2,"n":1,"polytopes":[
            {"A":[[-1,0],[0,-1],[1,0],[1,1]],"b":[0,0,2,3]},
            {"A":[[-1,0],[0,-1],[1,0],[1,1]],"b":[0,0,2,3]}]}"#,
    )
    .unwrap();
    let out = dir.path().join("p.json");
    let ok = disjhull(&["gen", "perturb", "--base", s(&base), "--delta", "0,0,1/2,1/2", "--out", s(&out)], &[]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert_eq!(disjhull(&["check-phi", s(&out)], &[]).code, 0);
    let v = disjhull(&["verify", s(&out)], &[]);
    assert_eq!(v.code, 0);
    assert!(v.stdout.contains("closed-form vs oracle: equal"), "{}", v.stdout);

    let broken = dir.path().join("b.json");
    let r = disjhull(&["gen", "perturb", "--base", s(&base), "--delta", "0,0,2,0", "--out", s(&broken)], &[]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("tau=(2,3)"));
    assert!(!broken.exists());
}

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

use tns_core::json::{self, InstanceJson, SplittingJson};
use tns_core::network::{random_instance, NetworkGraph, TnsInstance};
use tns_core::zoo::{loop_identity_instance, m_tilde_formula, mmult, Splitting};
use tns_core::{Field, Tensor};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn tnsgeo(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_tnsgeo"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_instance(dir: &TempDir, name: &str, inst: &TnsInstance) -> PathBuf {
    write(dir, name, &json::render(&InstanceJson::from(inst)))
}

fn write_tensor(dir: &TempDir, name: &str, t: &Tensor) -> PathBuf {
    write(dir, name, &json::tensor_to_string(t))
}

const TRIANGLE: &str = r#"{"vertices":[{"id":0,"dim":4},{"id":1,"dim":4},{"id":2,"dim":4}],
"edges":[{"id":0,"tail":0,"head":1,"dim":2},{"id":1,"tail":1,"head":2,"dim":2},{"id":2,"tail":2,"head":0,"dim":2}]}"#;

#[test]
fn contract_two_vertex_instance_gives_rank_two() {
    let dir = TempDir::new().unwrap();
    let inst = random_instance(&NetworkGraph::chain(&[3, 3], &[2]).unwrap(), 4);
    let p = write_instance(&dir, "inst.json", &inst);
    let r = tnsgeo(&["contract", s(&p)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = json::tensor_from_str(&r.stdout).unwrap();
    assert_eq!(t.shape(), &[3, 3]);
    assert_eq!(t.flatten(0).rank(), 2);
}

#[test]
fn contract_zero_instance() {
    let dir = TempDir::new().unwrap();
    let g = NetworkGraph::chain(&[3, 3], &[2]).unwrap();
    let zeros = (0..2)
        .map(|p| Tensor::zeros(&g.tensor_shape(p), Field::Rational))
        .collect();
    let p = write_instance(&dir, "zero.json", &TnsInstance::new(g, zeros).unwrap());
    let r = tnsgeo(&["contract", s(&p)]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["entries"], Value::Array(vec![]));
}

#[test]
fn contract_identity_triangle_is_mmult_bytes() {
    let dir = TempDir::new().unwrap();
    let p = write_instance(
        &dir,
        "id.json",
        &loop_identity_instance(&[2, 2, 2]).unwrap(),
    );
    let out = dir.path().join("t.json");
    let r = tnsgeo(&["contract", s(&p), "--out", s(&out)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        json::tensor_to_string(&mmult(2, 2, 2))
    );
}

#[test]
fn contract_shape_mismatch_is_semantic() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"vertices":[{"id":0,"dim":2},{"id":1,"dim":2}],"edges":[{"id":0,"tail":0,"head":1,"dim":2}],
"tensors":{"0":{"shape":[2,3],"entries":[]},"1":{"shape":[2,2],"entries":[]}}}"#;
    let p = write(&dir, "bad.json", text);
    let r = tnsgeo(&["contract", s(&p)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("shape"));
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", "{\"shape\": [2,");
    for cmd in ["contract", "stabilizer", "dim", "reduce"] {
        assert_eq!(tnsgeo(&[cmd, s(&p)]).code, 2, "{cmd}");
    }
    assert_eq!(tnsgeo(&["contract", "/nonexistent/file.json"]).code, 2);
}

#[test]
fn stabilizer_reports() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (mmult(2, 2, 2), 11, 37),
        (m_tilde_formula(2).unwrap(), 12, 36),
        (Tensor::zeros(&[4, 4, 4], Field::Rational), 48, 0),
    ];
    for (k, (t, stab, orbit)) in cases.iter().enumerate() {
        let p = write_tensor(&dir, &format!("t{k}.json"), t);
        let r = tnsgeo(&["stabilizer", s(&p)]);
        assert_eq!(r.code, 0);
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(v["stab_dim"], *stab);
        assert_eq!(v["orbit_dim"], *orbit);
        assert_eq!(v["field"], "rational");
        assert_eq!(v["prime"], Value::Null);
    }
    let p = write_tensor(&dir, "m.json", &mmult(2, 2, 2));
    let v: Value =
        serde_json::from_str(&tnsgeo(&["stabilizer", s(&p), "--field", "fp"]).stdout).unwrap();
    assert_eq!(
        (v["stab_dim"].as_u64(), v["field"].as_str()),
        (Some(11), Some("Fp"))
    );
    let v: Value =
        serde_json::from_str(&tnsgeo(&["stabilizer", s(&p), "--prime", "2147483647"]).stdout)
            .unwrap();
    assert_eq!(v["prime"], 2147483647u64);
}

#[test]
fn invalid_prime_is_semantic() {
    let dir = TempDir::new().unwrap();
    let p = write_tensor(&dir, "m.json", &mmult(2, 2, 2));
    assert_eq!(tnsgeo(&["stabilizer", s(&p), "--prime", "1000003"]).code, 3);
    assert_eq!(
        tnsgeo(&["stabilizer", s(&p), "--prime", "4294967297"]).code,
        3
    );
    assert_eq!(
        tnsgeo(&[
            "stabilizer",
            s(&p),
            "--field",
            "rational",
            "--prime",
            "2147483647"
        ])
        .code,
        3
    );
}

#[test]
fn certify_defaults() {
    let r = tnsgeo(&["certify", "--e", "2"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["conclusion"], "not_closed_certified");
    assert_eq!(
        (v["stab_mmult"].as_u64(), v["stab_mtilde"].as_u64()),
        (Some(11), Some(12))
    );
    assert_eq!(v["mlrank_mtilde"], serde_json::json!([4, 4, 4]));
    assert_eq!(v["leading_power"], 1);
    assert!(r
        .stdout
        .starts_with("{\n  \"e\": 2,\n  \"stab_mmult\": 11,"));
    // byte-stable
    assert_eq!(tnsgeo(&["certify", "--e", "2"]).stdout, r.stdout);
}

#[test]
fn certify_identity_splitting_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "identity.json",
        &json::render(&SplittingJson::from(&Splitting::identity([4, 4, 4]))),
    );
    let r = tnsgeo(&["certify", "--e", "2", "--splitting", s(&p)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("power-0 term nonzero"));
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["conclusion"], "inconclusive");
}

#[test]
fn certify_rejects_bad_splittings() {
    let dir = TempDir::new().unwrap();
    let two = |n: usize| {
        let entries: Vec<String> = (0..n * n)
            .map(|k| {
                if k % (n + 1) == 0 {
                    "2".into()
                } else {
                    "0".into()
                }
            })
            .collect();
        serde_json::json!({"rows": n, "cols": n, "entries": entries})
    };
    let id = |n: usize| {
        let entries: Vec<String> = (0..n * n)
            .map(|k| {
                if k % (n + 1) == 0 {
                    "1".into()
                } else {
                    "0".into()
                }
            })
            .collect();
        serde_json::json!({"rows": n, "cols": n, "entries": entries})
    };
    let bad = serde_json::json!({"X0": two(4), "Y0": id(4), "Z0": id(4)});
    let p = write(&dir, "bad.json", &bad.to_string());
    let r = tnsgeo(&["certify", "--e", "2", "--splitting", s(&p)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("idempotent"));
    let wrong = serde_json::json!({"X0": id(9), "Y0": id(9), "Z0": id(9)});
    let p = write(&dir, "wrong.json", &wrong.to_string());
    assert_eq!(
        tnsgeo(&["certify", "--e", "2", "--splitting", s(&p)]).code,
        3
    );
    assert_eq!(tnsgeo(&["certify", "--e", "1"]).code, 3);
}

#[test]
fn dim_reports() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "tri.json", TRIANGLE);
    let r = tnsgeo(&["dim", s(&p), "--seed", "7"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["jacobian_dim"], 37);
    assert_eq!(v["formula_dim"], 37);
    assert_eq!(v["agree"], true);
    assert_eq!(v["seed"], 7);

    // subcritical triangle: no closed form
    let sub = TRIANGLE.replace("\"dim\":4", "\"dim\":3");
    let p = write(&dir, "sub.json", &sub);
    let v: Value = serde_json::from_str(&tnsgeo(&["dim", s(&p)]).stdout).unwrap();
    assert_eq!(v["formula_dim"], "unknown");
    assert_eq!(v["agree"], Value::Null);
}

#[test]
fn reduce_chain_four() {
    let dir = TempDir::new().unwrap();
    let g = NetworkGraph::chain(&[2, 3, 3, 2], &[2, 3, 2]).unwrap();
    let p = write(
        &dir,
        "chain.json",
        &json::render(&json::GraphJson::from(&g)),
    );
    let r = tnsgeo(&["reduce", s(&p)]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(
        v["graph"]["vertices"],
        serde_json::json!([{"id": 1, "dim": 6}, {"id": 2, "dim": 6}])
    );
    assert_eq!(
        v["graph"]["edges"],
        serde_json::json!([{"id": 1, "tail": 1, "head": 2, "dim": 3}])
    );
    assert_eq!(v["merge_log"].as_array().unwrap().len(), 2);
    assert_eq!(v["merge_log"][0]["removed"], 0);
    assert_eq!(v["truncation_offset"], 0);
}

#[test]
fn limit_of_diagonal_curve() {
    let r = tnsgeo(&["limit", "--e", "2"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["power"], 1);
    let t = json::tensor_from_str(&v["tensor"].to_string()).unwrap();
    assert_eq!(t, m_tilde_formula(2).unwrap());
}

#[test]
fn limit_of_explicit_curves() {
    let dir = TempDir::new().unwrap();
    let t = tns_core::random_tensor(&[2, 2], 3);
    let tp = write_tensor(&dir, "t.json", &t);
    // t * Id on factor 1, identity elsewhere
    let curves = r#"[{"factor":1,"terms":[{"power":1,"matrix":{"rows":2,"cols":2,"entries":["1","0","0","1"]}}]}]"#;
    let cp = write(&dir, "c.json", curves);
    let r = tnsgeo(&["limit", "--tensor", s(&tp), "--curves", s(&cp)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["power"], 1);
    assert_eq!(json::tensor_from_str(&v["tensor"].to_string()).unwrap(), t);

    let zero = r#"[{"factor":0,"terms":[{"power":0,"matrix":{"rows":2,"cols":2,"entries":["0","0","0","0"]}}]}]"#;
    let zp = write(&dir, "z.json", zero);
    let r = tnsgeo(&["limit", "--tensor", s(&tp), "--curves", s(&zp)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("degenerates"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tnsgeo(&[]).code, 2);
    assert_eq!(tnsgeo(&["certify"]).code, 2);
    assert_eq!(tnsgeo(&["limit", "--e", "2", "--tensor", "x.json"]).code, 2);
}

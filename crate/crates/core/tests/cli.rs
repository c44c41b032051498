//! End-to-end runs of the `kernelwalk` binary on the shipped models.

use std::path::PathBuf;
use std::process::{Command, Output};

use regex::Regex;
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn model(name: &str) -> String {
    root().join("models").join(name).to_str().unwrap().to_string()
}

fn kernelwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernelwalk"))
        .args(args)
        .env_remove("KERNELWALK_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const MODELS: [&str; 6] = [
    "simple.walk",
    "tandem.walk",
    "origin.walk",
    "family1.walk",
    "weighted-infinite.walk",
    "weighted-kreweras.walk",
];

/// Structural validator for the JSON Schema subset used by the shipped
/// schema: type, const, enum, required, properties, additionalProperties,
/// items, min/maxItems, (exclusive) minimum/maximum, pattern and local $ref.
struct Validator {
    root: Value,
}

impl Validator {
    fn load() -> Self {
        let text = std::fs::read_to_string(root().join("schema/report.schema.json")).unwrap();
        Self {
            root: serde_json::from_str(&text).unwrap(),
        }
    }

    fn validate(&self, v: &Value) -> Result<(), String> {
        self.check(&self.root, v, "$")
    }

    fn resolve<'a>(&'a self, schema: &'a Value) -> &'a Value {
        match schema.get("$ref").and_then(Value::as_str) {
            Some(r) => {
                let name = r.strip_prefix("#/$defs/").expect("local ref");
                &self.root["$defs"][name]
            }
            None => schema,
        }
    }

    fn type_matches(ty: &str, v: &Value) -> bool {
        match ty {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            other => panic!("unsupported type {other}"),
        }
    }

    fn check(&self, schema: &Value, v: &Value, path: &str) -> Result<(), String> {
        let schema = self.resolve(schema);
        let err = |m: String| Err(format!("{path}: {m}"));
        if let Some(ty) = schema.get("type") {
            let types: Vec<&str> = match ty {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().map(|t| t.as_str().unwrap()).collect(),
                _ => panic!("bad type keyword"),
            };
            if !types.iter().any(|t| Self::type_matches(t, v)) {
                return err(format!("expected {types:?}, found {v}"));
            }
        }
        if v.is_null() {
            return Ok(());
        }
        if let Some(c) = schema.get("const") {
            if c != v {
                return err(format!("expected {c}, found {v}"));
            }
        }
        if let Some(Value::Array(options)) = schema.get("enum") {
            if !options.contains(v) {
                return err(format!("{v} not in {options:?}"));
            }
        }
        if let Some(x) = v.as_f64() {
            let bound = |k: &str| schema.get(k).and_then(Value::as_f64);
            if bound("minimum").is_some_and(|b| x < b)
                || bound("maximum").is_some_and(|b| x > b)
                || bound("exclusiveMinimum").is_some_and(|b| x <= b)
                || bound("exclusiveMaximum").is_some_and(|b| x >= b)
            {
                return err(format!("{x} out of range"));
            }
        }
        if let (Some(p), Some(s)) = (schema.get("pattern").and_then(Value::as_str), v.as_str()) {
            if !Regex::new(p).unwrap().is_match(s) {
                return err(format!("{s:?} does not match {p}"));
            }
        }
        if let Some(obj) = v.as_object() {
            if let Some(Value::Array(req)) = schema.get("required") {
                for r in req {
                    if !obj.contains_key(r.as_str().unwrap()) {
                        return err(format!("missing {r}"));
                    }
                }
            }
            let props = schema.get("properties").and_then(Value::as_object);
            for (k, child) in obj {
                match props.and_then(|p| p.get(k)) {
                    Some(s) => self.check(s, child, &format!("{path}.{k}"))?,
                    None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                        return err(format!("unexpected property {k}"));
                    }
                    None => {}
                }
            }
        }
        if let Some(arr) = v.as_array() {
            let n = |k: &str| schema.get(k).and_then(Value::as_u64).map(|x| x as usize);
            if n("minItems").is_some_and(|m| arr.len() < m) || n("maxItems").is_some_and(|m| arr.len() > m) {
                return err(format!("array length {} out of range", arr.len()));
            }
            if let Some(items) = schema.get("items") {
                for (i, child) in arr.iter().enumerate() {
                    self.check(items, child, &format!("{path}[{i}]"))?;
                }
            }
        }
        Ok(())
    }
}

#[test]
fn validator_rejects_malformed_reports() {
    let v = Validator::load();
    let o = kernelwalk(&["--json", "kernel", &model("simple.walk")]);
    let good: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.validate(&good), Ok(()));
    let mut bad = good.clone();
    bad["report_version"] = Value::from(2);
    assert!(v.validate(&bad).is_err());
    let mut bad = good.clone();
    bad["model"]["t"] = Value::from("0.5");
    assert!(v.validate(&bad).is_err());
    let mut bad = good.clone();
    bad.as_object_mut().unwrap().remove("config");
    assert!(v.validate(&bad).is_err());
    let mut bad = good;
    bad["kernel"]["surprise"] = Value::from(1);
    assert!(v.validate(&bad).is_err());
}

#[test]
fn every_command_emits_schema_valid_json() {
    let v = Validator::load();
    for name in MODELS {
        let path = model(name);
        for cmd in ["series", "kernel", "curve", "group", "continue", "classify", "analyze"] {
            let o = kernelwalk(&["--json", cmd, &path]);
            let code = o.status.code().unwrap();
            if code != 0 {
                // Curve-based stages reject genus-zero and degenerate models as input errors.
                assert_eq!(code, 1, "{cmd} {name}: {}", String::from_utf8_lossy(&o.stderr));
                assert!(matches!(cmd, "curve" | "group" | "continue"));
                assert!(matches!(name, "origin.walk" | "family1.walk"));
                continue;
            }
            let doc: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{cmd} {name}: {e}"));
            v.validate(&doc).unwrap_or_else(|e| panic!("{cmd} {name}: {e}"));
            assert_eq!(doc["command"], cmd);
        }
    }
}

#[test]
fn classify_simple_walk_ends_with_verdict() {
    let o = kernelwalk(&["classify", &model("simple.walk")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().last(),
        Some("verdict: differentially algebraic (finite group, order 4)")
    );
}

#[test]
fn series_origin_is_geometric() {
    let o = kernelwalk(&["series", &model("origin.walk"), "--max-steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("q "))
        .map(String::from)
        .collect();
    let expected: Vec<String> = (0..=5).map(|k| format!("q 0 0 {k} = 1/{}", 1u32 << k)).collect();
    assert_eq!(lines, expected);
}

#[test]
fn group_tandem_has_order_three() {
    let o = kernelwalk(&["--json", "group", &model("tandem.walk")]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["group"]["verdict"]["kind"], "finite");
    assert_eq!(doc["group"]["verdict"]["ell"], 3);
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    for name in ["simple.walk", "weighted-infinite.walk"] {
        let a = kernelwalk(&["analyze", &model(name)]);
        let b = kernelwalk(&["analyze", &model(name)]);
        let seq = kernelwalk(&["--sequential", "analyze", &model(name)]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout, seq.stdout);
    }
}

#[test]
fn seed_changes_only_sampled_values() {
    let a = stdout(&kernelwalk(&["continue", &model("simple.walk")]));
    let b = stdout(&kernelwalk(&["--seed", "7", "continue", &model("simple.walk")]));
    assert_ne!(a, b);
    let truncation = |s: &str| s.lines().find(|l| l.starts_with("truncation")).map(String::from);
    assert_eq!(truncation(&a), truncation(&b));
}

#[test]
fn exit_codes() {
    assert_eq!(
        kernelwalk(&["kernel", &model("simple.walk"), "--bogus"]).status.code(),
        Some(1)
    );
    assert_eq!(kernelwalk(&["nonsense"]).status.code(), Some(1));
    assert_eq!(kernelwalk(&["kernel", "/no/such/file.walk"]).status.code(), Some(1));
    let o = kernelwalk(&["curve", &model("family1.walk")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("curve: "));
    // A truncation too short for the tail tolerance is a numeric failure.
    let o = kernelwalk(&["continue", &model("simple.walk"), "--truncation", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("continuation: "));
    assert_eq!(kernelwalk(&["--help"]).status.code(), Some(0));
}

#[test]
fn precision_environment_variable() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_kernelwalk"))
            .args(["--json", "curve", &model("simple.walk")])
            .env("KERNELWALK_PRECISION", env)
            .output()
            .unwrap()
    };
    let o = run("40");
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["config"]["precision_bits"], 40);
    let flag = kernelwalk(&["--json", "curve", &model("simple.walk"), "--precision", "80"]);
    let doc: Value = serde_json::from_slice(&flag.stdout).unwrap();
    assert_eq!(doc["config"]["precision_bits"], 80);
    assert_eq!(run("many").status.code(), Some(1));
}

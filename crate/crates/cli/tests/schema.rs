//! Reports conform to the bundled JSON Schema, checked with a small
//! validator covering the keywords the schema uses.

use serde_json::{json, Value};

use condsym_cli::config::{Suite, SuiteConfig};
use condsym_cli::report::{Report, REPORT_SCHEMA};
use condsym_cli::suites::run_suites;

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
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

fn validate(schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    let Some(s) = schema.as_object() else { return };
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(t) => type_matches(t, v),
            Value::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            errors.push(format!("{path}: expected type {t}, got {v}"));
            return;
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(n) = v.as_f64() {
        if s.get("minimum").and_then(Value::as_f64).is_some_and(|m| n < m) {
            errors.push(format!("{path}: {n} below minimum"));
        }
        if s.get("maximum").and_then(Value::as_f64).is_some_and(|m| n > m) {
            errors.push(format!("{path}: {n} above maximum"));
        }
    }
    if let Some(obj) = v.as_object() {
        for r in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(r.as_str().unwrap()) {
                errors.push(format!("{path}: missing {r}"));
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, child) in obj {
            let p = format!("{path}/{k}");
            match props.and_then(|ps| ps.get(k)) {
                Some(sub) => validate(sub, child, &p, errors),
                None => match s.get("additionalProperties") {
                    Some(Value::Bool(false)) => errors.push(format!("{p}: unexpected property")),
                    Some(sub @ Value::Object(_)) => validate(sub, child, &p, errors),
                    _ => {}
                },
            }
        }
    }
    if let (Some(arr), Some(items)) = (v.as_array(), s.get("items")) {
        for (i, child) in arr.iter().enumerate() {
            validate(items, child, &format!("{path}/{i}"), errors);
        }
    }
}

fn schema() -> Value {
    serde_json::from_str(REPORT_SCHEMA).unwrap()
}

fn report_json(cfg: &SuiteConfig) -> Value {
    let report = Report::new(cfg.clone(), run_suites(cfg).unwrap());
    serde_json::from_str(&report.to_json().unwrap()).unwrap()
}

fn errors_of(v: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    validate(&schema(), v, "", &mut errors);
    errors
}

#[test]
fn default_report_conforms() {
    let cfg = SuiteConfig { suites: vec![Suite::Algebra, Suite::Roots, Suite::Potentials], ..SuiteConfig::default() };
    let v = report_json(&cfg);
    assert_eq!(errors_of(&v), Vec::<String>::new());
}

#[test]
fn report_with_every_option_conforms() {
    let mut cfg = SuiteConfig::default();
    for (k, val) in [
        ("suite", "invariance,bridge"),
        ("case", "5"),
        ("params", "s=3/2"),
        ("x", "1/2"),
        ("grid", "64,0.5,0.01"),
        ("real", "true"),
        ("format", "json"),
    ] {
        cfg.set(k, val).unwrap();
    }
    let v = report_json(&cfg);
    assert_eq!(v["config"]["x"]["branch"], "half");
    assert_eq!(errors_of(&v), Vec::<String>::new());
}

#[test]
fn validator_rejects_malformed_reports() {
    let cfg = SuiteConfig { suites: vec![Suite::Roots], ..SuiteConfig::default() };
    let good = report_json(&cfg);

    let mut extra = good.clone();
    extra["timestamp"] = json!(0);
    assert!(!errors_of(&extra).is_empty());

    let mut status = good.clone();
    status["suites"][0]["checks"][0]["status"] = json!("maybe");
    assert!(!errors_of(&status).is_empty());

    let mut missing = good.clone();
    missing["summary"].as_object_mut().unwrap().remove("fail");
    assert!(!errors_of(&missing).is_empty());

    let mut case = good;
    case["config"]["cases"] = json!([9]);
    assert!(!errors_of(&case).is_empty());
}

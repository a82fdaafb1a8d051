//! Structured run reports: a single self-describing document per run,
//! versioned (`schema: 1`), rendered as JSON (machine-parseable, key-sorted,
//! byte-reproducible at fixed settings) or as indented text.

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Report under construction; `results` and `certificates` are free-form
/// trees, everything else is fixed frame.
#[derive(Debug, Clone)]
pub struct Document {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub settings: Map<String, Value>,
    pub results: Map<String, Value>,
    pub certificates: Map<String, Value>,
}

impl Document {
    pub fn new(command: &str) -> Self {
        Document {
            command: command.to_string(),
            inputs: Map::new(),
            settings: Map::new(),
            results: Map::new(),
            certificates: Map::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: Value) -> &mut Self {
        self.inputs.insert(key.to_string(), value);
        self
    }

    pub fn setting(&mut self, key: &str, value: Value) -> &mut Self {
        self.settings.insert(key.to_string(), value);
        self
    }

    pub fn result(&mut self, key: &str, value: Value) -> &mut Self {
        self.results.insert(key.to_string(), value);
        self
    }

    pub fn certificate(&mut self, key: &str, value: Value) -> &mut Self {
        self.certificates.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "settings": self.settings,
            "results": self.results,
            "certificates": self.certificates,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {} (schema {})\n", self.command, SCHEMA_VERSION));
        for (section, map) in [
            ("inputs", &self.inputs),
            ("settings", &self.settings),
            ("results", &self.results),
            ("certificates", &self.certificates),
        ] {
            if map.is_empty() {
                continue;
            }
            out.push_str(section);
            out.push_str(":\n");
            for (k, v) in map {
                render_value(&mut out, k, v, 1);
            }
        }
        out
    }
}

fn render_value(out: &mut String, key: &str, value: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, v) in map {
                render_value(out, k, v, depth + 1);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, v) in items.iter().enumerate() {
                render_value(out, &i.to_string(), v, depth + 1);
            }
        }
        Value::Array(items) => {
            let inline: Vec<String> = items.iter().map(plain).collect();
            out.push_str(&format!("{pad}{key}: [{}]\n", inline.join(", ")));
        }
        other => {
            out.push_str(&format!("{pad}{key}: {}\n", plain(other)));
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `{ "re": .., "im": .. }`
pub fn complex_value(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Exact rational as a string, `"p/q"` or `"p"`.
pub fn rational_value(r: &BigRational) -> Value {
    use num_traits::One;
    if r.denom().is_one() {
        Value::String(r.numer().to_string())
    } else {
        Value::String(format!("{}/{}", r.numer(), r.denom()))
    }
}

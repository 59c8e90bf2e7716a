use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use serde_json::{json, Map, Value};

/// Machine-readable run report. Fields not set stay `null`.
pub struct Report {
    fields: Map<String, Value>,
    started: Instant,
}

impl Report {
    pub fn new(command: &str, seed: u64, mode: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), json!(1));
        fields.insert("command".into(), json!(command));
        fields.insert("seed".into(), json!(seed));
        fields.insert("mode".into(), json!(mode));
        for k in [
            "method",
            "input_digest",
            "output_digest",
            "tv_to_input",
            "tv_to_property",
            "distance_basis",
        ] {
            fields.insert(k.into(), Value::Null);
        }
        for k in ["draws_consumed", "cdf_queries", "fail_count", "restarts"] {
            fields.insert(k.into(), json!(0));
        }
        fields.insert("params".into(), json!({}));
        Report {
            fields,
            started: Instant::now(),
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.fields.insert(key.into(), v.into());
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) {
        if let Some(Value::Object(p)) = self.fields.get_mut("params") {
            p.insert(key.into(), v.into());
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn write(mut self, path: Option<&Path>) -> Result<()> {
        let ms = self.started.elapsed().as_secs_f64() * 1000.0;
        self.fields.insert("wall_time_ms".into(), json!(ms.round() as u64));
        if let Some(p) = path {
            let mut s = serde_json::to_string_pretty(&Value::Object(self.fields))?;
            s.push('\n');
            std::fs::write(p, s)?;
        }
        Ok(())
    }
}

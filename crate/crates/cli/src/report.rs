use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
    Skipped,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Fail dominates, then indeterminate; skipped checks do not count.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Self {
        let mut out = Verdict::Skipped;
        for v in verdicts {
            out = match (out, v) {
                (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
                (Verdict::Indeterminate, _) | (_, Verdict::Indeterminate) => Verdict::Indeterminate,
                (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
                _ => Verdict::Skipped,
            };
        }
        out
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, verdict: Verdict, details: impl Serialize) -> Self {
        RunReport {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            verdict,
            details: serde_json::to_value(details).expect("details serialize to JSON"),
            elapsed_ms: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("parameters serialize to JSON"));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize to JSON")
    }

    /// Plain-text rendering. Arrays longer than `max_items` are summarised
    /// unless `max_items` is `None`.
    pub fn to_table(&self, max_items: Option<usize>) -> String {
        let mut rows = vec![
            ("command".to_string(), self.command.clone()),
            ("verdict".to_string(), self.verdict.as_str().to_uppercase()),
        ];
        rows.extend(self.parameters.iter().map(|(k, v)| (format!("param.{k}"), scalar(v))));
        if let Some(ms) = self.elapsed_ms {
            rows.push(("elapsed".into(), format!("{ms:.1} ms")));
        }
        render(&mut rows, &self.details, "", max_items);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn render(rows: &mut Vec<(String, String)>, v: &Value, prefix: &str, max_items: Option<usize>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render(rows, child, &key, max_items);
            }
        }
        Value::Array(items) => {
            let flat = items.iter().all(|i| !i.is_object());
            let within = max_items.is_none_or(|m| items.len() <= m);
            if flat && within {
                let body: Vec<String> = items.iter().map(compact).collect();
                rows.push((prefix.to_string(), format!("[{}]", body.join(", "))));
            } else if within && items.len() <= 64 {
                for (i, item) in items.iter().enumerate() {
                    render(rows, item, &format!("{prefix}[{i}]"), max_items);
                }
            } else {
                rows.push((prefix.to_string(), format!("[{} items]", items.len())));
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("({})", items.iter().map(compact).collect::<Vec<_>>().join(",")),
        other => scalar(other),
    }
}

//! Machine-readable check reports: JSON object
//! {config, checks: [{id, ref, status, residual, threshold}], version}.

use crate::config::RunConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<CheckRow>,
    pub version: String,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Report { config, checks: Vec::new(), version: env!("CARGO_PKG_VERSION").to_string() }
    }

    /// Residual-style check: passes when residual <= threshold.
    pub fn push_residual(&mut self, id: &str, reference: &str, residual: f64, threshold: f64) {
        self.checks.push(CheckRow {
            id: id.to_string(),
            reference: reference.to_string(),
            status: if residual <= threshold { "pass" } else { "fail" }.to_string(),
            residual: Some(residual),
            threshold: Some(threshold),
        });
    }

    /// Boolean check without a numeric residual.
    pub fn push_bool(&mut self, id: &str, reference: &str, pass: bool) {
        self.checks.push(CheckRow {
            id: id.to_string(),
            reference: reference.to_string(),
            status: if pass { "pass" } else { "fail" }.to_string(),
            residual: None,
            threshold: None,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == "pass")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_fields() {
        let mut r = Report::new(RunConfig::default());
        r.push_residual("x", "slug", 1e-12, 1e-10);
        r.push_bool("y", "slug2", false);
        assert!(!r.all_pass());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v.get("config").is_some());
        assert!(v.get("version").is_some());
        let checks = v["checks"].as_array().unwrap();
        assert_eq!(checks.len(), 2);
        for c in checks {
            assert!(c.get("id").is_some() && c.get("ref").is_some() && c.get("status").is_some());
        }
        assert_eq!(checks[0]["status"], "pass");
        assert_eq!(checks[1]["status"], "fail");
    }
}

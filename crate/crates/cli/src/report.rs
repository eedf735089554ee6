//! Run reports: one JSON document per invocation, with the volatile
//! stats segregated in the final field so everything else can be
//! compared byte for byte across runs.

use serde::Serialize;
use serde_json::{json, Value};

pub const REPORT_SCHEMA: &str = "dpp-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Capped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Capped => "capped",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails => 1,
            Verdict::Capped => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub instance: String,
    pub operation: String,
    pub parameters: Value,
    pub result: Value,
    pub verdict: String,
    pub stats: Value,
}

impl RunReport {
    pub fn new(
        instance: &str,
        operation: &str,
        parameters: Value,
        result: Value,
        verdict: Verdict,
    ) -> Self {
        RunReport {
            schema: REPORT_SCHEMA,
            instance: instance.to_string(),
            operation: operation.to_string(),
            parameters,
            result,
            verdict: verdict.as_str().to_string(),
            stats: json!({}),
        }
    }

    pub fn with_stats(mut self, stats: Value) -> Self {
        self.stats = stats;
        self
    }

    pub fn print(&self) {
        use std::io::Write;
        let text = serde_json::to_string_pretty(self).expect("reports always serialize");
        // A closed pipe is not our error.
        let _ = writeln!(std::io::stdout(), "{text}");
    }
}

pub fn stats_json(stats: &linkage_core::SolveStats) -> Value {
    json!({
        "elapsed_ms": stats.elapsed.as_millis() as u64,
        "nodes": stats.nodes,
        "peak_states": stats.peak_states,
    })
}

//! Step-by-step execution of the constructive arguments. Each step records
//! what it did and a re-runnable check of the claim it establishes; a trace
//! that stops early names the step that blocked it.

mod conditions;
mod dx;
mod prop31;
mod step4;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use conditions::{
    coeff_mode_for, prop31_conditions_check, prop31_search, prop_main_conditions_check,
    CheckOutcome, ConditionFailure, Prop31SearchOutcome, Prop31Witness,
};
pub use dx::{dx_witness_constructive, DxBudget, DxWitness};
pub use prop31::{prop31_trace, MChain, Prop31Params};
pub use step4::{assemble_step4, Step4Outcome};

use crate::coloring::{Coloring, Descriptor};
use crate::error::Error;

pub use prop31::StepCheck;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub index: usize,
    /// The move this step performs, in symbols.
    #[serde(rename = "move")]
    pub mov: String,
    pub description: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<StepCheck>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TraceStatus {
    Complete,
    /// An internal search ran out of budget at step `step`.
    Exhausted { step: usize, reason: String },
    /// A claim did not hold at step `step`.
    CheckFailed { step: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub kind: String,
    pub coloring: Descriptor,
    pub params: serde_json::Value,
    pub steps: Vec<Step>,
    pub status: TraceStatus,
    /// Final values (e.g. `a`, `b`, `c` or `D`, `X`), present when complete.
    pub result: BTreeMap<String, String>,
}

impl Trace {
    pub fn is_complete(&self) -> bool {
        self.status == TraceStatus::Complete
    }

    /// One line per step, then the status.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let outs: Vec<String> = s.outputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(
                "[{}] {} :: {} {}{}\n",
                s.index,
                s.mov,
                s.description,
                outs.join(" "),
                if s.verified { " (verified)" } else { "" }
            ));
        }
        match &self.status {
            TraceStatus::Complete => out.push_str("complete\n"),
            TraceStatus::Exhausted { step, reason } => {
                out.push_str(&format!("exhausted at step {step} ({}): {reason}\n", self.move_at(*step)))
            }
            TraceStatus::CheckFailed { step, reason } => {
                out.push_str(&format!("check failed at step {step} ({}): {reason}\n", self.move_at(*step)))
            }
        }
        out
    }

    fn move_at(&self, step: usize) -> &str {
        self.steps
            .iter()
            .find(|s| s.index == step)
            .map(|s| s.mov.as_str())
            .unwrap_or("?")
    }
}

/// Re-run every recorded step check against the coloring rebuilt from the
/// trace's descriptor. Returns the number of checks replayed.
pub fn verify_trace(trace: &Trace) -> Result<usize, Error> {
    let coloring = Coloring::from_descriptor(&trace.coloring)?;
    let mut n = 0;
    for step in &trace.steps {
        if let Some(check) = &step.check {
            if step.verified {
                check.replay(&coloring).map_err(|e| {
                    Error::Rejected(format!("step {} ({}): {e}", step.index, step.mov))
                })?;
                n += 1;
            }
        }
    }
    if trace.is_complete() && n == 0 {
        return Err(Error::Rejected("complete trace without checks".into()));
    }
    Ok(n)
}

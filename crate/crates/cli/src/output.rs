use crate::Opts;
use fellbundle::formats::{matrix_to_doc, vec_to_doc};
use fellbundle::{AxiomReport, CMatrix, Error, Witness, C64};
use serde_json::{json, Value};
use std::process::ExitCode;

pub const SCHEMA: &str = "fellbundle.report";
pub const SCHEMA_VERSION: u32 = 1;

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable file, bad JSON, wrong shapes: exit 2.
    Malformed(String),
    /// A mathematical check refused the input: exit 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(_)
            | Error::ShapeMismatch(_)
            | Error::SizeMismatch(_)
            | Error::WrongFiber { .. }
            | Error::NotSquare { .. }
            | Error::BundleMismatch => Failure::Malformed(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

/// Keys are sorted by serde_json's map, so identical runs print identical bytes.
pub struct Report {
    command: String,
    input: String,
    opts: Opts,
    passed: bool,
    result: Value,
    error: Option<(&'static str, String)>,
}

impl Report {
    pub fn new(command: &str, input: &str, opts: &Opts) -> Self {
        Report {
            command: command.into(),
            input: input.into(),
            opts: opts.clone(),
            passed: false,
            result: Value::Null,
            error: None,
        }
    }

    pub fn finish(mut self, passed: bool, result: Value) -> Self {
        self.passed = passed;
        self.result = result;
        self
    }

    pub fn malformed(mut self, msg: impl Into<String>) -> Self {
        self.error = Some(("malformed_input", msg.into()));
        self
    }

    pub fn failure(mut self, f: Failure, partial: Value) -> Self {
        self.result = partial;
        self.passed = false;
        self.error = Some(match f {
            Failure::Malformed(m) => ("malformed_input", m),
            Failure::Check(m) => ("check_failed", m),
        });
        self
    }

    fn code(&self) -> u8 {
        match (&self.error, self.passed) {
            (Some(("malformed_input", _)), _) => 2,
            (_, true) => 0,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "schema_version": SCHEMA_VERSION,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "input": self.input,
            "tolerances": {
                "rel_psd": self.opts.tol_psd,
                "rel_rank": self.opts.tol_rank,
                "rel_eq": self.opts.tol_eq,
            },
            "seed": self.opts.seed,
            "samples": self.opts.samples,
            "assumptions": {
                "groups_finite_hence_amenable": true,
                "full_and_reduced_coincide": true,
            },
            "passed": self.passed,
            "exit_code": self.code(),
            "result": self.result,
        });
        if let Some((kind, msg)) = &self.error {
            v["error"] = json!({ "kind": kind, "message": msg });
        }
        v
    }

    pub fn emit(self) -> ExitCode {
        println!("{}", serde_json::to_string_pretty(&self.to_json()).expect("report serializes"));
        ExitCode::from(self.code())
    }
}

pub fn axioms(rep: &AxiomReport) -> Value {
    serde_json::to_value(rep).expect("report serializes")
}

pub fn matrix(m: &CMatrix) -> Value {
    json!(matrix_to_doc(m))
}

pub fn vector(v: &[C64]) -> Value {
    json!(vec_to_doc(v))
}

pub fn witness(w: &Witness<f64>) -> Value {
    json!({
        "terms": w.terms.iter().map(|t| json!({ "g": t.g, "a": matrix(&t.a), "b": matrix(&t.b) })).collect::<Vec<_>>(),
        "sum": matrix(&w.sum),
        "min_eigenvalue": w.min_eig,
        "skew": w.skew,
    })
}

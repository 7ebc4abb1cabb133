use std::fmt;

use serde_json::Value;

pub const OK: u8 = 0;
pub const NEGATIVE: u8 = 1;
pub const INPUT: u8 = 2;
pub const BOUND: u8 = 3;

/// A limit of an exhaustive search was hit.
#[derive(Debug)]
pub struct BoundExceeded(pub String);

impl fmt::Display for BoundExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bound exceeded: {}", self.0)
    }
}

impl std::error::Error for BoundExceeded {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<BoundExceeded>().is_some() {
        BOUND
    } else {
        INPUT
    }
}

/// What a command prints, in both output modes, and its exit code.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

impl Report {
    pub fn print(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(&self.json).expect("json"));
        } else {
            print!("{}", self.text);
        }
    }
}

//! Line-oriented generator files.
//!
//! ```text
//! # comment
//! H <hx> <hy> <hz>
//! J <rate> <c0re> <c0im> <c1re> <c1im> <c2re> <c2im> <c3re> <c3im>
//! ```
//!
//! `H` sets the Hamiltonian `½h·σ` and may appear at most once. Each `J` adds
//! a jump `L = c₀I + c₁σ₁ + c₂σ₂ + c₃σ₃` at a nonnegative rate.

use decoh::channels::{Jump, LindbladGenerator};
use decoh::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct SpecParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> SpecParseError {
    SpecParseError {
        line,
        message: message.into(),
    }
}

fn parse_numbers(line: usize, tokens: &[&str]) -> Result<Vec<f64>, SpecParseError> {
    tokens
        .iter()
        .map(|tok| {
            let x: f64 = tok
                .parse()
                .map_err(|_| err(line, format!("'{tok}' is not a number")))?;
            if !x.is_finite() {
                return Err(err(line, format!("'{tok}' is not finite")));
            }
            Ok(x)
        })
        .collect()
}

pub fn parse_generator_spec(text: &str) -> Result<LindbladGenerator, SpecParseError> {
    let mut h: Option<[f64; 3]> = None;
    let mut jumps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let (directive, args) = tokens.split_first().expect("non-empty line");
        match *directive {
            "H" => {
                if args.len() != 3 {
                    return Err(err(line, format!("H takes 3 values, got {}", args.len())));
                }
                if h.is_some() {
                    return Err(err(line, "duplicate H line"));
                }
                let v = parse_numbers(line, args)?;
                h = Some([v[0], v[1], v[2]]);
            }
            "J" => {
                if args.len() != 9 {
                    return Err(err(line, format!("J takes 9 values, got {}", args.len())));
                }
                let v = parse_numbers(line, args)?;
                if v[0] < 0.0 {
                    return Err(err(line, format!("negative rate {}", v[0])));
                }
                let coeffs = [0, 1, 2, 3].map(|k| Complex64::new(v[1 + 2 * k], v[2 + 2 * k]));
                jumps.push(Jump { rate: v[0], coeffs });
            }
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }
    LindbladGenerator::new(h.unwrap_or([0.0; 3]), jumps).map_err(|e| err(0, e.to_string()))
}

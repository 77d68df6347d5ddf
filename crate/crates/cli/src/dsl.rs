//! Plain-text potential descriptions.
//!
//! ```text
//! # comments run to the end of the line
//! mass 1
//! left 0
//! right 10
//! segment -1 0 2.5          # x_start x_end V
//! ramp 0 20 0 10 400        # x_start x_end V_start V_end steps
//! ```
//!
//! `mass`, `left` and `right` default to 1, 0 and 0. A document starting
//! with `{` is read as a JSON profile instead.

use std::fmt;

use klein::transfer::{build_profile, staircase};
use klein::{Error, Mass, PotentialProfile, Segment};

/// Parse failure tied to a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DslError {
    pub line: usize,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.column {
            Some(c) => write!(f, "line {}, column {}: {}", self.line, c, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

impl std::error::Error for DslError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Item {
    Segment(Segment),
    Ramp {
        x0: f64,
        x1: f64,
        v0: f64,
        v1: f64,
        steps: usize,
    },
}

/// A parsed document before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub mass: f64,
    pub left: f64,
    pub right: f64,
    pub items: Vec<Item>,
    /// Source line of each item.
    pub lines: Vec<usize>,
    mass_line: usize,
}

impl Default for Document {
    fn default() -> Self {
        Document {
            mass: 1.0,
            left: 0.0,
            right: 0.0,
            items: Vec::new(),
            lines: Vec::new(),
            mass_line: 1,
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    column: body[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn number(tok: &Token<'_>, line: usize) -> Result<f64, DslError> {
    match tok.text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DslError {
            line,
            column: Some(tok.column),
            message: format!("expected a finite number, found '{}'", tok.text),
        }),
    }
}

fn count(tok: &Token<'_>, line: usize) -> Result<usize, DslError> {
    match tok.text.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(DslError {
            line,
            column: Some(tok.column),
            message: format!("expected a positive step count, found '{}'", tok.text),
        }),
    }
}

pub fn parse(text: &str) -> Result<Document, DslError> {
    let mut doc = Document::default();
    let mut seen: Vec<&str> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some((head, args)) = toks.split_first() else {
            continue;
        };
        let arity = match head.text {
            "mass" | "left" | "right" => 1,
            "segment" => 3,
            "ramp" => 5,
            other => {
                return Err(DslError {
                    line,
                    column: Some(head.column),
                    message: format!("unknown directive '{other}'"),
                })
            }
        };
        if args.len() != arity {
            return Err(DslError {
                line,
                column: None,
                message: format!("'{}' expects {arity} values, got {}", head.text, args.len()),
            });
        }
        match head.text {
            key @ ("mass" | "left" | "right") => {
                if seen.contains(&key) {
                    return Err(DslError {
                        line,
                        column: Some(head.column),
                        message: format!("duplicate '{key}'"),
                    });
                }
                seen.push(key);
                let v = number(&args[0], line)?;
                match key {
                    "mass" => {
                        doc.mass = v;
                        doc.mass_line = line;
                    }
                    "left" => doc.left = v,
                    _ => doc.right = v,
                }
            }
            "segment" => {
                let x0 = number(&args[0], line)?;
                let x1 = number(&args[1], line)?;
                let v = number(&args[2], line)?;
                doc.items.push(Item::Segment(Segment::new(x0, x1, v)));
                doc.lines.push(line);
            }
            _ => {
                doc.items.push(Item::Ramp {
                    x0: number(&args[0], line)?,
                    x1: number(&args[1], line)?,
                    v0: number(&args[2], line)?,
                    v1: number(&args[3], line)?,
                    steps: count(&args[4], line)?,
                });
                doc.lines.push(line);
            }
        }
    }
    Ok(doc)
}

impl Document {
    /// Expand ramps and validate the segment chain.
    pub fn to_profile(&self) -> Result<PotentialProfile, DslError> {
        let mass = Mass::new(self.mass).map_err(|e| DslError {
            line: self.mass_line,
            column: None,
            message: e.to_string(),
        })?;
        let mut segments = Vec::new();
        let mut origin = Vec::new();
        for (item, &line) in self.items.iter().zip(&self.lines) {
            match *item {
                Item::Segment(s) => {
                    segments.push(s);
                    origin.push(line);
                }
                Item::Ramp { x0, x1, v0, v1, steps } => {
                    let stairs = staircase(x0, x1, v0, v1, steps).map_err(|e| DslError {
                        line,
                        column: None,
                        message: e.to_string(),
                    })?;
                    origin.extend(std::iter::repeat(line).take(stairs.len()));
                    segments.extend(stairs);
                }
            }
        }
        build_profile(self.left, self.right, segments, mass).map_err(|e| match e {
            Error::ProfileValidation { index, reason } => DslError {
                line: origin.get(index).copied().unwrap_or(0),
                column: None,
                message: reason,
            },
            other => DslError {
                line: 0,
                column: None,
                message: other.to_string(),
            },
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "mass {:?}\nleft {:?}\nright {:?}\n",
            self.mass, self.left, self.right
        );
        for item in &self.items {
            match item {
                Item::Segment(s) => {
                    out += &format!("segment {:?} {:?} {:?}\n", s.x_start, s.x_end, s.v)
                }
                Item::Ramp { x0, x1, v0, v1, steps } => {
                    out += &format!("ramp {x0:?} {x1:?} {v0:?} {v1:?} {steps}\n")
                }
            }
        }
        out
    }
}

/// A validated profile written out segment by segment.
pub fn profile_to_text(profile: &PotentialProfile) -> String {
    Document {
        mass: profile.mass.get(),
        left: profile.left_level,
        right: profile.right_level,
        items: profile.segments.iter().copied().map(Item::Segment).collect(),
        lines: Vec::new(),
        mass_line: 1,
    }
    .to_text()
}

/// Read either the line format or a JSON profile.
pub fn load(text: &str) -> Result<PotentialProfile, DslError> {
    if text.trim_start().starts_with('{') {
        let raw: PotentialProfile = serde_json::from_str(text).map_err(|e| DslError {
            line: e.line(),
            column: Some(e.column()),
            message: e.to_string(),
        })?;
        return build_profile(raw.left_level, raw.right_level, raw.segments, raw.mass).map_err(
            |e| DslError {
                line: 0,
                column: None,
                message: e.to_string(),
            },
        );
    }
    parse(text)?.to_profile()
}

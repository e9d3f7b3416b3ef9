use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::NoiseModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseNoiseError {
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown noise family `{0}` (expected uniform, exp, ig or levy)")]
    UnknownFamily(String),
    #[error("{family}: unknown parameter `{key}`")]
    UnknownParameter { family: &'static str, key: String },
    #[error("{family}: duplicate parameter `{key}`")]
    DuplicateParameter { family: &'static str, key: String },
    #[error("{family}: missing parameter `{key}`")]
    MissingParameter { family: &'static str, key: &'static str },
    #[error("parameter {name} = {value} is out of range")]
    InvalidParameter { name: &'static str, value: f64 },
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseNoiseError {
        ParseNoiseError::Syntax {
            column: self.src[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseNoiseError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }
}

impl FromStr for NoiseModel {
    type Err = ParseNoiseError;

    /// Parses `uniform(b=1)`, `exp(b=1)`, `ig(mu=1,b=1)` or
    /// `levy(mu=0,b=1)`, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor { src: s, pos: 0 };
        let name = cur.take_while(|c| c.is_ascii_alphanumeric() || c == '_').to_ascii_lowercase();
        if name.is_empty() {
            return Err(cur.error("expected a family name"));
        }
        let (family, keys): (&'static str, &[&'static str]) = match name.as_str() {
            "uniform" => ("uniform", &["b"]),
            "exp" => ("exp", &["b"]),
            "ig" => ("ig", &["mu", "b"]),
            "levy" => ("levy", &["mu", "b"]),
            _ => return Err(ParseNoiseError::UnknownFamily(name)),
        };
        cur.expect('(')?;
        let mut values: Vec<Option<f64>> = vec![None; keys.len()];
        loop {
            let key = cur.take_while(|c| c.is_ascii_alphanumeric() || c == '_').to_ascii_lowercase();
            if key.is_empty() {
                return Err(cur.error("expected a parameter name"));
            }
            let Some(slot) = keys.iter().position(|k| *k == key) else {
                return Err(ParseNoiseError::UnknownParameter { family, key });
            };
            if values[slot].is_some() {
                return Err(ParseNoiseError::DuplicateParameter { family, key });
            }
            cur.expect('=')?;
            let number_at = cur.pos;
            let text = cur.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
            let value: f64 = text.parse().map_err(|_| {
                cur.pos = number_at;
                cur.skip_ws();
                if text.is_empty() {
                    cur.error("expected a number")
                } else {
                    cur.error(format!("invalid number `{text}`"))
                }
            })?;
            values[slot] = Some(value);
            match cur.peek() {
                Some(',') => cur.expect(',')?,
                Some(')') => {
                    cur.expect(')')?;
                    break;
                }
                _ => return Err(cur.error("expected `,` or `)`")),
            }
        }
        if cur.peek().is_some() {
            return Err(cur.error("trailing characters"));
        }
        let get = |i: usize| {
            values[i].ok_or(ParseNoiseError::MissingParameter {
                family,
                key: keys[i],
            })
        };
        match family {
            "uniform" => NoiseModel::uniform(get(0)?),
            "exp" => NoiseModel::exponential(get(0)?),
            "ig" => NoiseModel::inverse_gaussian(get(0)?, get(1)?),
            _ => NoiseModel::levy(get(0)?, get(1)?),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Uniform { b } => write!(f, "uniform(b={b})"),
            NoiseModel::Exponential { b } => write!(f, "exp(b={b})"),
            NoiseModel::InverseGaussian { mu, b } => write!(f, "ig(mu={mu},b={b})"),
            NoiseModel::Levy { mu, b } => write!(f, "levy(mu={mu},b={b})"),
        }
    }
}

impl Serialize for NoiseModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NoiseModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

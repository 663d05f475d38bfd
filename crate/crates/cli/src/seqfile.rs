//! The sequence file format.
//!
//! An optional header line `#q=<prime> n=<length>` is followed by the body:
//! for q <= 10 one contiguous line of digit symbols (`0101...`), otherwise
//! whitespace-separated integers. Headerless files fall back to a default
//! modulus supplied by the caller.

use hankel_scan::field::FieldCtx;
use hankel_scan::table::Sequence;

#[derive(Debug)]
pub enum ParseError {
    BadHeader(String),
    BadSymbol(String),
    LengthMismatch { header: usize, body: usize },
    BadField(String),
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::BadHeader(h) => write!(f, "malformed header: {h}"),
            ParseError::BadSymbol(s) => write!(f, "bad symbol: {s}"),
            ParseError::LengthMismatch { header, body } => {
                write!(f, "header says n={header} but body has {body} symbols")
            }
            ParseError::BadField(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses a sequence file; `default_q` applies when no header is present.
pub fn parse(text: &str, default_q: u64) -> Result<Sequence, ParseError> {
    let mut q = default_q;
    let mut declared_n = None;
    let mut body = String::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(header) = trimmed.strip_prefix('#') {
            for part in header.split_whitespace() {
                if let Some(v) = part.strip_prefix("q=") {
                    q = v
                        .parse()
                        .map_err(|_| ParseError::BadHeader(header.to_string()))?;
                } else if let Some(v) = part.strip_prefix("n=") {
                    declared_n = Some(
                        v.parse()
                            .map_err(|_| ParseError::BadHeader(header.to_string()))?,
                    );
                } else {
                    return Err(ParseError::BadHeader(header.to_string()));
                }
            }
        } else if !trimmed.is_empty() {
            body.push_str(trimmed);
            body.push(' ');
        }
    }
    let symbols: Vec<u64> = if q <= 10 {
        body.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(10)
                    .map(u64::from)
                    .filter(|&v| v < q)
                    .ok_or_else(|| ParseError::BadSymbol(c.to_string()))
            })
            .collect::<Result<_, _>>()?
    } else {
        body.split_whitespace()
            .map(|tok| {
                tok.parse::<u64>()
                    .ok()
                    .filter(|&v| v < q)
                    .ok_or_else(|| ParseError::BadSymbol(tok.to_string()))
            })
            .collect::<Result<_, _>>()?
    };
    if let Some(n) = declared_n {
        if n != symbols.len() {
            return Err(ParseError::LengthMismatch { header: n, body: symbols.len() });
        }
    }
    let ctx = FieldCtx::new(q).map_err(|e| ParseError::BadField(e.to_string()))?;
    Sequence::from_symbols(ctx, &symbols).map_err(|e| ParseError::BadField(e.to_string()))
}

/// Writes a sequence with its header line.
pub fn write(x: &Sequence) -> String {
    let q = x.ctx().modulus();
    let mut out = format!("#q={} n={}\n", q, x.len());
    if q <= 10 {
        for &s in x.symbols() {
            out.push(char::from_digit(s as u32, 10).expect("symbol < 10"));
        }
    } else {
        let body: Vec<String> = x.symbols().iter().map(|s| s.to_string()).collect();
        out.push_str(&body.join(" "));
    }
    out.push('\n');
    out
}

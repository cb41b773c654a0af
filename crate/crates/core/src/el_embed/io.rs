//! Tab-separated text form of an [`EmbeddingSpace`].
//!
//! ```text
//! #dim	3
//! C	Animal	1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0	1.0000000000000001e-1
//! R	eats	...
//! ```
//!
//! Values carry 17 significant digits, which is enough for an exact round trip.

use std::fmt::Write;

use super::{Ball, EmbedError, EmbeddingSpace};

fn fmt_values(out: &mut String, values: &[f64]) {
    for (i, x) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x:.16e}");
    }
}

pub fn export_space(s: &EmbeddingSpace) -> String {
    let mut out = format!("#dim\t{}\n", s.dim());
    for (name, ball) in s.concepts() {
        let _ = write!(out, "C\t{name}\t");
        fmt_values(&mut out, &ball.center);
        let _ = writeln!(out, "\t{:.16e}", ball.radius);
    }
    for (name, v) in s.relations() {
        let _ = write!(out, "R\t{name}\t");
        fmt_values(&mut out, v);
        out.push('\n');
    }
    out
}

pub fn import_space(text: &str) -> Result<EmbeddingSpace, EmbedError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let format_err = |line: usize, message: String| EmbedError::Format { line: line + 1, message };

    let (i, header) = lines.next().ok_or_else(|| format_err(0, "missing `#dim` header".into()))?;
    let dim = header
        .strip_prefix("#dim\t")
        .and_then(|d| d.trim().parse::<usize>().ok())
        .ok_or_else(|| format_err(i, format!("expected `#dim<TAB>n`, found `{header}`")))?;
    let mut space = EmbeddingSpace::new(dim);

    let number = |i: usize, s: &str| {
        s.trim().parse::<f64>().map_err(|_| format_err(i, format!("`{s}` is not a number")))
    };
    let vector = |i: usize, s: &str| -> Result<Vec<f64>, EmbedError> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',').map(|x| number(i, x)).collect()
    };

    for (i, line) in lines {
        let fields: Vec<&str> = line.split('\t').collect();
        match (fields[0], fields.len()) {
            ("C", 4) => {
                let ball = Ball::new(vector(i, fields[2])?, number(i, fields[3])?);
                space.insert_concept(fields[1], ball)
            }
            ("R", 3) => space.insert_relation(fields[1], vector(i, fields[2])?),
            _ => return Err(format_err(i, format!("malformed row `{line}`"))),
        }
        .map_err(|e| format_err(i, e.to_string()))?;
    }
    Ok(space)
}

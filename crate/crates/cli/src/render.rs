//! Plain-text rendering of the triangular table, matching the fixed layout
//! the golden tests pin down: right-aligned row label, ` :`, an indent of
//! j-1 spaces, then the row's symbols, so each column i occupies the same
//! character position in every row.

use hankel_scan::identities::ZeroSquare;
use hankel_scan::table::DetTable;

#[derive(Debug, PartialEq, Eq)]
pub struct Unrenderable(pub u64);

impl std::fmt::Display for Unrenderable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot render single-character symbols for q = {}", self.0)
    }
}

impl std::error::Error for Unrenderable {}

fn label_width(h: usize) -> usize {
    h.to_string().len().max(2)
}

/// Renders the table, one line per row.
pub fn render_table(table: &DetTable) -> Result<String, Unrenderable> {
    render_with(table, &[], false)
}

/// Same, optionally painting cells inside the given squares with ANSI color.
pub fn render_with(
    table: &DetTable,
    squares: &[ZeroSquare],
    color: bool,
) -> Result<String, Unrenderable> {
    if table.modulus() > 10 {
        return Err(Unrenderable(table.modulus()));
    }
    let n = table.n();
    let width = label_width(table.h());
    let mut out = String::new();
    for j in 0..=table.h() {
        let (offset, values) = table.row(j);
        out.push_str(&format!("{j:>width$} :"));
        let indent = if j == 0 { 0 } else { j - 1 };
        out.extend(std::iter::repeat_n(' ', indent));
        for (p, &v) in values.iter().enumerate() {
            let i = offset + p;
            let ch = char::from_digit(v as u32, 10).expect("residue < 10");
            if color && squares.iter().any(|sq| sq.cols_at(j, n).is_some_and(|(a, b)| a <= i && i <= b)) {
                out.push_str("\x1b[34m");
                out.push(ch);
                out.push_str("\x1b[0m");
            } else {
                out.push(ch);
            }
        }
        out.push('\n');
    }
    Ok(out)
}

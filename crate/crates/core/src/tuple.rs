use smallvec::SmallVec;

use crate::pogroup::GroupElement;

/// Coordinates indexed by the finite index set `{0, .., m-1}`.
pub type Tuple = SmallVec<[GroupElement; 4]>;

/// All tuples whose coordinate `i` ranges over `choices[i]`, first coordinate
/// slowest (row-major).
pub(crate) fn cartesian(choices: &[Vec<GroupElement>]) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = vec![Tuple::new()];
    for column in choices {
        let mut next = Vec::with_capacity(out.len() * column.len());
        for prefix in &out {
            for g in column {
                let mut t = prefix.clone();
                t.push(g.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn render(values: &[GroupElement]) -> String {
    let parts: Vec<String> = values.iter().map(|g| g.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Splits `"a,b,(c,d),<e,f>"` at top-level commas.
pub(crate) fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '<' | '[' => depth += 1,
            ')' | '>' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let tail = s[start..].trim();
    if !tail.is_empty() || !parts.is_empty() {
        parts.push(tail);
    }
    parts
}

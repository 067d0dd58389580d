//! Low-level primitives for pipe-delimited table files.
//!
//! Shared by the taxonomy file format, ground-truth sidecars, override
//! files, and the parser for model-emitted markdown tables. A backslash
//! escapes the next character; the letter escapes `\n`, `\r`, `\t` and
//! `\s` encode a line feed, carriage return, tab and space, so multi-line
//! cell content and whitespace-edged cells survive the one-row-per-record
//! layout and the cell trimming that parsing performs.

/// Escape one cell for embedding in a pipe-delimited row.
///
/// Backslashes, pipes, line feeds and carriage returns are always escaped.
/// A leading or trailing space/tab is replaced by its letter escape so the
/// reader's trim step cannot eat it. With `protect_fence`, a leading
/// backtick is escaped too, keeping the reader's inline-fence stripping
/// away from content that merely happens to start and end with backticks.
pub fn escape_cell(text: &str, protect_fence: bool) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '|' => out.push_str("\\|"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(ch),
        }
    }
    if out.starts_with(' ') {
        out.replace_range(0..1, "\\s");
    } else if out.starts_with('\t') {
        out.replace_range(0..1, "\\t");
    } else if protect_fence && out.starts_with('`') {
        out.replace_range(0..1, "\\`");
    }
    if out.ends_with(' ') {
        out.replace_range(out.len() - 1.., "\\s");
    } else if out.ends_with('\t') {
        out.replace_range(out.len() - 1.., "\\t");
    }
    out
}

/// Decode the escapes produced by [`escape_cell`].
///
/// Unknown escape sequences are kept verbatim (backslash included), so
/// hand-written content that never heard of this codec degrades gracefully.
pub fn unescape_cell(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            Some('s') => out.push(' '),
            Some('\\') => out.push('\\'),
            Some('|') => out.push('|'),
            Some('`') => out.push('`'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// Split one table row into raw (still escaped, untrimmed) cells.
///
/// Splits at unescaped pipes. A leading or trailing pipe (with only
/// whitespace outside it) delimits the row rather than an empty cell.
pub fn split_row(line: &str) -> Vec<String> {
    let mut cells = Vec::new();
    let mut current = String::new();
    let mut chars = line.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => {
                current.push('\\');
                if let Some(next) = chars.next() {
                    current.push(next);
                }
            }
            '|' => cells.push(std::mem::take(&mut current)),
            _ => current.push(ch),
        }
    }
    cells.push(current);
    if cells.last().is_some_and(|c| c.trim().is_empty()) && cells.len() > 1 {
        cells.pop();
    }
    if cells.first().is_some_and(|c| c.trim().is_empty()) && !cells.is_empty() {
        cells.remove(0);
    }
    cells
}

/// Split on unescaped pipes without any outer-pipe trimming.
///
/// Used for line-oriented records (`change: a | b | c`) where an empty
/// final field is meaningful.
pub fn split_fields(text: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => {
                current.push('\\');
                if let Some(next) = chars.next() {
                    current.push(next);
                }
            }
            '|' => fields.push(std::mem::take(&mut current)),
            _ => current.push(ch),
        }
    }
    fields.push(current);
    fields
}

/// Render cells as one `| a | b |` row. Cells must already be escaped.
pub fn join_row(cells: &[String]) -> String {
    let mut out = String::from("|");
    for cell in cells {
        out.push(' ');
        out.push_str(cell);
        out.push_str(" |");
    }
    out
}

/// Trim the ASCII space/tab padding a row writer adds around cells.
///
/// Deliberately narrower than `str::trim`: exotic Unicode whitespace is
/// cell content (the escapes only cover ASCII edges), so trimming it here
/// would break the codec round trip.
pub fn trim_cell(text: &str) -> &str {
    text.trim_matches([' ', '\t'])
}

/// A markdown table separator row: cells of dashes with optional colons.
pub fn is_separator_row(line: &str) -> bool {
    let trimmed = line.trim();
    if !trimmed.contains('|') || !trimmed.contains('-') {
        return false;
    }
    let cells = split_row(trimmed);
    !cells.is_empty()
        && cells.iter().all(|cell| {
            let c = cell.trim();
            !c.is_empty()
                && c.contains('-')
                && c.chars().all(|ch| ch == '-' || ch == ':' || ch == ' ')
        })
}

/// Strip one layer of wrapping backtick fences from a cell, if present.
///
/// `` `code` `` becomes `code`; content that is not symmetrically fenced is
/// returned unchanged.
pub fn strip_inline_fence(cell: &str) -> &str {
    let leading = cell.chars().take_while(|&c| c == '`').count();
    if leading == 0 {
        return cell;
    }
    let trailing = cell.chars().rev().take_while(|&c| c == '`').count();
    if leading != trailing || cell.chars().count() <= leading + trailing {
        return cell;
    }
    let start = leading; // backticks are one byte each
    let end = cell.len() - trailing;
    trim_cell(&cell[start..end])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn escape_round_trips_awkward_content() {
        for content in [
            "plain",
            "a | b",
            "back\\slash",
            "multi\nline",
            " leading and trailing ",
            "\ttabbed\t",
            "",
            " ",
            "crlf\r\nline",
            "pipe at end |",
        ] {
            let escaped = escape_cell(content, false);
            assert!(!escaped.contains('\n'), "escaped text must stay one-line");
            assert_eq!(
                unescape_cell(trim_cell(&escaped)),
                content,
                "content {content:?}"
            );
        }
    }

    #[test]
    fn fence_protection_survives_strip_plus_unescape() {
        let content = "`already_fenced`";
        let escaped = escape_cell(content, true);
        let stripped = strip_inline_fence(trim_cell(&escaped));
        assert_eq!(unescape_cell(stripped), content);
    }

    #[test]
    fn split_row_handles_outer_pipes_and_escapes() {
        assert_eq!(split_row("| a | b |"), vec![" a ", " b "]);
        assert_eq!(split_row("a | b"), vec!["a ", " b"]);
        assert_eq!(split_row(r"| a \| x | b |"), vec![r" a \| x ", " b "]);
        assert_eq!(
            split_row("  | indented | row |  "),
            vec![" indented ", " row "]
        );
        assert_eq!(split_row("| a |  |"), vec![" a ", "  "]);
        assert_eq!(split_row("|"), Vec::<String>::new());
    }

    #[test]
    fn split_fields_keeps_empty_tail() {
        assert_eq!(
            split_fields(" 7 | QSK-046-002 |"),
            vec![" 7 ", " QSK-046-002 ", ""]
        );
        assert_eq!(split_fields("a"), vec!["a"]);
    }

    #[test]
    fn separator_rows() {
        assert!(is_separator_row("|---|---|"));
        assert!(is_separator_row("| :--- | ---: |"));
        assert!(!is_separator_row("| a | b |"));
        assert!(!is_separator_row("---"));
        assert!(!is_separator_row(""));
    }

    #[test]
    fn fence_stripping() {
        assert_eq!(strip_inline_fence("`code`"), "code");
        assert_eq!(strip_inline_fence("``a `b` c``"), "a `b` c");
        assert_eq!(strip_inline_fence("`unbalanced"), "`unbalanced");
        assert_eq!(strip_inline_fence("plain"), "plain");
        assert_eq!(strip_inline_fence("``"), "``");
    }

    proptest! {
        #[test]
        fn cell_codec_round_trips(content in "\\PC*", fence in proptest::bool::ANY) {
            let escaped = escape_cell(&content, fence);
            prop_assert!(!escaped.contains('\n'));
            prop_assert!(!escaped.contains('\r'));
            let trimmed = trim_cell(&escaped);
            let seen = if fence { strip_inline_fence(trimmed) } else { trimmed };
            prop_assert_eq!(unescape_cell(seen), content);
        }

        #[test]
        fn row_codec_round_trips(cells in proptest::collection::vec("\\PC*", 1..6)) {
            let escaped: Vec<String> = cells.iter().map(|c| escape_cell(c, false)).collect();
            let row = join_row(&escaped);
            let back: Vec<String> = split_row(&row)
                .iter()
                .map(|c| unescape_cell(trim_cell(c)))
                .collect();
            prop_assert_eq!(back, cells);
        }
    }
}

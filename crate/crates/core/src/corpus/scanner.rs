//! Single-pass comment stripper for Java-family sources.
//!
//! The scanner walks the text once with five lexical states (code, line
//! comment, block comment, string/text-block literal, char literal). Comment
//! markers inside literals are left alone, escapes inside literals are
//! honoured, and block comments do not nest. Newlines inside block comments
//! are kept so that surviving lines stay on their original line; lines left
//! empty or whitespace-only are dropped afterwards.

use std::fmt;

/// Recoverable problem found while scanning. The open construct is treated as
/// running to end of input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanWarning {
    UnterminatedBlockComment { line: usize },
    UnterminatedString { line: usize },
    UnterminatedTextBlock { line: usize },
    UnterminatedChar { line: usize },
}

impl fmt::Display for ScanWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanWarning::UnterminatedBlockComment { line } => {
                write!(f, "unterminated block comment opened on line {line}")
            }
            ScanWarning::UnterminatedString { line } => {
                write!(f, "unterminated string literal opened on line {line}")
            }
            ScanWarning::UnterminatedTextBlock { line } => {
                write!(f, "unterminated text block opened on line {line}")
            }
            ScanWarning::UnterminatedChar { line } => {
                write!(f, "unterminated char literal opened on line {line}")
            }
        }
    }
}

/// Cleaned text plus whatever the scanner had to recover from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripped {
    pub text: String,
    pub warnings: Vec<ScanWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Code,
    LineComment,
    BlockComment,
    Str,
    TextBlock,
    Char,
}

/// `\r\n` and lone `\r` become `\n`.
pub fn normalize_newlines(text: &str) -> String {
    if !text.contains('\r') {
        return text.to_owned();
    }
    text.replace("\r\n", "\n").replace('\r', "\n")
}

/// Removes comments and blank lines. Warnings are logged and discarded; use
/// [`strip_comments_checked`] to inspect them.
pub fn strip_comments(raw: &str) -> String {
    let stripped = strip_comments_checked(raw);
    for w in &stripped.warnings {
        log::warn!("{w}");
    }
    stripped.text
}

pub fn strip_comments_checked(raw: &str) -> Stripped {
    let text = normalize_newlines(raw);
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();

    // Each output line remembers whether a comment was cut from it; only
    // those lines get their trailing whitespace trimmed.
    let mut lines: Vec<(String, bool)> = vec![(String::new(), false)];
    let mut state = State::Code;
    let mut line_no = 1usize;
    let mut opened_on = 0usize;
    let mut i = 0usize;

    let peek = |at: usize| chars.get(at).copied();

    while i < n {
        let c = chars[i];
        if c == '\n' {
            if state == State::LineComment {
                state = State::Code;
            }
            lines.push((String::new(), false));
            line_no += 1;
            i += 1;
            continue;
        }
        let cur = lines.last_mut().expect("at least one line");
        match state {
            State::Code => match c {
                '/' if peek(i + 1) == Some('/') => {
                    state = State::LineComment;
                    cur.1 = true;
                    i += 2;
                }
                '/' if peek(i + 1) == Some('*') => {
                    state = State::BlockComment;
                    opened_on = line_no;
                    cur.1 = true;
                    i += 2;
                }
                '"' if peek(i + 1) == Some('"') && peek(i + 2) == Some('"') => {
                    state = State::TextBlock;
                    opened_on = line_no;
                    cur.0.push_str("\"\"\"");
                    i += 3;
                }
                '"' => {
                    state = State::Str;
                    opened_on = line_no;
                    cur.0.push(c);
                    i += 1;
                }
                '\'' => {
                    state = State::Char;
                    opened_on = line_no;
                    cur.0.push(c);
                    i += 1;
                }
                _ => {
                    cur.0.push(c);
                    i += 1;
                }
            },
            State::LineComment => i += 1,
            State::BlockComment => {
                if c == '*' && peek(i + 1) == Some('/') {
                    state = State::Code;
                    // Anything after the closing marker sits on a line that
                    // already lost comment text.
                    cur.1 = true;
                    i += 2;
                } else {
                    cur.1 = true;
                    i += 1;
                }
            }
            State::Str | State::Char => {
                let close = if state == State::Str { '"' } else { '\'' };
                cur.0.push(c);
                if c == '\\' {
                    if let Some(next) = peek(i + 1).filter(|&n| n != '\n') {
                        cur.0.push(next);
                        i += 2;
                        continue;
                    }
                } else if c == close {
                    state = State::Code;
                }
                i += 1;
            }
            State::TextBlock => {
                if c == '\\' {
                    cur.0.push(c);
                    if let Some(next) = peek(i + 1).filter(|&n| n != '\n') {
                        cur.0.push(next);
                        i += 2;
                        continue;
                    }
                    i += 1;
                } else if c == '"' && peek(i + 1) == Some('"') && peek(i + 2) == Some('"') {
                    cur.0.push_str("\"\"\"");
                    state = State::Code;
                    i += 3;
                } else {
                    cur.0.push(c);
                    i += 1;
                }
            }
        }
    }

    let mut warnings = Vec::new();
    match state {
        State::BlockComment => warnings.push(ScanWarning::UnterminatedBlockComment { line: opened_on }),
        State::Str => warnings.push(ScanWarning::UnterminatedString { line: opened_on }),
        State::TextBlock => warnings.push(ScanWarning::UnterminatedTextBlock { line: opened_on }),
        State::Char => warnings.push(ScanWarning::UnterminatedChar { line: opened_on }),
        State::Code | State::LineComment => {}
    }

    let kept: Vec<&str> = lines
        .iter()
        .map(|(line, cut)| if *cut { line.trim_end() } else { line.as_str() })
        .filter(|line| !line.trim().is_empty())
        .collect();

    Stripped {
        text: kept.join("\n"),
        warnings,
    }
}

/// Number of newline-delimited lines; 0 for the empty string.
pub fn count_lloc(cleaned: &str) -> usize {
    if cleaned.is_empty() {
        0
    } else {
        cleaned.split('\n').count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_input() {
        assert_eq!(strip_comments(""), "");
        assert_eq!(count_lloc(""), 0);
    }

    #[test]
    fn line_and_block_comments_and_blank_lines() {
        let raw = "int x = 1; // note\n\n/* block */\nint y;";
        assert_eq!(strip_comments(raw), "int x = 1;\nint y;");
        assert_eq!(count_lloc("int x = 1;\nint y;"), 2);
    }

    #[test]
    fn comment_marker_inside_string_is_preserved() {
        let raw = "String s = \"//not a comment\";";
        assert_eq!(strip_comments(raw), raw);
    }

    #[test]
    fn block_marker_inside_string_and_char() {
        let raw = "String s = \"/* no */\"; char c = '/'; char d = '*';";
        assert_eq!(strip_comments(raw), raw);
    }

    #[test]
    fn escaped_quote_does_not_close_string() {
        let raw = "String s = \"a\\\"// still string\"; // gone";
        assert_eq!(strip_comments(raw), "String s = \"a\\\"// still string\";");
    }

    #[test]
    fn escaped_backslash_closes_string() {
        let raw = "String s = \"\\\\\"; // gone";
        assert_eq!(strip_comments(raw), "String s = \"\\\\\";");
    }

    #[test]
    fn char_literal_quote() {
        let raw = "char q = '\"'; // c\nchar e = '\\''; /* d */";
        assert_eq!(strip_comments(raw), "char q = '\"';\nchar e = '\\'';");
    }

    #[test]
    fn block_comments_do_not_nest() {
        let raw = "a(); /* outer /* inner */ b(); */";
        // The first `*/` closes the comment; the trailing `*/` is code text.
        assert_eq!(strip_comments(raw), "a();  b(); */");
    }

    #[test]
    fn slash_star_slash_does_not_close() {
        let raw = "a();/*/ still comment\n*/b();";
        assert_eq!(strip_comments(raw), "a();\nb();");
    }

    #[test]
    fn multiline_block_keeps_surrounding_lines_apart() {
        let raw = "int a; /* start\n middle\n end */ int b;";
        assert_eq!(strip_comments(raw), "int a;\n int b;");
    }

    #[test]
    fn crlf_and_cr_are_normalized() {
        assert_eq!(strip_comments("a;\r\n\r\nb;\rc;"), "a;\nb;\nc;");
    }

    #[test]
    fn unterminated_block_comment_runs_to_eof() {
        let s = strip_comments_checked("a();\n/* open\nb();");
        assert_eq!(s.text, "a();");
        assert_eq!(s.warnings, vec![ScanWarning::UnterminatedBlockComment { line: 2 }]);
    }

    #[test]
    fn unterminated_string_runs_to_eof() {
        let s = strip_comments_checked("s = \"open // kept\nb(); // kept too");
        assert_eq!(s.text, "s = \"open // kept\nb(); // kept too");
        assert_eq!(s.warnings, vec![ScanWarning::UnterminatedString { line: 1 }]);
    }

    #[test]
    fn text_block_protects_comment_markers() {
        let raw = "String t = \"\"\"\n  // not a comment\n  \"\"\"; // comment";
        assert_eq!(
            strip_comments(raw),
            "String t = \"\"\"\n  // not a comment\n  \"\"\";"
        );
    }

    #[test]
    fn trailing_whitespace_kept_on_lines_without_comments() {
        assert_eq!(strip_comments("int a;   \nint b;"), "int a;   \nint b;");
    }

    #[test]
    fn comment_only_input_has_zero_lloc() {
        let raw = "// a\n/** javadoc\n * @param x\n */\n\n   \n/* */";
        assert_eq!(count_lloc(&strip_comments(raw)), 0);
    }

    fn java_like() -> impl Strategy<Value = String> {
        let piece = prop_oneof![
            Just("int x = 1;".to_string()),
            Just("// c".to_string()),
            Just("/* b */".to_string()),
            Just("/**\n * doc\n */".to_string()),
            Just("\"s//t\"".to_string()),
            Just("'\\''".to_string()),
            Just("'/'".to_string()),
            Just("\n".to_string()),
            Just("\r\n".to_string()),
            Just("   ".to_string()),
            Just("\"\\\"/*\"".to_string()),
            "[a-z{}();=+ ]{0,12}",
        ];
        proptest::collection::vec(piece, 0..24).prop_map(|v| v.concat())
    }

    fn clean_line() -> impl Strategy<Value = String> {
        "[a-zA-Z0-9{}();=+ ]{0,20}[a-zA-Z0-9{}();=+]"
    }

    proptest! {
        #[test]
        fn idempotent(raw in java_like()) {
            let once = strip_comments(&raw);
            prop_assert_eq!(strip_comments(&once), once);
        }

        #[test]
        fn never_adds_lines(raw in java_like()) {
            let cleaned = strip_comments(&raw);
            let raw_lines = normalize_newlines(&raw).split('\n').count();
            prop_assert!(count_lloc(&cleaned) <= raw_lines);
            prop_assert!(cleaned.split('\n').all(|l| cleaned.is_empty() || !l.trim().is_empty()));
        }

        #[test]
        fn comment_free_input_round_trips(lines in proptest::collection::vec(clean_line(), 1..10)) {
            let text = lines.join("\n");
            prop_assert_eq!(strip_comments(&text), text);
        }

        #[test]
        fn comments_and_blanks_only_give_zero(parts in proptest::collection::vec(
            prop_oneof![Just("// x"), Just("/* y */"), Just("/** z\n */"), Just("\n"), Just("  \t")], 0..12)) {
            let raw = parts.join("\n");
            prop_assert_eq!(count_lloc(&strip_comments(&raw)), 0);
        }
    }
}

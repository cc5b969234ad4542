//! Comment removal that respects string, char and text-block literals.

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Code,
    LineComment,
    BlockComment,
    Str,
    Char,
    TextBlock,
}

/// Removes `//` and `/* */` comments from Java source.
///
/// Line structure is kept: newlines inside block comments are emitted, and a
/// single-line block comment between two non-blank characters becomes one
/// space so adjacent tokens never merge. Unterminated constructs are passed
/// through as far as they go.
pub fn strip_comments(source: &str) -> String {
    let bytes = source.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut state = State::Code;
    let mut i = 0;
    let mut block_had_newline = false;

    while i < bytes.len() {
        let c = bytes[i];
        let next = bytes.get(i + 1).copied();
        match state {
            State::Code => {
                if c == b'/' && next == Some(b'/') {
                    state = State::LineComment;
                    i += 2;
                    continue;
                }
                if c == b'/' && next == Some(b'*') {
                    state = State::BlockComment;
                    block_had_newline = false;
                    i += 2;
                    continue;
                }
                if c == b'"' && bytes[i..].starts_with(b"\"\"\"") {
                    state = State::TextBlock;
                    out.extend_from_slice(b"\"\"\"");
                    i += 3;
                    continue;
                }
                if c == b'"' {
                    state = State::Str;
                } else if c == b'\'' {
                    state = State::Char;
                }
                out.push(c);
            }
            State::LineComment => {
                if c == b'\n' || c == b'\r' {
                    state = State::Code;
                    out.push(c);
                }
            }
            State::BlockComment => {
                if c == b'*' && next == Some(b'/') {
                    state = State::Code;
                    i += 2;
                    if !block_had_newline {
                        let before = out.last().copied();
                        let after = bytes.get(i).copied();
                        let solid = |b: Option<u8>| b.is_some_and(|b| !b.is_ascii_whitespace());
                        if solid(before) && solid(after) {
                            out.push(b' ');
                        }
                    }
                    continue;
                }
                if c == b'\n' {
                    block_had_newline = true;
                    out.push(c);
                }
            }
            State::Str | State::Char => {
                let quote = if state == State::Str { b'"' } else { b'\'' };
                out.push(c);
                if c == b'\\' {
                    if let Some(n) = next {
                        out.push(n);
                        i += 2;
                        continue;
                    }
                } else if c == quote || c == b'\n' {
                    state = State::Code;
                }
            }
            State::TextBlock => {
                if c == b'\\' {
                    out.push(c);
                    if let Some(n) = next {
                        out.push(n);
                        i += 2;
                        continue;
                    }
                } else if bytes[i..].starts_with(b"\"\"\"") {
                    out.extend_from_slice(b"\"\"\"");
                    state = State::Code;
                    i += 3;
                    continue;
                } else {
                    out.push(c);
                }
            }
        }
        i += 1;
    }
    // Only ASCII bytes were dropped or inserted, so UTF-8 boundaries survive.
    String::from_utf8(out).expect("comment stripping preserves UTF-8")
}

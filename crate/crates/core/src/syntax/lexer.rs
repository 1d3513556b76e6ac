use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Int(i64),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

// Longest first so that `<=` wins over `<`.
const PUNCTS: &[&str] = &[
    "++", "--", "<=", ">=", "==", "!=", "(", ")", "{", "}", ";", ",", "=", "+", "-", "*", "/", "%", "<", ">", "!",
];

pub fn tokenize(text: &str) -> Result<Vec<(Token, Pos)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for &b in &bytes[*i..*i + n] {
            if b == b'\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        }
        *i += n;
    };

    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos { line, column: col };
        if c.is_ascii_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if text[i..].starts_with("//") {
            let len = text[i..].find('\n').unwrap_or(text.len() - i);
            advance(&mut i, &mut line, &mut col, len);
        } else if text[i..].starts_with("/*") {
            let Some(end) = text[i + 2..].find("*/") else {
                return Err(ParseError::new(pos, "unterminated comment"));
            };
            advance(&mut i, &mut line, &mut col, end + 4);
        } else if c == b'#' {
            return Err(ParseError::new(pos, "pre-processor directives are not supported"));
        } else if c.is_ascii_digit() {
            let len = text[i..].bytes().take_while(|b| b.is_ascii_alphanumeric() || *b == b'_').count();
            let lexeme = &text[i..i + len];
            if !lexeme.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseError::new(pos, format!("invalid numeric literal `{lexeme}`")));
            }
            let value = lexeme
                .parse::<i64>()
                .map_err(|_| ParseError::new(pos, format!("integer literal `{lexeme}` out of range")))?;
            out.push((Token::Int(value), pos));
            advance(&mut i, &mut line, &mut col, len);
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let len = text[i..].bytes().take_while(|b| b.is_ascii_alphanumeric() || *b == b'_').count();
            out.push((Token::Ident(text[i..i + len].to_string()), pos));
            advance(&mut i, &mut line, &mut col, len);
        } else if c == b'"' {
            let mut value = String::new();
            let mut j = i + 1;
            loop {
                match bytes.get(j) {
                    None | Some(b'\n') => return Err(ParseError::new(pos, "unterminated string literal")),
                    Some(b'"') => break,
                    Some(b'\\') => {
                        let escaped = match bytes.get(j + 1) {
                            Some(b'n') => '\n',
                            Some(b't') => '\t',
                            Some(b'\\') => '\\',
                            Some(b'"') => '"',
                            _ => return Err(ParseError::new(pos, "unsupported escape sequence")),
                        };
                        value.push(escaped);
                        j += 2;
                    }
                    Some(_) => {
                        let ch = text[j..].chars().next().unwrap();
                        value.push(ch);
                        j += ch.len_utf8();
                    }
                }
            }
            out.push((Token::Str(value), pos));
            let n = j + 1 - i;
            advance(&mut i, &mut line, &mut col, n);
        } else if let Some(p) = PUNCTS.iter().find(|p| text[i..].starts_with(**p)) {
            out.push((Token::Punct(p), pos));
            advance(&mut i, &mut line, &mut col, p.len());
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(ParseError::new(pos, format!("unexpected character `{ch}`")));
        }
    }
    out.push((Token::Eof, Pos { line, column: col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_track_lines() {
        let toks = tokenize("int x;\n  x = 1;").unwrap();
        assert_eq!(toks[3], (Token::Ident("x".into()), Pos { line: 2, column: 3 }));
    }

    #[test]
    fn longest_punct_wins() {
        let toks: Vec<_> = tokenize("a<=b++").unwrap().into_iter().map(|t| t.0).collect();
        assert_eq!(toks[1], Token::Punct("<="));
        assert_eq!(toks[3], Token::Punct("++"));
    }

    #[test]
    fn digit_led_identifier_is_an_error() {
        let err = tokenize("int 2x;").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
    }

    #[test]
    fn strings_and_comments() {
        let toks: Vec<_> = tokenize("/* c */ printf(\"A\\n\"); // tail").unwrap().into_iter().map(|t| t.0).collect();
        assert_eq!(toks[2], Token::Str("A\n".into()));
        assert_eq!(toks.len(), 6);
    }
}

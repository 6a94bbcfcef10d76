//! Tokenizer shared by the Turtle and SPARQL parsers.

use super::term::is_pn_chars;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// `<...>`, brackets stripped.
    IriRef(String),
    /// `prefix:local`; `prefix:` has an empty local part.
    PName {
        prefix: String,
        local: String,
    },
    /// `_:label`
    Blank(String),
    Str(String),
    /// `@word`: a directive or a language tag depending on position.
    At(String),
    DoubleCaret,
    /// `?name` or `$name`
    Var(String),
    /// Bare identifier: keywords and `a`.
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            cur.take_while(|c| c != '\n');
            continue;
        }
        let (line, col) = (cur.line, cur.col);
        let err = |message: String| LexError { line, col, message };
        let tok = match c {
            '<' => {
                cur.bump();
                let iri = cur.take_while(|c| c != '>' && c != '\n' && !c.is_whitespace());
                if cur.bump() != Some('>') {
                    return Err(err("unterminated IRI reference".into()));
                }
                Tok::IriRef(iri)
            }
            '"' | '\'' => Tok::Str(lex_string(&mut cur, line, col)?),
            '@' => {
                cur.bump();
                let w = cur.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if w.is_empty() {
                    return Err(err("expected a name after '@'".into()));
                }
                Tok::At(w)
            }
            '^' => {
                cur.bump();
                if cur.bump() != Some('^') {
                    return Err(err("expected '^^'".into()));
                }
                Tok::DoubleCaret
            }
            '?' | '$' => {
                cur.bump();
                let name = cur.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(err("empty variable name".into()));
                }
                Tok::Var(name)
            }
            '.' | ';' | ',' | '{' | '}' | '(' | ')' | '[' | ']' | '*' => {
                cur.bump();
                Tok::Punct(c)
            }
            '_' if matches!(peek2(&cur), Some(':')) => {
                cur.bump();
                cur.bump();
                let label = lex_local(&mut cur);
                if label.is_empty() {
                    return Err(err("empty blank node label".into()));
                }
                Tok::Blank(label)
            }
            ':' => {
                cur.bump();
                Tok::PName {
                    prefix: String::new(),
                    local: lex_local(&mut cur),
                }
            }
            c if is_name_start(c) => {
                let word = cur.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-');
                if cur.peek() == Some(':') {
                    cur.bump();
                    Tok::PName {
                        prefix: word,
                        local: lex_local(&mut cur),
                    }
                } else {
                    Tok::Word(word)
                }
            }
            c if c.is_ascii_digit() => Tok::Word(cur.take_while(|c| c.is_ascii_alphanumeric())),
            other => return Err(err(format!("unexpected character '{other}'"))),
        };
        out.push(Token { tok, line, col });
    }
    Ok(out)
}

fn peek2(cur: &Cursor<'_>) -> Option<char> {
    let mut it = cur.chars.clone();
    it.next();
    it.next()
}

/// Local part of a prefixed name. Dots are allowed inside but a trailing dot
/// belongs to the statement terminator.
fn lex_local(cur: &mut Cursor<'_>) -> String {
    let mut s = String::new();
    loop {
        match cur.peek() {
            Some(c) if is_pn_chars(c) => {
                s.push(c);
                cur.bump();
            }
            Some('.') => {
                // A run of dots belongs to the name only when a name character follows it.
                let mut ahead = cur.chars.clone();
                let mut dots = 0;
                while ahead.peek() == Some(&'.') {
                    ahead.next();
                    dots += 1;
                }
                if ahead.next().is_some_and(is_pn_chars) && !s.is_empty() {
                    for _ in 0..dots {
                        s.push('.');
                        cur.bump();
                    }
                } else {
                    break;
                }
            }
            _ => break,
        }
    }
    s
}

fn lex_string(cur: &mut Cursor<'_>, line: usize, col: usize) -> Result<String, LexError> {
    let quote = cur.bump().expect("caller peeked a quote");
    let mut s = String::new();
    loop {
        let c = cur.bump().ok_or_else(|| LexError {
            line,
            col,
            message: "unterminated string literal".into(),
        })?;
        match c {
            '\n' => {
                return Err(LexError {
                    line,
                    col,
                    message: "newline in string literal".into(),
                })
            }
            '\\' => {
                let (el, ec) = (cur.line, cur.col);
                let esc = cur.bump();
                let bad = |m: &str| LexError {
                    line: el,
                    col: ec,
                    message: m.to_string(),
                };
                match esc {
                    Some('n') => s.push('\n'),
                    Some('r') => s.push('\r'),
                    Some('t') => s.push('\t'),
                    Some('b') => s.push('\u{8}'),
                    Some('f') => s.push('\u{c}'),
                    Some('"') => s.push('"'),
                    Some('\'') => s.push('\''),
                    Some('\\') => s.push('\\'),
                    Some(u @ ('u' | 'U')) => {
                        let n = if u == 'u' { 4 } else { 8 };
                        let mut hex = String::new();
                        for _ in 0..n {
                            hex.push(cur.bump().ok_or_else(|| bad("truncated escape"))?);
                        }
                        let cp = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| bad("invalid unicode escape"))?;
                        s.push(cp);
                    }
                    _ => return Err(bad("invalid escape sequence")),
                }
            }
            c if c == quote => return Ok(s),
            c => s.push(c),
        }
    }
}

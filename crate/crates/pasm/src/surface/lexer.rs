use super::{Diagnostic, Span};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// `@label`
    Atom(String),
    /// `@#n`
    Fresh(u64),
    LParen,
    RParen,
    Comma,
    Slash,
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Plus,
    Minus,
    Star,
    Arrow,
    DArrow,
    LBrace2,
    RBrace2,
    Bar,
    Colon,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Atom(s) => format!("`@{s}`"),
            Tok::Fresh(n) => format!("`@#{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Slash => "/",
            Tok::Assign => ":=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::LBrace2 => "{{",
            Tok::RBrace2 => "}}",
            Tok::Bar => "|",
            Tok::Colon => ":",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''
}

/// Splits source text into tokens. `//` starts a comment running to the end of the line.
pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |i: usize| bytes.get(i).map(|p| p.1);
    let pos = |i: usize| bytes.get(i).map_or(src.len(), |p| p.0);
    while i < bytes.len() {
        let c = bytes[i].1;
        let start = pos(i);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && at(i + 1) == Some('/') {
            while i < bytes.len() && bytes[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = if ident_start(c) {
            let mut j = i;
            while at(j).is_some_and(ident_char) {
                j += 1;
            }
            (Tok::Ident(src[start..pos(j)].to_string()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while at(j).is_some_and(|c| c.is_ascii_digit()) {
                j += 1;
            }
            let text = &src[start..pos(j)];
            let n = text
                .parse::<i64>()
                .map_err(|_| Diagnostic::new(Span::new(start, pos(j)), format!("integer `{text}` is out of range")))?;
            (Tok::Int(n), j - i)
        } else if c == '@' {
            if at(i + 1) == Some('#') {
                let mut j = i + 2;
                while at(j).is_some_and(|c| c.is_ascii_digit()) {
                    j += 1;
                }
                let text = &src[pos(i + 2)..pos(j)];
                let n = text
                    .parse::<u64>()
                    .map_err(|_| Diagnostic::new(Span::new(start, pos(j)), "expected a number after `@#`"))?;
                (Tok::Fresh(n), j - i)
            } else {
                let mut j = i + 1;
                while at(j).is_some_and(ident_char) {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(Diagnostic::new(Span::new(start, start + 1), "expected an atom label after `@`"));
                }
                (Tok::Atom(src[pos(i + 1)..pos(j)].to_string()), j - i)
            }
        } else {
            let two = (c, at(i + 1).unwrap_or('\0'));
            match two {
                ('<', '-') if at(i + 2) == Some('>') => (Tok::DArrow, 3),
                (':', '=') => (Tok::Assign, 2),
                ('!', '=') => (Tok::Ne, 2),
                ('<', '=') => (Tok::Le, 2),
                ('-', '>') => (Tok::Arrow, 2),
                ('{', '{') => (Tok::LBrace2, 2),
                ('}', '}') => (Tok::RBrace2, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('/', _) => (Tok::Slash, 1),
                ('=', _) => (Tok::Eq, 1),
                ('<', _) => (Tok::Lt, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('|', _) => (Tok::Bar, 1),
                (':', _) => (Tok::Colon, 1),
                _ => {
                    return Err(Diagnostic::new(
                        Span::new(start, start + c.len_utf8()),
                        format!("unexpected character `{c}`"),
                    ))
                }
            }
        };
        i += len;
        out.push(Token { tok, span: Span::new(start, pos(i)) });
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    Ok(out)
}

use std::fmt;

/// Byte range into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Num(n) => write!(f, "number `{n}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub const KEYWORDS: &[&str] = &[
    "type", "def", "nat", "Pi", "Sig", "Lam", "mu", "nu", "Rec", "unit", "suc", "fn", "split", "as", "in", "inl",
    "inr", "case", "of", "pack", "unpack", "refl", "eqelim", "with", "eqabort", "fold", "rec", "corec", "out_nu",
    "inj0", "injs", "out0", "outs", "ind",
];

// Longest first so that `->` wins over `-`.
const SYMBOLS: &[&str] = &["->", "=>", "==", "(", ")", "[", "]", "<", ">", ",", "|", ":", ".", "/", "*", "+", "="];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if src[i..].starts_with("--") {
            while i < src.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if is_ident_start(c) {
            // Keywords like `inj0` and `out_nu` are lexed as identifiers first.
            while i < src.len() && is_ident_char(src[i..].chars().next().unwrap()) {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            };
            out.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_digit() {
            while i < src.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse::<u64>()
                .map_err(|_| LexError { offset: start, message: "numeric literal too large".into() })?;
            out.push(Token { tok: Tok::Num(n), span: Span::new(start, i) });
            continue;
        }
        match SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                i += s.len();
                out.push(Token { tok: Tok::Sym(s), span: Span::new(start, i) });
            }
            None => return Err(LexError { offset: start, message: format!("unexpected character `{c}`") }),
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_comments() {
        assert_eq!(
            toks("S -> T -- trailing\n=> =="),
            vec![
                Tok::Ident("S".into()),
                Tok::Sym("->"),
                Tok::Ident("T".into()),
                Tok::Sym("=>"),
                Tok::Sym("=="),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn keywords_with_digits_and_primes() {
        assert_eq!(
            toks("inj0 out_nu p' x1"),
            vec![Tok::Kw("inj0"), Tok::Kw("out_nu"), Tok::Ident("p'".into()), Tok::Ident("x1".into()), Tok::Eof]
        );
    }

    #[test]
    fn bad_character() {
        let e = lex("def x : unit = @").unwrap_err();
        assert_eq!(e.offset, 15);
    }
}

//! On-demand tokenizer. The parser drives it and asks for regex or template
//! continuation rescans where the grammar calls for them.

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Keyword(&'static str),
    Num(String),
    Str { raw: String, quote: char },
    /// Template chunk. `tail` is true when the chunk ends with a backtick.
    Template { raw: String, tail: bool },
    Regex(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
    /// A line terminator appeared between the previous token and this one.
    pub nl_before: bool,
}

const KEYWORDS: &[&str] = &[
    "var", "let", "const", "function", "return", "if", "else", "for", "in", "while", "do",
    "break", "continue", "throw", "try", "catch", "finally", "new", "delete", "typeof", "void",
    "instanceof", "this", "null", "true", "false",
];

// Longest first so that greedy matching works.
const PUNCTS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=",
    "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "**", "<<", ">>", "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~", "?", ":", "=", ".",
];

/// Names that may appear after `.` or as object keys even though they are
/// reserved elsewhere.
pub fn keyword_str(s: &str) -> Option<&'static str> {
    KEYWORDS.iter().copied().find(|k| *k == s)
}

fn is_id_start(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphabetic()
}

fn is_id_part(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphanumeric()
}

#[derive(Clone)]
pub struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn set_pos(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn source(&self) -> &'a str {
        self.src
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    /// Skips whitespace and comments, reporting whether a newline was crossed.
    fn skip_trivia(&mut self) -> Result<bool, SyntaxError> {
        let mut nl = false;
        loop {
            match self.peek_char() {
                Some('\n') | Some('\r') | Some('\u{2028}') | Some('\u{2029}') => {
                    nl = true;
                    self.bump();
                }
                Some(c) if c.is_whitespace() || c == '\u{feff}' => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek_char() {
                        if c == '\n' || c == '\r' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.pos;
                    self.pos += 2;
                    match self.src[self.pos..].find("*/") {
                        Some(off) => {
                            if self.src[self.pos..self.pos + off].contains(['\n', '\r']) {
                                nl = true;
                            }
                            self.pos += off + 2;
                        }
                        None => return Err(SyntaxError::new(start, "end of block comment")),
                    }
                }
                _ => return Ok(nl),
            }
        }
    }

    pub fn next_token(&mut self) -> Result<Token, SyntaxError> {
        let nl_before = self.skip_trivia()?;
        let start = self.pos;
        let tok = match self.peek_char() {
            None => Tok::Eof,
            Some(c) if is_id_start(c) => {
                while matches!(self.peek_char(), Some(c) if is_id_part(c)) {
                    self.bump();
                }
                let word = &self.src[start..self.pos];
                match keyword_str(word) {
                    Some(k) => Tok::Keyword(k),
                    None => Tok::Ident(word.to_string()),
                }
            }
            Some(c) if c.is_ascii_digit() => self.number(start)?,
            Some('.') if matches!(self.peek_at(1), Some(d) if d.is_ascii_digit()) => self.number(start)?,
            Some(q @ ('"' | '\'')) => {
                self.bump();
                loop {
                    match self.bump() {
                        None | Some('\n') | Some('\r') => {
                            return Err(SyntaxError::new(start, "closing quote"));
                        }
                        Some('\\') => {
                            self.bump();
                        }
                        Some(c) if c == q => break,
                        Some(_) => {}
                    }
                }
                Tok::Str { raw: self.src[start + 1..self.pos - 1].to_string(), quote: q }
            }
            Some('`') => {
                self.bump();
                self.template_chunk(start)?
            }
            Some(_) => {
                let rest = &self.src[self.pos..];
                match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                    Some(p) => {
                        // `?.` followed by a digit is a conditional, not optional chaining.
                        if *p == "?." && matches!(rest[2..].chars().next(), Some(d) if d.is_ascii_digit()) {
                            self.pos += 1;
                            Tok::Punct("?")
                        } else {
                            self.pos += p.len();
                            Tok::Punct(p)
                        }
                    }
                    None => return Err(SyntaxError::new(start, "a valid token")),
                }
            }
        };
        Ok(Token { tok, start, end: self.pos, nl_before })
    }

    fn number(&mut self, start: usize) -> Result<Tok, SyntaxError> {
        let radix_prefix = self.peek_char() == Some('0')
            && matches!(self.peek_at(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B'));
        if radix_prefix {
            self.pos += 2;
            let digits_start = self.pos;
            while matches!(self.peek_char(), Some(c) if c.is_ascii_hexdigit() || c == '_') {
                self.bump();
            }
            if self.pos == digits_start {
                return Err(SyntaxError::new(start, "digits"));
            }
        } else {
            while matches!(self.peek_char(), Some(c) if c.is_ascii_digit() || c == '_') {
                self.bump();
            }
            if self.peek_char() == Some('.') {
                self.bump();
                while matches!(self.peek_char(), Some(c) if c.is_ascii_digit() || c == '_') {
                    self.bump();
                }
            }
            if matches!(self.peek_char(), Some('e' | 'E')) {
                let save = self.pos;
                self.bump();
                if matches!(self.peek_char(), Some('+' | '-')) {
                    self.bump();
                }
                if matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
                    while matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
                        self.bump();
                    }
                } else {
                    self.pos = save;
                }
            }
        }
        if matches!(self.peek_char(), Some(c) if is_id_start(c)) {
            return Err(SyntaxError::new(self.pos, "end of numeric literal"));
        }
        Ok(Tok::Num(self.src[start..self.pos].to_string()))
    }

    /// Scans template characters up to `${` or the closing backtick. The
    /// opening delimiter has already been consumed.
    fn template_chunk(&mut self, start: usize) -> Result<Tok, SyntaxError> {
        let body_start = self.pos;
        loop {
            match self.peek_char() {
                None => return Err(SyntaxError::new(start, "closing backtick")),
                Some('\\') => {
                    self.bump();
                    self.bump();
                }
                Some('`') => {
                    let raw = self.src[body_start..self.pos].to_string();
                    self.bump();
                    return Ok(Tok::Template { raw, tail: true });
                }
                Some('$') if self.peek_at(1) == Some('{') => {
                    let raw = self.src[body_start..self.pos].to_string();
                    self.pos += 2;
                    return Ok(Tok::Template { raw, tail: false });
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    /// Re-reads the token starting at `start` (a `}`) as a template continuation.
    pub fn rescan_template(&mut self, start: usize) -> Result<Token, SyntaxError> {
        self.pos = start + 1;
        let tok = self.template_chunk(start)?;
        Ok(Token { tok, start, end: self.pos, nl_before: false })
    }

    /// Re-reads the token starting at `start` (a `/` or `/=`) as a regex literal.
    pub fn rescan_regex(&mut self, start: usize, nl_before: bool) -> Result<Token, SyntaxError> {
        self.pos = start + 1;
        let mut in_class = false;
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => {
                    return Err(SyntaxError::new(start, "end of regular expression"));
                }
                Some('\\') => {
                    self.bump();
                }
                Some('[') => in_class = true,
                Some(']') => in_class = false,
                Some('/') if !in_class => break,
                Some(_) => {}
            }
        }
        while matches!(self.peek_char(), Some(c) if is_id_part(c)) {
            self.bump();
        }
        Ok(Token {
            tok: Tok::Regex(self.src[start..self.pos].to_string()),
            start,
            end: self.pos,
            nl_before,
        })
    }
}

/// Tokenizes the whole input, treating every `/` as an operator and never
/// descending into templates. Good enough for line-level repair on text that
/// does not parse; errors stop the scan early.
pub fn rough_tokens(src: &str) -> Vec<Token> {
    let mut lx = Lexer::new(src);
    let mut out = Vec::new();
    let mut prev_allows_regex = true;
    loop {
        let save = lx.pos();
        let tok = match lx.next_token() {
            Ok(t) => t,
            Err(_) => {
                // Skip one character and keep going.
                lx.set_pos(save);
                if lx.bump().is_none() {
                    break;
                }
                continue;
            }
        };
        let tok = if prev_allows_regex && matches!(tok.tok, Tok::Punct("/") | Tok::Punct("/=")) {
            let mut probe = lx.clone();
            match probe.rescan_regex(tok.start, tok.nl_before) {
                Ok(t) => {
                    lx = probe;
                    t
                }
                Err(_) => tok,
            }
        } else {
            tok
        };
        if tok.tok == Tok::Eof {
            break;
        }
        prev_allows_regex = match &tok.tok {
            Tok::Ident(_) | Tok::Num(_) | Tok::Str { .. } | Tok::Regex(_) | Tok::Template { .. } => false,
            Tok::Keyword(k) => !matches!(*k, "this" | "null" | "true" | "false"),
            Tok::Punct(p) => !matches!(*p, ")" | "]" | "}"),
            Tok::Eof => false,
        };
        out.push(tok);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        let mut lx = Lexer::new(src);
        let mut v = Vec::new();
        loop {
            let t = lx.next_token().unwrap();
            if t.tok == Tok::Eof {
                break;
            }
            v.push(t.tok);
        }
        v
    }

    #[test]
    fn numbers_and_puncts() {
        assert_eq!(
            toks("a >>>= 0x1F + .5e3;"),
            vec![
                Tok::Ident("a".into()),
                Tok::Punct(">>>="),
                Tok::Num("0x1F".into()),
                Tok::Punct("+"),
                Tok::Num(".5e3".into()),
                Tok::Punct(";"),
            ]
        );
    }

    #[test]
    fn comments_set_newline_flag() {
        let mut lx = Lexer::new("a /* x\n */ b");
        lx.next_token().unwrap();
        assert!(lx.next_token().unwrap().nl_before);
    }

    #[test]
    fn unterminated_string() {
        assert!(Lexer::new("'abc").next_token().is_err());
    }

    #[test]
    fn rough_tokens_survive_garbage() {
        let t = rough_tokens("export function f() { # }");
        assert_eq!(t[0].tok, Tok::Ident("export".into()));
        assert!(t.iter().any(|t| t.tok == Tok::Punct("}")));
    }
}

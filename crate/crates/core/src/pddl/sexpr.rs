//! S-expression reader for PDDL text. Symbols are lowercased on read;
//! `;` starts a comment running to end of line.

use super::PddlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Symbol(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Symbol(..) => None,
        }
    }

    /// Head symbol of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(SExpr::as_symbol)
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
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

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn error(&self, expected: &str) -> PddlError {
        PddlError::Syntax {
            line: self.line,
            col: self.col,
            expected: expected.to_string(),
        }
    }

    fn read(&mut self) -> Result<SExpr, PddlError> {
        self.skip_trivia();
        let start = self.pos();
        match self.chars.peek().copied() {
            None => Err(self.error("'(' or symbol")),
            Some(')') => Err(self.error("'(' or symbol")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(self.error("')'")),
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut sym = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.extend(c.to_lowercase());
                    self.bump();
                }
                Ok(SExpr::Symbol(sym, start))
            }
        }
    }
}

/// Read exactly one top-level expression; trailing non-comment text is an error.
pub fn read_one(text: &str) -> Result<SExpr, PddlError> {
    let mut r = Reader::new(text);
    let expr = r.read()?;
    r.skip_trivia();
    if r.chars.peek().is_some() {
        return Err(r.error("end of input"));
    }
    Ok(expr)
}

/// Read every top-level expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, PddlError> {
    let mut r = Reader::new(text);
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_lowercases() {
        let e = read_one("(Define (Domain D))").unwrap();
        assert_eq!(e.head(), Some("define"));
        let inner = &e.as_list().unwrap()[1];
        assert_eq!(inner.as_list().unwrap()[1].as_symbol(), Some("d"));
    }

    #[test]
    fn comments_are_skipped() {
        let e = read_one("; header\n(a ; trailing\n b)\n; end").unwrap();
        assert_eq!(e.as_list().unwrap().len(), 2);
    }

    #[test]
    fn unbalanced_reports_position() {
        match read_one("(a\n  (b c)") {
            Err(PddlError::Syntax { line, expected, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(expected, "')'");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stray_close_paren() {
        assert!(matches!(read_one(")"), Err(PddlError::Syntax { line: 1, col: 1, .. })));
        assert!(matches!(read_one("(a) )"), Err(PddlError::Syntax { col: 5, .. })));
    }
}

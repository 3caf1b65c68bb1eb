use super::{BinaryOp, CharClass, Count, DslError, Regex, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    /// Text between `<` and `>`.
    Angle(String),
    Int(u32),
    LParen,
    RParen,
    Comma,
    Question,
}

impl Token {
    pub fn text(&self) -> String {
        match self {
            Token::Ident(s) => s.clone(),
            Token::Angle(s) => format!("<{s}>"),
            Token::Int(k) => k.to_string(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::Comma => ",".into(),
            Token::Question => "?".into(),
        }
    }

    fn from_text(s: &str) -> Option<Token> {
        let toks = tokenize(s).ok()?;
        match toks.as_slice() {
            [(t, _)] => Some(t.clone()),
            _ => None,
        }
    }
}

/// Splits DSL text into tokens with their byte offsets. Whitespace between
/// tokens is ignored.
pub fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, DslError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '(' => {
                it.next();
                out.push((Token::LParen, pos));
            }
            ')' => {
                it.next();
                out.push((Token::RParen, pos));
            }
            ',' => {
                it.next();
                out.push((Token::Comma, pos));
            }
            '?' => {
                it.next();
                out.push((Token::Question, pos));
            }
            '<' => {
                it.next();
                let mut content = String::new();
                loop {
                    match it.next() {
                        Some((_, '>')) => break,
                        Some((p, ch)) if ch.is_whitespace() || ch == '<' => {
                            return Err(DslError::Syntax {
                                pos: p,
                                msg: format!("`{ch}` is not allowed inside a terminal"),
                            })
                        }
                        Some((_, ch)) => content.push(ch),
                        None => {
                            return Err(DslError::Syntax {
                                pos,
                                msg: "unterminated `<`".into(),
                            })
                        }
                    }
                }
                out.push((Token::Angle(content), pos));
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                let k = digits.parse().map_err(|_| DslError::Syntax {
                    pos,
                    msg: format!("integer `{digits}` out of range"),
                })?;
                out.push((Token::Int(k), pos));
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push((Token::Ident(word), pos));
            }
            other => {
                return Err(DslError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Parses a complete DSL expression. Holes are rejected.
pub fn parse_dsl(text: &str) -> Result<Regex, DslError> {
    Parser::new(tokenize(text)?, Mode::Complete, text.len()).parse_all()
}

/// Parses DSL text that may contain `?` holes.
pub fn parse_partial(text: &str) -> Result<Regex, DslError> {
    Parser::new(tokenize(text)?, Mode::Partial, text.len()).parse_all()
}

/// Parses a pre-order token prefix, e.g. `["and", "(", "startwith", "(",
/// "<cap>", ")", ","]`, turning every position the prefix has not reached yet
/// into a hole.
pub fn parse_token_prefix<S: AsRef<str>>(tokens: &[S]) -> Result<Regex, DslError> {
    let mut toks = Vec::with_capacity(tokens.len());
    for (i, t) in tokens.iter().enumerate() {
        let t = t.as_ref();
        let tok = Token::from_text(t).ok_or_else(|| DslError::BadPrefix {
            token: t.to_string(),
            index: i,
            msg: "not a single DSL token".into(),
        })?;
        toks.push((tok, i));
    }
    let n = toks.len();
    let mut parser = Parser::new(toks, Mode::Prefix, n);
    parser.parse_all().map_err(|e| match e {
        DslError::BadPrefix { .. } => e,
        other => {
            let index = parser.pos.min(n.saturating_sub(1));
            DslError::BadPrefix {
                token: tokens
                    .get(index)
                    .map(|t| t.as_ref().to_string())
                    .unwrap_or_default(),
                index,
                msg: other.to_string(),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Complete,
    Partial,
    /// Running out of tokens yields holes instead of an error.
    Prefix,
}

enum Shape {
    Unary(UnaryOp),
    Binary(BinaryOp),
    Rep,
    RepAtLeast,
    RepRange,
}

fn shape_of(name: &str) -> Option<Shape> {
    Some(match name {
        "startwith" => Shape::Unary(UnaryOp::StartWith),
        "endwith" => Shape::Unary(UnaryOp::EndWith),
        "contain" => Shape::Unary(UnaryOp::Contain),
        "not" => Shape::Unary(UnaryOp::Not),
        "optional" => Shape::Unary(UnaryOp::Optional),
        "star" => Shape::Unary(UnaryOp::Star),
        "notcc" => Shape::Unary(UnaryOp::NotCc),
        "concat" => Shape::Binary(BinaryOp::Concat),
        "and" => Shape::Binary(BinaryOp::And),
        "or" => Shape::Binary(BinaryOp::Or),
        "rep" | "repeat" => Shape::Rep,
        "repatleast" | "repeatatleast" => Shape::RepAtLeast,
        "reprange" | "repeatrange" => Shape::RepRange,
        _ => return None,
    })
}

struct Parser {
    toks: Vec<(Token, usize)>,
    pos: usize,
    mode: Mode,
    end: usize,
}

impl Parser {
    fn new(toks: Vec<(Token, usize)>, mode: Mode, end: usize) -> Self {
        Parser {
            toks,
            pos: 0,
            mode,
            end,
        }
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// True when the prefix has been used up and remaining positions become holes.
    fn exhausted(&self) -> bool {
        self.mode == Mode::Prefix && self.at_eof()
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err(&self, msg: impl Into<String>) -> DslError {
        let msg = msg.into();
        if self.mode == Mode::Prefix {
            let index = self.pos.min(self.toks.len().saturating_sub(1));
            DslError::BadPrefix {
                token: self.toks.get(index).map(|t| t.0.text()).unwrap_or_default(),
                index,
                msg,
            }
        } else {
            DslError::Syntax {
                pos: self.offset(),
                msg,
            }
        }
    }

    fn parse_all(&mut self) -> Result<Regex, DslError> {
        let r = self.expr()?;
        if !self.at_eof() {
            return Err(self.err(format!(
                "trailing input starting with `{}`",
                self.peek().map(Token::text).unwrap_or_default()
            )));
        }
        Ok(r)
    }

    fn expect(&mut self, tok: Token) -> Result<bool, DslError> {
        if self.exhausted() {
            return Ok(false);
        }
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(true)
            }
            Some(t) => Err(self.err(format!("expected `{}`, found `{}`", tok.text(), t.text()))),
            None => Err(self.err(format!("expected `{}`, found end of input", tok.text()))),
        }
    }

    fn expr(&mut self) -> Result<Regex, DslError> {
        if self.exhausted() {
            return Ok(Regex::Hole);
        }
        let start = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(self.err("expected an expression, found end of input"));
        };
        match tok {
            Token::Angle(name) => {
                self.pos += 1;
                if let Some(c) = CharClass::from_name(&name) {
                    Ok(Regex::Class(c))
                } else if name.is_empty() {
                    Err(DslError::UnknownTerminal { name, pos: start })
                } else {
                    Ok(Regex::constant(&name))
                }
            }
            Token::Question => {
                if self.mode == Mode::Complete {
                    return Err(DslError::UnexpectedHole { pos: start });
                }
                self.pos += 1;
                Ok(Regex::Hole)
            }
            Token::Ident(name) if name == "const" => {
                self.pos += 1;
                Ok(Regex::AnonConst)
            }
            Token::Ident(name) => {
                let Some(shape) = shape_of(&name) else {
                    return Err(match self.mode {
                        Mode::Prefix => self.err(format!("unknown operator `{name}`")),
                        _ => DslError::UnknownOperator { name, pos: start },
                    });
                };
                self.pos += 1;
                self.call(&name, shape, start)
            }
            other => Err(self.err(format!("expected an expression, found `{}`", other.text()))),
        }
    }

    fn count(&mut self) -> Result<Count, DslError> {
        if self.exhausted() {
            return Ok(Count::Hole);
        }
        match self.peek().cloned() {
            Some(Token::Int(k)) => {
                self.pos += 1;
                Ok(Count::Value(k))
            }
            Some(Token::Ident(w)) if w == "int" => {
                self.pos += 1;
                Ok(Count::Anon)
            }
            Some(Token::Question) if self.mode != Mode::Complete => {
                self.pos += 1;
                Ok(Count::Hole)
            }
            Some(Token::Question) => Err(DslError::UnexpectedHole { pos: self.offset() }),
            Some(t) => Err(self.err(format!("expected an integer, found `{}`", t.text()))),
            None => Err(self.err("expected an integer, found end of input")),
        }
    }

    /// Consumes a `,` separating arguments of `op`, reporting an arity error
    /// when the argument list closes early.
    fn sep(
        &mut self,
        op: &str,
        start: usize,
        expected: &str,
        found: usize,
    ) -> Result<(), DslError> {
        if self.mode != Mode::Prefix && self.peek() == Some(&Token::RParen) {
            return Err(DslError::Arity {
                op: op.to_string(),
                pos: start,
                expected: expected.to_string(),
                found,
            });
        }
        self.expect(Token::Comma).map(|_| ())
    }

    fn close(
        &mut self,
        op: &str,
        start: usize,
        expected: &str,
        found: usize,
    ) -> Result<(), DslError> {
        if self.mode != Mode::Prefix && self.peek() == Some(&Token::Comma) {
            return Err(DslError::Arity {
                op: op.to_string(),
                pos: start,
                expected: expected.to_string(),
                found: found + 1,
            });
        }
        self.expect(Token::RParen).map(|_| ())
    }

    fn call(&mut self, op: &str, shape: Shape, start: usize) -> Result<Regex, DslError> {
        self.expect(Token::LParen)?;
        match shape {
            Shape::Unary(u) => {
                let a = self.expr()?;
                self.close(op, start, "1 expression", 1)?;
                Ok(u.apply(a))
            }
            Shape::Binary(b) => {
                let mut parts = vec![self.expr()?];
                self.sep(op, start, "2 or more expressions", 1)?;
                parts.push(self.expr()?);
                while !self.exhausted() && self.peek() == Some(&Token::Comma) {
                    self.pos += 1;
                    parts.push(self.expr()?);
                }
                self.expect(Token::RParen)?;
                Ok(Regex::chain(b, parts))
            }
            Shape::Rep | Shape::RepAtLeast => {
                let expected = "1 expression and 1 integer";
                let a = self.expr()?;
                self.sep(op, start, expected, 1)?;
                let k = self.count()?;
                self.close(op, start, expected, 2)?;
                Ok(match shape {
                    Shape::Rep => Regex::Rep(Box::new(a), k),
                    _ => Regex::RepAtLeast(Box::new(a), k),
                })
            }
            Shape::RepRange => {
                let expected = "1 expression and 2 integers";
                let a = self.expr()?;
                self.sep(op, start, expected, 1)?;
                let k1 = self.count()?;
                self.sep(op, start, expected, 2)?;
                let k2 = self.count()?;
                self.close(op, start, expected, 3)?;
                if let (Count::Value(lo), Count::Value(hi)) = (k1, k2) {
                    if lo >= hi {
                        return Err(match self.mode {
                            Mode::Prefix => {
                                self.err(format!("range {lo},{hi} must satisfy k1 < k2"))
                            }
                            _ => DslError::InvalidRange {
                                k1: lo,
                                k2: hi,
                                pos: start,
                            },
                        });
                    }
                }
                Ok(Regex::RepRange(Box::new(a), k1, k2))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::print_dsl;

    #[test]
    fn parses_intersection_fixture() {
        let r = parse_dsl("and(startwith(<C0>),endwith(rep(<num>,4)))").unwrap();
        assert_eq!(
            r,
            Regex::and(
                Regex::startwith(Regex::Str("C0".into())),
                Regex::endwith(Regex::rep(Regex::Class(CharClass::Num), 4))
            )
        );
    }

    #[test]
    fn single_terminal() {
        assert_eq!(parse_dsl("<num>").unwrap(), Regex::Class(CharClass::Num));
        assert_eq!(parse_dsl(" <.> ").unwrap(), Regex::Char('.'));
    }

    #[test]
    fn zero_repetition_is_accepted() {
        assert_eq!(
            parse_dsl("rep(<num>,0)").unwrap(),
            Regex::rep(Regex::Class(CharClass::Num), 0)
        );
    }

    #[test]
    fn whitespace_insensitive_and_nary() {
        let r = parse_dsl("or( <a> , <b>,\n<c> )").unwrap();
        assert_eq!(print_dsl(&r), "or(<a>,or(<b>,<c>))");
    }

    #[test]
    fn alternate_operator_spellings() {
        let r = parse_dsl("repeatatleast(or(<let>,<spec>),1)").unwrap();
        assert_eq!(print_dsl(&r), "repatleast(or(<let>,<spec>),1)");
    }

    #[test]
    fn anonymized_tokens_parse() {
        let r = parse_dsl("rep(const,int)").unwrap();
        assert_eq!(r, Regex::Rep(Box::new(Regex::AnonConst), Count::Anon));
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse_dsl("and(<a>"),
            Err(DslError::Syntax { pos: 7, .. })
        ));
        assert!(matches!(
            parse_dsl("frob(<a>)"),
            Err(DslError::UnknownOperator { pos: 0, .. })
        ));
        assert!(matches!(
            parse_dsl("rep(<num>)"),
            Err(DslError::Arity { found: 1, .. })
        ));
        assert!(matches!(
            parse_dsl("star(<a>,<b>)"),
            Err(DslError::Arity { found: 2, .. })
        ));
        assert!(matches!(
            parse_dsl("concat(<a>)"),
            Err(DslError::Arity { found: 1, .. })
        ));
        assert!(matches!(
            parse_dsl("<>"),
            Err(DslError::UnknownTerminal { .. })
        ));
        assert!(matches!(
            parse_dsl("reprange(<a>,3,2)"),
            Err(DslError::InvalidRange { k1: 3, k2: 2, .. })
        ));
        assert!(matches!(
            parse_dsl("star(?)"),
            Err(DslError::UnexpectedHole { pos: 5 })
        ));
        assert!(parse_dsl("<a> <b>").is_err());
        assert!(parse_dsl("<a b>").is_err());
    }

    #[test]
    fn token_prefix_fills_holes() {
        let r = parse_token_prefix(&["and", "(", "startwith", "(", "<cap>", ")", ","]).unwrap();
        assert_eq!(print_dsl(&r), "and(startwith(<cap>),?)");
        let r = parse_token_prefix(&["rep", "(", "<num>", ","]).unwrap();
        assert_eq!(
            r,
            Regex::Rep(Box::new(Regex::Class(CharClass::Num)), Count::Hole)
        );
        let r = parse_token_prefix::<&str>(&[]).unwrap();
        assert_eq!(r, Regex::Hole);
        let r = parse_token_prefix(&["reprange", "(", "<a>", ",", "2"]).unwrap();
        assert_eq!(print_dsl(&r), "reprange(<a>,2,?)");
    }

    #[test]
    fn bad_prefix_names_the_token() {
        match parse_token_prefix(&["rep", "(", "4"]) {
            Err(DslError::BadPrefix { token, index, .. }) => {
                assert_eq!(token, "4");
                assert_eq!(index, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_token_prefix(&["<a>", ")"]) {
            Err(DslError::BadPrefix { token, index, .. }) => {
                assert_eq!((token.as_str(), index), (")", 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

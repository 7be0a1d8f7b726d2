use indexmap::IndexMap;

use super::canon::{canonical_key, canonical_name};
use super::{is_canonical_key, is_canonical_name, AttrValue, Intent, IntentDocument, IrError};

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn pos(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    fn error(&self, message: impl Into<String>) -> IrError {
        IrError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), IrError> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    /// Reads `word *(ws word)` and returns the words joined by single spaces.
    fn words(&mut self, what: &str) -> Result<String, IrError> {
        let mut out = String::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if is_word_char(c) => {
                    if !out.is_empty() {
                        out.push(' ');
                    }
                    while let Some(c) = self.peek().filter(|c| is_word_char(*c)) {
                        out.push(c);
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        if out.is_empty() {
            let found = self
                .peek()
                .map_or_else(|| "end of input".to_owned(), |c| format!("`{c}`"));
            return Err(self.error(format!("expected {what}, found {found}")));
        }
        Ok(out)
    }

    fn quoted_value(&mut self) -> Result<String, IrError> {
        let (line, column) = self.pos();
        self.expect('"')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    Some('n') => out.push('\n'),
                    Some(c) => return Err(self.error(format!("unknown escape `\\{c}`"))),
                    None => return Err(self.error("unterminated escape")),
                },
                Some(c) => out.push(c),
                None => {
                    return Err(IrError::Syntax {
                        line,
                        column,
                        message: "unterminated string".into(),
                    })
                }
            }
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn intent(cur: &mut Cursor<'_>) -> Result<Intent, IrError> {
    let (line, column) = cur.pos();
    let raw_name = cur.words("intent name")?;
    let name = canonical_name(&raw_name);
    if !is_canonical_name(&name) {
        return Err(IrError::Syntax {
            line,
            column,
            message: format!("`{raw_name}` does not fold to an UPPER_SNAKE intent name"),
        });
    }
    cur.skip_ws();
    cur.expect('(')?;

    let mut attrs = IndexMap::new();
    loop {
        cur.skip_ws();
        let (kline, kcol) = cur.pos();
        let raw_key = cur.words("attribute key")?;
        let key = canonical_key(&raw_key);
        if !is_canonical_key(&key) {
            return Err(IrError::Syntax {
                line: kline,
                column: kcol,
                message: format!("`{raw_key}` does not fold to a lower_snake attribute key"),
            });
        }
        cur.skip_ws();
        match cur.peek() {
            Some('=' | ':') => {
                cur.bump();
            }
            _ => cur.expect('=')?,
        }
        cur.skip_ws();
        let value = cur.quoted_value()?;
        if value.is_empty() {
            return Err(IrError::Syntax {
                line: kline,
                column: kcol,
                message: format!("empty value for `{key}`"),
            });
        }
        if attrs.contains_key(&key) {
            return Err(IrError::DuplicateKey {
                intent: name,
                key,
                line: kline,
                column: kcol,
            });
        }
        attrs.insert(key, AttrValue(value));
        cur.skip_ws();
        match cur.peek() {
            Some(',') => {
                cur.bump();
            }
            Some(')') => {
                cur.bump();
                break;
            }
            Some(c) => return Err(cur.error(format!("expected `,` or `)`, found `{c}`"))),
            None => return Err(cur.error("expected `,` or `)`, found end of input")),
        }
    }
    Ok(Intent { id: 0, name, attrs })
}

/// Parses the textual IR into a document.
///
/// Names and keys are canonicalized (spaces and hyphens become `_`, case is
/// folded, Portuguese aliases resolved). A trailing `;` is accepted, a line
/// break may stand in for `;` between intents and `:` for `=`.
pub fn parse_ir(text: &str) -> Result<IntentDocument, IrError> {
    let mut cur = Cursor::new(text);
    let mut intents = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        intents.push(intent(&mut cur)?);
        let mut newline = false;
        while let Some(c) = cur.peek().filter(|c| c.is_whitespace()) {
            newline |= c == '\n';
            cur.bump();
        }
        match cur.peek() {
            Some(';') => {
                cur.bump();
            }
            None => break,
            Some(_) if newline => {}
            Some(c) => return Err(cur.error(format!("expected `;`, found `{c}`"))),
        }
    }
    IntentDocument::new(intents)
}

//! Glob patterns over dotted class names.
//!
//! `*` matches any run of characters within one package segment, `**`
//! matches across segments, `?` matches a single non-`.` character.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Char(char),
    One,
    Segment,
    Deep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGlob {
    source: String,
    tokens: Vec<Token>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid class pattern `{0}`")]
pub struct InvalidPattern(pub String);

impl ClassGlob {
    pub fn new(pattern: &str) -> Result<Self, InvalidPattern> {
        let invalid = || InvalidPattern(pattern.into());
        if pattern.is_empty() || pattern.contains("***") {
            return Err(invalid());
        }
        let mut tokens = Vec::new();
        let mut chars = pattern.chars().peekable();
        while let Some(c) = chars.next() {
            let token = match c {
                '*' if chars.peek() == Some(&'*') => {
                    chars.next();
                    Token::Deep
                }
                '*' => Token::Segment,
                '?' => Token::One,
                '/' | ';' | '[' => return Err(invalid()),
                c if c.is_whitespace() || c.is_control() => return Err(invalid()),
                c => Token::Char(c),
            };
            tokens.push(token);
        }
        Ok(ClassGlob {
            source: pattern.into(),
            tokens,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn matches(&self, dotted: &str) -> bool {
        let text: Vec<char> = dotted.chars().collect();
        let m = text.len();
        // reach[j]: pattern prefix processed so far matches text[..j]
        let mut reach = alloc::vec![false; m + 1];
        reach[0] = true;
        for token in &self.tokens {
            let mut next = alloc::vec![false; m + 1];
            match *token {
                Token::Char(c) => {
                    for j in 0..m {
                        next[j + 1] = reach[j] && text[j] == c;
                    }
                }
                Token::One => {
                    for j in 0..m {
                        next[j + 1] = reach[j] && text[j] != '.';
                    }
                }
                Token::Segment | Token::Deep => {
                    let deep = *token == Token::Deep;
                    next[0] = reach[0];
                    for j in 0..m {
                        next[j + 1] = reach[j + 1] || (next[j] && (deep || text[j] != '.'));
                    }
                }
            }
            reach = next;
        }
        reach[m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: &str, t: &str) -> bool {
        ClassGlob::new(p).unwrap().matches(t)
    }

    #[test]
    fn single_segment_star() {
        assert!(m("org.lib.*", "org.lib.A"));
        assert!(!m("org.lib.*", "org.lib.sub.A"));
        assert!(m("org.*.A", "org.lib.A"));
        assert!(m("*", "A"));
        assert!(!m("*", "a.A"));
    }

    #[test]
    fn deep_star() {
        assert!(m("org.**", "org.lib.sub.A"));
        assert!(m("**.A", "org.lib.A"));
        assert!(m("**Impl", "org.lib.SpiImpl"));
        assert!(!m("org.**", "com.lib.A"));
    }

    #[test]
    fn question_mark() {
        assert!(m("org.lib.?", "org.lib.A"));
        assert!(!m("org.lib?A", "org.lib.A"));
        assert!(!m("org.lib.?", "org.lib.AB"));
    }

    #[test]
    fn exact() {
        assert!(m("org.lib.A", "org.lib.A"));
        assert!(!m("org.lib.A", "org.lib.AB"));
    }

    #[test]
    fn invalid() {
        for p in ["", "org/lib/*", "a b", "***", "a;"] {
            assert!(ClassGlob::new(p).is_err(), "{p:?}");
        }
    }
}

//! Field and method descriptor grammar.
//!
//! ```text
//! FieldType  := B | C | D | F | I | J | S | Z | L ClassName ; | [ FieldType
//! MethodDesc := ( FieldType* ) ( FieldType | V )
//! ```

use alloc::string::String;
use alloc::vec::Vec;

use crate::ClassName;

/// Maximum array rank the JVM accepts in a descriptor.
pub const MAX_ARRAY_DIMENSIONS: usize = 255;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed descriptor `{descriptor}`")]
pub struct MalformedDescriptor {
    pub descriptor: String,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    names: Vec<ClassName>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            pos: 0,
            names: Vec::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn field_type(&mut self) -> Option<()> {
        let mut dims = 0;
        while self.peek() == Some(b'[') {
            dims += 1;
            self.pos += 1;
        }
        if dims > MAX_ARRAY_DIMENSIONS {
            return None;
        }
        match self.peek()? {
            b'B' | b'C' | b'D' | b'F' | b'I' | b'J' | b'S' | b'Z' => {
                self.pos += 1;
                Some(())
            }
            b'L' => {
                let start = self.pos + 1;
                let len = self.text[start..].find(';')?;
                let name = ClassName::from_internal(&self.text[start..start + len]).ok()?;
                self.names.push(name);
                self.pos = start + len + 1;
                Some(())
            }
            _ => None,
        }
    }

    fn method(&mut self) -> Option<()> {
        if self.peek()? != b'(' {
            return None;
        }
        self.pos += 1;
        while self.peek()? != b')' {
            self.field_type()?;
        }
        self.pos += 1;
        if self.peek()? == b'V' {
            self.pos += 1;
            Some(())
        } else {
            self.field_type()
        }
    }

    fn finish(self) -> Option<Vec<ClassName>> {
        (self.pos == self.text.len()).then_some(self.names)
    }
}

fn malformed(descriptor: &str) -> MalformedDescriptor {
    MalformedDescriptor {
        descriptor: descriptor.into(),
    }
}

/// Parses a field descriptor, returning the classes it mentions.
pub fn parse_field_descriptor(descriptor: &str) -> Result<Vec<ClassName>, MalformedDescriptor> {
    let mut p = Parser::new(descriptor);
    p.field_type()
        .and_then(|()| p.finish())
        .ok_or_else(|| malformed(descriptor))
}

/// Parses a method descriptor, returning the classes it mentions.
pub fn parse_method_descriptor(descriptor: &str) -> Result<Vec<ClassName>, MalformedDescriptor> {
    let mut p = Parser::new(descriptor);
    p.method()
        .and_then(|()| p.finish())
        .ok_or_else(|| malformed(descriptor))
}

/// All `L<name>;` occurrences of a field or method descriptor, in order,
/// with arrays unwrapped and primitives skipped. Duplicates are kept.
pub fn class_names_in_descriptor(descriptor: &str) -> Result<Vec<ClassName>, MalformedDescriptor> {
    if descriptor.starts_with('(') {
        parse_method_descriptor(descriptor)
    } else {
        parse_field_descriptor(descriptor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn names(d: &str) -> Vec<String> {
        class_names_in_descriptor(d)
            .unwrap()
            .into_iter()
            .map(|n| n.as_str().into())
            .collect()
    }

    #[test]
    fn method_with_primitive() {
        assert_eq!(names("(Ljava/io/File;I)V"), vec!["java/io/File"]);
    }

    #[test]
    fn primitive_array() {
        assert!(names("[[J").is_empty());
    }

    #[test]
    fn mixed_arrays_and_return() {
        assert_eq!(
            names("(Lcom/a/B;[Lcom/c/D;)Lcom/e/F;"),
            vec!["com/a/B", "com/c/D", "com/e/F"]
        );
    }

    #[test]
    fn duplicates_preserved() {
        assert_eq!(names("(La/B;La/B;)La/B;"), vec!["a/B", "a/B", "a/B"]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "", "V", "(V)V", "(I", "(I)", "L;", "La/B", "La//B;", "La.B;", "Q", "II", "()VV", "[",
            "(I)[", ")V",
        ] {
            assert!(class_names_in_descriptor(bad).is_err(), "{bad:?} accepted");
        }
        assert!(parse_field_descriptor("()V").is_err());
        assert!(parse_method_descriptor("I").is_err());
    }

    #[test]
    fn array_rank_limit() {
        let mut ok = "[".repeat(MAX_ARRAY_DIMENSIONS);
        ok.push('I');
        assert!(parse_field_descriptor(&ok).is_ok());
        let mut too_deep = "[".repeat(MAX_ARRAY_DIMENSIONS + 1);
        too_deep.push('I');
        assert!(parse_field_descriptor(&too_deep).is_err());
    }
}

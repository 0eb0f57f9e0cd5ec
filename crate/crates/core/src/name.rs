//! Binary class names.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Serialize, Serializer};

/// Why a candidate class name was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassNameError {
    #[error("class name is empty")]
    Empty,
    #[error("class name `{0}` has an empty segment")]
    EmptySegment(String),
    #[error("class name `{name}` contains forbidden character {ch:?}")]
    ForbiddenChar { name: String, ch: char },
}

/// A class name in internal (slash-separated) form, e.g. `org/lib/A`.
///
/// Segments are nonempty and never contain `.`, `;`, `[`, `/` or whitespace,
/// so the dotted form converts back losslessly.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassName(String);

fn check_segments(name: &str, sep: char) -> Result<(), ClassNameError> {
    if name.is_empty() {
        return Err(ClassNameError::Empty);
    }
    for segment in name.split(sep) {
        if segment.is_empty() {
            return Err(ClassNameError::EmptySegment(name.into()));
        }
        if let Some(ch) = segment
            .chars()
            .find(|&c| matches!(c, '.' | ';' | '[' | '/') || c.is_whitespace() || c.is_control())
        {
            return Err(ClassNameError::ForbiddenChar {
                name: name.into(),
                ch,
            });
        }
    }
    Ok(())
}

impl ClassName {
    /// Validates an internal name such as `org/lib/A`.
    pub fn from_internal(name: &str) -> Result<Self, ClassNameError> {
        check_segments(name, '/')?;
        Ok(ClassName(name.into()))
    }

    /// Validates a dotted name such as `org.lib.A` and converts it.
    pub fn from_dotted(name: &str) -> Result<Self, ClassNameError> {
        check_segments(name, '.')?;
        Ok(ClassName(name.replace('.', "/")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn to_dotted(&self) -> String {
        self.0.replace('/', ".")
    }

    /// Package part in internal form; empty for the default package.
    pub fn package(&self) -> &str {
        match self.0.rfind('/') {
            Some(i) => &self.0[..i],
            None => "",
        }
    }

    pub fn simple_name(&self) -> &str {
        match self.0.rfind('/') {
            Some(i) => &self.0[i + 1..],
            None => &self.0,
        }
    }

    pub fn is_package_info(&self) -> bool {
        self.simple_name() == "package-info"
    }

    pub fn is_module_info(&self) -> bool {
        self.0 == "module-info"
    }

    /// Entry path of this class inside an archive.
    pub fn entry_path(&self) -> String {
        let mut path = self.0.clone();
        path.push_str(".class");
        path
    }
}

impl fmt::Debug for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassName({})", self.0)
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ClassName {
    type Err = ClassNameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassName::from_internal(s)
    }
}

impl AsRef<str> for ClassName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Serialized in dotted form, the form users write in KB files and lists.
impl Serialize for ClassName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_dotted())
    }
}

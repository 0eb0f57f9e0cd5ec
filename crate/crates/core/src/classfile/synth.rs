//! Minimal valid class files for hermetic fixtures.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{mutf8, ACC_PUBLIC, ACC_SUPER};
use crate::name::{ClassName, ClassNameError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidSpec {
    #[error(transparent)]
    Name(#[from] ClassNameError),
    #[error("class {0} references itself")]
    SelfReference(String),
    #[error("constant pool would exceed 65535 entries")]
    PoolOverflow,
    #[error("string literal longer than 65535 encoded bytes")]
    LiteralTooLong,
}

/// Describes a class to synthesize. Names are in internal form and are
/// validated by [`synthesize_class`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureClassSpec {
    pub name: String,
    pub super_name: String,
    pub interfaces: Vec<String>,
    /// Emitted as `Class` pool entries.
    pub referenced_classes: Vec<String>,
    /// Emitted as `String` pool entries.
    pub string_literals: Vec<String>,
    pub access_flags: u16,
}

impl FixtureClassSpec {
    /// A public class extending `java/lang/Object`.
    pub fn new(name: impl Into<String>) -> Self {
        FixtureClassSpec {
            name: name.into(),
            super_name: "java/lang/Object".into(),
            interfaces: Vec::new(),
            referenced_classes: Vec::new(),
            string_literals: Vec::new(),
            access_flags: ACC_PUBLIC | ACC_SUPER,
        }
    }

    pub fn extends(mut self, super_name: impl Into<String>) -> Self {
        self.super_name = super_name.into();
        self
    }

    pub fn implements(mut self, iface: impl Into<String>) -> Self {
        self.interfaces.push(iface.into());
        self
    }

    pub fn references(mut self, class: impl Into<String>) -> Self {
        self.referenced_classes.push(class.into());
        self
    }

    pub fn literal(mut self, literal: impl Into<String>) -> Self {
        self.string_literals.push(literal.into());
        self
    }

    pub fn access(mut self, flags: u16) -> Self {
        self.access_flags = flags;
        self
    }
}

#[derive(Default)]
struct PoolBuilder {
    bytes: Vec<u8>,
    next: u32,
    utf8: BTreeMap<String, u16>,
    classes: BTreeMap<String, u16>,
    strings: BTreeMap<String, u16>,
}

impl PoolBuilder {
    fn alloc(&mut self) -> Result<u16, InvalidSpec> {
        if self.next == 0 {
            self.next = 1;
        }
        let idx = self.next;
        if idx > 0xFFFE {
            return Err(InvalidSpec::PoolOverflow);
        }
        self.next += 1;
        Ok(idx as u16)
    }

    fn utf8(&mut self, s: &str) -> Result<u16, InvalidSpec> {
        if let Some(&i) = self.utf8.get(s) {
            return Ok(i);
        }
        let encoded = mutf8::encode(s);
        let len = u16::try_from(encoded.len()).map_err(|_| InvalidSpec::LiteralTooLong)?;
        let i = self.alloc()?;
        self.bytes.push(1);
        self.bytes.extend_from_slice(&len.to_be_bytes());
        self.bytes.extend_from_slice(&encoded);
        self.utf8.insert(s.into(), i);
        Ok(i)
    }

    fn class(&mut self, name: &str) -> Result<u16, InvalidSpec> {
        if let Some(&i) = self.classes.get(name) {
            return Ok(i);
        }
        let name_index = self.utf8(name)?;
        let i = self.alloc()?;
        self.bytes.push(7);
        self.bytes.extend_from_slice(&name_index.to_be_bytes());
        self.classes.insert(name.into(), i);
        Ok(i)
    }

    fn string(&mut self, literal: &str) -> Result<u16, InvalidSpec> {
        if let Some(&i) = self.strings.get(literal) {
            return Ok(i);
        }
        let utf8 = self.utf8(literal)?;
        let i = self.alloc()?;
        self.bytes.push(8);
        self.bytes.extend_from_slice(&utf8.to_be_bytes());
        self.strings.insert(literal.into(), i);
        Ok(i)
    }
}

/// Builds a class file (version 52.0, no members, no attributes) whose
/// hierarchy, `Class` entries and `String` entries match `spec`.
/// Output is a deterministic function of `spec`.
pub fn synthesize_class(spec: &FixtureClassSpec) -> Result<Vec<u8>, InvalidSpec> {
    let this = ClassName::from_internal(&spec.name)?;
    ClassName::from_internal(&spec.super_name)?;
    for other in spec.interfaces.iter().chain(&spec.referenced_classes) {
        ClassName::from_internal(other)?;
    }
    if spec.super_name == spec.name
        || spec.interfaces.contains(&spec.name)
        || spec.referenced_classes.contains(&spec.name)
    {
        return Err(InvalidSpec::SelfReference(this.as_str().into()));
    }

    let mut pool = PoolBuilder::default();
    let this_index = pool.class(&spec.name)?;
    let super_index = pool.class(&spec.super_name)?;
    let mut interface_indices = Vec::with_capacity(spec.interfaces.len());
    for iface in &spec.interfaces {
        interface_indices.push(pool.class(iface)?);
    }
    for class in &spec.referenced_classes {
        pool.class(class)?;
    }
    for literal in &spec.string_literals {
        pool.string(literal)?;
    }

    let mut out = Vec::with_capacity(pool.bytes.len() + 32);
    out.extend_from_slice(&super::MAGIC.to_be_bytes());
    out.extend_from_slice(&0u16.to_be_bytes());
    out.extend_from_slice(&52u16.to_be_bytes());
    out.extend_from_slice(&(pool.next.max(1) as u16).to_be_bytes());
    out.extend_from_slice(&pool.bytes);
    out.extend_from_slice(&spec.access_flags.to_be_bytes());
    out.extend_from_slice(&this_index.to_be_bytes());
    out.extend_from_slice(&super_index.to_be_bytes());
    let iface_count =
        u16::try_from(interface_indices.len()).map_err(|_| InvalidSpec::PoolOverflow)?;
    out.extend_from_slice(&iface_count.to_be_bytes());
    for i in interface_indices {
        out.extend_from_slice(&i.to_be_bytes());
    }
    // fields, methods, attributes
    out.extend_from_slice(&[0, 0, 0, 0, 0, 0]);
    Ok(out)
}

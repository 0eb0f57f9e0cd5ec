//! Java class-file model and parser.
//!
//! Parsing is strict about structure (every pool index is checked against
//! the tag it must point at, descriptors must satisfy the grammar, and the
//! whole input must be consumed) and lenient about version: files newer than
//! [`ParseOptions::max_major_version`] are accepted with a warning.

mod descriptor;
mod mutf8;
mod reader;
mod refs;
mod synth;

use alloc::string::String;
use alloc::vec::Vec;

pub use descriptor::{
    class_names_in_descriptor, parse_field_descriptor, parse_method_descriptor,
    MalformedDescriptor, MAX_ARRAY_DIMENSIONS,
};
pub use refs::{
    descriptor_class_refs, hierarchy_class_refs, pool_class_refs, referenced_class_names,
    string_literals,
};
pub use synth::{synthesize_class, FixtureClassSpec, InvalidSpec};

use crate::name::{ClassName, ClassNameError};
use reader::Reader;

pub const MAGIC: u32 = 0xCAFE_BABE;

/// Newest published class-file major version (Java 26).
pub const LATEST_MAJOR_VERSION: u16 = 70;

pub const ACC_PUBLIC: u16 = 0x0001;
pub const ACC_SUPER: u16 = 0x0020;
pub const ACC_INTERFACE: u16 = 0x0200;
pub const ACC_ABSTRACT: u16 = 0x0400;
pub const ACC_SYNTHETIC: u16 = 0x1000;
pub const ACC_MODULE: u16 = 0x8000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassFileError {
    #[error("bad magic {0:#010x}")]
    BadMagic(u32),
    #[error("input truncated at offset {offset}")]
    Truncated { offset: usize },
    #[error("{count} trailing bytes after class file")]
    TrailingBytes { count: usize },
    #[error("unknown constant pool tag {tag} at index {index}")]
    UnknownTag { tag: u8, index: u16 },
    #[error("constant pool index {index} does not point at a {expected} entry")]
    InvalidPoolIndex { index: u16, expected: &'static str },
    #[error("invalid method handle kind {kind} at index {index}")]
    InvalidMethodHandleKind { kind: u8, index: u16 },
    #[error("constant pool entry {index} is not valid modified UTF-8")]
    InvalidUtf8 { index: u16 },
    #[error(transparent)]
    MalformedDescriptor(#[from] MalformedDescriptor),
    #[error("invalid class name: {0}")]
    InvalidClassName(#[from] ClassNameError),
    #[error("array type `{0}` used where a class is required")]
    ArrayNotAllowed(String),
    #[error("class {0} has no superclass")]
    MissingSuperclass(ClassName),
    #[error("class {0} lists itself as an interface")]
    SelfInterface(ClassName),
}

/// One constant pool slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CpEntry {
    /// Slot 0 and the slot after a `Long`/`Double`.
    Unusable,
    Utf8(String),
    Integer(i32),
    /// Raw IEEE-754 bits.
    Float(u32),
    Long(i64),
    /// Raw IEEE-754 bits.
    Double(u64),
    ClassRef {
        name_index: u16,
    },
    StringRef {
        string_index: u16,
    },
    FieldRef {
        class_index: u16,
        name_and_type_index: u16,
    },
    MethodRef {
        class_index: u16,
        name_and_type_index: u16,
    },
    InterfaceMethodRef {
        class_index: u16,
        name_and_type_index: u16,
    },
    NameAndType {
        name_index: u16,
        descriptor_index: u16,
    },
    MethodHandle {
        reference_kind: u8,
        reference_index: u16,
    },
    MethodType {
        descriptor_index: u16,
    },
    Dynamic {
        bootstrap_method_attr_index: u16,
        name_and_type_index: u16,
    },
    InvokeDynamic {
        bootstrap_method_attr_index: u16,
        name_and_type_index: u16,
    },
    Module {
        name_index: u16,
    },
    Package {
        name_index: u16,
    },
}

impl CpEntry {
    fn tag_name(&self) -> &'static str {
        match self {
            CpEntry::Unusable => "unusable",
            CpEntry::Utf8(_) => "Utf8",
            CpEntry::Integer(_) => "Integer",
            CpEntry::Float(_) => "Float",
            CpEntry::Long(_) => "Long",
            CpEntry::Double(_) => "Double",
            CpEntry::ClassRef { .. } => "Class",
            CpEntry::StringRef { .. } => "String",
            CpEntry::FieldRef { .. } => "Fieldref",
            CpEntry::MethodRef { .. } => "Methodref",
            CpEntry::InterfaceMethodRef { .. } => "InterfaceMethodref",
            CpEntry::NameAndType { .. } => "NameAndType",
            CpEntry::MethodHandle { .. } => "MethodHandle",
            CpEntry::MethodType { .. } => "MethodType",
            CpEntry::Dynamic { .. } => "Dynamic",
            CpEntry::InvokeDynamic { .. } => "InvokeDynamic",
            CpEntry::Module { .. } => "Module",
            CpEntry::Package { .. } => "Package",
        }
    }
}

/// The constant pool, indexed from 1 like the class-file format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantPool {
    entries: Vec<CpEntry>,
}

impl ConstantPool {
    /// Number of slots including the unusable slot 0 (the on-disk count).
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: u16) -> Option<&CpEntry> {
        match self.entries.get(usize::from(index)) {
            Some(CpEntry::Unusable) | None => None,
            Some(e) => Some(e),
        }
    }

    /// Usable entries with their indices.
    pub fn iter(&self) -> impl Iterator<Item = (u16, &CpEntry)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !matches!(e, CpEntry::Unusable))
            .map(|(i, e)| (i as u16, e))
    }

    pub fn utf8(&self, index: u16) -> Result<&str, ClassFileError> {
        match self.get(index) {
            Some(CpEntry::Utf8(s)) => Ok(s),
            _ => Err(ClassFileError::InvalidPoolIndex {
                index,
                expected: "Utf8",
            }),
        }
    }

    /// Raw name of a `Class` entry; may be an array descriptor.
    pub fn class_name_raw(&self, index: u16) -> Result<&str, ClassFileError> {
        match self.get(index) {
            Some(CpEntry::ClassRef { name_index }) => self.utf8(*name_index),
            _ => Err(ClassFileError::InvalidPoolIndex {
                index,
                expected: "Class",
            }),
        }
    }

    fn expect(&self, index: u16, expected: &'static str) -> Result<&CpEntry, ClassFileError> {
        match self.get(index) {
            Some(e) if e.tag_name() == expected => Ok(e),
            _ => Err(ClassFileError::InvalidPoolIndex { index, expected }),
        }
    }

    fn expect_any(
        &self,
        index: u16,
        allowed: &[&'static str],
        expected: &'static str,
    ) -> Result<(), ClassFileError> {
        match self.get(index) {
            Some(e) if allowed.contains(&e.tag_name()) => Ok(()),
            _ => Err(ClassFileError::InvalidPoolIndex { index, expected }),
        }
    }

    /// Checks every cross-reference against the tag it must point at.
    fn validate(&self) -> Result<(), ClassFileError> {
        for (index, entry) in self.iter() {
            match *entry {
                CpEntry::ClassRef { name_index } => {
                    let name = self.utf8(name_index)?;
                    if name.starts_with('[') {
                        parse_field_descriptor(name)?;
                    } else {
                        ClassName::from_internal(name)?;
                    }
                }
                CpEntry::StringRef { string_index } => {
                    self.utf8(string_index)?;
                }
                CpEntry::FieldRef {
                    class_index,
                    name_and_type_index,
                }
                | CpEntry::MethodRef {
                    class_index,
                    name_and_type_index,
                }
                | CpEntry::InterfaceMethodRef {
                    class_index,
                    name_and_type_index,
                } => {
                    self.expect(class_index, "Class")?;
                    self.expect(name_and_type_index, "NameAndType")?;
                }
                CpEntry::NameAndType {
                    name_index,
                    descriptor_index,
                } => {
                    self.utf8(name_index)?;
                    class_names_in_descriptor(self.utf8(descriptor_index)?)?;
                }
                CpEntry::MethodHandle {
                    reference_kind,
                    reference_index,
                } => {
                    let allowed: &[&'static str] = match reference_kind {
                        1..=4 => &["Fieldref"],
                        5..=8 => &["Methodref", "InterfaceMethodref"],
                        9 => &["InterfaceMethodref"],
                        kind => {
                            return Err(ClassFileError::InvalidMethodHandleKind { kind, index })
                        }
                    };
                    self.expect_any(reference_index, allowed, allowed[allowed.len() - 1])?;
                }
                CpEntry::MethodType { descriptor_index } => {
                    parse_method_descriptor(self.utf8(descriptor_index)?)?;
                }
                CpEntry::Dynamic {
                    name_and_type_index,
                    ..
                }
                | CpEntry::InvokeDynamic {
                    name_and_type_index,
                    ..
                } => {
                    self.expect(name_and_type_index, "NameAndType")?;
                }
                CpEntry::Module { name_index } | CpEntry::Package { name_index } => {
                    self.utf8(name_index)?;
                }
                CpEntry::Unusable
                | CpEntry::Utf8(_)
                | CpEntry::Integer(_)
                | CpEntry::Float(_)
                | CpEntry::Long(_)
                | CpEntry::Double(_) => {}
            }
        }
        Ok(())
    }

    /// A `Class` entry that must name a class, not an array type.
    fn plain_class(&self, index: u16) -> Result<ClassName, ClassFileError> {
        let raw = self.class_name_raw(index)?;
        if raw.starts_with('[') {
            return Err(ClassFileError::ArrayNotAllowed(raw.into()));
        }
        Ok(ClassName::from_internal(raw)?)
    }
}

/// Class, field or method access flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AccessFlags(pub u16);

impl AccessFlags {
    pub fn contains(self, flag: u16) -> bool {
        self.0 & flag == flag
    }
}

/// An attribute kept as opaque bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberInfo {
    pub access_flags: AccessFlags,
    pub name: String,
    pub descriptor: String,
    pub attributes: Vec<Attribute>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFile {
    pub minor_version: u16,
    pub major_version: u16,
    pub constant_pool: ConstantPool,
    pub access_flags: AccessFlags,
    pub this_class: ClassName,
    pub super_class: Option<ClassName>,
    pub interfaces: Vec<ClassName>,
    pub fields: Vec<MemberInfo>,
    pub methods: Vec<MemberInfo>,
    pub attributes: Vec<Attribute>,
}

impl ClassFile {
    /// Module descriptors describe the module system, not class use.
    pub fn is_module(&self) -> bool {
        self.access_flags.contains(ACC_MODULE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Files above this major version parse normally but log a warning.
    pub max_major_version: u16,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            max_major_version: LATEST_MAJOR_VERSION,
        }
    }
}

/// Parses a class file with default options.
pub fn parse_class(bytes: &[u8]) -> Result<ClassFile, ClassFileError> {
    parse_class_with(bytes, &ParseOptions::default())
}

pub fn parse_class_with(bytes: &[u8], opts: &ParseOptions) -> Result<ClassFile, ClassFileError> {
    let mut r = Reader::new(bytes);
    let magic = r.u32()?;
    if magic != MAGIC {
        return Err(ClassFileError::BadMagic(magic));
    }
    let minor_version = r.u16()?;
    let major_version = r.u16()?;
    if major_version > opts.max_major_version {
        log::warn!(
            "class file version {major_version}.{minor_version} is newer than supported {}",
            opts.max_major_version
        );
    }

    let constant_pool = read_pool(&mut r)?;
    constant_pool.validate()?;

    let access_flags = AccessFlags(r.u16()?);
    let this_class = constant_pool.plain_class(r.u16()?)?;
    let super_index = r.u16()?;
    let super_class = if super_index == 0 {
        if this_class.as_str() != "java/lang/Object" && !access_flags.contains(ACC_MODULE) {
            return Err(ClassFileError::MissingSuperclass(this_class));
        }
        None
    } else {
        Some(constant_pool.plain_class(super_index)?)
    };

    let interface_count = r.u16()?;
    let mut interfaces = Vec::with_capacity(usize::from(interface_count));
    for _ in 0..interface_count {
        let iface = constant_pool.plain_class(r.u16()?)?;
        if iface == this_class {
            return Err(ClassFileError::SelfInterface(this_class));
        }
        interfaces.push(iface);
    }

    let fields = read_members(&mut r, &constant_pool, false)?;
    let methods = read_members(&mut r, &constant_pool, true)?;
    let attributes = read_attributes(&mut r, &constant_pool)?;

    if r.remaining() != 0 {
        return Err(ClassFileError::TrailingBytes {
            count: r.remaining(),
        });
    }

    Ok(ClassFile {
        minor_version,
        major_version,
        constant_pool,
        access_flags,
        this_class,
        super_class,
        interfaces,
        fields,
        methods,
        attributes,
    })
}

fn read_pool(r: &mut Reader<'_>) -> Result<ConstantPool, ClassFileError> {
    let count = r.u16()?;
    let mut entries = Vec::with_capacity(usize::from(count));
    entries.push(CpEntry::Unusable);
    while entries.len() < usize::from(count) {
        let index = entries.len() as u16;
        let tag = r.u8()?;
        let entry = match tag {
            1 => {
                let len = r.u16()?;
                let raw = r.take(usize::from(len))?;
                CpEntry::Utf8(mutf8::decode(raw).ok_or(ClassFileError::InvalidUtf8 { index })?)
            }
            3 => CpEntry::Integer(r.u32()? as i32),
            4 => CpEntry::Float(r.u32()?),
            5 => CpEntry::Long(r.u64()? as i64),
            6 => CpEntry::Double(r.u64()?),
            7 => CpEntry::ClassRef {
                name_index: r.u16()?,
            },
            8 => CpEntry::StringRef {
                string_index: r.u16()?,
            },
            9 => CpEntry::FieldRef {
                class_index: r.u16()?,
                name_and_type_index: r.u16()?,
            },
            10 => CpEntry::MethodRef {
                class_index: r.u16()?,
                name_and_type_index: r.u16()?,
            },
            11 => CpEntry::InterfaceMethodRef {
                class_index: r.u16()?,
                name_and_type_index: r.u16()?,
            },
            12 => CpEntry::NameAndType {
                name_index: r.u16()?,
                descriptor_index: r.u16()?,
            },
            15 => CpEntry::MethodHandle {
                reference_kind: r.u8()?,
                reference_index: r.u16()?,
            },
            16 => CpEntry::MethodType {
                descriptor_index: r.u16()?,
            },
            17 => CpEntry::Dynamic {
                bootstrap_method_attr_index: r.u16()?,
                name_and_type_index: r.u16()?,
            },
            18 => CpEntry::InvokeDynamic {
                bootstrap_method_attr_index: r.u16()?,
                name_and_type_index: r.u16()?,
            },
            19 => CpEntry::Module {
                name_index: r.u16()?,
            },
            20 => CpEntry::Package {
                name_index: r.u16()?,
            },
            tag => return Err(ClassFileError::UnknownTag { tag, index }),
        };
        let wide = matches!(entry, CpEntry::Long(_) | CpEntry::Double(_));
        entries.push(entry);
        if wide {
            // A wide entry in the last slot would overrun the declared count.
            if entries.len() >= usize::from(count) {
                return Err(ClassFileError::InvalidPoolIndex {
                    index,
                    expected: "two-slot",
                });
            }
            entries.push(CpEntry::Unusable);
        }
    }
    Ok(ConstantPool { entries })
}

fn read_attributes(
    r: &mut Reader<'_>,
    pool: &ConstantPool,
) -> Result<Vec<Attribute>, ClassFileError> {
    let count = r.u16()?;
    let mut attributes = Vec::with_capacity(usize::from(count));
    for _ in 0..count {
        let name = pool.utf8(r.u16()?)?.into();
        let len = r.u32()? as usize;
        let data = r.take(len)?.to_vec();
        attributes.push(Attribute { name, data });
    }
    Ok(attributes)
}

fn read_members(
    r: &mut Reader<'_>,
    pool: &ConstantPool,
    methods: bool,
) -> Result<Vec<MemberInfo>, ClassFileError> {
    let count = r.u16()?;
    let mut members = Vec::with_capacity(usize::from(count));
    for _ in 0..count {
        let access_flags = AccessFlags(r.u16()?);
        let name: String = pool.utf8(r.u16()?)?.into();
        let descriptor: String = pool.utf8(r.u16()?)?.into();
        if methods {
            parse_method_descriptor(&descriptor)?;
        } else {
            parse_field_descriptor(&descriptor)?;
        }
        let attributes = read_attributes(r, pool)?;
        members.push(MemberInfo {
            access_flags,
            name,
            descriptor,
            attributes,
        });
    }
    Ok(members)
}

//! Class names and string literals a class file refers to.

use alloc::collections::BTreeSet;
use alloc::string::String;

use super::{class_names_in_descriptor, parse_field_descriptor, ClassFile, CpEntry};
use crate::ClassName;

/// Classes named by `Class` pool entries, array types unwrapped to their
/// element class and primitive arrays dropped.
pub fn pool_class_refs(cf: &ClassFile) -> BTreeSet<ClassName> {
    let pool = &cf.constant_pool;
    let mut out = BTreeSet::new();
    for (_, entry) in pool.iter() {
        let CpEntry::ClassRef { name_index } = *entry else {
            continue;
        };
        let Ok(raw) = pool.utf8(name_index) else {
            continue;
        };
        if raw.starts_with('[') {
            out.extend(parse_field_descriptor(raw).into_iter().flatten());
        } else if let Ok(name) = ClassName::from_internal(raw) {
            out.insert(name);
        }
    }
    out.remove(&cf.this_class);
    out
}

/// Classes mentioned in member descriptors and in `NameAndType` and
/// `MethodType` pool descriptors.
pub fn descriptor_class_refs(cf: &ClassFile) -> BTreeSet<ClassName> {
    let pool = &cf.constant_pool;
    let members = cf
        .fields
        .iter()
        .chain(&cf.methods)
        .map(|m| m.descriptor.as_str());
    let pooled = pool.iter().filter_map(|(_, entry)| match *entry {
        CpEntry::NameAndType {
            descriptor_index, ..
        }
        | CpEntry::MethodType { descriptor_index } => pool.utf8(descriptor_index).ok(),
        _ => None,
    });
    let mut out: BTreeSet<ClassName> = members
        .chain(pooled)
        .flat_map(|d| class_names_in_descriptor(d).into_iter().flatten())
        .collect();
    out.remove(&cf.this_class);
    out
}

/// Superclass and direct interfaces.
pub fn hierarchy_class_refs(cf: &ClassFile) -> BTreeSet<ClassName> {
    cf.super_class
        .iter()
        .chain(&cf.interfaces)
        .cloned()
        .collect()
}

/// Every class `cf` refers to statically, excluding itself.
pub fn referenced_class_names(cf: &ClassFile) -> BTreeSet<ClassName> {
    let mut out = pool_class_refs(cf);
    out.extend(descriptor_class_refs(cf));
    out.extend(hierarchy_class_refs(cf));
    out.remove(&cf.this_class);
    out
}

/// Payloads of `String` pool entries.
pub fn string_literals(cf: &ClassFile) -> BTreeSet<String> {
    let pool = &cf.constant_pool;
    pool.iter()
        .filter_map(|(_, entry)| match *entry {
            CpEntry::StringRef { string_index } => pool.utf8(string_index).ok(),
            _ => None,
        })
        .map(String::from)
        .collect()
}

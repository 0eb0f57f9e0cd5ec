//! The vulnerability knowledge base file: a JSON array of
//! `{cve_id, classes, fix_ref, note?}` objects with dotted class names.

use jdebloat_core::vuln::{InvalidRecord, VulnRecord};
use jdebloat_core::ClassName;
use serde::Deserialize;

/// The CVE-2021-29425 path traversal in commons-io `FilenameUtils.normalize`.
pub const SEEDED_KB: &str = r#"[
  {
    "cve_id": "CVE-2021-29425",
    "classes": ["org.apache.commons.io.FilenameUtils"],
    "fix_ref": "apache/commons-io@2736b6f",
    "note": "Path traversal via FilenameUtils.normalize, fixed in commons-io 2.7"
  }
]
"#;

#[derive(Debug, thiserror::Error)]
pub enum MalformedKb {
    #[error("knowledge base is not a valid record array")]
    Json(#[from] serde_json::Error),
    #[error("record {index}: invalid class name `{name}`")]
    ClassName { index: usize, name: String },
    #[error("record {index}")]
    Record {
        index: usize,
        #[source]
        source: InvalidRecord,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    cve_id: String,
    classes: Vec<String>,
    fix_ref: String,
    #[serde(default)]
    note: Option<String>,
}

pub fn load_knowledge_base(text: &str) -> Result<Vec<VulnRecord>, MalformedKb> {
    let raw: Vec<RawRecord> = serde_json::from_str(text)?;
    raw.into_iter()
        .enumerate()
        .map(|(index, r)| {
            let classes = r
                .classes
                .iter()
                .map(|name| {
                    ClassName::from_dotted(name).map_err(|_| MalformedKb::ClassName {
                        index,
                        name: name.clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            VulnRecord::new(r.cve_id, classes, r.fix_ref, r.note)
                .map_err(|source| MalformedKb::Record { index, source })
        })
        .collect()
}

pub fn seeded_knowledge_base() -> Vec<VulnRecord> {
    load_knowledge_base(SEEDED_KB).expect("seeded knowledge base is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_record() {
        let kb = load_knowledge_base(
            r#"[{"cve_id":"CVE-2021-29425","classes":["org.apache.commons.io.FilenameUtils"],"fix_ref":"apache/commons-io@2736b6f"}]"#,
        )
        .unwrap();
        assert_eq!(kb.len(), 1);
        assert_eq!(
            kb[0].classes[0].as_str(),
            "org/apache/commons/io/FilenameUtils"
        );
        assert_eq!(kb[0].note, None);
    }

    #[test]
    fn empty_array() {
        assert!(load_knowledge_base("[]").unwrap().is_empty());
    }

    #[test]
    fn schema_violations() {
        for bad in [
            "{}",
            "[1]",
            r#"[{"cve_id":"X","classes":[]}]"#,
            r#"[{"cve_id":"X","classes":[],"fix_ref":"f"}]"#,
            r#"[{"cve_id":"","classes":["a.B"],"fix_ref":"f"}]"#,
            r#"[{"cve_id":"X","classes":["a..B"],"fix_ref":"f"}]"#,
            r#"[{"cve_id":"X","classes":["a.B"],"fix_ref":"f","severity":9}]"#,
        ] {
            assert!(load_knowledge_base(bad).is_err(), "{bad}");
        }
        assert!(matches!(
            load_knowledge_base(r#"[{"cve_id":"X","classes":[],"fix_ref":"f"}]"#),
            Err(MalformedKb::Record {
                index: 0,
                source: InvalidRecord::NoClasses(_)
            })
        ));
    }

    #[test]
    fn seeded() {
        let kb = seeded_knowledge_base();
        assert_eq!(kb.len(), 1);
        assert_eq!(kb[0].cve_id, "CVE-2021-29425");
        assert_eq!(kb[0].fix_ref, "apache/commons-io@2736b6f");
    }
}

//! JSON reports: one document per command, replayable from its embedded config.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::ScanConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Invocation recorded for replay: subcommand plus its arguments, with
/// `--config` and output paths stripped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandRecord {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub family: Value,
    pub config: ScanConfig,
    pub command: CommandRecord,
    pub result: Value,
    pub evidence: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(
        family: impl Serialize,
        config: &ScanConfig,
        command: CommandRecord,
        result: impl Serialize,
        evidence: impl Serialize,
        warnings: Vec<String>,
    ) -> Result<Report> {
        Ok(Report {
            tool_version: TOOL_VERSION.to_string(),
            family: serde_json::to_value(family)?,
            config: config.clone(),
            command,
            result: serde_json::to_value(result)?,
            evidence: serde_json::to_value(evidence)?,
            warnings,
        })
    }

    /// Serialized bytes: pretty JSON, floats at 17 significant digits.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        to_json_bytes(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Report> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }
}

/// Pretty formatter that writes every finite float with 17 significant digits.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Compact variant for single-line output (`list --json`).
struct CompactDigits17;

impl Formatter for CompactDigits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactDigits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Temp file in the target directory, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Config from a file holding either a bare config or a whole report.
pub fn load_config(path: &Path) -> Result<ScanConfig> {
    let text = std::fs::read_to_string(path)?;
    config_from_str(&text)
}

pub fn config_from_str(text: &str) -> Result<ScanConfig> {
    let v: Value = serde_json::from_str(text)?;
    let cfg = match v {
        Value::Object(ref m) if m.contains_key("tool_version") && m.contains_key("config") => {
            serde_json::from_value(m["config"].clone())?
        }
        other => serde_json::from_value(other)?,
    };
    ScanConfig::checked(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floats_have_17_digits() {
        let s = String::from_utf8(to_json_bytes(&vec![0.1f64, 1.0, -2.5e-300]).unwrap()).unwrap();
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("1.0000000000000000e0"));
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 1.0, -2.5e-300]);
    }

    #[test]
    fn config_roundtrip_and_report_config() {
        let c = ScanConfig { seed: 7, ..ScanConfig::default() };
        let bare = String::from_utf8(to_json_bytes(&c).unwrap()).unwrap();
        assert_eq!(config_from_str(&bare).unwrap(), c);
        let r = Report::new(
            "fam",
            &c,
            CommandRecord { name: "list".into(), args: vec![] },
            1.5,
            Value::Null,
            vec![],
        )
        .unwrap();
        let text = String::from_utf8(r.to_bytes().unwrap()).unwrap();
        assert_eq!(config_from_str(&text).unwrap(), c);
        assert_eq!(Report::from_bytes(text.as_bytes()).unwrap(), r);
    }

    #[test]
    fn unknown_config_field_rejected() {
        assert!(config_from_str(r#"{"grid_pts": 10}"#).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    proptest! {
        #[test]
        fn any_finite_float_roundtrips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let s = to_json_line(&x).unwrap();
            let back: f64 = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}

//! On-disk columnar snapshots.
//!
//! A snapshot is a directory holding `manifest.json` and one binary file per column.
//! Integer, year and money columns are a validity byte per row followed by `i64`
//! little-endian values; float columns likewise with `f64` bits. Text columns are
//! dictionary encoded: a `u32` entry count, each entry as a `u32` byte length plus UTF-8
//! bytes, then one `u32` code per row (`u32::MAX` for null). All integers are little-endian.

use std::{
    fs::{self, File},
    io::{self, BufReader, BufWriter, Read, Write},
    path::Path,
    sync::Arc,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Column, DataType, EngineError, Field, Frame, Role, TextColumn};

pub const MANIFEST_FILE: &str = "manifest.json";
const FORMAT: &str = "boat-snapshot";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("invalid snapshot manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("corrupt snapshot column {column:?}: {reason}")]
    Corrupt { column: String, reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Plain,
    Dictionary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnEntry {
    pub name: String,
    #[serde(rename = "type")]
    pub data_type: DataType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    pub rows: u64,
    pub encoding: Encoding,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub row_count: u64,
    pub columns: Vec<ColumnEntry>,
}

/// Whether `dir` looks like a snapshot directory.
pub fn is_snapshot(dir: &Path) -> bool {
    dir.join(MANIFEST_FILE).is_file()
}

pub fn write_snapshot(frame: &Frame, dir: &Path) -> Result<Manifest, SnapshotError> {
    fs::create_dir_all(dir)?;
    let mut columns = Vec::with_capacity(frame.fields().len());
    for (i, field) in frame.fields().iter().enumerate() {
        let file = format!("col_{i:04}.bin");
        let mut out = BufWriter::new(File::create(dir.join(&file))?);
        let encoding = write_column(field.column(), &mut out)?;
        out.flush()?;
        columns.push(ColumnEntry {
            name: field.name().to_string(),
            data_type: field.data_type(),
            role: field.role(),
            rows: field.column().len() as u64,
            encoding,
            file,
        });
    }
    let manifest = Manifest {
        format: FORMAT.to_string(),
        version: VERSION,
        row_count: frame.row_count() as u64,
        columns,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

fn write_column(column: &Column, out: &mut impl Write) -> io::Result<Encoding> {
    match column {
        Column::Text(t) => {
            out.write_all(&(t.dictionary().len() as u32).to_le_bytes())?;
            for entry in t.dictionary() {
                out.write_all(&(entry.len() as u32).to_le_bytes())?;
                out.write_all(entry.as_bytes())?;
            }
            for code in t.codes() {
                out.write_all(&code.to_le_bytes())?;
            }
            Ok(Encoding::Dictionary)
        }
        Column::Integer(v) | Column::Year(v) | Column::Money(v) => {
            for x in v {
                out.write_all(&[u8::from(x.is_some())])?;
            }
            for x in v {
                out.write_all(&x.unwrap_or(0).to_le_bytes())?;
            }
            Ok(Encoding::Plain)
        }
        Column::Float(v) => {
            for x in v {
                out.write_all(&[u8::from(x.is_some())])?;
            }
            for x in v {
                out.write_all(&x.unwrap_or(0.0).to_bits().to_le_bytes())?;
            }
            Ok(Encoding::Plain)
        }
    }
}

pub fn read_snapshot(dir: &Path) -> Result<Frame, SnapshotError> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join(MANIFEST_FILE))?)?;
    let corrupt = |column: &str, reason: String| SnapshotError::Corrupt {
        column: column.to_string(),
        reason,
    };
    if manifest.format != FORMAT || manifest.version != VERSION {
        return Err(corrupt(
            "",
            format!("unsupported format {} v{}", manifest.format, manifest.version),
        ));
    }

    let mut fields = Vec::with_capacity(manifest.columns.len());
    for entry in &manifest.columns {
        if entry.rows != manifest.row_count {
            return Err(corrupt(&entry.name, format!("{} rows, manifest says {}", entry.rows, manifest.row_count)));
        }
        if entry.file.contains(['/', '\\']) || entry.file.starts_with('.') {
            return Err(corrupt(&entry.name, format!("bad file name {:?}", entry.file)));
        }
        let mut input = BufReader::new(File::open(dir.join(&entry.file))?);
        let column = read_column(entry, &mut input).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof | io::ErrorKind::InvalidData => corrupt(&entry.name, e.to_string()),
            _ => SnapshotError::Io(e),
        })?;
        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(corrupt(&entry.name, "trailing bytes".to_string()));
        }
        fields.push(Field::new(entry.name.clone(), column).with_role(entry.role));
    }
    Ok(Frame::new(fields)?)
}

fn read_u32(input: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(input: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn read_validity(input: &mut impl Read, rows: usize) -> io::Result<Vec<bool>> {
    let mut bytes = vec![0u8; rows];
    input.read_exact(&mut bytes)?;
    bytes
        .into_iter()
        .map(|b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(invalid(format!("bad validity byte {other}"))),
        })
        .collect()
}

fn read_column(entry: &ColumnEntry, input: &mut impl Read) -> io::Result<Column> {
    let rows = usize::try_from(entry.rows).map_err(|_| invalid("row count too large"))?;
    let expected = match entry.data_type {
        DataType::Text => Encoding::Dictionary,
        _ => Encoding::Plain,
    };
    if entry.encoding != expected {
        return Err(invalid(format!("{:?} encoding for {} column", entry.encoding, entry.data_type)));
    }
    match entry.data_type {
        DataType::Text => {
            let n = read_u32(input)? as usize;
            let mut dict: Vec<Arc<str>> = Vec::with_capacity(n.min(1 << 20));
            for _ in 0..n {
                let len = read_u32(input)? as usize;
                let mut buf = Vec::new();
                input.take(len as u64).read_to_end(&mut buf)?;
                if buf.len() != len {
                    return Err(io::ErrorKind::UnexpectedEof.into());
                }
                let s = String::from_utf8(buf).map_err(|_| invalid("dictionary entry is not UTF-8"))?;
                dict.push(Arc::from(s));
            }
            let mut codes = Vec::with_capacity(rows);
            for _ in 0..rows {
                codes.push(read_u32(input)?);
            }
            TextColumn::from_parts(dict, codes)
                .map(Column::Text)
                .ok_or_else(|| invalid("dictionary code out of range"))
        }
        DataType::Float => {
            let valid = read_validity(input, rows)?;
            let mut values = Vec::with_capacity(rows);
            for v in valid {
                let bits = read_u64(input)?;
                values.push(v.then(|| f64::from_bits(bits)));
            }
            Ok(Column::Float(values))
        }
        dtype => {
            let valid = read_validity(input, rows)?;
            let mut values = Vec::with_capacity(rows);
            for v in valid {
                let x = read_u64(input)? as i64;
                values.push(v.then_some(x));
            }
            Ok(Column::integral(dtype, values))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame_strategy() -> impl Strategy<Value = Frame> {
        (0usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::option::of("[a-c ]{0,3}"), n),
                proptest::collection::vec(proptest::option::of(any::<i64>()), n),
                proptest::collection::vec(proptest::option::of(1990i64..=2100), n),
                proptest::collection::vec(proptest::option::of(-1e9f64..1e9), n),
            )
                .prop_map(|(text, ints, years, floats)| {
                    Frame::new(vec![
                        Field::new("label", Column::Text(TextColumn::from_values(text))).with_role(Some(Role::County)),
                        Field::new("cost", Column::Money(ints)).with_role(Some(Role::Cost)),
                        Field::new("year", Column::Year(years)),
                        Field::new("score", Column::Float(floats)),
                    ])
                    .unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn snapshot_round_trips(frame in frame_strategy()) {
            let dir = tempfile::tempdir().unwrap();
            write_snapshot(&frame, dir.path()).unwrap();
            prop_assert!(is_snapshot(dir.path()));
            let back = read_snapshot(dir.path()).unwrap();
            prop_assert_eq!(back, frame);
        }
    }

    #[test]
    fn detects_truncated_column() {
        let frame = Frame::new(vec![Field::new("x", Column::Integer(vec![Some(1), None, Some(3)]))]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_snapshot(&frame, dir.path()).unwrap();
        let path = dir.path().join("col_0000.bin");
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 1]).unwrap();
        assert!(matches!(read_snapshot(dir.path()), Err(SnapshotError::Corrupt { .. })));
        fs::write(&path, [bytes.as_slice(), &[0]].concat()).unwrap();
        assert!(matches!(read_snapshot(dir.path()), Err(SnapshotError::Corrupt { .. })));
    }

    #[test]
    fn manifest_lists_columns() {
        let frame = Frame::new(vec![
            Field::new("county", Column::Text(TextColumn::from_values([Some("Kings")]))),
            Field::new("Total Costs", Column::Money(vec![Some(5)])).with_role(Some(Role::Cost)),
        ])
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let m = write_snapshot(&frame, dir.path()).unwrap();
        assert_eq!(m.row_count, 1);
        assert_eq!(m.columns[0].encoding, Encoding::Dictionary);
        assert_eq!(m.columns[1].data_type, DataType::Money);
        assert_eq!(m.columns[1].role, Some(Role::Cost));
        // dictionary: count(4) + len(4) + "Kings"(5) + one code(4)
        assert_eq!(fs::metadata(dir.path().join("col_0000.bin")).unwrap().len(), 17);
        // validity(1) + value(8)
        assert_eq!(fs::read(dir.path().join("col_0001.bin")).unwrap(), vec![1, 5, 0, 0, 0, 0, 0, 0, 0]);
    }
}

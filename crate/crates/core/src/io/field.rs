use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ArtifactWriter;
use crate::error::{Error, Result};
use crate::galerkin::{Grid, WignerField};

/// JSON header of a field; the values live in a sibling `.f64` file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub q0: f64,
    pub q1: f64,
    pub p0: f64,
    pub p1: f64,
    #[serde(rename = "Nq")]
    pub nq: usize,
    #[serde(rename = "Np")]
    pub np: usize,
    pub hbar: f64,
    pub time: f64,
}

impl FieldHeader {
    pub fn of(field: &WignerField) -> Self {
        let g = &field.grid;
        FieldHeader {
            q0: g.q.min,
            q1: g.q.max,
            p0: g.p.min,
            p1: g.p.max,
            nq: g.nq(),
            np: g.np(),
            hbar: field.hbar,
            time: field.time,
        }
    }
}

/// Little-endian IEEE-754 values, row-major with `q` outer.
pub fn field_payload(field: &WignerField) -> Vec<u8> {
    field.values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Rebuilds a field from a header and raw payload bytes.
pub fn read_field_bytes(header: &FieldHeader, payload: &[u8], origin: &Path) -> Result<WignerField> {
    let format = |reason: String| Error::Format { path: origin.to_path_buf(), reason };
    let grid = Grid::new((header.q0, header.q1), (header.p0, header.p1), (header.nq, header.np))
        .map_err(|e| format(e.to_string()))?;
    if payload.len() != 8 * grid.len() {
        return Err(format(format!("payload has {} bytes, header implies {}", payload.len(), 8 * grid.len())));
    }
    let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    WignerField::new(grid, values, header.hbar, header.time).map_err(|e| format(e.to_string()))
}

/// Reads `<stem>.json` and its sibling `<stem>.f64`.
pub fn read_field(header_path: &Path) -> Result<WignerField> {
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let header: FieldHeader = serde_json::from_str(&text)
        .map_err(|e| Error::Format { path: header_path.to_path_buf(), reason: e.to_string() })?;
    let payload_path = header_path.with_extension("f64");
    let payload = fs::read(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
    read_field_bytes(&header, &payload, &payload_path)
}

/// `q,p,W` rows with a header line.
pub fn field_to_csv(field: &WignerField) -> String {
    let mut out = String::from("q,p,W\n");
    for iq in 0..field.grid.nq() {
        let q = field.grid.q.node(iq);
        for ip in 0..field.grid.np() {
            writeln!(out, "{},{},{}", q, field.grid.p.node(ip), field.get(iq, ip)).unwrap();
        }
    }
    out
}

/// Writes the requested representations of `field` under `stem`.
pub fn write_field_files(
    writer: &mut ArtifactWriter,
    stem: &str,
    field: &WignerField,
    f64_payload: bool,
    csv: bool,
) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    if f64_payload {
        out.push(writer.write_json(&format!("{stem}.json"), &FieldHeader::of(field))?);
        out.push(writer.write(&format!("{stem}.f64"), &field_payload(field))?);
    }
    if csv {
        out.push(writer.write(&format!("{stem}.csv"), field_to_csv(field).as_bytes())?);
    }
    Ok(out)
}

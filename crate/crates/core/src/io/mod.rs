//! On-disk formats: field headers with raw `.f64` payloads, CSV, plot blocks,
//! atomic writes and a hashed manifest of every artifact.

mod artifacts;
mod field;
mod plot;

pub use artifacts::{sha256_hex, write_atomic, Artifact, ArtifactWriter, Manifest};
pub use field::{field_to_csv, read_field, read_field_bytes, write_field_files, FieldHeader};
pub use plot::plot_data;

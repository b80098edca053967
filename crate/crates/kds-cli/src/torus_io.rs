//! Torus initial data on disk: a JSON header next to a flat binary file of
//! little-endian `f64`, node-major with node index `(i·N + j)·N + l`.

use kds_spectra::constraints::{HSign, SymField, TorusData, TorusGrid};
use kds_spectra::KdsError;
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const KIND: &str = "torus-initial-data";
const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const SYM_NAMES: [&str; 6] = ["xx", "xy", "xz", "yy", "yz", "zz"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldEntry {
    pub name: String,
    pub components: Vec<String>,
    /// Offset into the binary file, in values.
    pub offset: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Convention {
    pub h_sign: HSign,
    pub spatial_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Header {
    pub schema: String,
    pub kind: String,
    pub grid_shape: [usize; 3],
    pub chart: String,
    pub convention: Convention,
    pub lambda: f64,
    pub dtype: String,
    pub byte_order: String,
    /// Path of the binary file, relative to the header.
    pub binary: String,
    pub fields: Vec<FieldEntry>,
}

pub struct Stored {
    pub data: TorusData,
    pub lambda: f64,
    /// The kernel correction `z`, when present.
    pub z: Option<Vec<f64>>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> KdsError {
    KdsError::InvalidParams(format!("{}: {e}", path.display()))
}

fn paths(prefix: &Path) -> (PathBuf, PathBuf) {
    (prefix.with_extension("json"), prefix.with_extension("bin"))
}

/// Writes `<prefix>.json` and `<prefix>.bin`; returns both paths.
pub fn write(prefix: &Path, data: &TorusData, lambda: f64, z: &[f64]) -> kds_spectra::Result<(PathBuf, PathBuf)> {
    let n = data.grid.n();
    let len = data.grid.len();
    let (hp, bp) = paths(prefix);
    let mut values: Vec<f64> = Vec::with_capacity(13 * len);
    let mut fields = Vec::new();
    for (name, f) in [("h", &data.h), ("k", &data.k)] {
        fields.push(FieldEntry {
            name: name.into(),
            components: SYM_NAMES.iter().map(|s| s.to_string()).collect(),
            offset: values.len(),
            count: 6 * len,
        });
        for m in f.iter() {
            values.extend(SYM.iter().map(|&(a, b)| m[(a, b)]));
        }
    }
    fields.push(FieldEntry { name: "z".into(), components: vec!["scalar".into()], offset: values.len(), count: len });
    values.extend_from_slice(z);
    let header = Header {
        schema: crate::output::SCHEMA.into(),
        kind: KIND.into(),
        grid_shape: [n, n, n],
        chart: "flat-torus".into(),
        convention: Convention { h_sign: data.sign, spatial_dimension: 3 },
        lambda,
        dtype: "f64".into(),
        byte_order: "little-endian".into(),
        binary: bp.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        fields,
    };
    let bytes: Vec<u8> = values.iter().flat_map(|x| x.to_le_bytes()).collect();
    std::fs::write(&bp, bytes).map_err(|e| io_err(&bp, e))?;
    let text = crate::output::normalize(crate::output::to_value(&header));
    std::fs::write(&hp, serde_json::to_string_pretty(&text).expect("header serializes") + "\n")
        .map_err(|e| io_err(&hp, e))?;
    Ok((hp, bp))
}

pub fn read(header_path: &Path) -> kds_spectra::Result<Stored> {
    let text = std::fs::read_to_string(header_path).map_err(|e| io_err(header_path, e))?;
    let h: Header = serde_json::from_str(&text).map_err(|e| io_err(header_path, e))?;
    if h.kind != KIND || h.dtype != "f64" || h.byte_order != "little-endian" || h.convention.spatial_dimension != 3 {
        return Err(io_err(header_path, "unsupported data set"));
    }
    let [n, n1, n2] = h.grid_shape;
    if n != n1 || n != n2 {
        return Err(io_err(header_path, "grid must be cubic"));
    }
    let grid = TorusGrid::new(n)?;
    let len = grid.len();
    let bp = header_path.parent().unwrap_or(Path::new(".")).join(&h.binary);
    let bytes = std::fs::read(&bp).map_err(|e| io_err(&bp, e))?;
    if bytes.len() % 8 != 0 {
        return Err(io_err(&bp, "length is not a multiple of 8"));
    }
    let values: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let slice = |name: &str, width: usize| -> kds_spectra::Result<Option<&[f64]>> {
        match h.fields.iter().find(|f| f.name == name) {
            None => Ok(None),
            Some(f) if f.count == width * len && f.offset + f.count <= values.len() => {
                Ok(Some(&values[f.offset..f.offset + f.count]))
            }
            Some(_) => Err(io_err(&bp, format!("field {name} has the wrong size"))),
        }
    };
    let sym = |flat: &[f64]| -> SymField {
        flat.chunks_exact(6)
            .map(|c| {
                let mut m = Matrix3::zeros();
                for (&(a, b), &x) in SYM.iter().zip(c) {
                    m[(a, b)] = x;
                    m[(b, a)] = x;
                }
                m
            })
            .collect()
    };
    let hf = slice("h", 6)?.ok_or_else(|| io_err(header_path, "missing field h"))?;
    let kf = slice("k", 6)?.ok_or_else(|| io_err(header_path, "missing field k"))?;
    let z = slice("z", 1)?.map(<[f64]>::to_vec);
    Ok(Stored { data: TorusData { grid, h: sym(hf), k: sym(kf), sign: h.convention.h_sign }, lambda: h.lambda, z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let grid = TorusGrid::new(4).unwrap();
        let h: SymField = (0..grid.len()).map(|i| Matrix3::identity() * (1.0 + i as f64 * 1e-3)).collect();
        let k: SymField = (0..grid.len())
            .map(|i| Matrix3::new(0.1, 0.2, 0.3, 0.2, 0.4, 0.5, 0.3, 0.5, 0.6 + i as f64 / 7.0))
            .collect();
        let z: Vec<f64> = (0..grid.len()).map(|i| (i as f64).sin()).collect();
        let data = TorusData { grid, h: h.clone(), k: k.clone(), sign: HSign::Positive };
        let dir = std::env::temp_dir().join(format!("kds-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let (hp, _) = write(&dir.join("data"), &data, 0.5, &z).unwrap();
        let back = read(&hp).unwrap();
        assert_eq!(back.data.h, h);
        assert_eq!(back.data.k, k);
        assert_eq!(back.z.unwrap(), z);
        assert_eq!(back.lambda, 0.5);
        std::fs::remove_dir_all(&dir).ok();
    }
}

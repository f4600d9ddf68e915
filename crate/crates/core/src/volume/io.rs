//! Volume files: single-file NIfTI-1 (`.nii`, `.nii.gz`) and a raw sidecar
//! format (`.json` header next to a flat little-endian array).
//!
//! Only axis-aligned volumes with positive spacing are accepted. Multi-component
//! volumes (velocity fields) are stored as `dim[0] = 4, dim[4] = 3` in NIfTI and
//! as interleaved `float32x3` in the raw format. In memory, values are always
//! interleaved per voxel.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use super::grid::{GridGeometry, ScalarField, VoxelGrid};
use super::labels::LabelVolume;
use crate::error::{Error, Result};

const HEADER_SIZE: usize = 348;
const VOX_OFFSET: usize = 352;

const DT_UINT8: i16 = 2;
const DT_INT16: i16 = 4;
const DT_FLOAT32: i16 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataType {
    #[serde(rename = "uint8")]
    U8,
    #[serde(rename = "int16")]
    I16,
    #[serde(rename = "float32")]
    F32,
    #[serde(rename = "float32x3")]
    F32x3,
}

impl DataType {
    fn components(self) -> usize {
        match self {
            DataType::F32x3 => 3,
            _ => 1,
        }
    }

    fn scalar_bytes(self) -> usize {
        match self {
            DataType::U8 => 1,
            DataType::I16 => 2,
            DataType::F32 | DataType::F32x3 => 4,
        }
    }
}

/// Decoded volume: geometry plus `components` values per voxel, interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeData {
    pub geometry: GridGeometry,
    pub dtype: DataType,
    pub values: Vec<f64>,
}

impl VolumeData {
    pub fn components(&self) -> usize {
        self.dtype.components()
    }

    fn check(&self) -> Result<()> {
        let expect = self.geometry.len() * self.components();
        if self.values.len() != expect {
            return Err(Error::Argument(format!(
                "volume has {} values, expected {expect}",
                self.values.len()
            )));
        }
        Ok(())
    }
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

fn is_nifti(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("").to_ascii_lowercase();
    name.ends_with(".nii") || name.ends_with(".nii.gz")
}

/// Reads a NIfTI file or raw sidecar header, chosen by extension.
pub fn read_volume(path: &Path) -> Result<VolumeData> {
    if is_nifti(path) {
        read_nifti(path)
    } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        read_raw(path)
    } else {
        Err(Error::Unsupported(format!(
            "{}: expected .nii, .nii.gz or .json",
            path.display()
        )))
    }
}

pub fn write_volume(path: &Path, volume: &VolumeData) -> Result<()> {
    if is_nifti(path) {
        write_nifti(path, volume)
    } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        write_raw(path, volume)
    } else {
        Err(Error::Unsupported(format!(
            "{}: expected .nii, .nii.gz or .json",
            path.display()
        )))
    }
}

pub fn load_label_volume(path: &Path) -> Result<LabelVolume> {
    let vol = read_volume(path)?;
    if vol.components() != 1 {
        return Err(Error::Format(format!(
            "{}: label volumes must have one component",
            path.display()
        )));
    }
    let mut ints = Vec::with_capacity(vol.values.len());
    for (idx, &v) in vol.values.iter().enumerate() {
        if v.fract() != 0.0 || !v.is_finite() {
            return Err(Error::Validation(format!(
                "non-integer label {v} at voxel {:?}",
                vol.geometry.coords(idx)
            )));
        }
        ints.push(v as i64);
    }
    LabelVolume::from_values(vol.geometry, &ints)
}

pub fn save_label_volume(path: &Path, labels: &LabelVolume) -> Result<()> {
    write_volume(
        path,
        &VolumeData {
            geometry: *labels.geometry(),
            dtype: DataType::U8,
            values: labels.grid().data().iter().map(|&l| l as f64).collect(),
        },
    )
}

pub fn load_scalar_field(path: &Path) -> Result<ScalarField> {
    let vol = read_volume(path)?;
    if vol.components() != 1 {
        return Err(Error::Format(format!("{}: expected a scalar volume", path.display())));
    }
    let field = VoxelGrid::from_vec(vol.geometry, vol.values)?;
    field.check_finite()?;
    Ok(field)
}

pub fn save_scalar_field(path: &Path, field: &ScalarField) -> Result<()> {
    write_volume(
        path,
        &VolumeData {
            geometry: *field.geometry(),
            dtype: DataType::F32,
            values: field.data().to_vec(),
        },
    )
}

// ---------------------------------------------------------------------------
// NIfTI-1

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    if is_gz(path) {
        GzDecoder::new(BufReader::new(file))
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io(path, e))?;
    } else {
        BufReader::new(file)
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io(path, e))?;
    }
    Ok(bytes)
}

fn i16_at(b: &[u8], off: usize) -> i16 {
    i16::from_le_bytes([b[off], b[off + 1]])
}

fn i32_at(b: &[u8], off: usize) -> i32 {
    i32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

fn f32_at(b: &[u8], off: usize) -> f32 {
    f32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

/// Spacing and origin from a NIfTI header, honouring only axis-aligned
/// transforms with positive scale.
fn header_geometry(h: &[u8], dims: [usize; 3], path: &Path) -> Result<GridGeometry> {
    let pixdim: Vec<f64> = (0..8).map(|i| f32_at(h, 76 + 4 * i) as f64).collect();
    let qform_code = i16_at(h, 252);
    let sform_code = i16_at(h, 254);
    let unsupported = |why: &str| Error::Unsupported(format!("{}: {why}", path.display()));

    let (spacing, origin) = if sform_code > 0 {
        let rows: Vec<[f64; 4]> = (0..3)
            .map(|r| {
                let mut row = [0.0; 4];
                for (c, v) in row.iter_mut().enumerate() {
                    *v = f32_at(h, 280 + 16 * r + 4 * c) as f64;
                }
                row
            })
            .collect();
        let scale = (0..3).map(|i| rows[i][i].abs()).fold(0.0, f64::max);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().take(3).enumerate() {
                if r != c && v.abs() > 1e-6 * scale.max(1.0) {
                    return Err(unsupported("sform is not axis-aligned"));
                }
            }
        }
        let spacing = [rows[0][0], rows[1][1], rows[2][2]];
        if spacing.iter().any(|&s| s <= 0.0) {
            return Err(unsupported("sform flips an axis"));
        }
        (spacing, [rows[0][3], rows[1][3], rows[2][3]])
    } else if qform_code > 0 {
        let quat = [f32_at(h, 256), f32_at(h, 260), f32_at(h, 264)];
        if quat.iter().any(|q| q.abs() > 1e-6) {
            return Err(unsupported("qform has a rotation"));
        }
        if pixdim[0] < 0.0 {
            return Err(unsupported("qform flips the z axis"));
        }
        (
            [pixdim[1], pixdim[2], pixdim[3]],
            [f32_at(h, 268) as f64, f32_at(h, 272) as f64, f32_at(h, 276) as f64],
        )
    } else {
        ([pixdim[1], pixdim[2], pixdim[3]], [0.0; 3])
    };
    GridGeometry::new(dims, spacing, origin)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn read_nifti(path: &Path) -> Result<VolumeData> {
    let bytes = read_all(path)?;
    let bad = |why: String| Error::Format(format!("{}: {why}", path.display()));
    if bytes.len() < HEADER_SIZE {
        return Err(bad(format!("file is {} bytes, shorter than a NIfTI header", bytes.len())));
    }
    let h = &bytes[..HEADER_SIZE];
    let sizeof_hdr = i32_at(h, 0);
    if sizeof_hdr != HEADER_SIZE as i32 {
        if i32::from_be_bytes(h[0..4].try_into().unwrap()) == HEADER_SIZE as i32 {
            return Err(Error::Unsupported(format!("{}: big-endian NIfTI", path.display())));
        }
        return Err(bad(format!("sizeof_hdr is {sizeof_hdr}, expected 348")));
    }
    if &h[344..348] != b"n+1\0" {
        return Err(bad("magic is not \"n+1\" (only single-file NIfTI-1 is read)".into()));
    }
    let dim: Vec<i16> = (0..8).map(|i| i16_at(h, 40 + 2 * i)).collect();
    let ndim = dim[0];
    if ndim != 3 && ndim != 4 {
        return Err(bad(format!("dim[0] = {ndim}, expected 3 or 4")));
    }
    if dim[1..=ndim as usize].iter().any(|&d| d <= 0) {
        return Err(bad(format!("non-positive dimension in {:?}", &dim[1..=ndim as usize])));
    }
    let dims = [dim[1] as usize, dim[2] as usize, dim[3] as usize];
    let components = if ndim == 4 { dim[4] as usize } else { 1 };
    let datatype = i16_at(h, 70);
    let dtype = match (datatype, components) {
        (DT_UINT8, 1) => DataType::U8,
        (DT_INT16, 1) => DataType::I16,
        (DT_FLOAT32, 1) => DataType::F32,
        (DT_FLOAT32, 3) => DataType::F32x3,
        (dt, c) => {
            return Err(Error::Unsupported(format!(
                "{}: datatype {dt} with {c} components",
                path.display()
            )))
        }
    };
    let geometry = header_geometry(h, dims, path)?;
    let vox_offset = f32_at(h, 108);
    if vox_offset < HEADER_SIZE as f32 || vox_offset.fract() != 0.0 {
        return Err(bad(format!("invalid vox_offset {vox_offset}")));
    }
    let start = vox_offset as usize;
    let n = geometry.len() * components;
    let nbytes = n * dtype.scalar_bytes();
    if bytes.len() < start + nbytes {
        return Err(bad(format!(
            "data truncated: need {nbytes} bytes at offset {start}, file has {}",
            bytes.len()
        )));
    }
    let raw = decode_scalars(&bytes[start..start + nbytes], dtype);
    let (slope, inter) = (f32_at(h, 112) as f64, f32_at(h, 116) as f64);
    let scaled: Vec<f64> = if slope != 0.0 && (slope != 1.0 || inter != 0.0) {
        raw.iter().map(|v| v * slope + inter).collect()
    } else {
        raw
    };
    // NIfTI stores components as the slowest axis; interleave per voxel.
    let values = if components == 1 {
        scaled
    } else {
        let nvox = geometry.len();
        let mut out = vec![0.0; n];
        for c in 0..components {
            for v in 0..nvox {
                out[v * components + c] = scaled[c * nvox + v];
            }
        }
        out
    };
    Ok(VolumeData {
        geometry,
        dtype,
        values,
    })
}

fn decode_scalars(bytes: &[u8], dtype: DataType) -> Vec<f64> {
    match dtype {
        DataType::U8 => bytes.iter().map(|&b| b as f64).collect(),
        DataType::I16 => bytes
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64)
            .collect(),
        DataType::F32 | DataType::F32x3 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    }
}

fn encode_scalars(values: impl Iterator<Item = f64>, dtype: DataType, out: &mut Vec<u8>) -> Result<()> {
    for v in values {
        match dtype {
            DataType::U8 => {
                if !(0.0..=255.0).contains(&v) || v.fract() != 0.0 {
                    return Err(Error::Argument(format!("{v} does not fit uint8")));
                }
                out.push(v as u8);
            }
            DataType::I16 => {
                if !(i16::MIN as f64..=i16::MAX as f64).contains(&v) || v.fract() != 0.0 {
                    return Err(Error::Argument(format!("{v} does not fit int16")));
                }
                out.extend_from_slice(&(v as i16).to_le_bytes());
            }
            DataType::F32 | DataType::F32x3 => out.extend_from_slice(&(v as f32).to_le_bytes()),
        }
    }
    Ok(())
}

fn nifti_header(volume: &VolumeData) -> Result<[u8; VOX_OFFSET]> {
    let g = &volume.geometry;
    if g.dims.iter().any(|&d| d > i16::MAX as usize) {
        return Err(Error::Argument(format!("dims {:?} exceed the NIfTI-1 limit", g.dims)));
    }
    let mut h = [0u8; VOX_OFFSET];
    let put_i16 = |h: &mut [u8], off: usize, v: i16| h[off..off + 2].copy_from_slice(&v.to_le_bytes());
    let put_f32 = |h: &mut [u8], off: usize, v: f32| h[off..off + 4].copy_from_slice(&v.to_le_bytes());

    h[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    h[38] = b'r';
    let components = volume.components();
    let ndim: i16 = if components == 1 { 3 } else { 4 };
    let mut dim = [ndim, g.dims[0] as i16, g.dims[1] as i16, g.dims[2] as i16, 1, 1, 1, 1];
    if components > 1 {
        dim[4] = components as i16;
    }
    for (i, d) in dim.iter().enumerate() {
        put_i16(&mut h, 40 + 2 * i, *d);
    }
    let (datatype, bitpix) = match volume.dtype {
        DataType::U8 => (DT_UINT8, 8),
        DataType::I16 => (DT_INT16, 16),
        DataType::F32 | DataType::F32x3 => (DT_FLOAT32, 32),
    };
    if components > 1 {
        put_i16(&mut h, 68, 1007); // NIFTI_INTENT_VECTOR
    }
    put_i16(&mut h, 70, datatype);
    put_i16(&mut h, 72, bitpix);
    let pixdim = [1.0, g.spacing[0], g.spacing[1], g.spacing[2], 1.0, 1.0, 1.0, 1.0];
    for (i, p) in pixdim.iter().enumerate() {
        put_f32(&mut h, 76 + 4 * i, *p as f32);
    }
    put_f32(&mut h, 108, VOX_OFFSET as f32);
    put_f32(&mut h, 112, 1.0);
    h[123] = 2; // millimetres
    put_i16(&mut h, 252, 1);
    put_i16(&mut h, 254, 1);
    for (i, o) in g.origin.iter().enumerate() {
        put_f32(&mut h, 268 + 4 * i, *o as f32);
    }
    for r in 0..3 {
        put_f32(&mut h, 280 + 16 * r + 4 * r, g.spacing[r] as f32);
        put_f32(&mut h, 280 + 16 * r + 12, g.origin[r] as f32);
    }
    h[344..348].copy_from_slice(b"n+1\0");
    Ok(h)
}

pub fn write_nifti(path: &Path, volume: &VolumeData) -> Result<()> {
    volume.check()?;
    let header = nifti_header(volume)?;
    let mut bytes = Vec::with_capacity(VOX_OFFSET + volume.values.len() * 4);
    bytes.extend_from_slice(&header);
    let c = volume.components();
    let nvox = volume.geometry.len();
    let ordered = (0..c).flat_map(|comp| (0..nvox).map(move |v| volume.values[v * c + comp]));
    let scalar_type = if c > 1 { DataType::F32 } else { volume.dtype };
    encode_scalars(ordered, scalar_type, &mut bytes)?;

    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    if is_gz(path) {
        let mut enc = GzEncoder::new(BufWriter::new(file), Compression::default());
        enc.write_all(&bytes).map_err(|e| Error::io(path, e))?;
        enc.finish()
            .and_then(|mut w| w.flush())
            .map_err(|e| Error::io(path, e))?;
    } else {
        let mut w = BufWriter::new(file);
        w.write_all(&bytes).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Raw sidecar

#[derive(Debug, Serialize, Deserialize)]
struct RawHeader {
    dims: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
    dtype: DataType,
    data: PathBuf,
}

pub fn read_raw(path: &Path) -> Result<VolumeData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header: RawHeader = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let geometry = GridGeometry::new(header.dims, header.spacing, header.origin)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let data_path = path.parent().unwrap_or(Path::new(".")).join(&header.data);
    let bytes = std::fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let expect = geometry.len() * header.dtype.components() * header.dtype.scalar_bytes();
    if bytes.len() != expect {
        return Err(Error::Format(format!(
            "{}: expected {expect} bytes, found {}",
            data_path.display(),
            bytes.len()
        )));
    }
    Ok(VolumeData {
        geometry,
        dtype: header.dtype,
        values: decode_scalars(&bytes, header.dtype),
    })
}

/// Writes `<name>.json` and its data file `<name>.bin` alongside it.
pub fn write_raw(path: &Path, volume: &VolumeData) -> Result<()> {
    volume.check()?;
    let data_name = PathBuf::from(
        path.with_extension("bin")
            .file_name()
            .ok_or_else(|| Error::Argument(format!("{} has no file name", path.display())))?,
    );
    let header = RawHeader {
        dims: volume.geometry.dims,
        spacing: volume.geometry.spacing,
        origin: volume.geometry.origin,
        dtype: volume.dtype,
        data: data_name.clone(),
    };
    let mut bytes = Vec::new();
    encode_scalars(volume.values.iter().copied(), volume.dtype, &mut bytes)?;
    let data_path = path.parent().unwrap_or(Path::new(".")).join(&data_name);
    std::fs::write(&data_path, bytes).map_err(|e| Error::io(&data_path, e))?;
    let json = serde_json::to_string_pretty(&header).expect("header serializes");
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

//! Mesh files: binary little-endian PLY (canonical, float32 vertices) and
//! ASCII OBJ.

use std::fs;
use std::path::Path;

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Ply,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("ply") => Ok(MeshFormat::Ply),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::Unsupported(format!(
                "{}: mesh files must end in .ply or .obj",
                path.display()
            ))),
        }
    }
}

pub fn read_mesh(path: &Path) -> Result<TriangleMesh> {
    let format = MeshFormat::from_path(path)?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let located = |e: Error| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    };
    match format {
        MeshFormat::Ply => parse_ply(&bytes).map_err(located),
        MeshFormat::Obj => parse_obj(&bytes).map_err(located),
    }
}

pub fn write_mesh(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let bytes = match MeshFormat::from_path(path)? {
        MeshFormat::Ply => encode_ply(mesh),
        MeshFormat::Obj => encode_obj(mesh).into_bytes(),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn encode_ply(mesh: &TriangleMesh) -> Vec<u8> {
    let header = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.faces.len()
    );
    let mut out = Vec::with_capacity(header.len() + 12 * mesh.vertices.len() + 13 * mesh.faces.len());
    out.extend_from_slice(header.as_bytes());
    for v in &mesh.vertices {
        for c in [v.x, v.y, v.z] {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
    }
    for f in &mesh.faces {
        out.push(3);
        for &i in f {
            out.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            other => return Err(Error::Format(format!("unknown PLY type {other}"))),
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn decode(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar(String, Scalar),
    List(String, Scalar, Scalar),
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

/// Pulls values out of either an ASCII token stream or a binary buffer.
enum Reader<'a> {
    Ascii(std::str::SplitAsciiWhitespace<'a>),
    Binary(&'a [u8]),
}

impl Reader<'_> {
    fn next(&mut self, ty: Scalar) -> Result<f64> {
        match self {
            Reader::Ascii(tokens) => tokens
                .next()
                .ok_or_else(|| Error::Format("PLY body ends early".into()))?
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad PLY value: {e}"))),
            Reader::Binary(buf) => {
                let n = ty.size();
                if buf.len() < n {
                    return Err(Error::Format("PLY body ends early".into()));
                }
                let v = ty.decode(buf);
                *buf = &buf[n..];
                Ok(v)
            }
        }
    }
}

fn parse_ply(bytes: &[u8]) -> Result<TriangleMesh> {
    const END: &[u8] = b"end_header";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| Error::Format("PLY header has no end_header".into()))?;
    let mut body_start = end + END.len();
    if bytes.get(body_start) == Some(&b'\r') {
        body_start += 1;
    }
    if bytes.get(body_start) == Some(&b'\n') {
        body_start += 1;
    }
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| Error::Format("PLY header is not text".into()))?;
    let mut lines = header.lines().map(str::trim);
    if lines.next() != Some("ply") {
        return Err(Error::Format("missing PLY magic".into()));
    }
    let mut ascii = None;
    let mut elements: Vec<Element> = Vec::new();
    for line in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.as_slice() {
            [] | ["comment", ..] | ["obj_info", ..] => {}
            ["format", "ascii", _] => ascii = Some(true),
            ["format", "binary_little_endian", _] => ascii = Some(false),
            ["format", other, _] => {
                return Err(Error::Unsupported(format!("PLY format {other}")));
            }
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| Error::Format(format!("bad element count {count}")))?,
                props: Vec::new(),
            }),
            ["property", "list", cty, ity, name] => elements
                .last_mut()
                .ok_or_else(|| Error::Format("property before element".into()))?
                .props
                .push(Property::List(name.to_string(), Scalar::parse(cty)?, Scalar::parse(ity)?)),
            ["property", ty, name] => elements
                .last_mut()
                .ok_or_else(|| Error::Format("property before element".into()))?
                .props
                .push(Property::Scalar(name.to_string(), Scalar::parse(ty)?)),
            _ => return Err(Error::Format(format!("unexpected PLY header line '{line}'"))),
        }
    }
    let ascii = ascii.ok_or_else(|| Error::Format("PLY header lacks a format line".into()))?;
    let body = &bytes[body_start..];
    let mut reader = if ascii {
        Reader::Ascii(
            std::str::from_utf8(body)
                .map_err(|_| Error::Format("ASCII PLY body is not text".into()))?
                .split_ascii_whitespace(),
        )
    } else {
        Reader::Binary(body)
    };

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for el in &elements {
        for _ in 0..el.count {
            let mut xyz = [f64::NAN; 3];
            let mut poly: Vec<i64> = Vec::new();
            for p in &el.props {
                match p {
                    Property::Scalar(name, ty) => {
                        let v = reader.next(*ty)?;
                        match name.as_str() {
                            "x" => xyz[0] = v,
                            "y" => xyz[1] = v,
                            "z" => xyz[2] = v,
                            _ => {}
                        }
                    }
                    Property::List(name, cty, ity) => {
                        let n = reader.next(*cty)?;
                        if !(n >= 0.0) {
                            return Err(Error::Format("negative PLY list length".into()));
                        }
                        let keep = name == "vertex_indices" || name == "vertex_index";
                        for _ in 0..n as usize {
                            let v = reader.next(*ity)?;
                            if keep {
                                poly.push(v as i64);
                            }
                        }
                    }
                }
            }
            match el.name.as_str() {
                "vertex" => {
                    if xyz.iter().any(|c| c.is_nan()) {
                        return Err(Error::Format("PLY vertex lacks x, y or z".into()));
                    }
                    vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
                }
                "face" => push_polygon(&mut faces, &poly)?,
                _ => {}
            }
        }
    }
    TriangleMesh::new(vertices, faces).map_err(|e| match e {
        Error::Validation(m) => Error::Format(m),
        other => other,
    })
}

fn push_polygon(faces: &mut Vec<[u32; 3]>, poly: &[i64]) -> Result<()> {
    if poly.len() < 3 {
        return Err(Error::Format(format!("face with {} vertices", poly.len())));
    }
    let idx = |v: i64| u32::try_from(v).map_err(|_| Error::Format(format!("bad vertex index {v}")));
    for i in 1..poly.len() - 1 {
        faces.push([idx(poly[0])?, idx(poly[i])?, idx(poly[i + 1])?]);
    }
    Ok(())
}

pub fn encode_obj(mesh: &TriangleMesh) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

fn parse_obj(bytes: &[u8]) -> Result<TriangleMesh> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Format("OBJ file is not text".into()))?;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut t = line.split_whitespace();
        let bad = |what: &str| Error::Format(format!("line {}: {what}", lineno + 1));
        match t.next() {
            Some("v") => {
                let c: Vec<f64> = t
                    .take(3)
                    .map(|x| x.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad vertex coordinate"))?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let n = vertices.len() as i64;
                let poly = t
                    .map(|tok| {
                        let i: i64 = tok
                            .split('/')
                            .next()
                            .unwrap_or("")
                            .parse()
                            .map_err(|_| bad("bad face index"))?;
                        // 1-based, negative counts back from the latest vertex
                        Ok(if i < 0 { n + i } else { i - 1 })
                    })
                    .collect::<Result<Vec<i64>>>()?;
                push_polygon(&mut faces, &poly).map_err(|_| bad("bad face"))?;
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, faces).map_err(|e| match e {
        Error::Validation(m) => Error::Format(m),
        other => other,
    })
}

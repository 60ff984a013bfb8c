//! STL reading and writing (binary and ASCII).
//!
//! Binary layout: 80-byte header, little-endian `u32` triangle count, then one
//! 50-byte record per triangle (normal, three vertices as `f32`, `u16`
//! attribute byte count).

use super::mesh::{Triangle, TriMesh};
use super::GeometryError;

const HEADER_LEN: usize = 80;
const RECORD_LEN: usize = 50;
const HEADER_TEXT: &[u8] = b"subprint binary stl";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StlFormat {
    Ascii,
    Binary,
}

/// Binary STL size for `n` triangles.
pub fn binary_len(n: usize) -> usize {
    HEADER_LEN + 4 + RECORD_LEN * n
}

pub fn parse_stl(bytes: &[u8]) -> Result<TriMesh, GeometryError> {
    if looks_ascii(bytes) {
        parse_ascii(bytes)
    } else {
        parse_binary(bytes)
    }
}

fn looks_ascii(bytes: &[u8]) -> bool {
    let trimmed = trim_leading_ws(bytes);
    if !trimmed.starts_with(b"solid") {
        return false;
    }
    // Some exporters put "solid" in binary headers; a consistent record count wins.
    if bytes.len() >= HEADER_LEN + 4 {
        let n = u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap()) as usize;
        if binary_len(n) == bytes.len() {
            return false;
        }
    }
    bytes.windows(5).any(|w| w == b"facet")
}

fn trim_leading_ws(bytes: &[u8]) -> &[u8] {
    let start = bytes.iter().position(|b| !b.is_ascii_whitespace()).unwrap_or(bytes.len());
    &bytes[start..]
}

fn parse_binary(bytes: &[u8]) -> Result<TriMesh, GeometryError> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(GeometryError::TruncatedFile {
            expected: HEADER_LEN + 4,
            actual: bytes.len(),
        });
    }
    let n = u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap()) as usize;
    let expected = binary_len(n);
    if bytes.len() != expected {
        return Err(GeometryError::TruncatedFile {
            expected,
            actual: bytes.len(),
        });
    }
    let mut triangles = Vec::with_capacity(n);
    for (i, rec) in bytes[HEADER_LEN + 4..].chunks_exact(RECORD_LEN).enumerate() {
        let f = |k: usize| f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().unwrap()) as f64;
        let normal = [f(0), f(1), f(2)];
        let vertices = [[f(3), f(4), f(5)], [f(6), f(7), f(8)], [f(9), f(10), f(11)]];
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFiniteVertex { triangle: i });
        }
        let normal = (normal.iter().all(|c| c.is_finite()) && normal != [0.0; 3]).then_some(normal);
        triangles.push(Triangle { vertices, normal });
    }
    Ok(TriMesh { triangles })
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |tok| (i + 1, tok)))
            .collect();
        Self { items, pos: 0 }
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or_else(|| self.items.last())
            .map_or(1, |(l, _)| *l)
    }

    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).map(|(_, t)| *t)
    }

    fn next(&mut self) -> Option<&'a str> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn expect(&mut self, word: &str) -> Result<(), GeometryError> {
        let line = self.line();
        match self.next() {
            Some(t) if t == word => Ok(()),
            Some(t) => Err(malformed(line, format!("expected `{word}`, found `{t}`"))),
            None => Err(malformed(line, format!("expected `{word}`, found end of file"))),
        }
    }

    fn number(&mut self) -> Result<f64, GeometryError> {
        let line = self.line();
        let tok = self
            .next()
            .ok_or_else(|| malformed(line, "expected a number, found end of file".into()))?;
        tok.parse::<f64>()
            .map_err(|_| malformed(line, format!("`{tok}` is not a number")))
    }

    fn point(&mut self) -> Result<[f64; 3], GeometryError> {
        Ok([self.number()?, self.number()?, self.number()?])
    }
}

fn malformed(line: usize, message: String) -> GeometryError {
    GeometryError::MalformedSyntax { line, message }
}

fn parse_ascii(bytes: &[u8]) -> Result<TriMesh, GeometryError> {
    let text = std::str::from_utf8(bytes).map_err(|e| malformed(1, format!("not UTF-8: {e}")))?;
    let mut tok = Tokens::new(text);
    tok.expect("solid")?;
    // Optional solid name runs until the first `facet`/`endsolid`.
    while let Some(t) = tok.peek() {
        if t == "facet" || t == "endsolid" {
            break;
        }
        tok.next();
    }
    let mut triangles = Vec::new();
    loop {
        let line = tok.line();
        match tok.next() {
            Some("facet") => {
                tok.expect("normal")?;
                let normal = tok.point()?;
                tok.expect("outer")?;
                tok.expect("loop")?;
                let mut vertices = [[0.0; 3]; 3];
                for v in &mut vertices {
                    tok.expect("vertex")?;
                    *v = tok.point()?;
                }
                tok.expect("endloop")?;
                tok.expect("endfacet")?;
                if vertices.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(GeometryError::NonFiniteVertex {
                        triangle: triangles.len(),
                    });
                }
                let normal = (normal.iter().all(|c| c.is_finite()) && normal != [0.0; 3]).then_some(normal);
                triangles.push(Triangle { vertices, normal });
            }
            Some("endsolid") => break,
            Some(t) => return Err(malformed(line, format!("expected `facet` or `endsolid`, found `{t}`"))),
            None => return Err(malformed(line, "missing `endsolid`".into())),
        }
    }
    Ok(TriMesh { triangles })
}

pub fn write_stl(mesh: &TriMesh, format: StlFormat) -> Result<Vec<u8>, GeometryError> {
    if mesh.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    mesh.check_finite()?;
    Ok(match format {
        StlFormat::Binary => write_binary(mesh),
        StlFormat::Ascii => write_ascii(mesh),
    })
}

fn write_binary(mesh: &TriMesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(binary_len(mesh.len()));
    let mut header = [0u8; HEADER_LEN];
    header[..HEADER_TEXT.len()].copy_from_slice(HEADER_TEXT);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.len() as u32).to_le_bytes());
    for t in &mesh.triangles {
        let n = t.normal.unwrap_or_else(|| t.geometric_normal());
        for c in n.iter().chain(t.vertices.iter().flatten()) {
            out.extend_from_slice(&(*c as f32).to_le_bytes());
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

fn write_ascii(mesh: &TriMesh) -> Vec<u8> {
    use std::fmt::Write;
    let mut s = String::from("solid subprint\n");
    for t in &mesh.triangles {
        let n = t.normal.unwrap_or_else(|| t.geometric_normal());
        let _ = writeln!(s, "  facet normal {:e} {:e} {:e}", n[0], n[1], n[2]);
        s.push_str("    outer loop\n");
        for v in &t.vertices {
            let _ = writeln!(s, "      vertex {:e} {:e} {:e}", v[0], v[1], v[2]);
        }
        s.push_str("    endloop\n  endfacet\n");
    }
    s.push_str("endsolid subprint\n");
    s.into_bytes()
}

//! Little-endian binary formats for signals (`QSH1`) and coefficient stacks (`QSTK`), PPM
//! ingestion, and generator construction by name.

use std::fs;
use std::path::Path;

use crate::atoms::{paper_exponential, paper_gaussian_f, wedge, ShearletGenerator};
use crate::error::{Error, IoError, Result};
use crate::group::ParamGrid;
use crate::quaternion::Quaternion;
use crate::signal::{Grid, QSignal};
use crate::transform::CoeffStack;

pub const QSIG_MAGIC: [u8; 4] = *b"QSH1";
pub const STACK_MAGIC: [u8; 4] = *b"QSTK";
const MAX_HALF_DIM: u32 = 16;

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn grid(&mut self, g: &Grid) {
        self.u32(g.n as u32);
        g.shape.iter().for_each(|&s| self.u32(s as u32));
        g.spacing.iter().for_each(|&v| self.f64(v));
        g.origin.iter().for_each(|&v| self.f64(v));
    }
    fn payload(&mut self, data: &[Quaternion]) {
        self.0.reserve(32 * data.len());
        for q in data {
            q.to_array().iter().for_each(|&v| self.f64(v));
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], IoError> {
        let end = self.pos.checked_add(n).ok_or(IoError::ShapeOverflow)?;
        if end > self.buf.len() {
            return Err(IoError::Truncated { expected: end as u64, actual: self.buf.len() as u64 });
        }
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn magic(&mut self, expected: [u8; 4]) -> std::result::Result<(), IoError> {
        let found: [u8; 4] = self.take(4)?.try_into().expect("four bytes");
        if found != expected {
            return Err(IoError::BadMagic { expected, found });
        }
        Ok(())
    }
    fn u32(&mut self) -> std::result::Result<u32, IoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("four bytes")))
    }
    fn f64(&mut self) -> std::result::Result<f64, IoError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("eight bytes")))
    }
    fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, IoError> {
        (0..n).map(|_| self.f64()).collect()
    }
    fn str(&mut self) -> std::result::Result<String, IoError> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| IoError::InvalidHeader("string is not UTF-8".into()))
    }
    fn grid(&mut self) -> std::result::Result<Grid, IoError> {
        let n = self.u32()?;
        if n == 0 || n > MAX_HALF_DIM {
            return Err(IoError::InvalidHeader(format!("half-dimension {n} out of range")));
        }
        let d = 2 * n as usize;
        let shape: Vec<usize> = (0..d).map(|_| self.u32().map(|v| v as usize)).collect::<std::result::Result<_, _>>()?;
        shape.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s).and_then(|v| v.checked_mul(32))).ok_or(IoError::ShapeOverflow)?;
        let spacing = self.f64s(d)?;
        let origin = self.f64s(d)?;
        Grid::new(n as usize, shape, spacing, origin).map_err(|e| IoError::InvalidHeader(e.to_string()))
    }
    /// Checks the whole remaining payload is present before decoding.
    fn expect_remaining(&self, bytes: u64) -> std::result::Result<(), IoError> {
        let expected = (self.pos as u64).checked_add(bytes).ok_or(IoError::ShapeOverflow)?;
        if (self.buf.len() as u64) < expected {
            return Err(IoError::Truncated { expected, actual: self.buf.len() as u64 });
        }
        Ok(())
    }
    fn payload(&mut self, count: usize) -> std::result::Result<Vec<Quaternion>, IoError> {
        (0..count).map(|_| Ok(Quaternion::new(self.f64()?, self.f64()?, self.f64()?, self.f64()?))).collect()
    }
    fn finish(&self) -> std::result::Result<(), IoError> {
        if self.pos != self.buf.len() {
            return Err(IoError::InvalidHeader(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

pub fn encode_qsig(f: &QSignal) -> Vec<u8> {
    let mut w = Writer(QSIG_MAGIC.to_vec());
    w.grid(&f.grid);
    w.payload(&f.data);
    w.0
}

pub fn decode_qsig(bytes: &[u8]) -> Result<QSignal> {
    let mut r = Reader { buf: bytes, pos: 0 };
    r.magic(QSIG_MAGIC)?;
    let grid = r.grid()?;
    r.expect_remaining(32 * grid.len() as u64)?;
    let data = r.payload(grid.len())?;
    r.finish()?;
    Ok(QSignal { grid, data })
}

pub fn write_qsig(path: impl AsRef<Path>, f: &QSignal) -> Result<()> {
    fs::write(path, encode_qsig(f)).map_err(|e| Error::Io(e.into()))
}

pub fn read_qsig(path: impl AsRef<Path>) -> Result<QSignal> {
    decode_qsig(&fs::read(path).map_err(|e| Error::Io(e.into()))?)
}

pub fn encode_stack(c: &CoeffStack) -> Vec<u8> {
    let mut w = Writer(STACK_MAGIC.to_vec());
    let pg = &c.pg;
    w.u32(pg.n as u32);
    w.u32(pg.a_nodes.len() as u32);
    pg.a_nodes.iter().chain(&pg.a_cells).for_each(|&v| w.f64(v));
    w.u32(pg.s_nodes.len() as u32);
    pg.s_nodes.iter().flatten().for_each(|&v| w.f64(v));
    w.f64(pg.s_cell);
    pg.weights.iter().for_each(|&v| w.f64(v));
    w.f64(c.c_grid);
    w.str(&c.generator);
    w.u32(c.params.len() as u32);
    for (k, v) in &c.params {
        w.str(k);
        w.f64(*v);
    }
    w.u32(c.border as u32);
    w.grid(&c.grid);
    c.slices.iter().for_each(|s| w.payload(s));
    w.0
}

pub fn decode_stack(bytes: &[u8]) -> Result<CoeffStack> {
    let mut r = Reader { buf: bytes, pos: 0 };
    r.magic(STACK_MAGIC)?;
    let n = r.u32()? as usize;
    if n == 0 || n > MAX_HALF_DIM as usize {
        return Err(IoError::InvalidHeader(format!("half-dimension {n} out of range")).into());
    }
    let n_a = r.u32()? as usize;
    r.expect_remaining(16 * n_a as u64)?;
    let a_nodes = r.f64s(n_a)?;
    let a_cells = r.f64s(n_a)?;
    let n_s = r.u32()? as usize;
    let per = 2 * n - 1;
    r.expect_remaining(8 * (n_s as u64) * per as u64)?;
    let s_nodes: Vec<Vec<f64>> = (0..n_s).map(|_| r.f64s(per)).collect::<std::result::Result<_, _>>()?;
    let s_cell = r.f64()?;
    let slices = n_a.checked_mul(n_s).ok_or(IoError::ShapeOverflow)?;
    r.expect_remaining(8 * slices as u64)?;
    let weights = r.f64s(slices)?;
    let c_grid = r.f64()?;
    let generator = r.str()?;
    let n_params = r.u32()? as usize;
    let params = (0..n_params).map(|_| Ok((r.str()?, r.f64()?))).collect::<std::result::Result<Vec<_>, IoError>>()?;
    let border = r.u32()? as usize;
    let grid = r.grid()?;
    if grid.n != n {
        return Err(IoError::InvalidHeader("stack and grid disagree on n".into()).into());
    }
    let bytes_per = 32 * grid.len() as u64;
    r.expect_remaining(bytes_per.checked_mul(slices as u64).ok_or(IoError::ShapeOverflow)?)?;
    let data = (0..slices).map(|_| r.payload(grid.len())).collect::<std::result::Result<Vec<_>, _>>()?;
    r.finish()?;
    let mut pg = ParamGrid::from_parts(n, a_nodes, a_cells, s_nodes, s_cell).map_err(|e| IoError::InvalidHeader(e.to_string()))?;
    pg.weights = weights;
    Ok(CoeffStack { pg, grid, slices: data, generator, params, c_grid, border })
}

pub fn write_stack(path: impl AsRef<Path>, c: &CoeffStack) -> Result<()> {
    fs::write(path, encode_stack(c)).map_err(|e| Error::Io(e.into()))
}

pub fn read_stack(path: impl AsRef<Path>) -> Result<CoeffStack> {
    decode_stack(&fs::read(path).map_err(|e| Error::Io(e.into()))?)
}

/// Width-by-height 8-bit RGB raster, row-major, three bytes per pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Pure-quaternion encoding `i·R + j·G + k·B` (channels scaled to [0, 1]) on a centred grid with
/// axis 0 running along the width.
pub fn ingest_rgb(img: &RgbImage, spacing: f64) -> Result<QSignal> {
    if img.width < 2 || img.height < 2 {
        return Err(IoError::NotRgb(format!("image must be at least 2x2, got {}x{}", img.width, img.height)).into());
    }
    if img.pixels.len() != 3 * img.width * img.height {
        return Err(IoError::NotRgb(format!("expected {} bytes of RGB data, got {}", 3 * img.width * img.height, img.pixels.len())).into());
    }
    let grid = Grid::centered_with(1, vec![img.width, img.height], vec![spacing; 2])?;
    let mut data = Vec::with_capacity(grid.len());
    for col in 0..img.width {
        for row in 0..img.height {
            let p = &img.pixels[3 * (row * img.width + col)..][..3];
            data.push(Quaternion::new(0.0, p[0] as f64 / 255.0, p[1] as f64 / 255.0, p[2] as f64 / 255.0));
        }
    }
    Ok(QSignal { grid, data })
}

/// Binary PPM (`P6`) with an 8-bit maximum value.
pub fn parse_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let bad = |m: &str| Error::from(IoError::NotRgb(m.into()));
    if !bytes.starts_with(b"P6") {
        return Err(bad("not a binary PPM (P6) image"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(bad("PPM header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos]).ok().and_then(|s| s.parse().ok()).ok_or_else(|| bad("malformed PPM header"))?;
    }
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(bad("malformed PPM header"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit PPM images are supported"));
    }
    let len = width.checked_mul(height).and_then(|v| v.checked_mul(3)).ok_or_else(|| bad("PPM dimensions overflow"))?;
    let body = bytes.get(pos..pos + len).ok_or_else(|| bad("PPM pixel data is truncated"))?;
    let pixels = body.iter().map(|&v| ((v as usize * 255 + maxval / 2) / maxval) as u8).collect();
    Ok(RgbImage { width, height, pixels })
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<RgbImage> {
    parse_ppm(&fs::read(path).map_err(|e| Error::Io(e.into()))?)
}

/// Bundled generators by name: `paper-exponential`, `paper-gaussian-f` (`gamma`), `wedge`
/// (`octaves`, `slope`). Any `gain` entries rescale the result in order.
pub fn make_generator(name: &str, n: usize, params: &[(String, f64)]) -> Result<ShearletGenerator> {
    let allowed: &[&str] = match name {
        "paper-exponential" => &[],
        "paper-gaussian-f" => &["gamma"],
        "wedge" => &["octaves", "slope"],
        _ => return Err(Error::InvalidParameter(format!("unknown generator `{name}`"))),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| k != "gain" && !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParameter(format!("generator `{name}` takes no parameter `{k}`")));
    }
    let get = |key: &str, default: f64| params.iter().rev().find(|(k, _)| k == key).map_or(default, |p| p.1);
    let mut psi = match name {
        "paper-exponential" => paper_exponential(n)?,
        "paper-gaussian-f" => paper_gaussian_f(n, get("gamma", 1.0))?,
        _ => wedge(n, get("octaves", 1.0), get("slope", 1.0))?,
    };
    for (_, g) in params.iter().filter(|(k, _)| k == "gain") {
        if !(g.is_finite() && *g != 0.0) {
            return Err(Error::InvalidParameter(format!("gain must be finite and nonzero, got {g}")));
        }
        psi = psi.scaled(*g);
    }
    Ok(psi)
}

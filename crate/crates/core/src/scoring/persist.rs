//! Binary model files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic           4 bytes  "DPBM"
//! version         u16
//! paradigm        u8       0 graph, 1 transition, 2 seqlab
//! feature bits    u8
//! label count     u32
//!   label         u32 byte length, UTF-8 bytes
//! weight count    u32      number of non-zero weights
//!   entry         u32 feature id (strictly increasing), f64 weight
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::model::{LinearModel, Paradigm};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"DPBM";
pub const FORMAT_VERSION: u16 = 1;

pub fn write_model<W: Write>(model: &LinearModel, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&[model.paradigm().tag(), model.feature_space_bits()])?;
    out.write_all(&(model.labels().len() as u32).to_le_bytes())?;
    for label in model.labels() {
        out.write_all(&(label.len() as u32).to_le_bytes())?;
        out.write_all(label.as_bytes())?;
    }
    let nonzero: Vec<(u32, f64)> = model
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(i, &w)| (i as u32, w))
        .collect();
    out.write_all(&(nonzero.len() as u32).to_le_bytes())?;
    for (id, w) in nonzero {
        out.write_all(&id.to_le_bytes())?;
        out.write_all(&w.to_le_bytes())?;
    }
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(Error::Format(format!("truncated model file at byte {}", self.pos)));
        }
        let slice = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn read_model<R: Read>(mut input: R) -> Result<LinearModel> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut cur = Cursor { bytes: &bytes, pos: 0 };

    if cur.take(4).ok() != Some(&MAGIC[..]) {
        return Err(Error::Format("not a model file (bad magic bytes)".into()));
    }
    let version = cur.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported model format version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let tag = cur.u8()?;
    let paradigm = Paradigm::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown paradigm tag {tag}")))?;
    let bits = cur.u8()?;
    super::model::check_bits(bits).map_err(|e| Error::Format(e.to_string()))?;

    let label_count = cur.u32()? as usize;
    let mut labels = Vec::with_capacity(label_count.min(1 << 16));
    for _ in 0..label_count {
        let len = cur.u32()? as usize;
        let raw = cur.take(len)?;
        let label = std::str::from_utf8(raw).map_err(|_| Error::Format("label is not UTF-8".into()))?;
        labels.push(label.to_owned());
    }

    let size = 1usize << bits;
    let mut weights = vec![0.0; size];
    let count = cur.u32()? as usize;
    let mut last: Option<u32> = None;
    for _ in 0..count {
        let id = cur.u32()?;
        let w = cur.f64()?;
        if id as usize >= size || last.is_some_and(|l| id <= l) {
            return Err(Error::Format(format!("bad weight id {id}")));
        }
        weights[id as usize] = w;
        last = Some(id);
    }
    if cur.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after weights".into()));
    }
    LinearModel::new(paradigm, bits, labels, weights).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_model(model: &LinearModel, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<LinearModel> {
    let file = fs::File::open(path)?;
    read_model(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LinearModel {
        let mut w = vec![0.0; 256];
        w[3] = 1.5;
        w[200] = -0.25;
        w[255] = f64::MIN_POSITIVE;
        LinearModel::new(Paradigm::Transition, 8, vec!["nsubj".into(), "obj".into()], w).unwrap()
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let mut buf = Vec::new();
        write_model(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], MAGIC);
        assert_eq!(read_model(&buf[..]).unwrap(), m);
    }

    #[test]
    fn rejects_bad_files() {
        let mut buf = Vec::new();
        write_model(&sample(), &mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_model(&bad[..]), Err(Error::Format(m)) if m.contains("magic")));

        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(matches!(read_model(&bad[..]), Err(Error::Format(m)) if m.contains("version")));

        for cut in [2, 7, 12, buf.len() - 1] {
            assert!(matches!(read_model(&buf[..cut]), Err(Error::Format(_))), "cut at {cut}");
        }

        let mut bad = buf.clone();
        bad.push(0);
        assert!(read_model(&bad[..]).is_err());
    }

    #[test]
    fn empty_path_is_io_error() {
        assert!(matches!(save_model(&sample(), Path::new("")), Err(Error::Io(_))));
        assert!(matches!(load_model(Path::new("")), Err(Error::Io(_))));
    }
}

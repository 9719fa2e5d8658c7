//! Named-tensor container for checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic  "QRVOS1"                               6 bytes
//! count  u32                                    number of entries
//! entry  u32 name_len | name (UTF-8)
//!        u8  dtype code (0 = f32, 1 = f64)
//!        u8  ndim | u32 extents[ndim]
//!        u64 payload bytes | raw little-endian elements
//! ```
//!
//! Round-trips are bit-exact: element bytes are written verbatim.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, TensorError};
use crate::scalar::{Dtype, Scalar};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 6] = b"QRVOS1";

pub fn save<'a, S, I>(path: &Path, entries: I) -> Result<()>
where
    S: Scalar,
    I: IntoIterator<Item = (&'a str, &'a Tensor<S>)>,
{
    let entries: Vec<(&str, &Tensor<S>)> = entries.into_iter().collect();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(entries.len() as u32).to_le_bytes())?;
    for (name, t) in entries {
        let name_bytes = name.as_bytes();
        w.write_all(&(name_bytes.len() as u32).to_le_bytes())?;
        w.write_all(name_bytes)?;
        w.write_all(&[S::DTYPE as u8])?;
        let shape = t.shape();
        w.write_all(&[shape.len() as u8])?;
        for &d in shape {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        let width = S::DTYPE.byte_width();
        let mut payload = Vec::with_capacity(t.numel() * width);
        for v in t.data().iter() {
            v.write_le(&mut payload);
        }
        w.write_all(&(payload.len() as u64).to_le_bytes())?;
        w.write_all(&payload)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load<S: Scalar>(path: &Path) -> Result<Vec<(String, Tensor<S>)>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(TensorError::Checkpoint(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let count = read_u32(&mut r)? as usize;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let name_len = read_u32(&mut r)? as usize;
        let mut name_bytes = vec![0u8; name_len];
        r.read_exact(&mut name_bytes)?;
        let name = String::from_utf8(name_bytes)
            .map_err(|e| TensorError::Checkpoint(format!("entry {i}: name not UTF-8: {e}")))?;
        let mut code = [0u8; 1];
        r.read_exact(&mut code)?;
        let dtype = Dtype::from_code(code[0])
            .ok_or_else(|| TensorError::Checkpoint(format!("entry {name}: bad dtype {}", code[0])))?;
        if dtype != S::DTYPE {
            return Err(TensorError::Checkpoint(format!(
                "entry {name}: container holds {dtype:?}, requested {:?}",
                S::DTYPE
            )));
        }
        let mut ndim = [0u8; 1];
        r.read_exact(&mut ndim)?;
        let mut shape = Vec::with_capacity(ndim[0] as usize);
        for _ in 0..ndim[0] {
            shape.push(read_u32(&mut r)? as usize);
        }
        let nbytes = read_u64(&mut r)? as usize;
        let width = dtype.byte_width();
        let numel: usize = shape.iter().product();
        if nbytes != numel * width {
            return Err(TensorError::Checkpoint(format!(
                "entry {name}: payload {nbytes} bytes does not match shape {shape:?}"
            )));
        }
        let mut payload = vec![0u8; nbytes];
        r.read_exact(&mut payload)?;
        let data: Vec<S> = payload.chunks_exact(width).map(S::read_le).collect();
        out.push((name, Tensor::from_vec(data, &shape)?));
    }
    Ok(out)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

//! Binary checkpoint: magic, version u32, hidden u32, sequence length u32,
//! parameter count u64, then the parameters as little-endian f64.

use std::io::{Read, Write};

use super::{GruError, GruModel};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"KUNIEGRU";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(model: &GruModel, mut w: W) -> Result<(), GruError> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(model.hidden as u32).to_le_bytes())?;
    w.write_all(&(model.sequence_length as u32).to_le_bytes())?;
    w.write_all(&(model.params.len() as u64).to_le_bytes())?;
    for p in &model.params {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

/// A short read is a malformed file, not an I/O failure.
fn fill<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), GruError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => GruError::Checkpoint("truncated".into()),
        _ => e.into(),
    })
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<GruModel, GruError> {
    let mut magic = [0u8; 8];
    fill(&mut r, &mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(GruError::Checkpoint("bad magic".into()));
    }
    let mut u = [0u8; 4];
    let mut read_u32 = |r: &mut R| -> Result<u32, GruError> {
        fill(r, &mut u)?;
        Ok(u32::from_le_bytes(u))
    };
    let version = read_u32(&mut r)?;
    if version != CHECKPOINT_VERSION {
        return Err(GruError::Checkpoint(format!("unsupported version {version}")));
    }
    let hidden = read_u32(&mut r)? as usize;
    let seq = read_u32(&mut r)? as usize;
    let mut c = [0u8; 8];
    fill(&mut r, &mut c)?;
    let count = u64::from_le_bytes(c) as usize;
    if hidden == 0 || count != GruModel::param_count(hidden) {
        return Err(GruError::Checkpoint(format!("{count} parameters do not fit {hidden} hidden units")));
    }
    let mut params = Vec::with_capacity(count);
    for _ in 0..count {
        fill(&mut r, &mut c)?;
        params.push(f64::from_le_bytes(c));
    }
    GruModel::from_params(hidden, seq, params)
}

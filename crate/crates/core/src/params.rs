//! Named parameter storage and the on-disk tensor container.
//!
//! Container layout (all integers and floats little-endian):
//!
//! ```text
//! magic     4 bytes   "LSNT"
//! version   u32       currently 1
//! meta_len  u32       length of the metadata block
//! meta      bytes     UTF-8 JSON describing the model (config, vocabulary)
//! count     u32       number of tensors
//! repeated count times:
//!   name_len u32, name (UTF-8)
//!   ndim u32, dims u64 × ndim
//!   data f64 × product(dims)
//! ```
//!
//! Tensors are written in name order, so identical stores produce identical bytes.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::numerics::{Tape, Tensor, Var};

pub const CONTAINER_MAGIC: &[u8; 4] = b"LSNT";
pub const CONTAINER_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    params: BTreeMap<String, Tensor>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Tensor) {
        self.params.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.params.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.params.get_mut(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor)> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Tensor)> {
        self.params.iter_mut()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.params.keys()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar values.
    pub fn num_values(&self) -> usize {
        self.params.values().map(Tensor::numel).sum()
    }

    /// Places every parameter on the tape as a gradient-tracked leaf.
    pub fn bind(&self, tape: &mut Tape) -> Bound {
        self.bind_with(tape, true)
    }

    /// Places every parameter on the tape without gradient tracking.
    pub fn bind_frozen(&self, tape: &mut Tape) -> Bound {
        self.bind_with(tape, false)
    }

    fn bind_with(&self, tape: &mut Tape, track: bool) -> Bound {
        let vars = self
            .params
            .iter()
            .map(|(k, v)| {
                let var = if track {
                    tape.param(v.clone())
                } else {
                    tape.constant(v.clone())
                };
                (k.clone(), var)
            })
            .collect();
        Bound { vars }
    }

    pub fn write_container<W: Write>(&self, mut w: W, metadata: &str) -> Result<()> {
        w.write_all(CONTAINER_MAGIC)?;
        w.write_all(&CONTAINER_VERSION.to_le_bytes())?;
        write_u32(&mut w, metadata.len())?;
        w.write_all(metadata.as_bytes())?;
        write_u32(&mut w, self.params.len())?;
        for (name, t) in &self.params {
            write_u32(&mut w, name.len())?;
            w.write_all(name.as_bytes())?;
            write_u32(&mut w, t.shape().len())?;
            for &d in t.shape() {
                w.write_all(&(d as u64).to_le_bytes())?;
            }
            for &v in t.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a container, returning the store and its metadata block.
    pub fn read_container<R: Read>(mut r: R) -> Result<(Self, String)> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Format("truncated container header".into()))?;
        if &magic != CONTAINER_MAGIC {
            return Err(Error::Format("not a tensor container (bad magic)".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CONTAINER_VERSION {
            return Err(Error::Format(format!(
                "unsupported container version {version}, expected {CONTAINER_VERSION}"
            )));
        }
        let meta_len = read_u32(&mut r)? as usize;
        let mut meta = vec![0u8; meta_len];
        r.read_exact(&mut meta).map_err(truncated)?;
        let meta =
            String::from_utf8(meta).map_err(|_| Error::Format("metadata is not UTF-8".into()))?;
        let count = read_u32(&mut r)?;
        let mut store = ParamStore::new();
        for _ in 0..count {
            let name_len = read_u32(&mut r)? as usize;
            let mut name = vec![0u8; name_len];
            r.read_exact(&mut name).map_err(truncated)?;
            let name = String::from_utf8(name)
                .map_err(|_| Error::Format("tensor name is not UTF-8".into()))?;
            let ndim = read_u32(&mut r)? as usize;
            let mut shape = Vec::with_capacity(ndim);
            for _ in 0..ndim {
                let mut b = [0u8; 8];
                r.read_exact(&mut b).map_err(truncated)?;
                shape.push(u64::from_le_bytes(b) as usize);
            }
            let numel: usize = shape.iter().product();
            let mut data = Vec::with_capacity(numel);
            for _ in 0..numel {
                let mut b = [0u8; 8];
                r.read_exact(&mut b).map_err(truncated)?;
                data.push(f64::from_le_bytes(b));
            }
            store.insert(name, Tensor::new(shape, data)?);
        }
        Ok((store, meta))
    }
}

fn truncated(_: std::io::Error) -> Error {
    Error::Format("truncated container".into())
}

fn write_u32<W: Write>(w: &mut W, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Format("length exceeds u32".into()))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

/// Tape handles for a bound [`ParamStore`].
#[derive(Clone, Debug)]
pub struct Bound {
    vars: BTreeMap<String, Var>,
}

impl Bound {
    pub fn get(&self, name: &str) -> Result<Var> {
        self.vars
            .get(name)
            .copied()
            .ok_or_else(|| Error::Contract(format!("missing parameter `{name}`")))
    }

    /// Gradients for every bound parameter after `backward` (zeros when untouched).
    pub fn grads(&self, tape: &Tape) -> BTreeMap<String, Tensor> {
        self.vars
            .iter()
            .map(|(k, &v)| {
                let g = tape
                    .grad(v)
                    .cloned()
                    .unwrap_or_else(|| Tensor::zeros(tape.shape(v)));
                (k.clone(), g)
            })
            .collect()
    }
}

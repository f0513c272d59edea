//! Versioned binary checkpoint container.
//!
//! Layout (all integers little-endian):
//! magic `VDCT`, format version u32, config (seven u64 dims, dropout f64,
//! seed u64), vocab (min_freq/max_size u64, token count u32, length-prefixed
//! UTF-8 tokens), freeze flags (count u32, one byte each), then every tensor
//! in visit order as `ndim u8, dims u32.., values f64..`.
//!
//! The encoding has no maps or timestamps, so save -> load -> save is
//! byte-identical.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::params::ParamTensors;
use super::{ModelConfig, ModelError, ModelParams};
use crate::corpus::Vocab;

const MAGIC: &[u8; 4] = b"VDCT";
const VERSION: u32 = 1;

/// A trained or initialized model with the vocabulary it was encoded against.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub vocab: Vocab,
}

impl Checkpoint {
    pub fn new(params: ModelParams, vocab: Vocab) -> Self {
        Checkpoint { params, vocab }
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let io = |source| ModelError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        self.write(&mut w).map_err(io)
    }

    fn write<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let cfg = &self.params.config;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        for v in [
            cfg.vocab_size,
            cfg.max_len,
            cfg.d_model,
            cfg.n_layers,
            cfg.n_heads,
            cfg.d_ff,
            cfg.d_head_hidden,
        ] {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        w.write_all(&cfg.dropout_rate.to_le_bytes())?;
        w.write_all(&cfg.seed.to_le_bytes())?;

        w.write_all(&(self.vocab.min_freq as u64).to_le_bytes())?;
        w.write_all(&(self.vocab.max_size as u64).to_le_bytes())?;
        w.write_all(&(self.vocab.len() as u32).to_le_bytes())?;
        for token in self.vocab.tokens() {
            let bytes = token.as_bytes();
            w.write_all(&(bytes.len() as u32).to_le_bytes())?;
            w.write_all(bytes)?;
        }

        let flags = self.params.frozen_flags();
        w.write_all(&(flags.len() as u32).to_le_bytes())?;
        for f in flags {
            w.write_all(&[u8::from(*f)])?;
        }

        let shapes = self.params.tensors.tensor_shapes();
        let slices = self.params.tensors.flat_views();
        w.write_all(&(slices.len() as u32).to_le_bytes())?;
        for (shape, data) in shapes.iter().zip(slices) {
            w.write_all(&[shape.len() as u8])?;
            for dim in shape {
                w.write_all(&(*dim as u32).to_le_bytes())?;
            }
            for v in data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let io = |source| ModelError::Io {
            path: path.display().to_string(),
            source,
        };
        let corrupt = |reason: String| ModelError::CorruptCheckpoint {
            path: path.display().to_string(),
            reason,
        };
        let mut r = BufReader::new(File::open(path).map_err(io)?);

        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(corrupt("bad magic".into()));
        }
        let version = read_u32(&mut r).map_err(io)?;
        if version != VERSION {
            return Err(corrupt(format!("unsupported version {version}")));
        }

        let mut dims = [0u64; 7];
        for d in dims.iter_mut() {
            *d = read_u64(&mut r).map_err(io)?;
        }
        let dropout_rate = f64::from_le_bytes(read_bytes::<8>(&mut r).map_err(io)?);
        let seed = read_u64(&mut r).map_err(io)?;
        let config = ModelConfig {
            vocab_size: dims[0] as usize,
            max_len: dims[1] as usize,
            d_model: dims[2] as usize,
            n_layers: dims[3] as usize,
            n_heads: dims[4] as usize,
            d_ff: dims[5] as usize,
            d_head_hidden: dims[6] as usize,
            dropout_rate,
            seed,
        };
        config
            .validate()
            .map_err(|e| corrupt(format!("invalid stored config: {e}")))?;

        let min_freq = read_u64(&mut r).map_err(io)? as usize;
        let max_size = read_u64(&mut r).map_err(io)? as usize;
        let n_tokens = read_u32(&mut r).map_err(io)? as usize;
        if n_tokens != config.vocab_size {
            return Err(corrupt(format!(
                "vocab holds {n_tokens} tokens but config says {}",
                config.vocab_size
            )));
        }
        let mut tokens = Vec::with_capacity(n_tokens);
        for _ in 0..n_tokens {
            let len = read_u32(&mut r).map_err(io)? as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf).map_err(io)?;
            tokens.push(String::from_utf8(buf).map_err(|e| corrupt(e.to_string()))?);
        }
        let vocab = Vocab::from_tokens(tokens, min_freq, max_size);

        let n_flags = read_u32(&mut r).map_err(io)? as usize;
        if n_flags != config.n_layers + 2 {
            return Err(corrupt(format!("{n_flags} freeze flags for {} groups", config.n_layers + 2)));
        }
        let mut flags = Vec::with_capacity(n_flags);
        for _ in 0..n_flags {
            flags.push(read_bytes::<1>(&mut r).map_err(io)?[0] != 0);
        }

        let mut tensors = ParamTensors::zeros(&config);
        let expected_shapes = tensors.tensor_shapes();
        let n_tensors = read_u32(&mut r).map_err(io)? as usize;
        if n_tensors != expected_shapes.len() {
            return Err(corrupt(format!(
                "{n_tensors} tensors stored, {} expected",
                expected_shapes.len()
            )));
        }
        {
            let mut slices = tensors.flat_views_mut();
            for (expected, slice) in expected_shapes.iter().zip(slices.iter_mut()) {
                let ndim = read_bytes::<1>(&mut r).map_err(io)?[0] as usize;
                let mut shape = Vec::with_capacity(ndim);
                for _ in 0..ndim {
                    shape.push(read_u32(&mut r).map_err(io)? as usize);
                }
                if &shape != expected {
                    return Err(corrupt(format!(
                        "tensor shape {shape:?} does not match expected {expected:?}"
                    )));
                }
                for v in slice.iter_mut() {
                    *v = f64::from_le_bytes(read_bytes::<8>(&mut r).map_err(io)?);
                }
            }
        }

        let mut trailing = Vec::new();
        r.read_to_end(&mut trailing).map_err(io)?;
        if !trailing.is_empty() {
            return Err(corrupt(format!("{} trailing bytes", trailing.len())));
        }

        let params = ModelParams::from_parts(config, tensors, flags);
        Ok(Checkpoint { params, vocab })
    }
}

fn read_bytes<const N: usize>(r: &mut impl Read) -> std::io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    Ok(u32::from_le_bytes(read_bytes::<4>(r)?))
}

fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    Ok(u64::from_le_bytes(read_bytes::<8>(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocab, Document, Label};
    use crate::model::init_params;

    fn fixture() -> Checkpoint {
        let docs = vec![
            Document::new("1", "a b c d", Label::Real),
            Document::new("2", "c d e f", Label::Fake),
        ];
        let vocab = build_vocab(&docs, 1, 50).unwrap();
        let cfg = ModelConfig {
            vocab_size: vocab.len(),
            max_len: 6,
            d_model: 8,
            n_layers: 2,
            n_heads: 2,
            d_ff: 12,
            d_head_hidden: 5,
            dropout_rate: 0.1,
            seed: 21,
        };
        let mut params = init_params(&cfg).unwrap();
        params.set_frozen(0, true);
        Checkpoint::new(params, vocab)
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let ckpt = fixture();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.ckpt");
        let p2 = dir.path().join("b.ckpt");
        ckpt.save(&p1).unwrap();
        let loaded = Checkpoint::load(&p1).unwrap();
        loaded.save(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        assert_eq!(loaded.params, ckpt.params);
        assert_eq!(loaded.vocab.tokens(), ckpt.vocab.tokens());
        assert!(loaded.params.is_frozen(0));
        assert!(!loaded.params.is_frozen(1));
    }

    #[test]
    fn rejects_corrupt_magic() {
        let ckpt = fixture();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.ckpt");
        ckpt.save(&p).unwrap();
        let mut bytes = std::fs::read(&p).unwrap();
        bytes[0] = b'X';
        std::fs::write(&p, bytes).unwrap();
        assert!(matches!(
            Checkpoint::load(&p),
            Err(ModelError::CorruptCheckpoint { .. })
        ));
    }

    #[test]
    fn rejects_truncated_file() {
        let ckpt = fixture();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.ckpt");
        ckpt.save(&p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        std::fs::write(&p, &bytes[..bytes.len() - 9]).unwrap();
        assert!(Checkpoint::load(&p).is_err());
    }
}

//! Single-file binary model checkpoints.
//!
//! Layout (little-endian throughout): magic `SVCP`, format version u32,
//! a length-prefixed config echo (UTF-8 text), length-prefixed class
//! names, the vocabulary (word bytes + count per entry), model geometry,
//! then each tensor as `name, rows, cols` followed by rows*cols
//! single-precision floats — the same float convention as the binary
//! vector format.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::classifier::model::{CnnModel, FilterBank};
use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::numerics::scalar::Scalar;
use crate::text::vocab::{Vocabulary, RESERVED};

const MAGIC: &[u8; 4] = b"SVCP";
const VERSION: u32 = 1;

pub struct Checkpoint {
    pub model: CnnModel<f32>,
    pub vocab: Vocabulary,
    pub class_names: Vec<String>,
    pub config_echo: String,
}

pub fn save_checkpoint<T: Scalar>(
    path: &Path,
    model: &CnnModel<T>,
    vocab: &Vocabulary,
    class_names: &[String],
    config_echo: &str,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    write_bytes(&mut w, config_echo.as_bytes())?;

    w.write_all(&(class_names.len() as u64).to_le_bytes())?;
    for name in class_names {
        write_bytes(&mut w, name.as_bytes())?;
    }

    w.write_all(&(vocab.word_count() as u64).to_le_bytes())?;
    for (id, count) in vocab.word_ids() {
        write_bytes(&mut w, vocab.token_of(id).as_bytes())?;
        w.write_all(&count.to_le_bytes())?;
    }

    w.write_all(&(model.max_len as u64).to_le_bytes())?;
    w.write_all(&(model.num_classes as u64).to_le_bytes())?;

    let tensor_count = 2 * model.filters.len() + 2;
    w.write_all(&(tensor_count as u32).to_le_bytes())?;
    write_tensor(&mut w, "embedding", &model.embedding)?;
    for bank in &model.filters {
        write_tensor(&mut w, &format!("filters_w{}", bank.width), &bank.weights)?;
        let bias = Matrix::from_vec(1, bank.bias.len(), bank.bias.clone())?;
        write_tensor(&mut w, &format!("bias_w{}", bank.width), &bias)?;
    }
    write_tensor(&mut w, "fc_weight", &model.fc_weight)?;
    let fc_bias = Matrix::from_vec(1, model.fc_bias.len(), model.fc_bias.clone())?;
    write_tensor(&mut w, "fc_bias", &fc_bias)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| bad(0, "file too short for magic"))?;
    if &magic != MAGIC {
        return Err(bad(0, "not a model checkpoint (bad magic)"));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(bad(4, &format!("unsupported checkpoint version {version}")));
    }
    let config_echo = String::from_utf8_lossy(&read_bytes(&mut r)?).into_owned();

    let class_count = read_u64(&mut r)? as usize;
    let mut class_names = Vec::with_capacity(class_count);
    for _ in 0..class_count {
        class_names.push(String::from_utf8_lossy(&read_bytes(&mut r)?).into_owned());
    }

    let word_count = read_u64(&mut r)? as usize;
    let mut counts: HashMap<String, u64> = HashMap::with_capacity(word_count);
    let mut order: Vec<String> = Vec::with_capacity(word_count);
    for _ in 0..word_count {
        let word = String::from_utf8_lossy(&read_bytes(&mut r)?).into_owned();
        let count = read_u64(&mut r)?;
        order.push(word.clone());
        counts.insert(word, count);
    }
    let vocab = Vocabulary::from_counts(counts, 0)?;
    // Stored order must survive the round trip, otherwise embedding rows
    // would attach to the wrong words.
    for (i, word) in order.iter().enumerate() {
        if vocab.token_of((i + RESERVED) as u32) != word {
            return Err(bad(0, "vocabulary order mismatch in checkpoint"));
        }
    }

    let max_len = read_u64(&mut r)? as usize;
    let num_classes = read_u64(&mut r)? as usize;

    let tensor_count = read_u32(&mut r)? as usize;
    let mut tensors: Vec<(String, Matrix<f32>)> = Vec::with_capacity(tensor_count);
    for _ in 0..tensor_count {
        tensors.push(read_tensor(&mut r)?);
    }
    let embedding = take(&mut tensors, "embedding")?;
    let fc_weight = take(&mut tensors, "fc_weight")?;
    let fc_bias = take(&mut tensors, "fc_bias")?.data().to_vec();
    let mut filters = Vec::new();
    let names: Vec<String> = tensors.iter().map(|(n, _)| n.clone()).collect();
    for name in names {
        if let Some(width_str) = name.strip_prefix("filters_w") {
            let width: usize = width_str
                .parse()
                .map_err(|_| bad(0, &format!("bad filter tensor name {name:?}")))?;
            let weights = take(&mut tensors, &name)?;
            let bias = take(&mut tensors, &format!("bias_w{width}"))?.data().to_vec();
            filters.push(FilterBank {
                width,
                weights,
                bias,
            });
        }
    }
    filters.sort_by_key(|b| b.width);
    if filters.is_empty() {
        return Err(bad(0, "checkpoint has no filter banks"));
    }

    Ok(Checkpoint {
        model: CnnModel {
            embedding,
            filters,
            fc_weight,
            fc_bias,
            max_len,
            num_classes,
        },
        vocab,
        class_names,
        config_echo,
    })
}

fn bad(offset: u64, message: &str) -> Error {
    Error::Format {
        offset,
        message: message.to_string(),
    }
}

fn take(tensors: &mut Vec<(String, Matrix<f32>)>, name: &str) -> Result<Matrix<f32>> {
    let pos = tensors
        .iter()
        .position(|(n, _)| n == name)
        .ok_or_else(|| bad(0, &format!("checkpoint missing tensor {name:?}")))?;
    Ok(tensors.remove(pos).1)
}

fn write_bytes<W: Write>(w: &mut W, bytes: &[u8]) -> Result<()> {
    w.write_all(&(bytes.len() as u64).to_le_bytes())?;
    w.write_all(bytes)?;
    Ok(())
}

fn write_tensor<W: Write, T: Scalar>(w: &mut W, name: &str, m: &Matrix<T>) -> Result<()> {
    write_bytes(w, name.as_bytes())?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for &v in m.data() {
        w.write_all(&(v.into_f64() as f32).to_le_bytes())?;
    }
    Ok(())
}

fn read_bytes<R: Read>(r: &mut R) -> Result<Vec<u8>> {
    let len = read_u64(r)? as usize;
    if len > 1 << 32 {
        return Err(bad(0, "implausible length field"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(|_| bad(0, "truncated checkpoint"))?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| bad(0, "truncated checkpoint"))?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| bad(0, "truncated checkpoint"))?;
    Ok(u64::from_le_bytes(b))
}

fn read_tensor<R: Read>(r: &mut R) -> Result<(String, Matrix<f32>)> {
    let name = String::from_utf8_lossy(&read_bytes(r)?).into_owned();
    let rows = read_u64(r)? as usize;
    let cols = read_u64(r)? as usize;
    if rows.checked_mul(cols).is_none_or(|n| n > 1 << 31) {
        return Err(bad(0, &format!("implausible tensor shape {rows}x{cols}")));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut buf = [0u8; 4];
    for _ in 0..rows * cols {
        r.read_exact(&mut buf)
            .map_err(|_| bad(0, &format!("truncated tensor {name:?}")))?;
        data.push(f32::from_le_bytes(buf));
    }
    Ok((name, Matrix::from_vec(rows, cols, data)?))
}

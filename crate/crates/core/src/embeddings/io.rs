//! Binary word-vector file format.
//!
//! ASCII header `<vocab_count><SPACE><dimension><LF>`, then per word: the
//! word's bytes terminated by a single space, `dimension` little-endian
//! IEEE-754 single-precision floats, and an optional trailing LF (the
//! writer emits it; the reader tolerates its absence).

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embeddings::vectors::WordVectors;
use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::numerics::scalar::Scalar;

const MAX_HEADER: usize = 64;
const MAX_WORD: usize = 4096;

/// Reads a vector file. With `filter` only matching words (byte-exact)
/// are materialized, keeping memory at O(|filter| * dim) while the rest
/// of the file is skipped over.
pub fn read_vectors_binary<T: Scalar>(
    path: &Path,
    filter: Option<&HashSet<Vec<u8>>>,
) -> Result<WordVectors<T>> {
    let file = File::open(path)?;
    let mut reader = ByteReader::new(BufReader::new(file));

    let count = reader.ascii_field(b' ', "vocab count")?;
    let dim = reader.ascii_field(b'\n', "dimension")?;
    if dim <= 0 {
        return Err(Error::Format {
            offset: 0,
            message: format!("dimension must be positive, got {dim}"),
        });
    }
    if count < 0 {
        return Err(Error::Format {
            offset: 0,
            message: format!("vocab count must be non-negative, got {count}"),
        });
    }
    let (count, dim) = (count as usize, dim as usize);

    let mut words: Vec<Vec<u8>> = Vec::new();
    let mut data: Vec<T> = Vec::new();
    let mut scratch = vec![0u8; dim * 4];
    for _ in 0..count {
        let word = reader.word_until_space()?;
        let offset = reader.offset;
        reader.read_exact(&mut scratch).map_err(|_| Error::Format {
            offset,
            message: format!(
                "truncated payload for word {:?}",
                String::from_utf8_lossy(&word)
            ),
        })?;
        let wanted = filter.is_none_or(|f| f.contains(&word));
        if wanted {
            for chunk in scratch.chunks_exact(4) {
                let bits = u32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
                data.push(T::from_f64(f32::from_bits(bits) as f64));
            }
            words.push(word);
        }
        reader.skip_optional_newline()?;
    }
    let matrix = Matrix::from_vec(words.len(), dim, data)?;
    WordVectors::from_raw(words, matrix)
}

/// Scans only the word tokens of a vector file (lossy-decoded), skipping
/// the float payloads. Useful for coverage statistics.
pub fn read_vector_words(path: &Path) -> Result<HashSet<String>> {
    let file = File::open(path)?;
    let mut reader = ByteReader::new(BufReader::new(file));
    let count = reader.ascii_field(b' ', "vocab count")?.max(0) as usize;
    let dim = reader.ascii_field(b'\n', "dimension")?;
    if dim <= 0 {
        return Err(Error::Format {
            offset: 0,
            message: format!("dimension must be positive, got {dim}"),
        });
    }
    let mut scratch = vec![0u8; dim as usize * 4];
    let mut words = HashSet::with_capacity(count);
    for _ in 0..count {
        let word = reader.word_until_space()?;
        let offset = reader.offset;
        reader.read_exact(&mut scratch).map_err(|_| Error::Format {
            offset,
            message: "truncated payload".into(),
        })?;
        words.insert(String::from_utf8_lossy(&word).into_owned());
        reader.skip_optional_newline()?;
    }
    Ok(words)
}

/// Writes vectors in the binary format, bit-exact: floats are truncated
/// to single precision.
pub fn write_vectors_binary<T: Scalar>(vectors: &WordVectors<T>, path: &Path) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::InvalidInput(
            "refusing to write an empty vector file".into(),
        ));
    }
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "{} {}\n", vectors.len(), vectors.dim())?;
    for id in 0..vectors.len() as u32 {
        out.write_all(vectors.word_bytes(id))?;
        out.write_all(b" ")?;
        for &v in vectors.matrix().row(id as usize) {
            out.write_all(&(v.into_f64() as f32).to_le_bytes())?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Byte-level reader that tracks its offset for error reporting.
struct ByteReader<R> {
    inner: R,
    offset: u64,
}

impl<R: BufRead> ByteReader<R> {
    fn new(inner: R) -> Self {
        ByteReader { inner, offset: 0 }
    }

    fn read_exact(&mut self, buf: &mut [u8]) -> std::io::Result<()> {
        self.inner.read_exact(buf)?;
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn next_byte(&mut self) -> Result<Option<u8>> {
        let mut b = [0u8; 1];
        match self.inner.read(&mut b)? {
            0 => Ok(None),
            _ => {
                self.offset += 1;
                Ok(Some(b[0]))
            }
        }
    }

    fn ascii_field(&mut self, delim: u8, what: &str) -> Result<i64> {
        let start = self.offset;
        let mut buf = Vec::new();
        loop {
            match self.next_byte()? {
                Some(b) if b == delim => break,
                Some(b) => buf.push(b),
                None => {
                    return Err(Error::Format {
                        offset: self.offset,
                        message: format!("unexpected end of file while reading {what}"),
                    })
                }
            }
            if buf.len() > MAX_HEADER {
                return Err(Error::Format {
                    offset: start,
                    message: format!("malformed header: {what} field too long"),
                });
            }
        }
        std::str::from_utf8(&buf)
            .ok()
            .and_then(|s| s.trim().parse::<i64>().ok())
            .ok_or_else(|| Error::Format {
                offset: start,
                message: format!(
                    "malformed header: {what} is not a number: {:?}",
                    String::from_utf8_lossy(&buf)
                ),
            })
    }

    fn word_until_space(&mut self) -> Result<Vec<u8>> {
        let start = self.offset;
        let mut word = Vec::new();
        loop {
            match self.next_byte()? {
                Some(b' ') => return Ok(word),
                Some(b) => word.push(b),
                None => {
                    return Err(Error::Format {
                        offset: self.offset,
                        message: "unexpected end of file inside a word".into(),
                    })
                }
            }
            if word.len() > MAX_WORD {
                return Err(Error::Format {
                    offset: start,
                    message: "word longer than 4096 bytes; file is likely corrupt".into(),
                });
            }
        }
    }

    /// Consumes a single LF if one is next; the format makes it optional.
    fn skip_optional_newline(&mut self) -> Result<()> {
        let peek = self.inner.fill_buf()?;
        if peek.first() == Some(&b'\n') {
            self.inner.consume(1);
            self.offset += 1;
        }
        Ok(())
    }
}

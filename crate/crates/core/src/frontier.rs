//! BFS frontier storage that spills sorted runs of ranks to disk once the
//! in-memory buffer exceeds its share of the memory budget.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};

use crate::error::Result;

const READ_CHUNK: usize = 1 << 16;

pub(crate) struct Frontier {
    mem: Vec<u64>,
    runs: Vec<File>,
    spill_threshold: usize,
    len: u64,
}

impl Frontier {
    /// `spill_threshold` is the maximum number of ranks held in memory.
    pub fn new(spill_threshold: usize) -> Frontier {
        Frontier {
            mem: Vec::new(),
            runs: Vec::new(),
            spill_threshold: spill_threshold.max(16),
            len: 0,
        }
    }

    pub fn push(&mut self, rank: u64) -> Result<()> {
        if self.mem.len() >= self.spill_threshold {
            self.spill()?;
        }
        self.mem.push(rank);
        self.len += 1;
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    fn spill(&mut self) -> Result<()> {
        self.mem.sort_unstable();
        let mut bytes = Vec::with_capacity(self.mem.len() * 8);
        for &r in &self.mem {
            bytes.extend_from_slice(&r.to_le_bytes());
        }
        let mut file = tempfile::tempfile()?;
        file.write_all(&bytes)?;
        self.runs.push(file);
        self.mem.clear();
        Ok(())
    }

    /// Drains the frontier, handing ranks to `f` in chunks. Spilled runs are
    /// replayed first, then the in-memory tail.
    pub fn drain_chunks(mut self, f: &mut impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
        let mut buf = vec![0u8; READ_CHUNK * 8];
        let mut decoded = vec![0u64; READ_CHUNK];
        for mut file in self.runs.drain(..) {
            file.seek(SeekFrom::Start(0))?;
            loop {
                let read = read_full(&mut file, &mut buf)?;
                if read == 0 {
                    break;
                }
                debug_assert_eq!(read % 8, 0);
                let count = read / 8;
                for (i, chunk) in buf[..read].chunks_exact(8).enumerate() {
                    decoded[i] = u64::from_le_bytes(chunk.try_into().unwrap());
                }
                f(&decoded[..count])?;
            }
        }
        for chunk in self.mem.chunks(READ_CHUNK) {
            f(chunk)?;
        }
        Ok(())
    }
}

fn read_full(file: &mut File, buf: &mut [u8]) -> Result<usize> {
    let mut total = 0;
    while total < buf.len() {
        let n = file.read(&mut buf[total..])?;
        if n == 0 {
            break;
        }
        total += n;
    }
    Ok(total)
}

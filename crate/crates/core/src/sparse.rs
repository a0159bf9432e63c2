//! Sparse binary parity-check matrices and their on-disk formats.
//!
//! Text format is MacKay's alist (1-based indices, zero padded rows). The
//! binary form is little-endian: magic `GPCM`, version, rows, cols, then for
//! each column its weight followed by its row indices.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsePcm {
    rows: usize,
    cols: usize,
    row_adj: Vec<Vec<u32>>,
    col_adj: Vec<Vec<u32>>,
}

const MAGIC: &[u8; 4] = b"GPCM";
const VERSION: u32 = 1;

impl SparsePcm {
    /// Builds from column adjacency lists. Duplicate entries are rejected.
    pub fn from_columns(rows: usize, mut col_adj: Vec<Vec<u32>>) -> Result<Self> {
        let cols = col_adj.len();
        let mut row_adj = vec![Vec::new(); rows];
        for (c, adj) in col_adj.iter_mut().enumerate() {
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("duplicate entry in column {c}")));
            }
            for &r in adj.iter() {
                let r = r as usize;
                if r >= rows {
                    return Err(Error::InvalidArgument(format!("row {r} out of range in column {c}")));
                }
                row_adj[r].push(c as u32);
            }
        }
        Ok(SparsePcm {
            rows,
            cols,
            row_adj,
            col_adj,
        })
    }

    pub fn from_rows(cols: usize, rows_adj: Vec<Vec<u32>>) -> Result<Self> {
        let rows = rows_adj.len();
        let mut col_adj = vec![Vec::new(); cols];
        for (r, adj) in rows_adj.iter().enumerate() {
            for &c in adj {
                let c = c as usize;
                if c >= cols {
                    return Err(Error::InvalidArgument(format!("column {c} out of range in row {r}")));
                }
                col_adj[c].push(r as u32);
            }
        }
        Self::from_columns(rows, col_adj)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.row_adj[r]
    }

    pub fn col(&self, c: usize) -> &[u32] {
        &self.col_adj[c]
    }

    pub fn nnz(&self) -> usize {
        self.col_adj.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.col_adj[c].binary_search(&(r as u32)).is_ok()
    }

    pub fn to_dense(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.cols);
        for (c, adj) in self.col_adj.iter().enumerate() {
            for &r in adj {
                m.set(r as usize, c, true);
            }
        }
        m
    }

    /// Number of length-4 cycles (pairs of columns sharing two rows).
    pub fn four_cycles(&self) -> u64 {
        use std::collections::HashMap;
        let mut pairs: HashMap<(u32, u32), u32> = HashMap::new();
        for adj in &self.row_adj {
            for (a, &x) in adj.iter().enumerate() {
                for &y in &adj[a + 1..] {
                    *pairs.entry((x, y)).or_insert(0) += 1;
                }
            }
        }
        pairs.values().map(|&k| u64::from(k) * u64::from(k.saturating_sub(1)) / 2).sum()
    }

    /// Stacks `top` above `self`.
    pub fn vstack(top: &SparsePcm, bottom: &SparsePcm) -> Result<Self> {
        if top.cols != bottom.cols {
            return Err(Error::InvalidArgument("column count mismatch".into()));
        }
        let mut rows = top.row_adj.clone();
        rows.extend(bottom.row_adj.iter().cloned());
        Self::from_rows(top.cols, rows)
    }

    pub fn to_alist(&self) -> String {
        let max_col = self.col_adj.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.row_adj.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.cols, self.rows);
        let _ = writeln!(s, "{max_col} {max_row}");
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{}", join(&mut self.col_adj.iter().map(Vec::len)));
        let _ = writeln!(s, "{}", join(&mut self.row_adj.iter().map(Vec::len)));
        for (adj, width) in self
            .col_adj
            .iter()
            .map(|a| (a, max_col))
            .chain(self.row_adj.iter().map(|a| (a, max_row)))
        {
            let mut line: Vec<usize> = adj.iter().map(|&x| x as usize + 1).collect();
            line.resize(width.max(1), 0);
            let _ = writeln!(s, "{}", join(&mut line.into_iter()));
        }
        s
    }

    pub fn from_alist(text: &str) -> Result<Self> {
        let mut tok = Tokens::new(text);
        let cols = tok.next_usize()?;
        let rows = tok.next_usize()?;
        let _max_col = tok.next_usize()?;
        let _max_row = tok.next_usize()?;
        let col_w = (0..cols).map(|_| tok.next_usize()).collect::<Result<Vec<_>>>()?;
        let row_w = (0..rows).map(|_| tok.next_usize()).collect::<Result<Vec<_>>>()?;
        // Padding zeros are optional, so entries are read line by line.
        tok.skip_to_next_line();
        let mut col_adj = Vec::with_capacity(cols);
        for (c, &w) in col_w.iter().enumerate() {
            let (offset, entries) = tok.line_values()?;
            let adj: Vec<u32> = entries.into_iter().filter(|&x| x != 0).map(|x| (x - 1) as u32).collect();
            if adj.len() != w {
                return Err(Error::Parse {
                    offset,
                    msg: format!("column {c} lists {} entries, header says {w}", adj.len()),
                });
            }
            if adj.iter().any(|&r| r as usize >= rows) {
                return Err(Error::Parse { offset, msg: format!("row index out of range in column {c}") });
            }
            col_adj.push(adj);
        }
        let pcm = Self::from_columns(rows, col_adj).map_err(|e| Error::Parse {
            offset: tok.pos,
            msg: e.to_string(),
        })?;
        for (r, &w) in row_w.iter().enumerate() {
            let (offset, entries) = tok.line_values()?;
            let mut adj: Vec<u32> = entries.into_iter().filter(|&x| x != 0).map(|x| (x - 1) as u32).collect();
            adj.sort_unstable();
            if adj.len() != w || adj != pcm.row_adj[r] {
                return Err(Error::Parse {
                    offset,
                    msg: format!("row {r} disagrees with column lists"),
                });
            }
        }
        Ok(pcm)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * (self.cols + self.nnz()));
        out.extend_from_slice(MAGIC);
        for v in [VERSION, self.rows as u32, self.cols as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for adj in &self.col_adj {
            out.extend_from_slice(&(adj.len() as u32).to_le_bytes());
            for &r in adj {
                out.extend_from_slice(&r.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let read = |pos: &mut usize| -> Result<u32> {
            let chunk = bytes.get(*pos..*pos + 4).ok_or(Error::Parse {
                offset: *pos,
                msg: "unexpected end of data".into(),
            })?;
            *pos += 4;
            Ok(u32::from_le_bytes(chunk.try_into().expect("4 bytes")))
        };
        if bytes.get(..4) != Some(MAGIC.as_slice()) {
            return Err(Error::Parse { offset: 0, msg: "bad magic".into() });
        }
        pos += 4;
        let version = read(&mut pos)?;
        if version != VERSION {
            return Err(Error::Parse { offset: 4, msg: format!("unsupported version {version}") });
        }
        let rows = read(&mut pos)? as usize;
        let cols = read(&mut pos)? as usize;
        let mut col_adj = Vec::with_capacity(cols);
        for _ in 0..cols {
            let w = read(&mut pos)? as usize;
            col_adj.push((0..w).map(|_| read(&mut pos)).collect::<Result<Vec<_>>>()?);
        }
        if pos != bytes.len() {
            return Err(Error::Parse { offset: pos, msg: "trailing bytes".into() });
        }
        Self::from_columns(rows, col_adj).map_err(|e| Error::Parse { offset: pos, msg: e.to_string() })
    }
}

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { text, pos: 0 }
    }

    fn next_usize(&mut self) -> Result<usize> {
        let rest = &self.text[self.pos..];
        let start = self.pos + (rest.len() - rest.trim_start().len());
        let tail = &self.text[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        if len == 0 {
            return Err(Error::Parse { offset: start, msg: "unexpected end of input".into() });
        }
        self.pos = start + len;
        tail[..len].parse().map_err(|_| Error::Parse {
            offset: start,
            msg: format!("expected integer, found {:?}", &tail[..len]),
        })
    }

    fn skip_to_next_line(&mut self) {
        match self.text[self.pos..].find('\n') {
            Some(k) => self.pos += k + 1,
            None => self.pos = self.text.len(),
        }
    }

    /// Values on the next non-empty line, with the line's byte offset.
    fn line_values(&mut self) -> Result<(usize, Vec<usize>)> {
        loop {
            if self.pos >= self.text.len() {
                return Err(Error::Parse { offset: self.pos, msg: "unexpected end of input".into() });
            }
            let start = self.pos;
            let end = self.text[start..].find('\n').map_or(self.text.len(), |k| start + k);
            self.pos = (end + 1).min(self.text.len().max(end));
            let line = &self.text[start..end];
            if line.trim().is_empty() {
                continue;
            }
            let mut vals = Vec::new();
            let mut off = start;
            for t in line.split_whitespace() {
                let at = start + line[off - start..].find(t).map_or(0, |k| k + off - start);
                off = at + t.len();
                vals.push(t.parse().map_err(|_| Error::Parse {
                    offset: at,
                    msg: format!("expected integer, found {t:?}"),
                })?);
            }
            return Ok((start, vals));
        }
    }
}

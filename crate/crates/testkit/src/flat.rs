//! A large, flat, valid document produced on the fly, for checking that
//! translation memory does not grow with input size.

use std::io::{self, Read};

const HEAD: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<root>\n<declare><var> n=0 </var></declare>\n";
const TAIL: &str = "</root>\n";

/// Yields `HEAD`, then statement groups until at least `target_bytes`
/// have been produced, then `TAIL`.
pub struct FlatDocument {
    target: u64,
    produced: u64,
    group: u64,
    pending: Vec<u8>,
    pos: usize,
    done: bool,
}

impl FlatDocument {
    pub fn new(target_bytes: u64) -> Self {
        Self {
            target: target_bytes,
            produced: 0,
            group: 0,
            pending: HEAD.as_bytes().to_vec(),
            pos: 0,
            done: false,
        }
    }

    fn refill(&mut self) {
        self.pending.clear();
        self.pos = 0;
        if self.done {
            return;
        }
        if self.produced >= self.target {
            self.pending.extend_from_slice(TAIL.as_bytes());
            self.done = true;
            return;
        }
        let g = self.group;
        self.group += 1;
        let text = match g % 4 {
            0 => format!("<out><write> line {g} </write><writev>n</writev></out>\n"),
            1 => format!("<s> if (n &lt; {g}) </s><write>small</write><s>else</s><write>big</write><s>endif</s>\n"),
            2 => "<s>loop from i = 1 to 3 step 1</s><writev> i </writev><s>endloop</s>\n".to_string(),
            _ => format!("<!-- group {g} --><write>a &amp; b &lt;c&gt;</write>\n"),
        };
        self.pending.extend_from_slice(text.as_bytes());
    }
}

impl Read for FlatDocument {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        if self.pos == self.pending.len() {
            self.refill();
            if self.pending.is_empty() {
                return Ok(0);
            }
        }
        let n = buf.len().min(self.pending.len() - self.pos);
        buf[..n].copy_from_slice(&self.pending[self.pos..self.pos + n]);
        self.pos += n;
        self.produced += n as u64;
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reaches_the_target_and_closes() {
        let mut s = String::new();
        FlatDocument::new(10_000).read_to_string(&mut s).unwrap();
        assert!(s.len() >= 10_000 && s.len() < 10_300);
        assert!(s.starts_with(HEAD) && s.ends_with(TAIL));
    }
}

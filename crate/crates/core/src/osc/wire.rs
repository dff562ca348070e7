//! OSC 1.0 wire codec: big-endian, 4-byte aligned messages with a
//! comma-led type tag string. Strict on decode — bad padding, unknown
//! tags, truncation and trailing bytes are all wire errors — so
//! `decode(encode(m)) == m` holds byte-exactly and fuzzed input cannot
//! panic.

use crate::error::{QacError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum OscArg {
    Int(i32),
    Float(f32),
    Str(String),
    Blob(Vec<u8>),
}

impl OscArg {
    fn type_tag(&self) -> u8 {
        match self {
            OscArg::Int(_) => b'i',
            OscArg::Float(_) => b'f',
            OscArg::Str(_) => b's',
            OscArg::Blob(_) => b'b',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscMessage {
    pub address: String,
    pub args: Vec<OscArg>,
}

impl OscMessage {
    pub fn new(address: impl Into<String>, args: Vec<OscArg>) -> OscMessage {
        OscMessage {
            address: address.into(),
            args,
        }
    }
}

fn wire(err: impl std::fmt::Display) -> QacError {
    QacError::Wire(err.to_string())
}

fn push_padded_str(out: &mut Vec<u8>, s: &str) -> Result<()> {
    if s.bytes().any(|b| b == 0) {
        return Err(wire("strings may not contain NUL bytes"));
    }
    out.extend_from_slice(s.as_bytes());
    let pad = 4 - out.len() % 4; // 1..=4: always at least the terminator
    out.extend(std::iter::repeat_n(0u8, pad));
    Ok(())
}

pub fn encode_osc(msg: &OscMessage) -> Result<Vec<u8>> {
    if !msg.address.starts_with('/') {
        return Err(wire(format!(
            "address '{}' must start with '/'",
            msg.address
        )));
    }
    let mut out = Vec::with_capacity(64);
    push_padded_str(&mut out, &msg.address)?;
    let mut tags = String::from(",");
    for arg in &msg.args {
        tags.push(arg.type_tag() as char);
    }
    push_padded_str(&mut out, &tags)?;
    for arg in &msg.args {
        match arg {
            OscArg::Int(v) => out.extend_from_slice(&v.to_be_bytes()),
            OscArg::Float(v) => out.extend_from_slice(&v.to_bits().to_be_bytes()),
            OscArg::Str(s) => push_padded_str(&mut out, s)?,
            OscArg::Blob(data) => {
                let len = i32::try_from(data.len()).map_err(|_| wire("blob too large"))?;
                out.extend_from_slice(&len.to_be_bytes());
                out.extend_from_slice(data);
                let pad = (4 - data.len() % 4) % 4;
                out.extend(std::iter::repeat_n(0u8, pad));
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| wire("truncated packet"))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    /// Null-terminated, zero-padded-to-4 string.
    fn take_str(&mut self) -> Result<String> {
        let rest = &self.bytes[self.pos..];
        let nul = rest
            .iter()
            .position(|&b| b == 0)
            .ok_or_else(|| wire("unterminated string"))?;
        let content = std::str::from_utf8(&rest[..nul])
            .map_err(|_| wire("string is not UTF-8"))?
            .to_string();
        let padded = nul + 1 + (4 - (nul + 1) % 4) % 4;
        if padded > rest.len() {
            return Err(wire("string padding runs past the packet"));
        }
        if rest[nul..padded].iter().any(|&b| b != 0) {
            return Err(wire("string padding bytes must be zero"));
        }
        self.pos += padded;
        Ok(content)
    }

    fn take_u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

pub fn decode_osc(bytes: &[u8]) -> Result<OscMessage> {
    if bytes.len() % 4 != 0 {
        return Err(wire(format!(
            "packet length {} is not a multiple of 4",
            bytes.len()
        )));
    }
    if bytes.starts_with(b"#bundle\0") {
        return Err(wire("bundles are not supported"));
    }
    let mut r = Reader { bytes, pos: 0 };
    let address = r.take_str()?;
    if !address.starts_with('/') {
        return Err(wire(format!("address '{address}' must start with '/'")));
    }
    let tags = r.take_str()?;
    let Some(tags) = tags.strip_prefix(',') else {
        return Err(wire("type tag string must start with ','"));
    };
    let mut args = Vec::with_capacity(tags.len());
    for tag in tags.chars() {
        args.push(match tag {
            'i' => OscArg::Int(r.take_u32()? as i32),
            'f' => OscArg::Float(f32::from_bits(r.take_u32()?)),
            's' => OscArg::Str(r.take_str()?),
            'b' => {
                let len = r.take_u32()? as usize;
                let data = r.take(len)?.to_vec();
                let pad = (4 - len % 4) % 4;
                if r.take(pad)?.iter().any(|&b| b != 0) {
                    return Err(wire("blob padding bytes must be zero"));
                }
                OscArg::Blob(data)
            }
            other => return Err(wire(format!("unknown type tag '{other}'"))),
        });
    }
    if r.pos != bytes.len() {
        return Err(wire(format!(
            "{} trailing byte(s) after the last argument",
            bytes.len() - r.pos
        )));
    }
    Ok(OscMessage { address, args })
}

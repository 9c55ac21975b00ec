//! Canonical byte encoding shared by Fiat-Shamir hashing, board payloads
//! and authentication tags.
//!
//! Every group element and scalar is written as a 4-byte big-endian length
//! followed by a fixed-width big-endian value (width taken from `p` and `q`
//! respectively). ASCII tags and counts use the same length-prefix scheme,
//! so two different field sequences never produce the same bytes.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};

pub struct Encoder<'p> {
    params: &'p GroupParams,
    buf: Vec<u8>,
}

impl<'p> Encoder<'p> {
    pub fn new(params: &'p GroupParams) -> Self {
        Encoder {
            params,
            buf: Vec::new(),
        }
    }

    pub fn put_u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn put_len(&mut self, len: usize) -> &mut Self {
        self.put_u32(u32::try_from(len).expect("field shorter than 4 GiB"))
    }

    pub fn put_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.put_len(bytes.len());
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn put_tag(&mut self, tag: &str) -> &mut Self {
        self.put_bytes(tag.as_bytes())
    }

    fn put_fixed(&mut self, v: &BigUint, width: usize) -> &mut Self {
        let raw = v.to_bytes_be();
        assert!(raw.len() <= width, "value wider than its field");
        self.put_len(width);
        self.buf.resize(self.buf.len() + width - raw.len(), 0);
        self.buf.extend_from_slice(&raw);
        self
    }

    pub fn put_element(&mut self, x: &GroupElement) -> &mut Self {
        self.put_fixed(x.value(), self.params.element_width())
    }

    pub fn put_elements(&mut self, xs: &[GroupElement]) -> &mut Self {
        self.put_len(xs.len());
        for x in xs {
            self.put_element(x);
        }
        self
    }

    pub fn put_scalar(&mut self, s: &Scalar) -> &mut Self {
        self.put_fixed(s.value(), self.params.scalar_width())
    }

    pub fn put_scalars(&mut self, xs: &[Scalar]) -> &mut Self {
        self.put_len(xs.len());
        for x in xs {
            self.put_scalar(x);
        }
        self
    }

    /// `p`, `q`, `g`, each at element width.
    pub fn put_params(&mut self) -> &mut Self {
        let w = self.params.element_width();
        let (p, q, g) = (
            self.params.p().clone(),
            self.params.q().clone(),
            self.params.generator(),
        );
        self.put_fixed(&p, w).put_fixed(&q, w).put_fixed(g.value(), w)
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Decoder<'a, 'p> {
    params: &'p GroupParams,
    data: &'a [u8],
    pos: usize,
}

impl<'a, 'p> Decoder<'a, 'p> {
    pub fn new(params: &'p GroupParams, data: &'a [u8]) -> Self {
        Decoder {
            params,
            data,
            pos: 0,
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| Error::Decode("truncated input".into()))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn length(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.length()?;
        self.take(n)
    }

    pub fn tag(&mut self) -> Result<String> {
        let raw = self.bytes()?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::Decode("tag is not utf-8".into()))
    }

    pub fn expect_tag(&mut self, expected: &str) -> Result<()> {
        let tag = self.tag()?;
        if tag != expected {
            return Err(Error::Decode(format!("expected tag {expected:?}, found {tag:?}")));
        }
        Ok(())
    }

    fn fixed(&mut self, width: usize) -> Result<BigUint> {
        let n = self.length()?;
        if n != width {
            return Err(Error::Decode(format!("field width {n}, expected {width}")));
        }
        Ok(BigUint::from_bytes_be(self.take(n)?))
    }

    pub fn element(&mut self) -> Result<GroupElement> {
        let v = self.fixed(self.params.element_width())?;
        self.params
            .element(v)
            .map_err(|_| Error::Decode("element outside the subgroup".into()))
    }

    pub fn elements(&mut self) -> Result<Vec<GroupElement>> {
        let n = self.length()?;
        (0..n).map(|_| self.element()).collect()
    }

    pub fn scalar(&mut self) -> Result<Scalar> {
        let v = self.fixed(self.params.scalar_width())?;
        self.params.scalar_strict(v)
    }

    pub fn scalars(&mut self) -> Result<Vec<Scalar>> {
        let n = self.length()?;
        (0..n).map(|_| self.scalar()).collect()
    }

    pub fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Decode("trailing bytes".into()));
        }
        Ok(())
    }
}

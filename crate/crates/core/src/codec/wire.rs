//! Binary record format.
//!
//! ```text
//! magic  "EPM1"
//! kind   u8        01 element, 02 vector, 03 public base,
//!                  10 sap_pub, 11 sap_priv, 12 sap_ct,
//!                  20 egdp_pub, 21 egdp_priv, 22 egdp_ct_add, 23 egdp_ct_xor
//! p      u16 length, then that many big-endian bytes (minimal, no leading 0)
//! m      u16 big-endian
//! body   kind-specific, see below
//! ```
//!
//! Element: `m * m` entries row-major, row `i` (1-based) in the fixed byte
//! width of `p^i - 1`, big-endian. Vector: component `i` likewise.
//! Polynomial: `u16` degree `k`, then `k + 1` central elements as `m` digits
//! each in the byte width of `p - 1`.
//!
//! Bodies: sap_pub `M R T`; sap_priv `M F poly`; sap_ct `H D`; egdp_pub
//! `M X P`; egdp_priv `M A1 A2 poly1 poly2`; egdp_ct_add `F D`;
//! egdp_ct_xor `F`, `u32` bit length `t`, then `ceil(t / 8)` bytes.
//!
//! Decoding never reduces: every entry must already be canonical, private
//! keys must match their polynomials, and trailing bytes are rejected.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use super::beta::beta_len;
use super::bits::BitString;
use crate::action::ActionVector;
use crate::center::{CentralElement, HPolynomial};
use crate::dp::{EgdpCiphertextAdd, EgdpCiphertextXor, EgdpPrivateKey, EgdpPublicKey};
use crate::error::{Error, Result};
use crate::numtheory::width_bytes;
use crate::params::RingParams;
use crate::ring::RingElement;
use crate::sap::{SapCiphertext, SapPrivateKey, SapPublicKey};

pub const MAGIC: &[u8; 4] = b"EPM1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Element,
    Vector,
    PublicBase,
    SapPublic,
    SapPrivate,
    SapCiphertext,
    EgdpPublic,
    EgdpPrivate,
    EgdpCiphertextAdd,
    EgdpCiphertextXor,
}

impl Kind {
    pub const ALL: [Kind; 10] = [
        Kind::Element,
        Kind::Vector,
        Kind::PublicBase,
        Kind::SapPublic,
        Kind::SapPrivate,
        Kind::SapCiphertext,
        Kind::EgdpPublic,
        Kind::EgdpPrivate,
        Kind::EgdpCiphertextAdd,
        Kind::EgdpCiphertextXor,
    ];

    pub fn code(self) -> u8 {
        match self {
            Kind::Element => 0x01,
            Kind::Vector => 0x02,
            Kind::PublicBase => 0x03,
            Kind::SapPublic => 0x10,
            Kind::SapPrivate => 0x11,
            Kind::SapCiphertext => 0x12,
            Kind::EgdpPublic => 0x20,
            Kind::EgdpPrivate => 0x21,
            Kind::EgdpCiphertextAdd => 0x22,
            Kind::EgdpCiphertextXor => 0x23,
        }
    }

    pub fn from_code(code: u8) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Element => "element",
            Kind::Vector => "vector",
            Kind::PublicBase => "public_base",
            Kind::SapPublic => "sap_pub",
            Kind::SapPrivate => "sap_priv",
            Kind::SapCiphertext => "sap_ct",
            Kind::EgdpPublic => "egdp_pub",
            Kind::EgdpPrivate => "egdp_priv",
            Kind::EgdpCiphertextAdd => "egdp_ct_add",
            Kind::EgdpCiphertextXor => "egdp_ct_xor",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Any value that can be written to a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Element(RingElement),
    Vector(ActionVector),
    /// The public base `M` shared by both parties.
    PublicBase(RingElement),
    SapPublic(SapPublicKey),
    SapPrivate(SapPrivateKey),
    SapCiphertext(SapCiphertext),
    EgdpPublic(EgdpPublicKey),
    EgdpPrivate(EgdpPrivateKey),
    EgdpCiphertextAdd(EgdpCiphertextAdd),
    EgdpCiphertextXor(EgdpCiphertextXor),
}

impl Record {
    pub fn kind(&self) -> Kind {
        match self {
            Record::Element(_) => Kind::Element,
            Record::Vector(_) => Kind::Vector,
            Record::PublicBase(_) => Kind::PublicBase,
            Record::SapPublic(_) => Kind::SapPublic,
            Record::SapPrivate(_) => Kind::SapPrivate,
            Record::SapCiphertext(_) => Kind::SapCiphertext,
            Record::EgdpPublic(_) => Kind::EgdpPublic,
            Record::EgdpPrivate(_) => Kind::EgdpPrivate,
            Record::EgdpCiphertextAdd(_) => Kind::EgdpCiphertextAdd,
            Record::EgdpCiphertextXor(_) => Kind::EgdpCiphertextXor,
        }
    }

    pub fn params(&self) -> &RingParams {
        match self {
            Record::Element(a) | Record::PublicBase(a) => a.params(),
            Record::Vector(v) => v.params(),
            Record::SapPublic(k) => k.params(),
            Record::SapPrivate(k) => k.params(),
            Record::SapCiphertext(c) => c.h.params(),
            Record::EgdpPublic(k) => k.params(),
            Record::EgdpPrivate(k) => k.a1.params(),
            Record::EgdpCiphertextAdd(c) => c.f.params(),
            Record::EgdpCiphertextXor(c) => c.f.params(),
        }
    }

    fn mismatch(&self, expected: Kind) -> Error {
        Error::KindMismatch {
            expected: expected.name().into(),
            found: self.kind().name().into(),
        }
    }
}

macro_rules! record_conversions {
    ($($variant:ident => $ty:ty),* $(,)?) => {
        $(
            impl TryFrom<Record> for $ty {
                type Error = Error;
                fn try_from(r: Record) -> Result<Self> {
                    match r {
                        Record::$variant(v) => Ok(v),
                        other => Err(other.mismatch(Kind::$variant)),
                    }
                }
            }
        )*
    };
}

record_conversions! {
    Vector => ActionVector,
    SapPublic => SapPublicKey,
    SapPrivate => SapPrivateKey,
    SapCiphertext => SapCiphertext,
    EgdpPublic => EgdpPublicKey,
    EgdpPrivate => EgdpPrivateKey,
    EgdpCiphertextAdd => EgdpCiphertextAdd,
    EgdpCiphertextXor => EgdpCiphertextXor,
}

impl Record {
    /// The element carried by an `Element` record.
    pub fn into_element(self) -> Result<RingElement> {
        match self {
            Record::Element(a) => Ok(a),
            other => Err(other.mismatch(Kind::Element)),
        }
    }

    /// The base carried by a `PublicBase` record.
    pub fn into_public_base(self) -> Result<RingElement> {
        match self {
            Record::PublicBase(a) => Ok(a),
            other => Err(other.mismatch(Kind::PublicBase)),
        }
    }
}

fn write_fixed(out: &mut Vec<u8>, v: &BigUint, width: usize) {
    let raw = if v.is_zero() {
        Vec::new()
    } else {
        v.to_bytes_be()
    };
    debug_assert!(raw.len() <= width);
    out.extend(std::iter::repeat_n(0u8, width - raw.len()));
    out.extend_from_slice(&raw);
}

fn write_element(out: &mut Vec<u8>, a: &RingElement) {
    let params = a.params();
    let m = params.m();
    for (idx, v) in a.entries().iter().enumerate() {
        write_fixed(out, v, width_bytes(params.row_modulus(idx / m)));
    }
}

fn write_vector(out: &mut Vec<u8>, v: &ActionVector) {
    let params = v.params();
    for (i, c) in v.components().iter().enumerate() {
        write_fixed(out, c, width_bytes(params.row_modulus(i)));
    }
}

fn write_poly(out: &mut Vec<u8>, poly: &HPolynomial) {
    let params = poly.base().params();
    out.extend_from_slice(&(poly.degree() as u16).to_be_bytes());
    let w = width_bytes(params.p());
    for c in poly.coeffs() {
        for d in c.digits() {
            write_fixed(out, d, w);
        }
    }
}

pub fn serialize(record: &Record) -> Vec<u8> {
    let params = record.params();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(record.kind().code());
    let p_bytes = params.p().to_bytes_be();
    out.extend_from_slice(&(p_bytes.len() as u16).to_be_bytes());
    out.extend_from_slice(&p_bytes);
    out.extend_from_slice(&(params.m() as u16).to_be_bytes());
    match record {
        Record::Element(a) | Record::PublicBase(a) => write_element(&mut out, a),
        Record::Vector(v) => write_vector(&mut out, v),
        Record::SapPublic(k) => {
            write_element(&mut out, &k.base);
            write_vector(&mut out, &k.r);
            write_vector(&mut out, &k.t);
        }
        Record::SapPrivate(k) => {
            write_element(&mut out, k.poly.base());
            write_element(&mut out, &k.f);
            write_poly(&mut out, &k.poly);
        }
        Record::SapCiphertext(c) => {
            write_vector(&mut out, &c.h);
            write_vector(&mut out, &c.d);
        }
        Record::EgdpPublic(k) => {
            write_element(&mut out, &k.base);
            write_element(&mut out, &k.x);
            write_element(&mut out, &k.p_elem);
        }
        Record::EgdpPrivate(k) => {
            write_element(&mut out, k.poly1.base());
            write_element(&mut out, &k.a1);
            write_element(&mut out, &k.a2);
            write_poly(&mut out, &k.poly1);
            write_poly(&mut out, &k.poly2);
        }
        Record::EgdpCiphertextAdd(c) => {
            write_element(&mut out, &c.f);
            write_element(&mut out, &c.d);
        }
        Record::EgdpCiphertextXor(c) => {
            write_element(&mut out, &c.f);
            out.extend_from_slice(&(c.d.len() as u32).to_be_bytes());
            out.extend_from_slice(c.d.as_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Malformed(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn fixed(&mut self, width: usize) -> Result<BigUint> {
        Ok(BigUint::from_bytes_be(self.take(width)?))
    }

    fn element(&mut self, params: &RingParams) -> Result<RingElement> {
        let m = params.m();
        let entries = (0..m * m)
            .map(|idx| self.fixed(width_bytes(params.row_modulus(idx / m))))
            .collect::<Result<Vec<_>>>()?;
        RingElement::from_canonical(params, entries)
    }

    fn vector(&mut self, params: &RingParams) -> Result<ActionVector> {
        let comps = (0..params.m())
            .map(|i| self.fixed(width_bytes(params.row_modulus(i))))
            .collect::<Result<Vec<_>>>()?;
        ActionVector::from_canonical(params, comps)
    }

    fn poly(&mut self, base: &RingElement) -> Result<HPolynomial> {
        let params = base.params();
        let degree = self.u16()? as usize;
        let w = width_bytes(params.p());
        let mut coeffs = Vec::with_capacity(degree + 1);
        for _ in 0..=degree {
            let digits = (0..params.m())
                .map(|_| self.fixed(w))
                .collect::<Result<Vec<_>>>()?;
            coeffs.push(
                CentralElement::new(params, digits)
                    .map_err(|e| Error::InvariantViolation(e.to_string()))?,
            );
        }
        HPolynomial::new(base, coeffs).map_err(|e| Error::InvariantViolation(e.to_string()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Malformed(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn check_poly(poly: &HPolynomial, value: &RingElement, what: &str) -> Result<()> {
    if poly.evaluate() != *value {
        return Err(Error::InvariantViolation(format!(
            "{what} does not match its polynomial"
        )));
    }
    Ok(())
}

pub fn deserialize(bytes: &[u8]) -> Result<Record> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Malformed("bad magic".into()));
    }
    let code = r.take(1)?[0];
    let kind = Kind::from_code(code)
        .ok_or_else(|| Error::Malformed(format!("unknown kind 0x{code:02x}")))?;
    let p_len = r.u16()? as usize;
    let p_raw = r.take(p_len)?;
    if p_raw.is_empty() || p_raw[0] == 0 {
        return Err(Error::Malformed("non-minimal encoding of p".into()));
    }
    let m = r.u16()? as usize;
    let params = RingParams::new(BigUint::from_bytes_be(p_raw), m)
        .map_err(|e| Error::Malformed(e.to_string()))?;
    let record = match kind {
        Kind::Element => Record::Element(r.element(&params)?),
        Kind::PublicBase => Record::PublicBase(r.element(&params)?),
        Kind::Vector => Record::Vector(r.vector(&params)?),
        Kind::SapPublic => Record::SapPublic(SapPublicKey {
            base: r.element(&params)?,
            r: r.vector(&params)?,
            t: r.vector(&params)?,
        }),
        Kind::SapPrivate => {
            let base = r.element(&params)?;
            let f = r.element(&params)?;
            let poly = r.poly(&base)?;
            check_poly(&poly, &f, "F")?;
            Record::SapPrivate(SapPrivateKey { f, poly })
        }
        Kind::SapCiphertext => Record::SapCiphertext(SapCiphertext {
            h: r.vector(&params)?,
            d: r.vector(&params)?,
        }),
        Kind::EgdpPublic => Record::EgdpPublic(EgdpPublicKey {
            base: r.element(&params)?,
            x: r.element(&params)?,
            p_elem: r.element(&params)?,
        }),
        Kind::EgdpPrivate => {
            let base = r.element(&params)?;
            let a1 = r.element(&params)?;
            let a2 = r.element(&params)?;
            let poly1 = r.poly(&base)?;
            let poly2 = r.poly(&base)?;
            check_poly(&poly1, &a1, "A1")?;
            check_poly(&poly2, &a2, "A2")?;
            Record::EgdpPrivate(EgdpPrivateKey {
                a1,
                a2,
                poly1,
                poly2,
            })
        }
        Kind::EgdpCiphertextAdd => Record::EgdpCiphertextAdd(EgdpCiphertextAdd {
            f: r.element(&params)?,
            d: r.element(&params)?,
        }),
        Kind::EgdpCiphertextXor => {
            let f = r.element(&params)?;
            let t = r.u32()? as usize;
            let expected = beta_len(&params);
            if t != expected {
                return Err(Error::InvariantViolation(format!(
                    "mask length {t} bits, expected {expected}"
                )));
            }
            let d = BitString::from_bytes(r.take(t.div_ceil(8))?, t)
                .map_err(|e| Error::InvariantViolation(e.to_string()))?;
            Record::EgdpCiphertextXor(EgdpCiphertextXor { f, d })
        }
    };
    r.finish()?;
    Ok(record)
}

/// Decodes and converts to the expected record type.
pub fn deserialize_as<T>(bytes: &[u8]) -> Result<T>
where
    T: TryFrom<Record, Error = Error>,
{
    T::try_from(deserialize(bytes)?)
}

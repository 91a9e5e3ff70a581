//! Basis strings and named qubit registers.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest qubit count a basis string can address.
pub const MAX_QUBITS: usize = 64;

/// One computational basis state, read as an unsigned integer with qubit 0
/// as the least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct BasisString(pub u64);

impl BasisString {
    #[inline]
    pub fn bit(self, q: usize) -> bool {
        (self.0 >> q) & 1 == 1
    }

    #[inline]
    pub fn with_bit(self, q: usize, value: bool) -> Self {
        if value {
            BasisString(self.0 | (1 << q))
        } else {
            BasisString(self.0 & !(1 << q))
        }
    }

    #[inline]
    pub fn flip(self, q: usize) -> Self {
        BasisString(self.0 ^ (1 << q))
    }

    /// Parses a bit string written most-significant bit first, e.g. `"101"`.
    pub fn parse_bits(s: &str) -> Result<(Self, usize)> {
        if s.is_empty() || s.len() > MAX_QUBITS {
            return Err(Error::invalid(format!("bit string of length {}", s.len())));
        }
        let mut v = 0u64;
        for ch in s.chars() {
            v = (v << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::invalid(format!("'{other}' is not a bit"))),
                };
        }
        Ok((BasisString(v), s.len()))
    }

    /// Renders the lowest `width` bits, most significant first.
    pub fn to_bits(self, width: usize) -> String {
        (0..width).rev().map(|q| if self.bit(q) { '1' } else { '0' }).collect()
    }

    pub fn count_ones(self) -> u32 {
        self.0.count_ones()
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.0)
    }
}

/// A named group of qubits. Bit `i` of the register value lives on
/// `qubits[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    name: String,
    qubits: Vec<usize>,
    contiguous_offset: Option<usize>,
}

impl Register {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    /// Number of values the register can hold.
    pub fn dim(&self) -> u64 {
        1u64 << self.qubits.len()
    }

    #[inline]
    pub fn read(&self, b: BasisString) -> u64 {
        match self.contiguous_offset {
            Some(off) => (b.0 >> off) & mask(self.qubits.len()),
            None => self
                .qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &q)| acc | (((b.0 >> q) & 1) << i)),
        }
    }

    #[inline]
    pub fn write(&self, b: BasisString, value: u64) -> BasisString {
        match self.contiguous_offset {
            Some(off) => {
                let m = mask(self.qubits.len()) << off;
                BasisString((b.0 & !m) | ((value << off) & m))
            }
            None => self
                .qubits
                .iter()
                .enumerate()
                .fold(b, |acc, (i, &q)| acc.with_bit(q, (value >> i) & 1 == 1)),
        }
    }
}

#[inline]
fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Disjoint named registers covering qubits `0..width`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    width: usize,
}

impl RegisterLayout {
    /// Builds a layout from explicit qubit lists.
    pub fn new<S: Into<String>>(registers: Vec<(S, Vec<usize>)>) -> Result<Self> {
        let registers: Vec<Register> = registers
            .into_iter()
            .map(|(name, qubits)| {
                let contiguous_offset = match qubits.first() {
                    Some(&first) if qubits.iter().enumerate().all(|(i, &q)| q == first + i) => {
                        Some(first)
                    }
                    _ => None,
                };
                Register { name: name.into(), qubits, contiguous_offset }
            })
            .collect();
        let width: usize = registers.iter().map(Register::width).sum();
        if width > MAX_QUBITS {
            return Err(Error::TooLarge(format!("{width} qubits (limit {MAX_QUBITS})")));
        }
        let mut seen = vec![false; width];
        for reg in &registers {
            if reg.qubits.is_empty() {
                return Err(Error::invalid(format!("register `{}` is empty", reg.name)));
            }
            for &q in &reg.qubits {
                if q >= width || seen[q] {
                    return Err(Error::invalid(format!(
                        "register `{}` overlaps another register or leaves a gap at qubit {q}",
                        reg.name
                    )));
                }
                seen[q] = true;
            }
        }
        for (i, a) in registers.iter().enumerate() {
            if registers[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::invalid(format!("duplicate register name `{}`", a.name)));
            }
        }
        Ok(RegisterLayout { registers, width })
    }

    /// Registers in the given order occupy increasing qubit indices.
    pub fn contiguous<S: AsRef<str>>(spec: &[(S, usize)]) -> Result<Self> {
        let mut next = 0;
        let regs = spec
            .iter()
            .map(|(name, w)| {
                let qubits: Vec<usize> = (next..next + w).collect();
                next += w;
                (name.as_ref().to_string(), qubits)
            })
            .collect();
        Self::new(regs)
    }

    /// A single register named `q` spanning `width` qubits.
    pub fn flat(width: usize) -> Result<Self> {
        Self::contiguous(&[("q", width)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.width {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { qubit: q, width: self.width })
        }
    }

    /// Returns an error if `b` has bits set beyond the layout width.
    pub fn check_basis(&self, b: BasisString) -> Result<()> {
        if self.width < 64 && b.0 >> self.width != 0 {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: 64 - b.0.leading_zeros() as usize,
            });
        }
        Ok(())
    }
}

/// `n` fixed-width words packed contiguously from qubit `offset`; word `k`
/// occupies qubits `offset + k·width ..`. This is how particle registers
/// (qu-words) are laid out in the first-quantized encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuWords {
    pub offset: usize,
    pub width: usize,
    pub n: usize,
}

impl QuWords {
    #[inline]
    pub fn get(&self, b: BasisString, k: usize) -> u64 {
        (b.0 >> (self.offset + k * self.width)) & mask(self.width)
    }

    #[inline]
    pub fn set(&self, b: BasisString, k: usize, value: u64) -> BasisString {
        let shift = self.offset + k * self.width;
        let m = mask(self.width) << shift;
        BasisString((b.0 & !m) | ((value << shift) & m))
    }

    pub fn read_all(&self, b: BasisString) -> Vec<u64> {
        (0..self.n).map(|k| self.get(b, k)).collect()
    }

    pub fn write_all(&self, b: BasisString, values: &[u64]) -> BasisString {
        values.iter().enumerate().fold(b, |acc, (k, &v)| self.set(acc, k, v))
    }

    /// Exchanges words `i` and `j`.
    #[inline]
    pub fn swap(&self, b: BasisString, i: usize, j: usize) -> BasisString {
        let (wi, wj) = (self.get(b, i), self.get(b, j));
        self.set(self.set(b, i, wj), j, wi)
    }

    /// Mask of every qubit covered by the words.
    pub fn mask(&self) -> u64 {
        mask(self.width * self.n) << self.offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_registers_read_and_write() {
        let layout = RegisterLayout::contiguous(&[("a", 2), ("b", 3)]).unwrap();
        assert_eq!(layout.width(), 5);
        let b = layout.register("b").unwrap();
        let s = b.write(BasisString(0b11), 0b101);
        assert_eq!(s, BasisString(0b10111));
        assert_eq!(b.read(s), 0b101);
        assert_eq!(layout.register("a").unwrap().read(s), 0b11);
    }

    #[test]
    fn scattered_register_matches_bitwise_definition() {
        let layout = RegisterLayout::new(vec![("x", vec![0, 2]), ("y", vec![1])]).unwrap();
        let x = layout.register("x").unwrap();
        assert_eq!(x.write(BasisString(0), 0b11), BasisString(0b101));
        assert_eq!(x.read(BasisString(0b100)), 0b10);
    }

    #[test]
    fn overlapping_or_gapped_layouts_rejected() {
        assert!(RegisterLayout::new(vec![("x", vec![0, 1]), ("y", vec![1])]).is_err());
        assert!(RegisterLayout::new(vec![("x", vec![0, 2])]).is_err());
        assert!(RegisterLayout::new(vec![("x", vec![0]), ("x", vec![1])]).is_err());
    }

    #[test]
    fn unknown_register() {
        let layout = RegisterLayout::flat(2).unwrap();
        assert_eq!(layout.register("zz").unwrap_err(), Error::UnknownRegister("zz".into()));
    }

    #[test]
    fn bit_string_parsing() {
        let (b, w) = BasisString::parse_bits("101").unwrap();
        assert_eq!((b.0, w), (5, 3));
        assert_eq!(b.to_bits(3), "101");
        assert!(BasisString::parse_bits("12").is_err());
    }

    #[test]
    fn quwords_pack_and_swap() {
        let w = QuWords { offset: 1, width: 3, n: 2 };
        let b = w.write_all(BasisString(1), &[5, 2]);
        assert_eq!(b.0, 1 | (5 << 1) | (2 << 4));
        assert_eq!(w.read_all(w.swap(b, 0, 1)), vec![2, 5]);
        assert_eq!(w.mask(), 0b111_1110);
    }

    #[test]
    fn check_basis_rejects_wide_strings() {
        let layout = RegisterLayout::flat(2).unwrap();
        assert!(layout.check_basis(BasisString(0b11)).is_ok());
        assert!(matches!(layout.check_basis(BasisString(0b100)), Err(Error::WidthMismatch { .. })));
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the total number of qubits held densely.
pub const DEFAULT_QUBIT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Owner {
    Alice,
    Bob,
    Message,
    Environment,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: usize,
    pub owner: Owner,
}

impl Register {
    pub fn new(name: impl Into<String>, width: usize, owner: Owner) -> Self {
        Self {
            name: name.into(),
            width,
            owner,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.width
    }
}

/// Ordered collection of named registers.
///
/// The first register occupies the most significant bits of a basis index,
/// and within a register the bit string is read most significant bit first.
/// Every piece of index arithmetic in the crate goes through this type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    cap: usize,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        Self::with_cap(registers, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(registers: Vec<Register>, cap: usize) -> Result<Self> {
        for (i, r) in registers.iter().enumerate() {
            if r.width == 0 {
                return Err(Error::ZeroWidth {
                    name: r.name.clone(),
                    width: r.width,
                });
            }
            if registers[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::NameCollision(r.name.clone()));
            }
        }
        let needed: usize = registers.iter().map(|r| r.width).sum();
        if needed > cap {
            return Err(Error::QubitCapExceeded { needed, cap });
        }
        Ok(Self { registers, cap })
    }

    pub fn empty() -> Self {
        Self {
            registers: Vec::new(),
            cap: DEFAULT_QUBIT_CAP,
        }
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn total_width(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.total_width()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.name == name)
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.position(name)
            .map(|p| &self.registers[p])
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        self.registers.iter().map(|r| r.name.clone()).collect()
    }

    /// Bit offset of register `pos` inside a basis index.
    pub fn shift(&self, pos: usize) -> usize {
        self.registers[pos + 1..].iter().map(|r| r.width).sum()
    }

    /// Positions of `names`, in the order given.
    pub fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let p = self
                .position(n.as_ref())
                .ok_or_else(|| Error::UnknownRegister(n.as_ref().to_string()))?;
            if out.contains(&p) {
                return Err(Error::Overlap(n.as_ref().to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Positions not in `sel`, in layout order.
    pub fn complement(&self, sel: &[usize]) -> Vec<usize> {
        (0..self.registers.len()).filter(|p| !sel.contains(p)).collect()
    }

    /// Sub-layout made of `names`, kept in canonical (layout) order.
    pub fn sublayout<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let mut pos = self.positions(names)?;
        pos.sort_unstable();
        Ok(self.sublayout_at(&pos))
    }

    pub(crate) fn sublayout_at(&self, pos: &[usize]) -> Self {
        Self {
            registers: pos.iter().map(|&p| self.registers[p].clone()).collect(),
            cap: self.cap,
        }
    }

    /// Concatenation `self ++ other`; fails on a name collision or cap overflow.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        Self::with_cap(regs, self.cap.max(other.cap))
    }

    pub fn extended(&self, fresh: &[Register]) -> Result<Self> {
        let mut regs = self.registers.clone();
        regs.extend(fresh.iter().cloned());
        Self::with_cap(regs, self.cap)
    }

    pub fn with_new_cap(&self, cap: usize) -> Result<Self> {
        Self::with_cap(self.registers.clone(), cap)
    }

    /// Index maps for a selection of register positions.
    pub(crate) fn selection(&self, pos: &[usize]) -> Selection {
        Selection::new(self, pos)
    }
}

/// Translates between a full basis index and the concatenated value of a
/// subset of registers (in the subset's own order).
#[derive(Debug, Clone)]
pub(crate) struct Selection {
    fields: Vec<(usize, usize)>, // (shift, width) per selected register
    width: usize,
}

impl Selection {
    fn new(layout: &RegisterLayout, pos: &[usize]) -> Self {
        let fields: Vec<(usize, usize)> = pos
            .iter()
            .map(|&p| (layout.shift(p), layout.registers[p].width))
            .collect();
        let width = fields.iter().map(|f| f.1).sum();
        Self { fields, width }
    }

    pub fn dim(&self) -> usize {
        1 << self.width
    }

    /// Concatenated value of the selected registers in full index `x`.
    #[inline]
    pub fn extract(&self, x: usize) -> usize {
        let mut v = 0;
        for &(shift, w) in &self.fields {
            v = (v << w) | ((x >> shift) & ((1 << w) - 1));
        }
        v
    }

    /// Full-index contribution of concatenated value `v`.
    #[inline]
    pub fn deposit(&self, mut v: usize) -> usize {
        let mut x = 0;
        for &(shift, w) in self.fields.iter().rev() {
            x |= (v & ((1 << w) - 1)) << shift;
            v >>= w;
        }
        x
    }

    /// `deposit` for every value, as a lookup table.
    pub fn table(&self) -> Vec<usize> {
        (0..self.dim()).map(|v| self.deposit(v)).collect()
    }
}

/// Formats `value` as a `width`-character bit string, most significant bit first.
pub fn bits(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a bit string produced by [`bits`].
pub fn parse_bits(s: &str) -> Option<usize> {
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some((acc << 1) | 1),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> RegisterLayout {
        RegisterLayout::new(vec![
            Register::new("A", 1, Owner::Alice),
            Register::new("B", 2, Owner::Bob),
            Register::new("C", 1, Owner::Message),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_duplicates_and_cap() {
        let dup = RegisterLayout::new(vec![
            Register::new("X", 1, Owner::Alice),
            Register::new("X", 1, Owner::Bob),
        ]);
        assert_eq!(dup.unwrap_err(), Error::NameCollision("X".into()));
        let big = RegisterLayout::new(vec![Register::new("X", 13, Owner::Alice)]);
        assert!(matches!(big, Err(Error::QubitCapExceeded { needed: 13, cap: 12 })));
        assert!(RegisterLayout::with_cap(vec![Register::new("X", 13, Owner::Alice)], 13).is_ok());
    }

    #[test]
    fn shifts_follow_declaration_order() {
        let l = abc();
        assert_eq!(l.total_width(), 4);
        assert_eq!(l.shift(0), 3);
        assert_eq!(l.shift(1), 1);
        assert_eq!(l.shift(2), 0);
    }

    #[test]
    fn selection_roundtrip() {
        let l = abc();
        // select C then A (non-canonical order)
        let sel = l.selection(&[2, 0]);
        for x in 0..l.dim() {
            let v = sel.extract(x);
            let a = (x >> 3) & 1;
            let c = x & 1;
            assert_eq!(v, (c << 1) | a);
        }
        let rest = l.selection(&l.complement(&[2, 0]));
        for x in 0..l.dim() {
            assert_eq!(sel.deposit(sel.extract(x)) | rest.deposit(rest.extract(x)), x);
        }
    }

    #[test]
    fn bit_strings() {
        assert_eq!(bits(5, 4), "0101");
        assert_eq!(bits(0, 0), "");
        assert_eq!(parse_bits("0101"), Some(5));
        assert_eq!(parse_bits("01x"), None);
    }
}

//! Arithmetic in GF(2^k) for `2 <= k <= 10`, with a fixed primitive
//! polynomial per degree so constructions are reproducible bit for bit.

use core::fmt;

use crate::error::{domain, Result};

/// `(k, primitive polynomial)` with bit `i` the coefficient of `x^i`.
pub const PRIMITIVE_POLYNOMIALS: [(u32, u32); 9] = [
    (2, 0b111),          // x^2 + x + 1
    (3, 0b1011),         // x^3 + x + 1
    (4, 0b1_0011),       // x^4 + x + 1
    (5, 0b10_0101),      // x^5 + x^2 + 1
    (6, 0b100_0011),     // x^6 + x + 1
    (7, 0b1000_1001),    // x^7 + x^3 + 1
    (8, 0b1_0001_1101),  // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0b10_0001_0001), // x^9 + x^4 + 1
    (10, 0b100_0000_1001), // x^10 + x^3 + 1
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaloisField {
    k: u32,
    poly: u32,
}

impl GaloisField {
    pub fn new(k: u32) -> Result<Self> {
        PRIMITIVE_POLYNOMIALS
            .iter()
            .find(|(deg, _)| *deg == k)
            .map(|&(k, poly)| Self { k, poly })
            .ok_or_else(|| domain(alloc::format!("GF(2^{k}) unsupported; need 2 <= k <= 10")))
    }

    pub fn degree(self) -> u32 {
        self.k
    }

    pub fn polynomial(self) -> u32 {
        self.poly
    }

    /// Number of elements, `2^k`.
    pub fn order(self) -> u32 {
        1 << self.k
    }

    pub fn element(self, value: u32) -> Result<FieldElement> {
        if value >= self.order() {
            return Err(domain(alloc::format!("{value} is not an element of GF(2^{})", self.k)));
        }
        Ok(FieldElement { value, field: self })
    }

    pub fn zero(self) -> FieldElement {
        FieldElement { value: 0, field: self }
    }

    pub fn one(self) -> FieldElement {
        FieldElement { value: 1, field: self }
    }

    /// The primitive element `x`.
    pub fn generator(self) -> FieldElement {
        FieldElement { value: 2, field: self }
    }

    fn mul_raw(self, mut a: u32, mut b: u32) -> u32 {
        let top = 1 << self.k;
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: GaloisField,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> GaloisField {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> FieldElement {
        let f = self.field;
        let (mut base, mut acc) = (self.value, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = f.mul_raw(acc, base);
            }
            base = f.mul_raw(base, base);
            e >>= 1;
        }
        FieldElement { value: acc, field: f }
    }

    pub fn inverse(self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(domain("zero has no inverse"));
        }
        Ok(self.pow(u64::from(self.field.order()) - 2))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.field.k as usize)
    }
}

fn same_field(a: FieldElement, b: FieldElement) -> Result<GaloisField> {
    if a.field != b.field {
        return Err(domain("operands belong to different fields"));
    }
    Ok(a.field)
}

/// Field addition (bitwise XOR).
pub fn gf_add(a: FieldElement, b: FieldElement) -> Result<FieldElement> {
    let field = same_field(a, b)?;
    Ok(FieldElement { value: a.value ^ b.value, field })
}

/// Polynomial product reduced by the field's primitive polynomial.
pub fn gf_mul(a: FieldElement, b: FieldElement) -> Result<FieldElement> {
    let field = same_field(a, b)?;
    Ok(FieldElement { value: field.mul_raw(a.value, b.value), field })
}

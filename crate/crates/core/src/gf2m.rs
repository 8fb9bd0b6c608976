//! Arithmetic over GF(2^r), 1 <= r <= 8, using exp/log tables over a
//! primitive element alpha.

use alloc::vec::Vec;
use core::fmt;

/// Smallest and largest supported extension degree.
pub const MIN_DEGREE: u32 = 1;
pub const MAX_DEGREE: u32 = 8;

/// Conventional primitive polynomial for each degree, as a bitmask including
/// the leading term. `DEFAULT_POLYS[r]` is used for GF(2^r).
pub const DEFAULT_POLYS: [u16; 9] = [
    0,
    0b11,        // x + 1 (GF(2) proxy, alpha = 1)
    0b111,       // x^2 + x + 1
    0b1011,      // x^3 + x + 1
    0b1_0011,    // x^4 + x + 1
    0b10_0101,   // x^5 + x^2 + 1
    0b100_0011,  // x^6 + x + 1
    0b1000_1001, // x^7 + x^3 + 1
    0x11d,       // x^8 + x^4 + x^3 + x^2 + 1
];

/// A field element in polynomial-basis (bit-vector) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GfElem(pub u8);

impl GfElem {
    pub const ZERO: GfElem = GfElem(0);
    pub const ONE: GfElem = GfElem(1);

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for GfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// Extension degree outside `1..=8`.
    UnsupportedDegree(u32),
    /// The polynomial does not have degree `r`.
    WrongDegree { r: u32, poly: u32 },
    /// x does not generate the multiplicative group modulo the polynomial.
    /// `order` is the multiplicative order of x when x is a unit.
    NotPrimitive { poly: u32, order: Option<u32> },
    /// `inv(0)` or `log(0)`.
    ZeroElement,
    /// A value is not below `q`.
    OutOfRange(u32),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::UnsupportedDegree(r) => {
                write!(f, "extension degree {r} outside {MIN_DEGREE}..={MAX_DEGREE}")
            }
            FieldError::WrongDegree { r, poly } => {
                write!(f, "polynomial {poly:#b} does not have degree {r}")
            }
            FieldError::NotPrimitive { poly, order: Some(k) } => {
                write!(f, "polynomial {poly:#b} is not primitive: alpha^{k} = 1")
            }
            FieldError::NotPrimitive { poly, order: None } => {
                write!(f, "polynomial {poly:#b} is not primitive: x is not invertible")
            }
            FieldError::ZeroElement => write!(f, "zero has no inverse or logarithm"),
            FieldError::OutOfRange(v) => write!(f, "value {v} is not a field element"),
        }
    }
}

impl core::error::Error for FieldError {}

/// Description of GF(2^r) together with its exp/log tables.
///
/// Immutable after construction and cheap to clone.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldDesc {
    r: u32,
    q: u32,
    poly: u32,
    /// `exp[e]` = alpha^e for `e` in `0..2(q-1)`; the second half duplicates
    /// the first so products of two logs never need a reduction.
    exp: Vec<u8>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u16>,
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDesc")
            .field("r", &self.r)
            .field("q", &self.q)
            .field("poly", &format_args!("{:#b}", self.poly))
            .finish()
    }
}

impl FieldDesc {
    /// Builds GF(2^r). `poly` defaults to [`DEFAULT_POLYS`]`[r]`.
    pub fn new(r: u32, poly: Option<u32>) -> Result<Self, FieldError> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&r) {
            return Err(FieldError::UnsupportedDegree(r));
        }
        let poly = poly.unwrap_or(DEFAULT_POLYS[r as usize] as u32);
        if poly >> r != 1 {
            return Err(FieldError::WrongDegree { r, poly });
        }
        let q = 1u32 << r;
        let order = (q - 1) as usize;

        let mut exp = Vec::with_capacity(2 * order);
        let mut x = 1u32;
        for k in 0..order {
            if k > 0 && x == 1 {
                return Err(FieldError::NotPrimitive { poly, order: Some(k as u32) });
            }
            exp.push(x as u8);
            x <<= 1;
            if x & q != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            // The unit group has at most q-1 elements, so a unit x would have
            // returned to 1 already.
            return Err(FieldError::NotPrimitive { poly, order: None });
        }
        let mut log = alloc::vec![0u16; q as usize];
        for (e, &v) in exp.iter().enumerate() {
            log[v as usize] = e as u16;
        }
        exp.extend_from_within(..order);
        Ok(FieldDesc { r, q, poly, exp, log })
    }

    /// Default field of size `q` (must be a power of two between 2 and 256).
    pub fn with_size(q: u32) -> Result<Self, FieldError> {
        if !q.is_power_of_two() || q < 2 {
            return Err(FieldError::OutOfRange(q));
        }
        Self::new(q.trailing_zeros(), None)
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Size of the multiplicative group, `q - 1`.
    #[inline]
    pub fn order(&self) -> u32 {
        self.q - 1
    }

    #[inline]
    pub fn primitive_poly(&self) -> u32 {
        self.poly
    }

    /// Checked conversion from a raw value.
    pub fn elem(&self, value: u32) -> Result<GfElem, FieldError> {
        if value < self.q {
            Ok(GfElem(value as u8))
        } else {
            Err(FieldError::OutOfRange(value))
        }
    }

    /// All elements in increasing value order.
    pub fn elements(&self) -> impl Iterator<Item = GfElem> + '_ {
        (0..self.q).map(|v| GfElem(v as u8))
    }

    #[inline]
    pub fn add(&self, a: GfElem, b: GfElem) -> GfElem {
        GfElem(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: GfElem, b: GfElem) -> GfElem {
        if a.0 == 0 || b.0 == 0 {
            return GfElem::ZERO;
        }
        let e = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        GfElem(self.exp[e])
    }

    pub fn inv(&self, a: GfElem) -> Result<GfElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        let e = self.log[a.0 as usize] as u32;
        Ok(GfElem(self.exp[((self.order() - e) % self.order()) as usize]))
    }

    /// `a / b` for nonzero `b`.
    pub fn div(&self, a: GfElem, b: GfElem) -> Result<GfElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// alpha^e for any integer `e`, reduced modulo `q - 1`.
    #[inline]
    pub fn pow_alpha(&self, e: i64) -> GfElem {
        GfElem(self.exp[self.reduce_exponent(e) as usize])
    }

    /// Discrete logarithm in `0..q-1`.
    pub fn log_alpha(&self, a: GfElem) -> Result<u32, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        if a.0 as u32 >= self.q {
            return Err(FieldError::OutOfRange(a.0 as u32));
        }
        Ok(self.log[a.0 as usize] as u32)
    }

    /// Exponent reduced into `0..q-1`.
    #[inline]
    pub fn reduce_exponent(&self, e: i64) -> u32 {
        e.rem_euclid(self.order() as i64) as u32
    }

    /// `a^k` by square-and-multiply on the log table.
    pub fn pow(&self, a: GfElem, k: u64) -> GfElem {
        if k == 0 {
            return GfElem::ONE;
        }
        if a.0 == 0 {
            return GfElem::ZERO;
        }
        let e = self.log[a.0 as usize] as u64 * k;
        GfElem(self.exp[(e % self.order() as u64) as usize])
    }

    /// The MCPM admissibility check `(q - 1) | lambda * z`.
    pub fn admits_lambda(&self, lambda: u32, z: u32) -> bool {
        (lambda as u64 * z as u64) % self.order() as u64 == 0
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Smallest `lambda >= 1` with `(q - 1) | lambda * z`.
pub fn min_lambda(q: u32, z: u32) -> u32 {
    let order = (q - 1) as u64;
    (order / gcd(order, z as u64)) as u32
}

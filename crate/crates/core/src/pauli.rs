//! Signed qubit Weyl operators `W(a,b) = X^a Z^b`.
//!
//! Every unitary used by the retrieval protocols is one of these eight
//! elements `±W(a,b)`. Signs are carried as a `Z_2` exponent; the qubit Weyl
//! group closes over real signs, so no `i` phases are ever needed and the
//! bookkeeping is exact.
//!
//! Labels `(a,b)` also double as the file alphabet: a 2-bit file block, a
//! server answer, and a Bell-measurement outcome are all [`WeylLabel`]s, and
//! adding them is addition in `Z_2^2`.

use std::fmt;
use std::ops::{Add, AddAssign};

use nalgebra::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A 2×2 complex matrix, row-major.
pub type Matrix2 = [[Complex<f64>; 2]; 2];

/// The label `(a,b)` of `W(a,b)`; `a` is the X exponent and `b` the Z exponent.
///
/// Packed into the low two bits of a byte as `a << 1 | b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeylLabel(u8);

impl WeylLabel {
    pub const I: WeylLabel = WeylLabel(0b00);
    pub const Z: WeylLabel = WeylLabel(0b01);
    pub const X: WeylLabel = WeylLabel(0b10);
    pub const XZ: WeylLabel = WeylLabel(0b11);

    /// All four labels in the order `(0,0), (0,1), (1,0), (1,1)`.
    pub const ALL: [WeylLabel; 4] = [Self::I, Self::Z, Self::X, Self::XZ];

    pub fn new(a: u8, b: u8) -> Self {
        WeylLabel(((a & 1) << 1) | (b & 1))
    }

    /// Builds a label from its packed form; only the low two bits are used.
    pub fn from_bits(bits: u8) -> Self {
        WeylLabel(bits & 0b11)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn a(self) -> u8 {
        self.0 >> 1
    }

    pub fn b(self) -> u8 {
        self.0 & 1
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    pub fn unsigned(self) -> SignedWeyl {
        SignedWeyl::new(false, self)
    }
}

impl Add for WeylLabel {
    type Output = WeylLabel;

    fn add(self, rhs: WeylLabel) -> WeylLabel {
        WeylLabel(self.0 ^ rhs.0)
    }
}

impl AddAssign for WeylLabel {
    fn add_assign(&mut self, rhs: WeylLabel) {
        self.0 ^= rhs.0;
    }
}

impl std::iter::Sum for WeylLabel {
    fn sum<I: Iterator<Item = WeylLabel>>(iter: I) -> WeylLabel {
        iter.fold(WeylLabel::I, |acc, x| acc + x)
    }
}

impl fmt::Display for WeylLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({},{})", self.a(), self.b())
    }
}

impl Serialize for WeylLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.a(), self.b()].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeylLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [a, b] = <[u8; 2]>::deserialize(deserializer)?;
        if a > 1 || b > 1 {
            return Err(serde::de::Error::custom(
                "weyl label entries must be 0 or 1",
            ));
        }
        Ok(WeylLabel::new(a, b))
    }
}

/// `(-1)^sign W(label)`: an element of the 8-element signed Weyl group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct SignedWeyl {
    pub sign: bool,
    pub label: WeylLabel,
}

impl SignedWeyl {
    pub const IDENTITY: SignedWeyl = SignedWeyl {
        sign: false,
        label: WeylLabel::I,
    };

    pub fn new(sign: bool, label: WeylLabel) -> Self {
        SignedWeyl { sign, label }
    }

    /// All eight group elements, `+` signs first.
    pub fn all() -> impl Iterator<Item = SignedWeyl> {
        [false, true].into_iter().flat_map(|s| {
            WeylLabel::ALL
                .into_iter()
                .map(move |l| SignedWeyl::new(s, l))
        })
    }

    pub fn negate(self) -> Self {
        SignedWeyl::new(!self.sign, self.label)
    }
}

impl fmt::Display for SignedWeyl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign { '-' } else { '+' };
        write!(f, "{sign}{}", self.label)
    }
}

/// Product `x · y`.
///
/// `W(a1,b1) W(a2,b2) = (-1)^{b1 a2} W(a1+a2, b1+b2)`.
pub fn compose(x: SignedWeyl, y: SignedWeyl) -> SignedWeyl {
    let swap = x.label.b() & y.label.a() == 1;
    SignedWeyl::new(x.sign ^ y.sign ^ swap, x.label + y.label)
}

/// Conjugate transpose; `W(a,b)† = (-1)^{ab} W(a,b)`.
pub fn adjoint(x: SignedWeyl) -> SignedWeyl {
    let flip = x.label.a() & x.label.b() == 1;
    SignedWeyl::new(x.sign ^ flip, x.label)
}

/// The exponent `s` with `W(x) W(y) = (-1)^s W(y) W(x)`.
pub fn commutation_sign(x: WeylLabel, y: WeylLabel) -> u8 {
    (x.b() & y.a()) ^ (x.a() & y.b())
}

/// Moves an operator across `|Φ⟩`: returns `y` with `(I ⊗ W_x)|Φ⟩ = (W_y ⊗ I)|Φ⟩`.
///
/// The map is an involution, so it also converts `(W_x ⊗ I)` into `(I ⊗ W_y)`.
pub fn bell_transfer(x: SignedWeyl) -> SignedWeyl {
    adjoint(x)
}

/// Explicit matrix `(-1)^sign X^a Z^b`. Entries are exactly `0` or `±1`.
pub fn matrix(x: SignedWeyl) -> Matrix2 {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let s = if x.sign { -one } else { one };
    // Z^b = diag(1, (-1)^b); X^a swaps rows.
    let z1 = if x.label.b() == 1 { -s } else { s };
    if x.label.a() == 0 {
        [[s, zero], [zero, z1]]
    } else {
        [[zero, z1], [s, zero]]
    }
}

/// A file, server answer, or outcome spanning `ℓ` blocks, each a [`WeylLabel`].
///
/// Stored packed, 32 blocks per 64-bit word, so block-wise `Z_2^2` addition
/// is a word-wise XOR.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelVector {
    words: Vec<u64>,
    len: usize,
}

const BLOCKS_PER_WORD: usize = 32;

impl LabelVector {
    pub fn zeros(len: usize) -> Self {
        LabelVector {
            words: vec![0; len.div_ceil(BLOCKS_PER_WORD)],
            len,
        }
    }

    pub fn from_labels(labels: &[WeylLabel]) -> Self {
        let mut v = Self::zeros(labels.len());
        for (p, &l) in labels.iter().enumerate() {
            v.set(p, l);
        }
        v
    }

    /// Unpacks the low `2·len` bits of `word`, block 0 in the lowest bits.
    ///
    /// Panics if `len > 32`.
    pub fn from_packed(word: u64, len: usize) -> Self {
        assert!(
            len <= BLOCKS_PER_WORD,
            "a single word holds at most 32 blocks"
        );
        let mask = if len == BLOCKS_PER_WORD {
            u64::MAX
        } else {
            (1u64 << (2 * len)) - 1
        };
        LabelVector {
            words: if len == 0 { vec![] } else { vec![word & mask] },
            len,
        }
    }

    /// The packed word, when the vector fits in one.
    pub fn packed(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, p: usize) -> WeylLabel {
        assert!(p < self.len, "block {p} out of range (len {})", self.len);
        let word = self.words[p / BLOCKS_PER_WORD];
        WeylLabel::from_bits((word >> (2 * (p % BLOCKS_PER_WORD))) as u8)
    }

    pub fn set(&mut self, p: usize, label: WeylLabel) {
        assert!(p < self.len, "block {p} out of range (len {})", self.len);
        let shift = 2 * (p % BLOCKS_PER_WORD);
        let word = &mut self.words[p / BLOCKS_PER_WORD];
        *word = (*word & !(0b11 << shift)) | ((label.bits() as u64) << shift);
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = WeylLabel> + '_ {
        (0..self.len).map(|p| self.get(p))
    }

    pub fn to_labels(&self) -> Vec<WeylLabel> {
        self.iter().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

impl Add<&LabelVector> for &LabelVector {
    type Output = LabelVector;

    fn add(self, rhs: &LabelVector) -> LabelVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LabelVector> for LabelVector {
    fn add_assign(&mut self, rhs: &LabelVector) {
        assert_eq!(self.len, rhs.len, "block counts differ");
        for (w, r) in self.words.iter_mut().zip(&rhs.words) {
            *w ^= r;
        }
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (p, l) in self.iter().enumerate() {
            if p > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({},{})", l.a(), l.b())?;
        }
        write!(f, "]")
    }
}

impl Serialize for LabelVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_labels().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LabelVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let labels = Vec::<WeylLabel>::deserialize(deserializer)?;
        Ok(LabelVector::from_labels(&labels))
    }
}

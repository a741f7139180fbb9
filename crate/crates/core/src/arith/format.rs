use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::crossbar::Flags;
use crate::error::{Error, Result};

/// Storage format of one real number. Complex numbers are two adjacent reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumberFormat {
    /// Two's complement with `frac_bits` fractional bits.
    Fixed { bits: u32, frac_bits: u32 },
    /// Sign, biased exponent and stored mantissa; round-to-nearest-even,
    /// subnormals flushed to zero.
    Float { exp_bits: u32, man_bits: u32 },
}

impl NumberFormat {
    pub const SINGLE: NumberFormat = NumberFormat::Float {
        exp_bits: 8,
        man_bits: 23,
    };
    pub const HALF: NumberFormat = NumberFormat::Float {
        exp_bits: 5,
        man_bits: 10,
    };

    pub fn fixed(bits: u32, frac_bits: u32) -> Result<Self> {
        let f = NumberFormat::Fixed { bits, frac_bits };
        f.validate()?;
        Ok(f)
    }

    pub fn float(exp_bits: u32, man_bits: u32) -> Result<Self> {
        let f = NumberFormat::Float { exp_bits, man_bits };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NumberFormat::Fixed { bits, frac_bits } => {
                if !(2..=32).contains(&bits) || frac_bits >= bits {
                    return Err(Error::Format(format!("fixed<{bits},{frac_bits}>")));
                }
            }
            NumberFormat::Float { exp_bits, man_bits } => {
                if !(3..=11).contains(&exp_bits) || !(2..=52).contains(&man_bits) || 1 + exp_bits + man_bits > 64 {
                    return Err(Error::Format(format!("float<e{exp_bits},m{man_bits}>")));
                }
            }
        }
        Ok(())
    }

    /// Total width N of one real.
    pub fn bits(&self) -> usize {
        match *self {
            NumberFormat::Fixed { bits, .. } => bits as usize,
            NumberFormat::Float { exp_bits, man_bits } => (1 + exp_bits + man_bits) as usize,
        }
    }

    /// Width of one complex number (real part then imaginary part).
    pub fn complex_bits(&self) -> usize {
        2 * self.bits()
    }

    pub fn is_float(&self) -> bool {
        matches!(self, NumberFormat::Float { .. })
    }

    pub fn mask(&self) -> u64 {
        low_mask(self.bits())
    }

    pub fn sign_bit(&self) -> usize {
        self.bits() - 1
    }

    /// Round a double to this format (round-to-nearest-even; subnormals flush to zero).
    pub fn encode(&self, v: f64) -> u64 {
        self.encode_with_flags(v).0
    }

    pub fn encode_with_flags(&self, v: f64) -> (u64, Flags) {
        match *self {
            NumberFormat::Fixed { bits, frac_bits } => {
                let scaled = (v * (frac_bits as f64).exp2()).round_ties_even();
                ((scaled as i64 as u64) & low_mask(bits as usize), Flags::default())
            }
            NumberFormat::Float { exp_bits, man_bits } => {
                let spec = FloatSpec::new(exp_bits, man_bits);
                if v.is_nan() {
                    return (spec.nan(), Flags { invalid: true, ..Flags::default() });
                }
                let sign = v.is_sign_negative();
                if v.is_infinite() {
                    return (spec.inf(sign), Flags { overflow: true, ..Flags::default() });
                }
                if v == 0.0 {
                    return (spec.zero(sign), Flags::default());
                }
                let raw = v.to_bits();
                let e = ((raw >> 52) & 0x7ff) as i32;
                let frac = raw & ((1u64 << 52) - 1);
                let (sig, scale) = if e == 0 {
                    (frac, -1074)
                } else {
                    (frac | (1u64 << 52), e - 1075)
                };
                spec.round_pack(sign, sig as u128, scale, false)
            }
        }
    }

    /// Exact value of an encoding (subnormal encodings read as zero).
    pub fn decode(&self, bits: u64) -> f64 {
        match *self {
            NumberFormat::Fixed { bits: n, frac_bits } => {
                let n = n as usize;
                let v = bits & low_mask(n);
                let signed = if (v >> (n - 1)) & 1 == 1 {
                    v as i64 - (1i64 << n)
                } else {
                    v as i64
                };
                signed as f64 / (frac_bits as f64).exp2()
            }
            NumberFormat::Float { exp_bits, man_bits } => {
                FloatSpec::new(exp_bits, man_bits).decode(bits)
            }
        }
    }

    pub fn encode_complex(&self, z: Complex64) -> u64 {
        let n = self.bits();
        self.encode(z.re) | (self.encode(z.im) << n)
    }

    pub fn decode_complex(&self, bits: u64) -> Complex64 {
        let n = self.bits();
        Complex64::new(self.decode(bits & self.mask()), self.decode((bits >> n) & self.mask()))
    }

    pub fn float_spec(&self) -> Option<FloatSpec> {
        match *self {
            NumberFormat::Float { exp_bits, man_bits } => Some(FloatSpec::new(exp_bits, man_bits)),
            NumberFormat::Fixed { .. } => None,
        }
    }
}

impl fmt::Display for NumberFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NumberFormat::SINGLE => write!(f, "single"),
            NumberFormat::HALF => write!(f, "half"),
            NumberFormat::Fixed { bits, frac_bits } => write!(f, "fixed{bits}q{frac_bits}"),
            NumberFormat::Float { exp_bits, man_bits } => write!(f, "float-e{exp_bits}m{man_bits}"),
        }
    }
}

pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Field layout of a binary floating-point format, with the host-side
/// rounding rule shared by encoders and the reference emulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloatSpec {
    pub exp_bits: u32,
    pub man_bits: u32,
}

impl FloatSpec {
    pub fn new(exp_bits: u32, man_bits: u32) -> Self {
        Self { exp_bits, man_bits }
    }

    pub fn bits(&self) -> u32 {
        1 + self.exp_bits + self.man_bits
    }

    /// Significand precision including the hidden bit.
    pub fn precision(&self) -> u32 {
        self.man_bits + 1
    }

    pub fn bias(&self) -> i32 {
        (1 << (self.exp_bits - 1)) - 1
    }

    pub fn max_exp_field(&self) -> u64 {
        (1u64 << self.exp_bits) - 1
    }

    pub fn sign(&self, bits: u64) -> bool {
        (bits >> (self.exp_bits + self.man_bits)) & 1 == 1
    }

    pub fn exp_field(&self, bits: u64) -> u64 {
        (bits >> self.man_bits) & self.max_exp_field()
    }

    pub fn man_field(&self, bits: u64) -> u64 {
        bits & low_mask(self.man_bits as usize)
    }

    pub fn pack(&self, sign: bool, exp: u64, man: u64) -> u64 {
        ((sign as u64) << (self.exp_bits + self.man_bits)) | (exp << self.man_bits) | man
    }

    pub fn zero(&self, sign: bool) -> u64 {
        self.pack(sign, 0, 0)
    }

    pub fn inf(&self, sign: bool) -> u64 {
        self.pack(sign, self.max_exp_field(), 0)
    }

    pub fn nan(&self) -> u64 {
        self.pack(false, self.max_exp_field(), 1 << (self.man_bits - 1))
    }

    pub fn is_special(&self, bits: u64) -> bool {
        self.exp_field(bits) == self.max_exp_field()
    }

    pub fn decode(&self, bits: u64) -> f64 {
        let s = if self.sign(bits) { -1.0 } else { 1.0 };
        let e = self.exp_field(bits);
        let m = self.man_field(bits);
        if e == 0 {
            return s * 0.0;
        }
        if e == self.max_exp_field() {
            return if m == 0 { s * f64::INFINITY } else { f64::NAN };
        }
        let sig = (m | (1u64 << self.man_bits)) as f64;
        s * sig * ((e as i32 - self.bias() - self.man_bits as i32) as f64).exp2()
    }

    /// Round `(-1)^sign * sig * 2^scale` (plus a nonzero remainder below the
    /// last bit of `sig` when `sticky`) to nearest-even with unbounded exponent,
    /// then flush to zero below the normal range or saturate to infinity above it.
    pub fn round_pack(&self, sign: bool, sig: u128, scale: i32, sticky: bool) -> (u64, Flags) {
        let mut flags = Flags::default();
        if sig == 0 {
            if sticky {
                flags.underflow = true;
            }
            return (self.zero(sign), flags);
        }
        let p = self.precision() as i32;
        let msb = 127 - sig.leading_zeros() as i32;
        let (mut kept, guard, rest) = if msb + 1 > p {
            let sh = (msb + 1 - p) as u32;
            let kept = sig >> sh;
            let guard = (sig >> (sh - 1)) & 1 == 1;
            let rest = (sig & ((1u128 << (sh - 1)) - 1)) != 0 || sticky;
            (kept, guard, rest)
        } else {
            (sig << (p - msb - 1), false, sticky)
        };
        let mut exp = scale + msb;
        if guard && (rest || kept & 1 == 1) {
            kept += 1;
            if kept >> p != 0 {
                kept >>= 1;
                exp += 1;
            }
        }
        let biased = exp + self.bias();
        if biased <= 0 {
            flags.underflow = true;
            return (self.zero(sign), flags);
        }
        if biased as u64 >= self.max_exp_field() {
            flags.overflow = true;
            return (self.inf(sign), flags);
        }
        let man = (kept as u64) & low_mask(self.man_bits as usize);
        (self.pack(sign, biased as u64, man), flags)
    }
}

//! Bit-exact host model of the in-memory arithmetic.

use num_complex::Complex64;

use crate::arith::format::low_mask;
use crate::arith::{FloatSpec, NumberFormat};
use crate::crossbar::Flags;

/// Evaluates the same operations as the crossbar schedules on encoded words,
/// with identical rounding, flushing and wrap-around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormatEmulator {
    pub format: NumberFormat,
}

impl FormatEmulator {
    pub fn new(format: NumberFormat) -> Self {
        Self { format }
    }

    pub fn encode(&self, v: f64) -> u64 {
        self.format.encode(v)
    }

    pub fn decode(&self, bits: u64) -> f64 {
        self.format.decode(bits)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.add_flags(a, b).0
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.sub_flags(a, b).0
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.mul_flags(a, b).0
    }

    pub fn add_flags(&self, a: u64, b: u64) -> (u64, Flags) {
        match self.format {
            NumberFormat::Fixed { bits, .. } => (a.wrapping_add(b) & low_mask(bits as usize), Flags::default()),
            NumberFormat::Float { exp_bits, man_bits } => {
                float_add(FloatSpec::new(exp_bits, man_bits), a, b)
            }
        }
    }

    pub fn sub_flags(&self, a: u64, b: u64) -> (u64, Flags) {
        match self.format {
            NumberFormat::Fixed { bits, .. } => (a.wrapping_sub(b) & low_mask(bits as usize), Flags::default()),
            NumberFormat::Float { exp_bits, man_bits } => {
                let spec = FloatSpec::new(exp_bits, man_bits);
                float_add(spec, a, b ^ (1u64 << (spec.bits() - 1)))
            }
        }
    }

    pub fn mul_flags(&self, a: u64, b: u64) -> (u64, Flags) {
        match self.format {
            NumberFormat::Fixed { bits, frac_bits } => {
                let n = bits as usize;
                let p = sign_extend(a, n) as i128 * sign_extend(b, n) as i128;
                ((p >> frac_bits) as u64 & low_mask(n), Flags::default())
            }
            NumberFormat::Float { exp_bits, man_bits } => {
                float_mul(FloatSpec::new(exp_bits, man_bits), a, b)
            }
        }
    }

    pub fn negate(&self, a: u64) -> u64 {
        match self.format {
            NumberFormat::Fixed { bits, .. } => a.wrapping_neg() & low_mask(bits as usize),
            NumberFormat::Float { .. } => a ^ (1u64 << (self.format.bits() - 1)),
        }
    }

    pub fn halve_flags(&self, a: u64) -> (u64, Flags) {
        match self.format {
            NumberFormat::Fixed { bits, .. } => {
                let n = bits as usize;
                ((sign_extend(a, n) >> 1) as u64 & low_mask(n), Flags::default())
            }
            NumberFormat::Float { exp_bits, man_bits } => {
                let s = FloatSpec::new(exp_bits, man_bits);
                let e = s.exp_field(a);
                let mut flags = Flags::default();
                if e == 0 {
                    return (s.zero(s.sign(a)), flags);
                }
                if e == 1 {
                    flags.underflow = true;
                    return (s.zero(s.sign(a)), flags);
                }
                flags.invalid = e == s.max_exp_field();
                (s.pack(s.sign(a), e - 1, s.man_field(a)), flags)
            }
        }
    }

    pub fn halve(&self, a: u64) -> u64 {
        self.halve_flags(a).0
    }

    fn split(&self, z: u64) -> (u64, u64) {
        let n = self.format.bits();
        (z & self.format.mask(), (z >> n) & self.format.mask())
    }

    fn join(&self, re: u64, im: u64) -> u64 {
        re | (im << self.format.bits())
    }

    pub fn cadd(&self, x: u64, y: u64) -> u64 {
        let ((a, b), (c, d)) = (self.split(x), self.split(y));
        self.join(self.add(a, c), self.add(b, d))
    }

    pub fn csub(&self, x: u64, y: u64) -> u64 {
        let ((a, b), (c, d)) = (self.split(x), self.split(y));
        self.join(self.sub(a, c), self.sub(b, d))
    }

    pub fn cmul(&self, x: u64, y: u64) -> u64 {
        let ((a, b), (c, d)) = (self.split(x), self.split(y));
        let re = self.sub(self.mul(a, c), self.mul(b, d));
        let im = self.add(self.mul(a, d), self.mul(b, c));
        self.join(re, im)
    }

    pub fn chalve(&self, x: u64) -> u64 {
        let (a, b) = self.split(x);
        self.join(self.halve(a), self.halve(b))
    }

    pub fn conj(&self, x: u64) -> u64 {
        let (a, b) = self.split(x);
        self.join(a, self.negate(b))
    }

    pub fn mul_by_i(&self, x: u64) -> u64 {
        let (a, b) = self.split(x);
        self.join(self.negate(b), a)
    }

    /// Returns `(u + w v, u - w v)`.
    pub fn butterfly(&self, u: u64, v: u64, w: u64) -> (u64, u64) {
        let t = self.cmul(w, v);
        (self.cadd(u, t), self.csub(u, t))
    }

    pub fn encode_complex(&self, z: Complex64) -> u64 {
        self.format.encode_complex(z)
    }

    pub fn decode_complex(&self, z: u64) -> Complex64 {
        self.format.decode_complex(z)
    }
}

fn sign_extend(v: u64, n: usize) -> i64 {
    let sh = 64 - n as u32;
    ((v << sh) as i64) >> sh
}

fn special(spec: FloatSpec, a: u64, b: u64) -> bool {
    spec.is_special(a) || spec.is_special(b)
}

/// Significand and exponent of the last significand bit; zero for DAZ inputs.
fn parts(spec: FloatSpec, a: u64) -> (u128, i32) {
    let e = spec.exp_field(a);
    if e == 0 {
        return (0, 0);
    }
    let sig = spec.man_field(a) | (1u64 << spec.man_bits);
    (sig as u128, e as i32 - spec.bias() - spec.man_bits as i32)
}

fn float_add(spec: FloatSpec, a: u64, b: u64) -> (u64, Flags) {
    let invalid = special(spec, a, b);
    let (sa, sb) = (spec.sign(a), spec.sign(b));
    let (ma, ea) = parts(spec, a);
    let (mb, eb) = parts(spec, b);
    let (out, mut flags) = if ma == 0 && mb == 0 {
        (spec.zero(sa && sb), Flags::default())
    } else if mb == 0 {
        spec.round_pack(sa, ma, ea, false)
    } else if ma == 0 {
        spec.round_pack(sb, mb, eb, false)
    } else {
        // order by magnitude
        let ((ml, el, sl), (ms, es)) = if (ea, ma) >= (eb, mb) {
            ((ma, ea, sa), (mb, eb))
        } else {
            ((mb, eb, sb), (ma, ea))
        };
        let d = (el - es) as u32;
        let sub = sa != sb;
        let p = spec.precision();
        if d <= p + 3 {
            let big = ml << d;
            let mag = if sub { big - ms } else { big + ms };
            if mag == 0 {
                (spec.zero(sa && sb), Flags::default())
            } else {
                spec.round_pack(sl, mag, es, false)
            }
        } else {
            // the smaller operand only contributes a sticky bit
            let big = ml << 3;
            let mag = if sub { big - 1 } else { big };
            spec.round_pack(sl, mag, el - 3, true)
        }
    };
    flags.invalid |= invalid;
    (out, flags)
}

fn float_mul(spec: FloatSpec, a: u64, b: u64) -> (u64, Flags) {
    let invalid = special(spec, a, b);
    let sign = spec.sign(a) != spec.sign(b);
    let (ma, ea) = parts(spec, a);
    let (mb, eb) = parts(spec, b);
    let (out, mut flags) = if ma == 0 || mb == 0 {
        (spec.zero(sign), Flags::default())
    } else {
        spec.round_pack(sign, ma * mb, ea + eb, false)
    };
    flags.invalid |= invalid;
    (out, flags)
}

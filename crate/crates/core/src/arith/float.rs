//! Floating-point add, subtract, multiply and halve as gate circuits.
//!
//! Rounding is round-to-nearest-even. Subnormal inputs are read as zero and
//! results below the normal range are flushed to a signed zero (raising the
//! underflow flag); results above it saturate to infinity (overflow flag).
//! Operands with an all-ones exponent raise the invalid flag; their result
//! is otherwise unspecified.

use super::circuit::{Bits, Circuit, Sig};
use super::format::FloatSpec;
use crate::crossbar::FlagKind;

struct Unpacked {
    sign: Sig,
    exp: Bits,
    man: Bits,
}

fn unpack(spec: FloatSpec, word: &[Sig]) -> Unpacked {
    let m = spec.man_bits as usize;
    let e = spec.exp_bits as usize;
    assert_eq!(word.len(), m + e + 1);
    Unpacked {
        man: word[..m].to_vec(),
        exp: word[m..m + e].to_vec(),
        sign: word[m + e],
    }
}

fn and_all(c: &mut Circuit, bits: &[Sig]) -> Sig {
    let inv: Bits = bits.iter().map(|&b| c.not(b)).collect();
    c.nor_all(&inv)
}

fn flag_specials(c: &mut Circuit, a: &Unpacked, b: &Unpacked) {
    let sa = and_all(c, &a.exp);
    let sb = and_all(c, &b.exp);
    let any = c.or(sa, sb);
    c.probe(any, FlagKind::Invalid);
}

/// Sign-extend-free widening of an unsigned field.
fn widen(bits: &[Sig], width: usize) -> Bits {
    let mut v = bits.to_vec();
    v.resize(width, Sig::Zero);
    v
}

fn konst(value: i64, width: usize) -> Bits {
    (0..width).map(|i| Sig::konst((value >> i) & 1 == 1)).collect()
}

/// Round a normalized significand and pack the result.
///
/// `sig` holds the top `p` bits with the leading one at the top, `guard` and
/// `sticky` the discarded remainder, and `exp` the biased exponent of the
/// leading bit as an `e + 2` bit two's complement value. `zero` forces an exact
/// signed zero without flags.
#[allow(clippy::too_many_arguments)]
fn round_pack(
    c: &mut Circuit,
    spec: FloatSpec,
    sign: Sig,
    sig: &[Sig],
    guard: Sig,
    sticky: Sig,
    exp: &[Sig],
    zero: Sig,
) -> Bits {
    let m = spec.man_bits as usize;
    let e = spec.exp_bits as usize;
    let so = c.or(sticky, sig[0]);
    let up = c.and(guard, so);
    let zeros = vec![Sig::Zero; sig.len()];
    let (rounded, carry) = c.add(sig, &zeros, up);
    // all-ones significand rounds to a power of two: mantissa bits are already zero
    let mut inc = vec![Sig::Zero; e + 2];
    inc[0] = carry;
    let (exp, _) = c.add(exp, &inc, Sig::Zero);

    let neg = exp[e + 1];
    let is_zero = c.nor_all(&exp);
    let under = c.or(neg, is_zero);
    let low_ones = and_all(c, &exp[..e]);
    let big = c.or(exp[e], low_ones);
    let over = c.and_not(big, under);

    let kill = c.or(zero, under);
    let over = c.and_not(over, zero);
    let clear = c.or(kill, over);
    let under_flag = c.and_not(under, zero);
    c.probe(under_flag, FlagKind::Underflow);
    c.probe(over, FlagKind::Overflow);

    let mut out = Vec::with_capacity(m + e + 1);
    for &b in &rounded[..m] {
        out.push(c.and_not(b, clear));
    }
    for &b in &exp[..e] {
        let kept = c.and_not(b, kill);
        out.push(c.or(kept, over));
    }
    out.push(sign);
    out
}

/// `a + b`, or `a - b` when `negate_b`.
pub fn add(c: &mut Circuit, spec: FloatSpec, a: &[Sig], b: &[Sig], negate_b: bool) -> Bits {
    let p = spec.precision() as usize;
    let e = spec.exp_bits as usize;
    let a = unpack(spec, a);
    let mut b = unpack(spec, b);
    flag_specials(c, &a, &b);
    if negate_b {
        b.sign = c.not(b.sign);
    }

    let sig_of = |c: &mut Circuit, u: &Unpacked| -> Bits {
        let h = c.or_all(&u.exp);
        let mut s: Bits = u.man.iter().map(|&x| c.and(x, h)).collect();
        s.push(h);
        s
    };
    let sa = sig_of(c, &a);
    let sb = sig_of(c, &b);

    // order by magnitude
    let key_a: Bits = sa[..p - 1].iter().chain(&a.exp).copied().collect();
    let key_b: Bits = sb[..p - 1].iter().chain(&b.exp).copied().collect();
    let a_ge = c.ge(&key_a, &key_b);
    let swap = c.not(a_ge);
    let e_l = c.mux_bits(swap, &a.exp, &b.exp);
    let e_s = c.mux_bits(swap, &b.exp, &a.exp);
    let s_l = c.mux_bits(swap, &sa, &sb);
    let s_s = c.mux_bits(swap, &sb, &sa);
    let sign_l = c.mux(swap, a.sign, b.sign);
    let eff_sub = c.xor(a.sign, b.sign);

    // align the smaller operand: layout [sticky, round, guard, sig]
    let (d, _) = c.sub(&e_l, &e_s);
    let w = p + 3;
    let mut x: Bits = vec![Sig::Zero; 3];
    x.extend_from_slice(&s_s);
    let mut k = 0;
    while k < e && (1usize << k) < w {
        let sh = 1usize << k;
        let lost = c.or_all(&x[..=sh.min(w - 1)]);
        let mut shifted: Bits = (0..w)
            .map(|i| if i + sh < w { x[i + sh] } else { Sig::Zero })
            .collect();
        shifted[0] = lost;
        x = c.mux_bits(d[k], &x, &shifted);
        k += 1;
    }
    if k < e {
        let big = c.or_all(&d[k..]);
        let any = c.or_all(&x);
        let mut flushed = vec![Sig::Zero; w];
        flushed[0] = any;
        x = c.mux_bits(big, &x, &flushed);
    }

    // add or subtract magnitudes over p + 4 bits
    let mut y: Bits = vec![Sig::Zero; 3];
    y.extend_from_slice(&s_l);
    y.push(Sig::Zero);
    x.push(Sig::Zero);
    let xs: Bits = x.iter().map(|&b| c.xor(b, eff_sub)).collect();
    let (sum, _) = c.add(&y, &xs, eff_sub);
    let zero = c.nor_all(&sum);

    // normalize so the leading one sits at the top bit
    let wn = w + 1;
    let mut n = sum;
    let mut lzc: Bits = Vec::new();
    let mut stages = 0;
    while (1usize << stages) < wn {
        stages += 1;
    }
    for k in (0..stages).rev() {
        let sh = 1usize << k;
        let top_zero = c.nor_all(&n[wn - sh..]);
        let shifted: Bits = (0..wn)
            .map(|i| if i >= sh { n[i - sh] } else { Sig::Zero })
            .collect();
        n = c.mux_bits(top_zero, &n, &shifted);
        lzc.push(top_zero);
    }
    lzc.reverse();

    // exp = e_l + 1 - lzc
    let el = widen(&e_l, e + 2);
    let nl: Bits = widen(&lzc, e + 2).iter().map(|&b| c.not(b)).collect();
    let (t, _) = c.add(&el, &nl, Sig::One);
    let (exp, _) = c.add(&t, &konst(1, e + 2), Sig::Zero);

    let sig = &n[wn - p..];
    let guard = n[3];
    let sticky = c.or_all(&n[..3]);
    let zero_sign = c.and(a.sign, b.sign);
    let sign = c.mux(zero, sign_l, zero_sign);
    round_pack(c, spec, sign, sig, guard, sticky, &exp, zero)
}

pub fn mul(c: &mut Circuit, spec: FloatSpec, a: &[Sig], b: &[Sig]) -> Bits {
    let p = spec.precision() as usize;
    let e = spec.exp_bits as usize;
    let a = unpack(spec, a);
    let b = unpack(spec, b);
    flag_specials(c, &a, &b);
    let sign = c.xor(a.sign, b.sign);
    let za = c.nor_all(&a.exp);
    let zb = c.nor_all(&b.exp);
    let zero = c.or(za, zb);

    let mut sa = a.man.clone();
    sa.push(Sig::One);
    let mut sb = b.man.clone();
    sb.push(Sig::One);
    let prod = multiply(c, &sa, &sb);

    let top = prod[2 * p - 1];
    let sig = c.mux_bits(top, &prod[p - 1..2 * p - 1], &prod[p..]);
    let guard = c.mux(top, prod[p - 2], prod[p - 1]);
    let low = c.or_all(&prod[..p - 2]);
    let low_hi = c.or(low, prod[p - 2]);
    let sticky = c.mux(top, low, low_hi);

    let (t, _) = c.add(&widen(&a.exp, e + 2), &widen(&b.exp, e + 2), top);
    let (exp, _) = c.add(&t, &konst(-(spec.bias() as i64), e + 2), Sig::Zero);
    round_pack(c, spec, sign, &sig, guard, sticky, &exp, zero)
}

/// Unsigned array multiplier; returns all `a.len() + b.len()` product bits.
pub fn multiply(c: &mut Circuit, a: &[Sig], b: &[Sig]) -> Bits {
    let n = a.len();
    let row = |c: &mut Circuit, j: usize| -> Bits { a.iter().map(|&x| c.and(x, b[j])).collect() };
    let mut acc = row(c, 0);
    let mut top = Sig::Zero;
    let mut out = Vec::with_capacity(n + b.len());
    for j in 1..b.len() {
        out.push(acc[0]);
        let mut hi: Bits = acc[1..].to_vec();
        hi.push(top);
        let pp = row(c, j);
        let (s, co) = c.add(&hi, &pp, Sig::Zero);
        acc = s;
        top = co;
    }
    out.extend(acc);
    out.push(top);
    out
}

/// Divide by two by decrementing the exponent; results leaving the normal
/// range flush to zero.
pub fn halve(c: &mut Circuit, spec: FloatSpec, a: &[Sig]) -> Bits {
    let e = spec.exp_bits as usize;
    let u = unpack(spec, a);
    let nz = c.or_all(&u.exp);
    let (dec, _) = c.add(&u.exp, &vec![Sig::One; e], Sig::Zero);
    let exp: Bits = dec.iter().map(|&b| c.and(b, nz)).collect();
    let rest_zero = c.nor_all(&u.exp[1..]);
    let under = c.and(u.exp[0], rest_zero);
    c.probe(under, FlagKind::Underflow);
    let mut out: Bits = u.man.iter().map(|&b| c.and_not(b, under)).collect();
    out.extend(exp);
    out.push(u.sign);
    out
}

pub fn negate(c: &mut Circuit, a: &[Sig]) -> Bits {
    let mut out = a.to_vec();
    let s = out.last_mut().unwrap();
    *s = c.not(*s);
    out
}

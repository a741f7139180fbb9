//! Two's complement fixed-point arithmetic. Results wrap modulo `2^N`.

use super::circuit::{Bits, Circuit, Sig};
use super::float::multiply;

pub fn add(c: &mut Circuit, a: &[Sig], b: &[Sig]) -> Bits {
    c.add(a, b, Sig::Zero).0
}

pub fn sub(c: &mut Circuit, a: &[Sig], b: &[Sig]) -> Bits {
    c.sub(a, b).0
}

pub fn negate(c: &mut Circuit, a: &[Sig]) -> Bits {
    let zeros = vec![Sig::Zero; a.len()];
    c.sub(&zeros, a).0
}

/// Signed product scaled down by `2^frac` (rounding toward negative infinity),
/// keeping the low `N` bits.
pub fn mul(c: &mut Circuit, a: &[Sig], b: &[Sig], frac: usize) -> Bits {
    let n = a.len();
    assert_eq!(n, b.len());
    let mut prod = multiply(c, a, b);
    if frac > 0 {
        // signed correction of the high half: subtract b when a < 0 and a when b < 0
        let sa = a[n - 1];
        let sb = b[n - 1];
        let ma: Bits = b.iter().map(|&x| c.and(x, sa)).collect();
        let mb: Bits = a.iter().map(|&x| c.and(x, sb)).collect();
        let (hi, _) = c.sub(&prod[n..], &ma);
        let (hi, _) = c.sub(&hi, &mb);
        prod.truncate(n);
        prod.extend(hi);
    }
    prod[frac..frac + n].to_vec()
}

/// Arithmetic shift right by one.
pub fn halve(a: &[Sig]) -> Bits {
    let mut out = a[1..].to_vec();
    out.push(a[a.len() - 1]);
    out
}

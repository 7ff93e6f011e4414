//! Arithmetic on binary polynomials packed into `u128` (bit `i` is `x^i`).

pub(crate) fn degree(a: u128) -> Option<u32> {
    (a != 0).then(|| 127 - a.leading_zeros())
}

/// Carry-less product; `None` if the result would not fit.
pub(crate) fn mul(a: u128, b: u128) -> Option<u128> {
    match (degree(a), degree(b)) {
        (Some(da), Some(db)) if da + db > 127 => None,
        _ => {
            let mut out = 0u128;
            let mut b = b;
            let mut shift = 0;
            while b != 0 {
                if b & 1 == 1 {
                    out ^= a << shift;
                }
                b >>= 1;
                shift += 1;
            }
            Some(out)
        }
    }
}

pub(crate) fn rem(mut a: u128, b: u128) -> u128 {
    let db = degree(b).expect("division by zero polynomial");
    while let Some(da) = degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

pub(crate) fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = rem(a, b);
        a = b;
        b = r;
    }
    a
}

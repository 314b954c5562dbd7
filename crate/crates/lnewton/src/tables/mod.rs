//! Digit-table machinery: carry-condition validation, term valuations and
//! Stickelberger unit parts, the minimal-weight table search, and the
//! f-simple permutation combinatorics.

pub mod fsimple;
mod search;

pub use search::*;

use num::{BigInt, Zero};

use crate::cyclotomic::Rat;

/// Base-p digit sum (the sigma function).
pub fn digit_sigma(mut k: u64, p: u64) -> u64 {
    let mut s = 0;
    while k > 0 {
        s += k % p;
        k /= p;
    }
    s
}

/// Fractional-part representative in [0, 1).
pub fn frac_part(x: &Rat) -> Rat {
    let floor = x.floor();
    x - floor
}

/// Residue of a rational with p-free denominator modulo p, in [0, p).
pub fn rat_mod_p(x: &Rat, p: u64) -> crate::error::Result<u64> {
    let pz = BigInt::from(p);
    let den = x.denom();
    if (den % &pz).is_zero() {
        return Err(crate::error::Error::InvalidArgument(
            "denominator divisible by p".into(),
        ));
    }
    let num_m = ((x.numer() % &pz) + &pz) % &pz;
    let den_m = ((den % &pz) + &pz) % &pz;
    let n: u64 = num_m.to_biguint().unwrap().try_into().unwrap();
    let d: u64 = den_m.to_biguint().unwrap().try_into().unwrap();
    Ok(n * crate::arith::mod_inv(d, p).unwrap() % p)
}

#[cfg(test)]
mod digit_tests {
    use super::*;
    use crate::cyclotomic::rat;

    #[test]
    fn sigma_examples() {
        assert_eq!(digit_sigma(0, 5), 0);
        assert_eq!(digit_sigma(5, 5), 1);
        assert_eq!(digit_sigma(13, 5), 5); // 13 = 3 + 2*5
    }

    #[test]
    fn frac_part_examples() {
        assert_eq!(frac_part(&rat(-1, 3)), rat(2, 3));
        assert_eq!(frac_part(&rat(2, 1)), rat(0, 1));
        assert_eq!(frac_part(&rat(7, 6)), rat(1, 6));
    }

    #[test]
    fn rat_mod_p_examples() {
        assert_eq!(rat_mod_p(&rat(1, 6), 7).unwrap(), 6); // 1/6 ≡ 6 mod 7
        assert_eq!(rat_mod_p(&rat(1, 4), 5).unwrap(), 4);
        assert!(rat_mod_p(&rat(1, 5), 5).is_err());
    }
}

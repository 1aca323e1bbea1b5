//! Number-theoretic utilities: deterministic primality, Legendre symbols,
//! Hensel lifting for quadratics, CRT, factorization, and mod-1 reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial-division ceiling; beyond this we switch to Miller-Rabin.
const TRIAL_BOUND: u64 = 1 << 20;

/// The first 13 primes witness every composite below this bound, making
/// Miller-Rabin deterministic there (about 3.3e24).
fn miller_rabin_bound() -> BigInt {
    BigInt::parse_bytes(b"3317044064679887385961981", 10).expect("constant parses")
}

const MR_WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin_u64(n: u64) -> bool {
    debug_assert!(n > 2 && n % 2 == 1);
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &MR_WITNESSES {
        if a % n == 0 {
            continue;
        }
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigInt) -> bool {
    debug_assert!(n.is_odd() && *n > BigInt::from(2));
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("nonzero");
    let d = &n_minus_1 >> s;
    'witness: for &a in &MR_WITNESSES {
        let a = BigInt::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test.
///
/// Strategy: trial division up to `min(2^20, isqrt(n))`; if that is
/// inconclusive, a Miller-Rabin pass with a fixed witness set that is
/// deterministic below about 3.3e24.  Larger inputs are rejected rather
/// than answered probabilistically.
pub fn is_prime(n: &BigInt) -> Result<bool> {
    let two = BigInt::from(2);
    if *n < two {
        return Ok(false);
    }
    if *n == two {
        return Ok(true);
    }
    if n.is_even() {
        return Ok(false);
    }
    if let Some(small) = n.to_u64() {
        // Everything in u64 range sits far below the deterministic bound.
        if small < 9 {
            return Ok(true); // 3, 5, 7
        }
        if small % 3 == 0 {
            return Ok(false);
        }
        return Ok(miller_rabin_u64(small));
    }
    // Too large for machine words: trial divide, then Miller-Rabin.
    let limit = BigInt::from(TRIAL_BOUND).min(n.sqrt());
    let mut d = BigInt::from(3);
    while d <= limit {
        if (n % &d).is_zero() {
            return Ok(false);
        }
        d += 2;
    }
    if n.sqrt() <= BigInt::from(TRIAL_BOUND) {
        return Ok(true);
    }
    if *n >= miller_rabin_bound() {
        return Err(Error::PrimalityOutOfRange(n.to_string()));
    }
    Ok(miller_rabin_big(n))
}

/// Canonical residue of `a` modulo `m > 0`, in `[0, m)`.
pub fn normalize_mod(a: &BigInt, m: &BigInt) -> BigInt {
    debug_assert!(m.is_positive());
    a.mod_floor(m)
}

/// Multiplicative inverse of `a` modulo `m > 0`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    debug_assert!(m.is_positive());
    let e = a.extended_gcd(m);
    if e.gcd.abs().is_one() {
        // gcd = x*a + y*m, so x inverts a modulo m (up to the gcd sign).
        let x = if e.gcd.is_negative() { -e.x } else { e.x };
        Some(normalize_mod(&x, m))
    } else {
        None
    }
}

/// Legendre symbol of `a` modulo an odd prime `p`, via Euler's criterion.
///
/// Returns `+1` for nonzero squares, `-1` for non-squares, `0` when
/// `p | a`.  Rejects `p` that is even or fails the primality test.
pub fn legendre_symbol(a: &BigInt, p: &BigInt) -> Result<i32> {
    if p.is_even() || !is_prime(p)? {
        return Err(Error::NotOddPrime(p.to_string()));
    }
    let a = normalize_mod(a, p);
    if a.is_zero() {
        return Ok(0);
    }
    let e = (p - BigInt::one()) / BigInt::from(2);
    let r = a.modpow(&e, p);
    if r.is_one() {
        Ok(1)
    } else {
        assert_eq!(r, p - BigInt::one(), "Euler criterion must give ±1 mod a prime");
        Ok(-1)
    }
}

/// One Hensel step for the quadratic `f(x) = a x² + b x + c`: given a root
/// `r` of `f` modulo `p^(k-1)`, return the unique root modulo `p^k` that
/// reduces to `r`.  Requires `f'(r)` to be a unit modulo `p`; otherwise
/// the root is not (uniquely) liftable and an error is returned.
pub fn hensel_quadratic_step(
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    p: &BigInt,
    k: u32,
    r: &BigInt,
) -> Result<BigInt> {
    assert!(k >= 1);
    let pk_1 = p.pow(k - 1);
    let pk = &pk_1 * p;
    let f_r = a * r * r + b * r + c;
    assert!(
        (&f_r % &pk_1).is_zero(),
        "seed must be a root modulo p^(k-1)"
    );
    let fprime = BigInt::from(2) * a * r + b;
    let inv = mod_inverse(&fprime, p).ok_or(Error::NotLiftable)?;
    let t = normalize_mod(&(-(&f_r / &pk_1) * inv), p);
    let lifted = normalize_mod(&(r + t * &pk_1), &pk);
    debug_assert!(((a * &lifted * &lifted + b * &lifted + c) % &pk).is_zero());
    Ok(lifted)
}

/// Iterated Hensel lifting: from a root of `f` modulo `p` to a root
/// modulo `p^k`, one step at a time.
pub fn hensel_quadratic_lift(
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    p: &BigInt,
    k: u32,
    root_mod_p: &BigInt,
) -> Result<BigInt> {
    let mut r = normalize_mod(root_mod_p, p);
    for step in 2..=k {
        r = hensel_quadratic_step(a, b, c, p, step, &r)?;
    }
    Ok(r)
}

/// Chinese remainder theorem for pairwise-coprime moduli: the unique
/// residue modulo the product that matches every `(value, modulus)` pair.
pub fn crt_combine(residues: &[(BigInt, BigInt)]) -> Result<BigInt> {
    for (i, (_, mi)) in residues.iter().enumerate() {
        assert!(mi.is_positive(), "moduli must be positive");
        for (_, mj) in &residues[i + 1..] {
            if !mi.gcd(mj).is_one() {
                return Err(Error::NotCoprime(mi.to_string(), mj.to_string()));
            }
        }
    }
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    for (vi, mi) in residues {
        let inv = mod_inverse(&modulus, mi).expect("coprime by the check above");
        let t = normalize_mod(&((normalize_mod(vi, mi) - &value) * inv), mi);
        value += t * &modulus;
        modulus *= mi;
    }
    Ok(normalize_mod(&value, &modulus))
}

/// Factor `n ≥ 1` into prime powers, ascending by prime.
///
/// Trial division removes all factors up to `2^20`; whatever remains must
/// then pass the deterministic primality test, else the input is rejected
/// as too large to factor with certainty.
pub fn factorize(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    assert!(n.is_positive(), "factorize expects n >= 1");
    let mut n = n.clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, e: u32, out: &mut Vec<(BigInt, u32)>| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n.is_even() {
        n /= 2;
        e += 1;
    }
    push(BigInt::from(2), e, &mut out);
    let mut d = BigInt::from(3);
    let bound = BigInt::from(TRIAL_BOUND);
    while &d * &d <= n && d <= bound {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        push(d.clone(), e, &mut out);
        d += 2;
    }
    if !n.is_one() {
        if &d * &d > n || is_prime(&n)? {
            out.push((n, 1));
        } else {
            return Err(Error::FactorOutOfRange(n.to_string()));
        }
    }
    Ok(out)
}

/// Euler totient of `n ≥ 1`.
pub fn euler_phi(n: &BigInt) -> Result<BigInt> {
    let mut phi = BigInt::one();
    for (p, e) in factorize(n)? {
        phi *= p.pow(e - 1) * (&p - BigInt::one());
    }
    Ok(phi)
}

/// Largest `v` with `p^v | n`, for `n ≠ 0` and `p ≥ 2`.
pub fn padic_valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero() && *p >= BigInt::from(2));
    let mut n = n.abs();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// Canonical representative of a rational modulo 1, in `[0, 1)`.
pub fn mod1(q: &BigRational) -> BigRational {
    q - q.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn primality_small_table() {
        let primes: Vec<i64> = vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        for n in 0..50 {
            assert_eq!(
                is_prime(&b(n)).unwrap(),
                primes.contains(&n),
                "primality of {n}"
            );
        }
    }

    #[test]
    fn primality_carmichael_and_machine_range() {
        assert!(!is_prime(&b(561)).unwrap()); // Carmichael number
        assert!(!is_prime(&b(1_373_653)).unwrap()); // strong pseudoprime base 2,3
        assert!(is_prime(&b(1_000_000_007)).unwrap());
        assert!(is_prime(&b(2_305_843_009_213_693_951)).unwrap()); // 2^61 - 1
        assert!(!is_prime(&b(2_305_843_009_213_693_953)).unwrap());
    }

    #[test]
    fn primality_beyond_machine_words() {
        // 18446744073709551629 = 2^64 + 13, the first prime past u64.
        let p: BigInt = BigInt::from(u64::MAX) + b(14);
        assert!(is_prime(&p).unwrap());
        // A square of a 33-bit prime: no factor within trial range,
        // composite, and detectable only by Miller-Rabin.
        let q = b(4_294_967_311);
        assert!(!is_prime(&(&q * &q)).unwrap());
    }

    #[test]
    fn primality_rejects_out_of_range() {
        // 2^89 − 1 has no factor in trial range and exceeds the
        // deterministic witness bound, so the test must refuse to answer.
        let huge = (BigInt::one() << 89) - 1;
        assert!(matches!(
            is_prime(&huge),
            Err(Error::PrimalityOutOfRange(_))
        ));
        // Composites with small factors are still answered even when huge.
        let easy = BigInt::from(10).pow(25) + 1; // divisible by 11
        assert_eq!(is_prime(&easy).unwrap(), false);
    }

    #[test]
    fn legendre_known_values() {
        assert_eq!(legendre_symbol(&b(1), &b(5)).unwrap(), 1);
        assert_eq!(legendre_symbol(&b(2), &b(5)).unwrap(), -1);
        assert_eq!(legendre_symbol(&b(4), &b(5)).unwrap(), 1);
        assert_eq!(legendre_symbol(&b(0), &b(5)).unwrap(), 0);
        assert_eq!(legendre_symbol(&b(-1), &b(7)).unwrap(), -1); // 7 ≡ 3 mod 4
        assert_eq!(legendre_symbol(&b(-1), &b(13)).unwrap(), 1); // 13 ≡ 1 mod 4
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23] {
            let squares: std::collections::HashSet<i64> =
                (1..p).map(|x| (x * x) % p).collect();
            for a in 0..p {
                let expected = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(
                    legendre_symbol(&b(a), &b(p)).unwrap(),
                    expected,
                    "({a}/{p})"
                );
            }
        }
    }

    #[test]
    fn legendre_rejects_bad_moduli() {
        for p in [2i64, 4, 9, 15, 21] {
            assert!(matches!(
                legendre_symbol(&b(3), &b(p)),
                Err(Error::NotOddPrime(_))
            ));
        }
    }

    proptest! {
        #[test]
        fn legendre_is_multiplicative(a in 1i64..1000, c in 1i64..1000) {
            let p = b(23);
            let la = legendre_symbol(&b(a), &p).unwrap();
            let lc = legendre_symbol(&b(c), &p).unwrap();
            let lac = legendre_symbol(&b(a * c), &p).unwrap();
            prop_assert_eq!(la * lc, lac);
        }
    }

    #[test]
    fn hensel_step_examples() {
        // x² + x: lifting the odd root 1 from mod 2 to mod 4 gives 3.
        assert_eq!(
            hensel_quadratic_step(&b(1), &b(1), &b(0), &b(2), 2, &b(1)).unwrap(),
            b(3)
        );
        // x² − 1: the exact root 1 lifts to itself mod 9.
        assert_eq!(
            hensel_quadratic_step(&b(1), &b(0), &b(-1), &b(3), 2, &b(1)).unwrap(),
            b(1)
        );
        // x² − 2 over p = 7: root 3 mod 7 lifts to 10 mod 49 (10² = 100 ≡ 2).
        assert_eq!(
            hensel_quadratic_step(&b(1), &b(0), &b(-2), &b(7), 2, &b(3)).unwrap(),
            b(10)
        );
    }

    #[test]
    fn hensel_detects_vanishing_derivative() {
        // f = x² − 3 over p = 2: f'(x) = 2x ≡ 0 mod 2 everywhere.
        assert!(matches!(
            hensel_quadratic_step(&b(1), &b(0), &b(-3), &b(2), 2, &b(1)),
            Err(Error::NotLiftable)
        ));
    }

    proptest! {
        #[test]
        fn hensel_lift_produces_roots_at_full_precision(
            a in -20i64..20, c in -20i64..20, p_idx in 0usize..4, k in 2u32..6
        ) {
            let p = [3i64, 5, 7, 11][p_idx];
            // b chosen odd relative to p so that f'(x) = 2ax + b can be a unit.
            let bc = 1i64;
            let f = |x: i64| a * x * x + bc * x + c;
            let fp = |x: i64| 2 * a * x + bc;
            // Find a liftable seed root mod p, if any.
            let seed = (0..p).find(|&x| f(x).rem_euclid(p) == 0 && fp(x).rem_euclid(p) != 0);
            prop_assume!(seed.is_some());
            let r = hensel_quadratic_lift(&b(a), &b(bc), &b(c), &b(p), k, &b(seed.unwrap())).unwrap();
            let pk = b(p).pow(k);
            let val = b(a) * &r * &r + b(bc) * &r + b(c);
            prop_assert!(normalize_mod(&val, &pk).is_zero());
            prop_assert!(r >= b(0) && r < pk);
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(&[(b(1), b(2))]).unwrap(), b(1));
        assert_eq!(crt_combine(&[(b(1), b(3)), (b(2), b(5))]).unwrap(), b(7));
        assert_eq!(crt_combine(&[(b(0), b(4)), (b(0), b(9))]).unwrap(), b(0));
        assert_eq!(crt_combine(&[]).unwrap(), b(0));
        assert!(matches!(
            crt_combine(&[(b(1), b(4)), (b(3), b(6))]),
            Err(Error::NotCoprime(_, _))
        ));
    }

    proptest! {
        #[test]
        fn crt_result_matches_every_residue(x in 0i64..10000) {
            let moduli = [7i64, 9, 11, 13];
            let residues: Vec<(BigInt, BigInt)> =
                moduli.iter().map(|&m| (b(x % m), b(m))).collect();
            let combined = crt_combine(&residues).unwrap();
            for &m in &moduli {
                prop_assert_eq!(normalize_mod(&combined, &b(m)), b(x % m));
            }
        }
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(factorize(&b(1)).unwrap(), vec![]);
        assert_eq!(
            factorize(&b(360)).unwrap(),
            vec![(b(2), 3), (b(3), 2), (b(5), 1)]
        );
        assert_eq!(factorize(&b(97)).unwrap(), vec![(b(97), 1)]);
        // Large prime cofactor handled through the primality test.
        let p = b(1_000_000_007);
        assert_eq!(factorize(&(&p * 4)).unwrap(), vec![(b(2), 2), (p, 1)]);
        // Product of two primes beyond the trial range and beyond the
        // certified factoring reach.
        let q = b(4_294_967_311);
        assert!(matches!(
            factorize(&(&q * &q)),
            Err(Error::FactorOutOfRange(_))
        ));
    }

    #[test]
    fn totient_values() {
        for (n, phi) in [(1, 1), (2, 1), (5, 4), (12, 4), (32, 16), (100, 40)] {
            assert_eq!(euler_phi(&b(n)).unwrap(), b(phi), "phi({n})");
        }
    }

    #[test]
    fn valuation_and_mod1() {
        assert_eq!(padic_valuation(&b(48), &b(2)), 4);
        assert_eq!(padic_valuation(&b(-45), &b(3)), 2);
        assert_eq!(padic_valuation(&b(7), &b(2)), 0);

        let q = |n: i64, d: i64| BigRational::new(b(n), b(d));
        assert_eq!(mod1(&q(7, 5)), q(2, 5));
        assert_eq!(mod1(&q(-1, 3)), q(2, 3));
        assert_eq!(mod1(&q(3, 1)), q(0, 1));
        assert_eq!(mod1(&q(0, 1)), q(0, 1));
    }

    #[test]
    fn mod_inverse_basics() {
        assert_eq!(mod_inverse(&b(3), &b(7)), Some(b(5)));
        assert_eq!(mod_inverse(&b(-1), &b(5)), Some(b(4)));
        assert_eq!(mod_inverse(&b(4), &b(8)), None);
        for a in 1i64..20 {
            let m = b(21);
            if let Some(inv) = mod_inverse(&b(a), &m) {
                assert_eq!(normalize_mod(&(inv * a), &m), b(1));
            } else {
                assert!(!b(a).gcd(&m).is_one());
            }
        }
    }
}

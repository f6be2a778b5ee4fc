//! Arithmetic in GF(q) for prime powers q <= 256, via exp/log tables.
//!
//! Elements are `0..q`, read as polynomials over GF(p) in base-`p` digits.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Field {
    q: usize,
    p: usize,
    exp: Vec<u16>,
    log: Vec<u16>,
}

fn prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

impl Field {
    pub fn new(q: usize) -> Result<Field> {
        let (p, k) = prime_power(q)
            .filter(|_| q <= 256)
            .ok_or_else(|| Error::domain(format!("field order {q} is not a prime power up to 256")))?;
        // find a modulus under which some element generates the whole group
        for modulus in 0..q {
            if let Some(f) = Self::try_modulus(q, p, k as usize, modulus) {
                return Ok(f);
            }
        }
        unreachable!("every prime power has a primitive polynomial")
    }

    /// Builds tables with the monic modulus `x^k + (low digits of modulus)`,
    /// using `x` as the candidate generator; fails unless it is primitive.
    fn try_modulus(q: usize, p: usize, k: usize, low: usize) -> Option<Field> {
        let digits = |mut v: usize| -> Vec<usize> {
            (0..k)
                .map(|_| {
                    let d = v % p;
                    v /= p;
                    d
                })
                .collect()
        };
        let low = digits(low);
        let gen = if k == 1 { (2..p).chain(1..2).find(|&g| Self::order_mod_prime(g, p) == p - 1)? } else { p };
        let times_gen = |v: usize| -> usize {
            if k == 1 {
                return v * gen % p;
            }
            let mut d = digits(v);
            let top = d[k - 1];
            for i in (1..k).rev() {
                d[i] = d[i - 1];
            }
            d[0] = 0;
            // x^k = -(low)
            for i in 0..k {
                d[i] = (d[i] + (p - low[i]) * top) % p;
            }
            d.iter().rev().fold(0, |acc, &x| acc * p + x)
        };
        let mut exp = vec![0u16; q - 1];
        let mut log = vec![0u16; q];
        let mut seen = vec![false; q];
        let mut v = 1usize;
        for (i, e) in exp.iter_mut().enumerate() {
            if seen[v] || v == 0 {
                return None;
            }
            seen[v] = true;
            *e = v as u16;
            log[v] = i as u16;
            v = times_gen(v);
        }
        (v == 1).then_some(Field { q, p, exp, log })
    }

    fn order_mod_prime(g: usize, p: usize) -> usize {
        let mut v = g % p;
        let mut n = 1;
        while v != 1 {
            v = v * g % p;
            n += 1;
            if n > p {
                return 0;
            }
        }
        n
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        let (mut a, mut b) = (a as usize, b as usize);
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u16
    }

    pub fn neg(&self, a: u16) -> u16 {
        let mut a = a as usize;
        let (mut out, mut place) = (0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out as u16
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[(self.log[a as usize] as usize + self.log[b as usize] as usize) % n]
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "zero has no inverse");
        let n = self.q - 1;
        self.exp[(n - self.log[a as usize] as usize) % n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small_orders() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 27] {
            let f = Field::new(q).unwrap();
            for a in 0..q as u16 {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "q={q} a={a}");
                }
                for b in 0..q as u16 {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q as u16 {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)), "q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn large_orders_build() {
        for q in [128, 243, 256] {
            let f = Field::new(q).unwrap();
            assert_eq!(f.mul(f.inv(5), 5), 1);
        }
        assert!(Field::new(6).is_err());
        assert!(Field::new(257).is_err());
    }
}

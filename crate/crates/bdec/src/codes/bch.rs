//! Narrow-sense primitive binary BCH codes.
//!
//! A code of length `n = 2^m - 1` and design parameter `t` is the set of
//! polynomials divisible by `g(x)`, the product of `(x - α^i)` over the
//! union of the cyclotomic cosets of `1..=2t`. The redundancy equals
//! `deg g`, and the designed distance is `2t + 1`.
//!
//! Field tables are generated from a fixed primitive polynomial per `m`
//! (from the standard tables, e.g. `x^10 + x^3 + 1` for `m = 10`) so every
//! construction is bit-reproducible.

use crate::gf2::BitMatrix;

use super::CodeError;

/// Primitive polynomials for GF(2^m), m = 3..=10, as bit masks
/// (bit i = coefficient of x^i).
pub const PRIMITIVE_POLYS: [(u32, u32); 8] = [
    (3, 0b1011),         // x^3 + x + 1
    (4, 0b10011),        // x^4 + x + 1
    (5, 0b100101),       // x^5 + x^2 + 1
    (6, 0b1000011),      // x^6 + x + 1
    (7, 0b10001001),     // x^7 + x^3 + 1
    (8, 0b100011101),    // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0b1000010001),   // x^9 + x^4 + 1
    (10, 0b10000001001), // x^10 + x^3 + 1
];

pub fn primitive_poly(m: u32) -> Result<u32, CodeError> {
    PRIMITIVE_POLYS
        .iter()
        .find(|&&(mm, _)| mm == m)
        .map(|&(_, p)| p)
        .ok_or(CodeError::UnsupportedField { m })
}

/// GF(2^m) with log/antilog tables over a primitive element α.
pub struct Gf2m {
    pub m: u32,
    pub n: usize,
    log: Vec<u16>,
    alog: Vec<u16>,
}

impl Gf2m {
    pub fn new(m: u32) -> Result<Self, CodeError> {
        let poly = primitive_poly(m)?;
        let n = (1usize << m) - 1;
        let mut log = vec![0u16; n + 1];
        let mut alog = vec![0u16; n];
        let mut x: u32 = 1;
        for (i, slot) in alog.iter_mut().enumerate() {
            *slot = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> m != 0 {
                x ^= poly;
            }
        }
        Ok(Gf2m { m, n, log, alog })
    }

    /// α^e for e taken mod n.
    pub fn alpha_pow(&self, e: usize) -> u16 {
        self.alog[e % self.n]
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.alog[e % self.n]
    }
}

/// Cyclotomic coset of `s` modulo `2^m - 1`.
pub fn cyclotomic_coset(s: usize, n: usize) -> Vec<usize> {
    let mut coset = vec![s % n];
    let mut next = (s * 2) % n;
    while next != s % n {
        coset.push(next);
        next = (next * 2) % n;
    }
    coset
}

/// Exponents in the union of the cyclotomic cosets of 1..=2t, i.e. the
/// roots α^i of the generator polynomial. The union's size is `deg g`.
pub fn root_exponents(m: u32, t: u32) -> Vec<usize> {
    let n = (1usize << m) - 1;
    let mut seen = vec![false; n];
    let mut roots = Vec::new();
    for s in 1..=(2 * t as usize).min(n - 1) {
        if seen[s] {
            continue;
        }
        for e in cyclotomic_coset(s, n) {
            if !seen[e] {
                seen[e] = true;
                roots.push(e);
            }
        }
    }
    roots.sort_unstable();
    roots
}

/// Redundancy (generator degree) of the BCH code with parameters (m, t).
pub fn redundancy(m: u32, t: u32) -> Result<usize, CodeError> {
    primitive_poly(m)?;
    Ok(root_exponents(m, t).len())
}

/// A narrow-sense primitive binary BCH code.
pub struct BchCode {
    pub m: u32,
    pub t: u32,
    pub n: usize,
    pub k: usize,
    /// Generator polynomial coefficients, degree ascending; all in {0,1}.
    pub generator: Vec<bool>,
}

impl BchCode {
    pub fn new(m: u32, t: u32) -> Result<Self, CodeError> {
        if t == 0 {
            return Err(CodeError::InvalidParam("bch: t must be at least 1".into()));
        }
        let field = Gf2m::new(m)?;
        let n = field.n;
        if 2 * t as usize >= n {
            return Err(CodeError::InvalidParam(format!(
                "bch: designed distance {} exceeds code length {n}",
                2 * t + 1
            )));
        }
        let roots = root_exponents(m, t);
        if roots.len() >= n {
            return Err(CodeError::InvalidParam(format!(
                "bch: designed distance {} leaves no message bits at n={n}",
                2 * t + 1
            )));
        }
        // g(x) = prod (x + alpha^e) over the coset union, expanded in GF(2^m);
        // completeness of the cosets forces every coefficient into {0,1}.
        let mut coeffs: Vec<u16> = vec![1];
        for &e in &roots {
            let root = field.alpha_pow(e);
            let mut next = vec![0u16; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] ^= c;
                next[i] ^= field.mul(c, root);
            }
            coeffs = next;
        }
        let generator: Vec<bool> = coeffs
            .iter()
            .map(|&c| {
                debug_assert!(c <= 1, "generator coefficient outside GF(2)");
                c == 1
            })
            .collect();
        let r = generator.len() - 1;
        Ok(BchCode {
            m,
            t,
            n,
            k: n - r,
            generator,
        })
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn designed_distance(&self) -> u32 {
        2 * self.t + 1
    }

    /// Generator matrix, `n × k`: column j holds the coefficients of
    /// `x^j · g(x)`.
    pub fn generator_matrix(&self) -> BitMatrix {
        let r = self.redundancy();
        let mut g = BitMatrix::zeros(self.n, self.k);
        for j in 0..self.k {
            for (d, &bit) in self.generator.iter().enumerate() {
                if bit {
                    g.set(j + d, j, true);
                }
            }
        }
        debug_assert_eq!(self.generator.len(), r + 1);
        g
    }

    /// Parity-check matrix, `n × (n-k)`: row j holds `x^j mod g(x)`, so
    /// `Hᵀ c` is the remainder of `c(x)` modulo the generator.
    pub fn parity_check_matrix(&self) -> BitMatrix {
        let r = self.redundancy();
        let mut h = BitMatrix::zeros(self.n, r);
        // running remainder of x^j, degree < r
        let mut rem = vec![false; r];
        rem[0] = true;
        for j in 0..self.n {
            for (c, &bit) in rem.iter().enumerate() {
                if bit {
                    h.set(j, c, true);
                }
            }
            // rem <- (rem * x) mod g
            let carry = rem[r - 1];
            for c in (1..r).rev() {
                rem[c] = rem[c - 1];
            }
            rem[0] = false;
            if carry {
                for (c, slot) in rem.iter_mut().enumerate() {
                    *slot ^= self.generator[c];
                }
            }
        }
        h
    }
}

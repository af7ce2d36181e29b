//! Polynomial arithmetic over Z/NZ.
//!
//! Three operations carry the whole crate: multiplication (by Kronecker
//! substitution into one big-integer product, so it inherits the host
//! integer multiplication), monic product trees built by pairwise halving,
//! and evaluation at a geometric progression 1, a, a^2, ... via Bluestein's
//! reindexing i*j = T(i+j) - T(i) - T(j) with T the triangular numbers,
//! which reduces the whole batch to a single polynomial product.

use crate::arith::{mod_inv, ArithError};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// Operands live over different moduli.
    ModulusMismatch,
    /// The evaluation point shares a factor with N; carries the gcd so the
    /// caller can treat it as a found factor.
    NotInvertible(BigUint),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::ModulusMismatch => write!(f, "modulus mismatch"),
            PolyError::NotInvertible(g) => write!(f, "point not invertible, gcd = {}", g),
        }
    }
}

/// Dense polynomial over Z/NZ; coeffs[d] is the coefficient of x^d,
/// the zero polynomial is the empty list, and high zero coefficients are
/// always trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZnPoly {
    coeffs: Vec<BigUint>,
    modulus: BigUint,
}

impl ZnPoly {
    pub fn new(mut coeffs: Vec<BigUint>, modulus: BigUint) -> Self {
        assert!(modulus >= BigUint::from(2u32));
        for c in coeffs.iter_mut() {
            if *c >= modulus {
                *c %= &modulus;
            }
        }
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ZnPoly { coeffs, modulus }
    }

    pub fn zero(modulus: BigUint) -> Self {
        ZnPoly::new(Vec::new(), modulus)
    }

    pub fn constant(c: BigUint, modulus: BigUint) -> Self {
        ZnPoly::new(vec![c], modulus)
    }

    /// x - v, monic of degree 1.
    pub fn linear_root(v: &BigUint, modulus: &BigUint) -> Self {
        let neg = (modulus - (v % modulus)) % modulus;
        ZnPoly::new(vec![neg, BigUint::one()], modulus.clone())
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Plain Horner evaluation at one point.
    pub fn eval(&self, x: &BigUint) -> BigUint {
        let n = &self.modulus;
        let mut acc = BigUint::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % n;
        }
        acc
    }

    /// Coefficient-wise scaling f(x) -> f(c*x), i.e. coeffs[d] *= c^d.
    fn scale_argument(&self, c: &BigUint) -> Self {
        let n = &self.modulus;
        let mut pow = BigUint::one();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(d, a)| {
                if d > 0 {
                    pow = &pow * c % n;
                }
                a * &pow % n
            })
            .collect();
        ZnPoly::new(coeffs, n.clone())
    }
}

/// Exact product in Z_N[x] by Kronecker substitution.
pub fn poly_mul(a: &ZnPoly, b: &ZnPoly) -> Result<ZnPoly, PolyError> {
    if a.modulus != b.modulus {
        return Err(PolyError::ModulusMismatch);
    }
    if a.is_zero() || b.is_zero() {
        return Ok(ZnPoly::zero(a.modulus.clone()));
    }
    let n = &a.modulus;
    let out = kronecker_mul(&a.coeffs, &b.coeffs, n);
    Ok(ZnPoly::new(out, n.clone()))
}

/// Packs both coefficient vectors into big integers with common slot width,
/// multiplies once, and reduces each product slot mod n. The slot width
/// 2*bits(n) + log2(min len) bounds every convolution coefficient.
fn kronecker_mul(a: &[BigUint], b: &[BigUint], n: &BigUint) -> Vec<BigUint> {
    let min_len = a.len().min(b.len()) as u64;
    let slot_bits = 2 * n.bits() + (64 - min_len.leading_zeros() as u64);
    let slot_bytes = (slot_bits.div_ceil(8)) as usize;
    let pa = pack(a, slot_bytes);
    let pb = pack(b, slot_bytes);
    let prod = pa * pb;
    unpack(&prod, slot_bytes, a.len() + b.len() - 1, n)
}

fn pack(coeffs: &[BigUint], slot_bytes: usize) -> BigUint {
    let mut bytes = vec![0u8; coeffs.len() * slot_bytes];
    for (i, c) in coeffs.iter().enumerate() {
        let cb = c.to_bytes_le();
        bytes[i * slot_bytes..i * slot_bytes + cb.len()].copy_from_slice(&cb);
    }
    BigUint::from_bytes_le(&bytes)
}

fn unpack(v: &BigUint, slot_bytes: usize, slots: usize, n: &BigUint) -> Vec<BigUint> {
    let mut bytes = v.to_bytes_le();
    bytes.resize(slots * slot_bytes, 0);
    if let Some(n64) = n.to_u64() {
        // Fold each slot (at most a few words) mod n with u128 arithmetic.
        let r64 = ((1u128 << 64) % n64 as u128) as u64;
        let r128 = (r64 as u128 * r64 as u128 % n64 as u128) as u64;
        let weights = [1u64, r64, r128];
        bytes
            .chunks(slot_bytes)
            .map(|chunk| {
                let mut acc = 0u128;
                for (w, word) in chunk.chunks(8).enumerate() {
                    let mut buf = [0u8; 8];
                    buf[..word.len()].copy_from_slice(word);
                    let value = u64::from_le_bytes(buf) as u128;
                    debug_assert!(w < weights.len());
                    acc = (acc + value % n64 as u128 * weights[w] as u128) % n64 as u128;
                }
                BigUint::from(acc as u64)
            })
            .collect()
    } else {
        bytes
            .chunks(slot_bytes)
            .map(|chunk| BigUint::from_bytes_le(chunk) % n)
            .collect()
    }
}

/// prod_h (x - v_h) mod N, built as a balanced tree of pairwise products.
/// Degree equals the number of points; leading coefficient is 1.
pub fn product_tree(points: &[BigUint], modulus: &BigUint) -> Result<ZnPoly, PolyError> {
    assert!(!points.is_empty());
    let mut level: Vec<ZnPoly> = points
        .iter()
        .map(|v| ZnPoly::linear_root(v, modulus))
        .collect();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.chunks(2);
        for pair in &mut it {
            next.push(if pair.len() == 2 {
                poly_mul(&pair[0], &pair[1])?
            } else {
                pair[0].clone()
            });
        }
        level = next;
    }
    Ok(level.pop().expect("nonempty tree"))
}

/// [f(alpha^0), f(alpha^1), ..., f(alpha^{m-1})] via Bluestein's trick.
///
/// With T(s) = s(s+1)/2, alpha^{hi} = alpha^{T(h+i) - T(h) - T(i)}, so
/// f(alpha^i) = alpha^{-T(i)} * sum_h (f_h alpha^{-T(h)}) alpha^{T(h+i)}:
/// one product of the reversed chirped coefficients against the chirp
/// sequence yields every value at once.
pub fn eval_geometric(f: &ZnPoly, alpha: &BigUint, m: u64) -> Result<Vec<BigUint>, PolyError> {
    eval_geometric_from(f, alpha, &BigUint::zero(), m)
}

/// Same as [`eval_geometric`] but starting at alpha^start:
/// returns [f(alpha^start), ..., f(alpha^{start+m-1})].
pub fn eval_geometric_from(
    f: &ZnPoly,
    alpha: &BigUint,
    start: &BigUint,
    m: u64,
) -> Result<Vec<BigUint>, PolyError> {
    assert!(m >= 1);
    let n = f.modulus().clone();
    let alpha = alpha % &n;
    let g = alpha.gcd(&n);
    if !g.is_one() {
        return Err(PolyError::NotInvertible(g));
    }
    if f.is_zero() {
        return Ok(vec![BigUint::zero(); m as usize]);
    }
    let f = if start.is_zero() {
        f.clone()
    } else {
        f.scale_argument(&alpha.modpow(start, &n))
    };
    let deg = f.degree().unwrap() as u64;
    if deg == 0 {
        return Ok(vec![f.coeffs()[0].clone(); m as usize]);
    }
    let alpha_inv = match mod_inv(&alpha, &n) {
        Ok(v) => v,
        Err(ArithError::NotInvertible(g)) => return Err(PolyError::NotInvertible(g)),
        Err(_) => unreachable!(),
    };

    // u_h = f_h * alpha^{-T(h)}, reversed so the product aligns the sums.
    let inv_chirp = chirp_powers(&alpha_inv, deg + 1, &n);
    let mut u: Vec<BigUint> = f
        .coeffs()
        .iter()
        .zip(inv_chirp.iter())
        .map(|(c, t)| c * t % &n)
        .collect();
    u.reverse();
    // w_s = alpha^{T(s)} for s = 0 .. deg + m - 1.
    let w = chirp_powers(&alpha, deg + m, &n);

    let pu = ZnPoly::new(u, n.clone());
    let pw = ZnPoly::new(w, n.clone());
    let prod = poly_mul(&pu, &pw)?;

    let out_chirp = chirp_powers(&alpha_inv, m, &n);
    let zero = BigUint::zero();
    let values = (0..m as usize)
        .map(|i| {
            let c = prod.coeffs().get(deg as usize + i).unwrap_or(&zero);
            c * &out_chirp[i] % &n
        })
        .collect();
    Ok(values)
}

/// [a^{T(0)}, a^{T(1)}, ..., a^{T(len-1)}] with T(s) = s(s+1)/2.
fn chirp_powers(a: &BigUint, len: u64, n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(len as usize);
    let mut t = BigUint::one() % n;
    let mut run = BigUint::one() % n;
    out.push(t.clone());
    for _ in 1..len {
        run = run * a % n;
        t = t * &run % n;
        out.push(t.clone());
    }
    out
}

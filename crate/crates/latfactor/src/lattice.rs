//! Exact lattice machinery: integral LLL reduction, the rank-3 basis
//! constructions used by the searches, and an exhaustive dim-3 enumeration
//! oracle for certifying shortest vectors.
//!
//! LLL follows the all-integer formulation (Cohen, Algorithm 2.6.7): the
//! Gram-Schmidt data is carried as integers d_i (principal Gram minors) and
//! lambda_{i,j} = d_{j+1} * mu_{i,j}, so no floating point or rational
//! arithmetic enters the reduction. The unimodular transform is tracked so
//! callers can certify that the output spans the input lattice.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    /// Input rows are linearly dependent over the rationals.
    DependentRows,
    /// A reduced row is not coordinate-wise divisible by the expected powers
    /// of X; indicates a caller bug, not a math failure.
    NonDivisibleCoordinates,
    /// Enumeration exceeded its step budget.
    BoundTooLarge,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::DependentRows => write!(f, "dependent rows"),
            LatticeError::NonDivisibleCoordinates => write!(f, "coordinates not divisible by X powers"),
            LatticeError::BoundTooLarge => write!(f, "enumeration budget exceeded"),
        }
    }
}

/// Row-major integer lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLattice {
    rows: Vec<Vec<BigInt>>,
}

impl IntLattice {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Self {
        assert!(!rows.is_empty());
        let w = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == w));
        IntLattice { rows }
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }
}

/// LLL output: the reduced rows plus the unimodular transform with
/// transform * original = rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedBasis {
    pub rows: Vec<Vec<BigInt>>,
    pub transform: Vec<Vec<BigInt>>,
}

/// Second LLL vector (c, bX, aX^2) with the scaling X stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondVector {
    pub c: BigInt,
    pub b: BigInt,
    pub a: BigInt,
    pub x: BigUint,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(v: &[BigInt]) -> BigInt {
    dot(v, v)
}

/// Exact LLL reduction at parameter delta (1/4 < delta < 1), deterministic:
/// the swap condition at exact equality does not swap. Errors with
/// DependentRows when the input rows are not independent.
pub fn lll_reduce(basis: &IntLattice, delta: (u64, u64)) -> Result<ReducedBasis, LatticeError> {
    let (nu, de) = delta;
    assert!(de > 0 && 4 * nu > de && nu < de, "delta must satisfy 1/4 < delta < 1");
    let n = basis.rank();
    let mut b: Vec<Vec<BigInt>> = basis.rows.clone();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();

    // d[i] = det of the leading i x i Gram minor; lam[i][j] = d[j+1]*mu_{i,j}.
    let mut d: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    d[0] = BigInt::one();
    let mut lam: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut t = dot(&b[i], &b[j]);
            for k in 0..j {
                t = (&d[k + 1] * t - &lam[i][k] * &lam[j][k]) / &d[k];
            }
            if j < i {
                lam[i][j] = t;
            } else {
                if t.is_zero() {
                    return Err(LatticeError::DependentRows);
                }
                d[i + 1] = t;
            }
        }
    }

    let nu = BigInt::from(nu);
    let de = BigInt::from(de);
    let mut k = 1usize;
    while k < n {
        redi(&mut b, &mut u, &mut lam, &d, k, k - 1);
        // Swap when de*(d[k+1]*d[k-1] + lam^2) < nu*d[k]^2; ties do not swap.
        let lhs = &de * (&d[k + 1] * &d[k - 1] + &lam[k][k - 1] * &lam[k][k - 1]);
        let rhs = &nu * (&d[k] * &d[k]);
        if lhs < rhs {
            swapi(&mut b, &mut u, &mut lam, &mut d, k, n);
            k = if k > 1 { k - 1 } else { 1 };
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                redi(&mut b, &mut u, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
    Ok(ReducedBasis { rows: b, transform: u })
}

/// Size-reduce row k against row l (l < k).
fn redi(
    b: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    lam: &mut [Vec<BigInt>],
    d: &[BigInt],
    k: usize,
    l: usize,
) {
    let two_lam: BigInt = &lam[k][l] * 2;
    if two_lam.magnitude() <= d[l + 1].magnitude() {
        return;
    }
    // q = nearest integer to lam[k][l]/d[l+1], ties toward +infinity.
    let q = (two_lam + &d[l + 1]).div_floor(&(&d[l + 1] * 2));
    for t in 0..b[k].len() {
        let s = &q * &b[l][t];
        b[k][t] -= s;
    }
    for t in 0..u[k].len() {
        let s = &q * &u[l][t];
        u[k][t] -= s;
    }
    lam[k][l] -= &q * &d[l + 1];
    for j in 0..l {
        let s = &q * &lam[l][j];
        lam[k][j] -= s;
    }
}

/// Exchange rows k and k-1, updating the integral Gram-Schmidt data.
fn swapi(
    b: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    lam: &mut Vec<Vec<BigInt>>,
    d: &mut [BigInt],
    k: usize,
    n: usize,
) {
    b.swap(k, k - 1);
    u.swap(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let lam_k = lam[k][k - 1].clone();
    let bb = (&d[k - 1] * &d[k + 1] + &lam_k * &lam_k) / &d[k];
    for i in k + 1..n {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &lam_k * &t) / &d[k];
        lam[i][k - 1] = (&bb * &t + &lam_k * &lam[i][k]) / &d[k + 1];
    }
    d[k] = bb;
}

// ---------------------------------------------------------------------------
// Rank-3 basis constructions
// ---------------------------------------------------------------------------

/// The rank-3 basis spanned by the coefficient vectors of N, f(xX), f(xX)^2
/// for f(x) = x + residue mod N:
///
/// ```text
/// N        0       0
/// res      X       0
/// res^2    2resX   X^2
/// ```
///
/// with res and res^2 reduced mod N (row operations with the first row make
/// that lattice-neutral; the middle entry of the third row stays unreduced).
pub fn build_residue_basis(n: &BigUint, residue: &BigUint, x: &BigUint) -> IntLattice {
    let res = residue % n;
    let res2 = &res * &res % n;
    let xb = BigInt::from(x.clone());
    let zero = BigInt::zero;
    IntLattice::new(vec![
        vec![BigInt::from(n.clone()), zero(), zero()],
        vec![BigInt::from(res.clone()), xb.clone(), zero()],
        vec![
            BigInt::from(res2),
            BigInt::from(2u8) * BigInt::from(res) * &xb,
            &xb * &xb,
        ],
    ])
}

/// Basis for the balanced search: residue is j*m^-1 mod N.
pub fn build_balanced_basis(n: &BigUint, m_inv: &BigUint, j: u64, x: &BigUint) -> IntLattice {
    let residue = BigUint::from(j) * (m_inv % n) % n;
    build_residue_basis(n, &residue, x)
}

/// Basis for the search with modulo information: residue is m_j*s mod N.
pub fn build_mod_basis(n: &BigUint, mj_s: &BigUint, x_i: &BigUint) -> IntLattice {
    build_residue_basis(n, mj_s, x_i)
}

/// The two explicit short rows of the p^r*q lattice B_j (no LLL needed):
/// u = row2 = coefficients of (x + M_j)^r at xX, padded with a trailing 0;
/// v = row3 - M_j*row2 = coefficients of x*(x + M_j)^r at xX.
pub fn build_power_rows(m_j: &BigUint, x: &BigUint, r: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let m_j = BigInt::from(m_j.clone());
    let x = BigInt::from(x.clone());
    // binomial row: C(r,i) * M_j^(r-i) * X^i for i = 0..r
    let mut binom = BigInt::one();
    let mut u = Vec::with_capacity(r as usize + 2);
    for i in 0..=r {
        let term = &binom * m_j.pow(r - i) * x.pow(i);
        u.push(term);
        binom = binom * BigInt::from(r - i) / BigInt::from(i + 1);
    }
    u.push(BigInt::zero());
    let mut v = Vec::with_capacity(r as usize + 2);
    v.push(BigInt::zero());
    for i in 0..=r {
        // same binomial weights, shifted one slot up and scaled by X
        v.push(&u[i as usize] * &x);
    }
    (u, v)
}

/// Extracts (c, b, a) from the second reduced row (c, bX, aX^2), normalized
/// so the leading nonzero of (a, b, c) is positive.
pub fn second_vector(rb: &ReducedBasis, x: &BigUint) -> Result<SecondVector, LatticeError> {
    assert!(rb.rows.len() >= 2 && rb.rows[1].len() == 3);
    let row = &rb.rows[1];
    let xb = BigInt::from(x.clone());
    let x2 = &xb * &xb;
    let (bq, br) = row[1].div_rem(&xb);
    let (aq, ar) = row[2].div_rem(&x2);
    if !br.is_zero() || !ar.is_zero() {
        return Err(LatticeError::NonDivisibleCoordinates);
    }
    let mut c = row[0].clone();
    let mut b = bq;
    let mut a = aq;
    let lead = if !a.is_zero() {
        a.sign()
    } else if !b.is_zero() {
        b.sign()
    } else {
        c.sign()
    };
    if lead == num_bigint::Sign::Minus {
        a = -a;
        b = -b;
        c = -c;
    }
    Ok(SecondVector { c, b, a, x: x.clone() })
}

// ---------------------------------------------------------------------------
// Dim-3 enumeration oracle
// ---------------------------------------------------------------------------

const ENUM_STEP_BUDGET: u64 = 1 << 24;

/// All nonzero lattice vectors with Euclidean norm <= bound, both signs,
/// sorted by (norm^2, coordinates). Exhaustive: internally the basis is
/// LLL-reduced for tight enumeration ranges, and the reduction is certified
/// independently (integral transform with determinant +-1), so the result
/// does not rely on LLL being correct beyond that checked identity.
pub fn enum_shortest_dim3(
    basis: &IntLattice,
    bound: &BigUint,
) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    enum_shortest_dim3_budgeted(basis, bound, ENUM_STEP_BUDGET)
}

fn enum_shortest_dim3_budgeted(
    basis: &IntLattice,
    bound: &BigUint,
    budget: u64,
) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    assert_eq!(basis.rank(), 3, "oracle is specialized to rank 3");
    let red = lll_reduce(basis, (3, 4))?;
    verify_transform(basis, &red)?;

    // Exact rational Gram-Schmidt of the reduced rows.
    let rows = &red.rows;
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(3);
    let mut mu = [[BigRational::zero(), BigRational::zero(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero(), BigRational::zero()]];
    let mut bnorm: Vec<BigRational> = Vec::with_capacity(3);
    for i in 0..3 {
        let mut v: Vec<BigRational> = rows[i]
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        for j in 0..i {
            let num: BigRational = rows[i]
                .iter()
                .zip(star[j].iter())
                .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                .sum();
            let m = num / &bnorm[j];
            for t in 0..v.len() {
                let s = &m * &star[j][t];
                v[t] -= s;
            }
            mu[i][j] = m;
        }
        let nn: BigRational = v.iter().map(|c| c * c).sum();
        if nn.is_zero() {
            return Err(LatticeError::DependentRows);
        }
        star.push(v);
        bnorm.push(nn);
    }

    let bound_sq = BigRational::from_integer(BigInt::from(bound.clone()) * BigInt::from(bound.clone()));
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut steps = 0u64;

    // Fincke-Pohst over coefficients (x0, x1, x2) w.r.t. the reduced rows:
    // sum_i (x_i + sum_{j>i} mu_{j,i} x_j)^2 * |b*_i|^2 <= bound^2.
    let range = |center: &BigRational, radius_sq: &BigRational, level_norm: &BigRational| {
        // |x + center|^2 * level_norm <= radius_sq
        let r2 = radius_sq / level_norm;
        let lo_hi = rational_sqrt_bounds(&r2);
        let lo = (-center - &lo_hi).ceil().to_integer();
        let hi = (-center + &lo_hi).floor().to_integer();
        (lo, hi)
    };

    let (lo2, hi2) = range(&BigRational::zero(), &bound_sq, &bnorm[2]);
    let mut x2 = lo2.clone();
    while x2 <= hi2 {
        steps += 1;
        if steps > budget {
            return Err(LatticeError::BoundTooLarge);
        }
        let x2r = BigRational::from_integer(x2.clone());
        let used2 = &x2r * &x2r * &bnorm[2];
        if used2 <= bound_sq {
            let rem2 = &bound_sq - &used2;
            let c1 = &mu[2][1] * &x2r;
            let (lo1, hi1) = range(&c1, &rem2, &bnorm[1]);
            let mut x1 = lo1.clone();
            while x1 <= hi1 {
                steps += 1;
                if steps > budget {
                    return Err(LatticeError::BoundTooLarge);
                }
                let x1r = BigRational::from_integer(x1.clone());
                let p1 = &x1r + &c1;
                let used1 = &used2 + &p1 * &p1 * &bnorm[1];
                if used1 <= bound_sq {
                    let rem1 = &bound_sq - &used1;
                    let c0 = &mu[1][0] * &x1r + &mu[2][0] * &x2r;
                    let (lo0, hi0) = range(&c0, &rem1, &bnorm[0]);
                    let mut x0 = lo0.clone();
                    while x0 <= hi0 {
                        steps += 1;
                        if steps > budget {
                            return Err(LatticeError::BoundTooLarge);
                        }
                        if !(x0.is_zero() && x1.is_zero() && x2.is_zero()) {
                            let v: Vec<BigInt> = (0..rows[0].len())
                                .map(|t| &x0 * &rows[0][t] + &x1 * &rows[1][t] + &x2 * &rows[2][t])
                                .collect();
                            let nsq = norm_sq(&v);
                            if BigRational::from_integer(nsq) <= bound_sq {
                                out.push(v);
                            }
                        }
                        x0 += 1;
                    }
                }
                x1 += 1;
            }
        }
        x2 += 1;
    }
    out.sort_by(|a, b| (norm_sq(a), a.clone()).cmp(&(norm_sq(b), b.clone())));
    Ok(out)
}

/// max rational r with r^2 <= q, returned as an over-approximation that is
/// still exact enough for integer range cuts (we only ceil/floor against it,
/// and the final norm check is exact).
fn rational_sqrt_bounds(q: &BigRational) -> BigRational {
    if q.is_negative() || q.is_zero() {
        return BigRational::zero();
    }
    // sqrt(n/d) <= (floor(sqrt(n*d)) + 1) / d
    let nd = q.numer() * q.denom();
    let root = nd.to_biguint().expect("nonnegative").sqrt();
    BigRational::new(BigInt::from(root) + 1, q.denom().clone())
}

/// Checks transform * original == reduced and |det transform| == 1.
fn verify_transform(orig: &IntLattice, red: &ReducedBasis) -> Result<(), LatticeError> {
    let n = orig.rank();
    let w = orig.width();
    for i in 0..n {
        for t in 0..w {
            let s: BigInt = (0..n).map(|j| &red.transform[i][j] * &orig.rows[j][t]).sum();
            if s != red.rows[i][t] {
                return Err(LatticeError::DependentRows);
            }
        }
    }
    let m = &red.transform;
    if n == 3 {
        let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
        if !det.magnitude().is_one() {
            return Err(LatticeError::DependentRows);
        }
    }
    Ok(())
}

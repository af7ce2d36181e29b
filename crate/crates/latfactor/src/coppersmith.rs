//! Small roots of f(x) = 0 modulo an unknown divisor b >= N^beta of N
//! ("factoring with a hint"), and the halving-interval sweep that finds all
//! r-power divisors in a fixed congruence class.
//!
//! The lattice has one row per degree 0..n-1: the shift polynomials
//! x^j N^(m-i) f^i(xX) for i < m, j < delta, then x^i f^m(xX) for the
//! remaining degrees. It is lower triangular, so its determinant is the
//! product of the diagonal, N^(delta m(m+1)/2) X^(n(n-1)/2); that identity
//! is asserted on every build. After LLL, the first vector is accepted only
//! if it clears the Howgrave-Graham bound |h(xX)| < b^m / sqrt(n), which
//! makes its small modular roots integer roots.

use crate::arith::{det_prime_test, int_root_floor, log2, mod_inv};
use crate::lattice::{lll_reduce, norm_sq, IntLattice};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt;

pub type Rat = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoppersmithError {
    /// The first reduced vector misses the Howgrave-Graham bound
    /// |h(xX)| < b^m / sqrt(w); a parameterization bug, not a math failure.
    NoShortEnoughVector,
    /// gcd(m, N) > 1; carries the gcd (a factor of N, so a success channel).
    SharedFactor(BigUint),
}

impl fmt::Display for CoppersmithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoppersmithError::NoShortEnoughVector => {
                write!(f, "no lattice vector clears the Howgrave-Graham bound")
            }
            CoppersmithError::SharedFactor(g) => write!(f, "modulus shares factor {} with N", g),
        }
    }
}

/// One "factoring with a hint" instance: find x0 with f(x0) = 0 mod b for
/// some divisor b >= N^beta of N and |x0| <= c * N^(beta^2/delta).
#[derive(Debug, Clone)]
pub struct HintInstance {
    pub n: BigUint,
    /// Divisor bound exponent, 0 < beta <= 1.
    pub beta: Rat,
    /// Degree of f.
    pub delta_deg: u32,
    /// Root range multiplier.
    pub c: Rat,
    /// Monic integer polynomial, coefficient index = degree.
    pub f: Vec<BigInt>,
}

/// The halving X-sequence of the r-power sweep: X_0 = floor(N^(1/r)),
/// X_{i+1} = X_i / 2, down through k = floor(log N / r) steps.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub x_seq: Vec<BigUint>,
    pub m: BigUint,
    pub s: BigUint,
}

pub fn sweep_plan(n: &BigUint, r: u32, s: &BigUint, m: &BigUint) -> SweepPlan {
    let steps = (log2(n) / r as u64) as usize;
    let mut x_seq = Vec::with_capacity(steps + 1);
    let mut x = int_root_floor(n, &BigUint::one(), 1, r);
    x_seq.push(x.clone());
    for _ in 0..steps {
        x >>= 1;
        x_seq.push(x.clone());
    }
    SweepPlan { x_seq, m: m.clone(), s: s.clone() }
}

// ---------------------------------------------------------------------------
// Shift-polynomial lattice
// ---------------------------------------------------------------------------

/// Lattice parameters derived per the hint lemma: n_rows = log N + 1 rows
/// (extended when delta*m_pow overruns), m_pow = ceil(beta*n/delta).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftParams {
    pub n_rows: usize,
    pub m_pow: u32,
}

pub fn shift_params(n: &BigUint, beta: Rat, delta: u32) -> ShiftParams {
    let lat_n = (log2(n) + 1) as usize;
    let m_pow = Ratio::new(*beta.numer() * lat_n as u64, *beta.denom() * delta as u64)
        .ceil()
        .to_integer()
        .max(1) as u32;
    let n_rows = lat_n.max((delta * m_pow) as usize);
    ShiftParams { n_rows, m_pow }
}

/// Builds the lower-triangular lattice of g_{i,j}(xX) = x^j N^(m-i) f^i(xX)
/// and h_i(xX) = x^i f^m(xX), one row per degree 0..n_rows-1, and asserts
/// det = N^(delta m(m+1)/2) * X^(n(n-1)/2) via the diagonal product.
pub fn build_shift_lattice(
    n: &BigUint,
    f: &[BigInt],
    params: ShiftParams,
    x: &BigUint,
) -> IntLattice {
    let delta = f.len() - 1;
    let m_pow = params.m_pow as usize;
    let n_rows = params.n_rows;
    assert!(delta >= 1 && !x.is_zero() && n_rows >= delta * m_pow);
    assert!(f[delta].is_one(), "f must be monic");

    // f^0 .. f^m_pow
    let mut fpows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for i in 1..=m_pow {
        fpows.push(poly_mul_z(&fpows[i - 1], f));
    }
    // X^0 .. X^(n_rows-1)
    let xb = BigInt::from(x.clone());
    let mut xpows: Vec<BigInt> = Vec::with_capacity(n_rows);
    xpows.push(BigInt::one());
    for d in 1..n_rows {
        xpows.push(&xpows[d - 1] * &xb);
    }
    let nb = BigInt::from(n.clone());

    let mut rows = Vec::with_capacity(n_rows);
    for deg in 0..n_rows {
        let (i, j) = if deg < delta * m_pow {
            (deg / delta, deg % delta)
        } else {
            (m_pow, deg - delta * m_pow)
        };
        let scale = nb.pow((m_pow - i) as u32);
        let fp = &fpows[i];
        let mut row = vec![BigInt::zero(); n_rows];
        for (d, coeff) in fp.iter().enumerate() {
            row[d + j] = coeff * &scale * &xpows[d + j];
        }
        debug_assert!(row[deg].magnitude() == (&scale * &xpows[deg]).magnitude());
        rows.push(row);
    }

    let lat = IntLattice::new(rows);
    let diag: BigUint = (0..n_rows)
        .map(|d| lat.rows()[d][d].magnitude().clone())
        .product();
    assert_eq!(
        diag,
        expected_shift_det(n, delta as u32, params, x),
        "shift lattice determinant identity violated"
    );
    lat
}

/// N^(delta*m(m+1)/2) * X^(n(n-1)/2).
pub fn expected_shift_det(n: &BigUint, delta: u32, params: ShiftParams, x: &BigUint) -> BigUint {
    let m = params.m_pow as u64;
    let nr = params.n_rows as u64;
    n.pow((delta as u64 * m * (m + 1) / 2) as u32) * x.pow((nr * (nr - 1) / 2) as u32)
}

/// Plain integer polynomial product (schoolbook; degrees here are tiny).
fn poly_mul_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Taylor shift f(x + t).
fn poly_shift(f: &[BigInt], t: &BigInt) -> Vec<BigInt> {
    let mut out = f.to_vec();
    // Horner-style: repeatedly divide by (x - (-t)) accumulating remainders.
    let n = out.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let add = &out[j + 1] * t;
            out[j] += add;
        }
    }
    out
}

fn poly_eval_z(f: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in f.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

// ---------------------------------------------------------------------------
// One translated lemma instance
// ---------------------------------------------------------------------------

/// Roots y with |y| <= x of f(y) = 0 mod b^m_pow for divisors b >= b_div of
/// n, found through one lattice reduction. b_div is the exact integer lower
/// bound on the divisor used in the Howgrave-Graham test.
fn solve_translate(
    n: &BigUint,
    f: &[BigInt],
    params: ShiftParams,
    x: &BigUint,
    b_div: &BigUint,
    counters: &mut SweepCounters,
) -> Result<Vec<BigInt>, CoppersmithError> {
    let lat = build_shift_lattice(n, f, params, x);
    counters.lll_calls += 1;
    let red = lll_reduce(&lat, (3, 4)).expect("shift lattice rows are independent");
    let first = &red.rows[0];
    // Howgrave-Graham: |h(xX)|^2 * w < (b^m)^2
    let lhs = norm_sq(first).magnitude() * BigUint::from(params.n_rows as u64);
    let rhs = b_div.pow(2 * params.m_pow);
    if lhs >= rhs {
        return Err(CoppersmithError::NoShortEnoughVector);
    }
    // Strip the X-scaling: coefficient d is divisible by X^d by construction.
    let mut h: Vec<BigInt> = Vec::with_capacity(first.len());
    let xb = BigInt::from(x.clone());
    let mut xpow = BigInt::one();
    for (d, coeff) in first.iter().enumerate() {
        let (q, r) = coeff.div_rem(&xpow);
        assert!(r.is_zero(), "short vector not divisible by X^{}", d);
        h.push(q);
        xpow *= &xb;
    }
    let bound = BigInt::from(x.clone());
    Ok(integer_roots_in_range(&h, &(-bound.clone()), &bound))
}

// ---------------------------------------------------------------------------
// small_roots: the full lemma with translated instances
// ---------------------------------------------------------------------------

/// Every integer x0 with |x0| <= c*N^(beta^2/delta) and f(x0) = 0 modulo
/// some divisor b >= N^beta of N. The symmetric range is covered by at most
/// 4*ceil(c) translated instances of radius X = floor(N^(beta^2/delta))/4.
pub fn small_roots(inst: &HintInstance) -> Result<Vec<BigInt>, CoppersmithError> {
    let n = &inst.n;
    let delta = inst.delta_deg;
    assert_eq!(inst.f.len() as u32, delta + 1, "f must have degree delta");

    // Reduced exponent beta^2/delta
    let e_num = inst.beta.numer() * inst.beta.numer();
    let e_den = inst.beta.denom() * inst.beta.denom() * delta as u64;
    let g = e_num.gcd(&e_den);
    let w = int_root_floor(n, &BigUint::one(), (e_num / g) as u32, (e_den / g) as u32);
    // The lemma's per-instance radius X = N^(beta^2/delta)/4, at the
    // smallest dimension that certifies it.
    let target: BigUint = &w >> 2;
    let b_div = int_root_ceil_rat(n, inst.beta);
    let (params, radius) = if target.is_zero() {
        (ShiftParams { n_rows: 0, m_pow: 0 }, BigUint::zero())
    } else {
        lemma_params(n, &b_div, delta, inst.beta, &target)
    };
    // Full range R = ceil(c * N^(beta^2/delta)), overshooting the floor of
    // the root is harmless (superset coverage).
    let range = BigInt::from(((&w + 1u32) * inst.c.numer()).div_ceil(&BigUint::from(*inst.c.denom())));
    let mut counters = SweepCounters::default();
    let mut found: BTreeSet<BigInt> = BTreeSet::new();
    if radius.is_zero() {
        // Degenerate lattice; the range is a handful of points.
        let mut y = -range.clone();
        while y <= range {
            found.insert(y.clone());
            y += 1;
        }
    } else {
        let radius_int = BigInt::from(radius.clone());
        let step = BigInt::from(&radius * 2u32 + 1u32);
        let mut center = -range.clone() + &radius_int;
        while &center - &radius_int <= range {
            let f_t = poly_shift(&inst.f, &center);
            let roots = solve_translate(n, &f_t, params, &radius, &b_div, &mut counters)?;
            for y in roots {
                found.insert(y + &center);
            }
            center += &step;
        }
    }
    // Final filter: in range, and f(x0) = 0 modulo a large enough divisor.
    let out: Vec<BigInt> = found
        .into_iter()
        .filter(|x0| x0.magnitude() <= range.magnitude())
        .filter(|x0| divisor_bound_met(n, &poly_eval_z(&inst.f, x0), inst.beta))
        .collect();
    Ok(out)
}

/// ceil(N^beta) as an exact integer.
fn int_root_ceil_rat(n: &BigUint, beta: Rat) -> BigUint {
    crate::arith::int_root_ceil(n, &BigUint::one(), *beta.numer() as u32, *beta.denom() as u32)
}

/// gcd(value, N) >= N^beta, compared exactly as gcd^den >= N^num.
fn divisor_bound_met(n: &BigUint, value: &BigInt, beta: Rat) -> bool {
    let g = value.magnitude().gcd(n);
    if g.is_zero() {
        return true; // value = 0: divisible by N itself
    }
    g.pow(*beta.denom() as u32) >= n.pow(*beta.numer() as u32)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SweepCounters {
    pub lll_calls: u64,
    pub exhaustive_candidates: u64,
    pub hg_fallbacks: u64,
}

// ---------------------------------------------------------------------------
// r-power divisors in a congruence class (halving-interval sweep)
// ---------------------------------------------------------------------------

/// All divisors p of N with p = s (mod m) and p^r | N, by sweeping the
/// halving intervals [X_{i+1}, X_i] with one hint instance per interval
/// (f_r(x) = (st + x)^r, divisor bound X_{i+1}^r), finishing [0, X_k] by
/// exhaustive stepping s, s+m, s+2m, ...
pub fn rpower_divisors_congruence(
    n: &BigUint,
    r: u32,
    s: &BigUint,
    m: &BigUint,
) -> Result<Vec<BigUint>, CoppersmithError> {
    let (list, _) = rpower_divisors_congruence_counted(n, r, s, m)?;
    Ok(list)
}

pub fn rpower_divisors_congruence_counted(
    n: &BigUint,
    r: u32,
    s: &BigUint,
    m: &BigUint,
) -> Result<(Vec<BigUint>, SweepCounters), CoppersmithError> {
    assert!(r >= 1 && *m >= BigUint::one());
    let g = m.gcd(n);
    if !g.is_one() {
        return Err(CoppersmithError::SharedFactor(g));
    }
    let s = s % m;
    let plan = sweep_plan(n, r, &s, m);
    let t = mod_inv(m, n).expect("gcd(m, N) = 1 checked above");
    let a = &s * &t % n; // st mod N; p | (st + x0) for p = m*x0 + s
    let base: Vec<BigInt> = binomial_expand(&BigInt::from(a), r);

    let k = plan.x_seq.len() - 1;
    // Interval [X_{i+1}, X_i] for i = 0..k, then the exhaustive tail.
    let results: Vec<Result<(Vec<BigUint>, SweepCounters), CoppersmithError>> = (0..k)
        .into_par_iter()
        .map(|i| sweep_interval(n, r, &s, m, &base, &plan.x_seq[i + 1], &plan.x_seq[i]))
        .collect();
    let mut found: BTreeSet<BigUint> = BTreeSet::new();
    let mut counters = SweepCounters::default();
    for res in results {
        let (list, c) = res?;
        found.extend(list);
        counters.lll_calls += c.lll_calls;
        counters.exhaustive_candidates += c.exhaustive_candidates;
        counters.hg_fallbacks += c.hg_fallbacks;
    }
    // Tail [0, X_k]: exhaustive stepping.
    let tail = plan.x_seq[k].clone();
    let mut p = s.clone();
    if p.is_zero() {
        p += m;
    }
    while p <= tail {
        counters.exhaustive_candidates += 1;
        if p >= BigUint::from(2u32) && is_rpower_divisor(n, &p, r) {
            found.insert(p.clone());
        }
        p += m;
    }
    Ok((found.into_iter().collect(), counters))
}

/// Candidate count below which direct stepping beats building a lattice.
const EXHAUSTIVE_INTERVAL_THRESHOLD: u64 = 32;

/// Largest root radius the LLL/Howgrave-Graham chain certifies for a
/// w-row lattice with multiplicity m and divisor bound b_div:
///   X_max = floor((b_div^(2mw) / N^(delta m(m+1)))^(1/(w(w-1)))) / 2.
fn certified_radius(
    n: &BigUint,
    b_div: &BigUint,
    delta: u32,
    w: usize,
    m_pow: u32,
) -> BigUint {
    let num = b_div.pow(2 * m_pow * w as u32);
    let den = n.pow(delta * m_pow * (m_pow + 1));
    if num <= den {
        BigUint::zero()
    } else {
        int_root_floor(&num, &den, 1, (w * (w - 1)) as u32) >> 1
    }
}

/// Cheap bit-length estimate of certified_radius: the exponent of N is
/// E(w, m) = 2 beta m / (w-1) - delta m (m+1) / (w (w-1)), so the radius has
/// about (2 b_bits m w - n_bits delta m (m+1)) / (w (w-1)) - 1 bits.
fn est_radius_bits(n_bits: i128, b_bits: i128, delta: u32, w: usize, m_pow: u32) -> i128 {
    let (w, m, d) = (w as i128, m_pow as i128, delta as i128);
    let num = 2 * b_bits * m * w - n_bits * d * m * (m + 1);
    num / (w * (w - 1)) - 1
}

fn m_pow_candidates(beta: Rat, delta: u32, w: usize) -> [u32; 3] {
    let m_hi = (w as u64 / delta as u64).max(1) as u32;
    let m_mid = Ratio::new(*beta.numer() * w as u64, *beta.denom() * delta as u64)
        .ceil()
        .to_integer()
        .clamp(1, m_hi as u64) as u32;
    [m_mid, m_mid.saturating_sub(1).max(1), (m_mid + 1).min(m_hi)]
}

/// Smallest lattice shape certifying the target radius. The lemma dimension
/// log N + 1 is an asymptotic worst case (beta near 1); for smaller beta a
/// fraction of it already certifies the same radius, and exact LLL cost
/// falls steeply with dimension. The scan is guided by the bit estimate and
/// confirmed with the exact certified radius; if even the lemma dimension
/// cannot reach the target, the best certified radius is returned instead.
fn lemma_params(
    n: &BigUint,
    b_div: &BigUint,
    delta: u32,
    beta: Rat,
    target: &BigUint,
) -> (ShiftParams, BigUint) {
    let lat_n = (log2(n) + 1) as usize;
    let w_max = lat_n.max(delta as usize + 1);
    let n_bits = log2(n) as i128;
    let b_bits = log2(b_div) as i128;
    let target_bits = log2(target) as i128;
    let mut best: Option<(ShiftParams, BigUint)> = None;
    for w in (delta as usize + 1)..=w_max {
        for m_pow in m_pow_candidates(beta, delta, w) {
            if est_radius_bits(n_bits, b_bits, delta, w, m_pow) < target_bits && w < w_max {
                continue;
            }
            let params = ShiftParams { n_rows: w, m_pow };
            let radius = certified_radius(n, b_div, delta, w, m_pow);
            if &radius >= target {
                return (params, target.clone());
            }
            if best.as_ref().is_none_or(|(_, r)| radius > *r) {
                best = Some((params, radius));
            }
        }
    }
    best.expect("dimension scan is nonempty")
}

/// Dimension cap for sweep intervals: past this point the exact-LLL cost
/// outweighs splitting the interval into more translates.
const SWEEP_W_CAP: usize = 24;

/// Lattice shape minimizing estimated interval cost, which trades the
/// number of translated instances (count / 2^radius_bits) against per-call
/// LLL cost (about w^5). Exact radius is computed only for the winner.
fn sweep_params(
    n: &BigUint,
    b_div: &BigUint,
    delta: u32,
    beta: Rat,
    count_bits: i128,
) -> (ShiftParams, BigUint) {
    let lat_n = (log2(n) + 1) as usize;
    let w_max = lat_n.min(SWEEP_W_CAP).max(delta as usize + 1);
    let n_bits = log2(n) as i128;
    let b_bits = log2(b_div) as i128;
    let mut best: Option<(ShiftParams, i128)> = None;
    for w in (delta as usize + 1)..=w_max {
        for m_pow in m_pow_candidates(beta, delta, w) {
            let est = est_radius_bits(n_bits, b_bits, delta, w, m_pow);
            if est < 1 {
                continue;
            }
            let translate_bits = (count_bits - est - 1).max(0);
            let cost_bits = translate_bits + 5 * (64 - (w as u64).leading_zeros() as i128);
            let params = ShiftParams { n_rows: w, m_pow };
            if best.as_ref().is_none_or(|&(_, c)| cost_bits < c) {
                best = Some((params, cost_bits));
            }
        }
    }
    let Some((mut params, _)) = best else {
        return (ShiftParams { n_rows: delta as usize + 1, m_pow: 1 }, BigUint::zero());
    };
    // The estimate can be a bit optimistic; grow the dimension until the
    // exact certified radius is usable.
    loop {
        let radius = certified_radius(n, b_div, delta, params.n_rows, params.m_pow);
        if !radius.is_zero() || params.n_rows >= w_max {
            return (params, radius);
        }
        params.n_rows += 1;
        params.m_pow = m_pow_candidates(beta, delta, params.n_rows)[0];
    }
}

fn sweep_interval(
    n: &BigUint,
    r: u32,
    s: &BigUint,
    m: &BigUint,
    base_poly: &[BigInt],
    lo: &BigUint,
    hi: &BigUint,
) -> Result<(Vec<BigUint>, SweepCounters), CoppersmithError> {
    let mut counters = SweepCounters::default();
    let mut found = Vec::new();
    // x0 range [a_lo, a_hi] for p = m*x0 + s in [lo, hi]
    let a_lo = if lo > s { (lo - s).div_ceil(m) } else { BigUint::zero() };
    let a_hi = if hi >= s { (hi - s) / m } else { return Ok((found, counters)) };
    if a_lo > a_hi {
        return Ok((found, counters));
    }
    let count = (&a_hi - &a_lo + 1u32).to_u64().unwrap_or(u64::MAX);
    if *lo < BigUint::from(2u32) || count <= EXHAUSTIVE_INTERVAL_THRESHOLD {
        scan_range(n, r, s, m, &a_lo, &a_hi, &mut counters, &mut found);
        return Ok((found, counters));
    }

    let b_div = lo.pow(r);
    let beta = Rat::new(r as u64 * log2(lo).max(1), log2(n).max(1));
    let count_bits = log2(&(&a_hi - &a_lo + 1u32)) as i128;
    let (params, radius) = sweep_params(n, &b_div, r, beta, count_bits);
    if radius.is_zero() {
        scan_range(n, r, s, m, &a_lo, &a_hi, &mut counters, &mut found);
        return Ok((found, counters));
    }
    let radius_int = BigInt::from(radius.clone());
    let step = BigInt::from(&radius * 2u32 + 1u32);
    let a_hi_int = BigInt::from(a_hi.clone());
    let mut center = BigInt::from(a_lo.clone()) + &radius_int;
    while &center - &radius_int <= a_hi_int {
        let f_t = poly_shift(base_poly, &center);
        match solve_translate(n, &f_t, params, &radius, &b_div, &mut counters) {
            Ok(roots) => {
                for y in roots {
                    let x0 = y + &center;
                    if x0.is_negative() {
                        continue;
                    }
                    let x0 = x0.magnitude().clone();
                    if x0 < a_lo || x0 > a_hi {
                        continue;
                    }
                    let p = m * &x0 + s;
                    if p >= BigUint::from(2u32) && is_rpower_divisor(n, &p, r) {
                        found.push(p);
                    }
                }
            }
            Err(CoppersmithError::NoShortEnoughVector) => {
                // The derived radius makes this unreachable in theory; if a
                // vector still misses the bound, rescan the window directly.
                counters.hg_fallbacks += 1;
                let w_lo = (&center - &radius_int)
                    .max(BigInt::from(a_lo.clone()))
                    .magnitude()
                    .clone();
                let w_hi = (&center + &radius_int)
                    .min(a_hi_int.clone())
                    .magnitude()
                    .clone();
                scan_range(n, r, s, m, &w_lo, &w_hi, &mut counters, &mut found);
            }
            Err(e) => return Err(e),
        }
        center += &step;
    }
    Ok((found, counters))
}

fn scan_range(
    n: &BigUint,
    r: u32,
    s: &BigUint,
    m: &BigUint,
    a_lo: &BigUint,
    a_hi: &BigUint,
    counters: &mut SweepCounters,
    found: &mut Vec<BigUint>,
) {
    let mut x0 = a_lo.clone();
    while x0 <= *a_hi {
        counters.exhaustive_candidates += 1;
        let p = m * &x0 + s;
        if p >= BigUint::from(2u32) && is_rpower_divisor(n, &p, r) {
            found.push(p);
        }
        x0 += 1u32;
    }
}

fn is_rpower_divisor(n: &BigUint, p: &BigUint, r: u32) -> bool {
    (n % p.pow(r)).is_zero()
}

/// (a + x)^r as a coefficient vector.
fn binomial_expand(a: &BigInt, r: u32) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    let lin = vec![a.clone(), BigInt::one()];
    for _ in 0..r {
        out = poly_mul_z(&out, &lin);
    }
    out
}

/// All primes p = s (mod m) dividing N: the r = 1 sweep filtered to primes.
pub fn factor_with_congruence(
    n: &BigUint,
    s: &BigUint,
    m: &BigUint,
) -> Result<Vec<BigUint>, CoppersmithError> {
    let divisors = rpower_divisors_congruence(n, 1, s, m)?;
    Ok(divisors
        .into_iter()
        .filter(|d| det_prime_test(d).expect("desk-scale divisor"))
        .collect())
}

// ---------------------------------------------------------------------------
// Integer roots
// ---------------------------------------------------------------------------

/// Positive integer roots p of lhs(p) - i * p^r = 0; the match-step solver.
/// Degree <= 2 is handled by exact discriminant algebra, higher degrees by
/// modular root extraction with exact verification.
pub fn integer_roots(lhs: &[BigInt], i_coeff: &BigUint, r_pow: u32) -> Vec<BigUint> {
    let mut poly = lhs.to_vec();
    if poly.len() <= r_pow as usize {
        poly.resize(r_pow as usize + 1, BigInt::zero());
    }
    poly[r_pow as usize] -= BigInt::from(i_coeff.clone());
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    if poly.len() <= 1 {
        return Vec::new();
    }
    // Positive roots are bounded by the Cauchy bound 1 + max|c|/|lead|.
    let lead = poly.last().unwrap().magnitude();
    let maxc = poly.iter().map(|c| c.magnitude()).max().unwrap().clone();
    let bound = BigInt::from(maxc / lead + 2u32);
    integer_roots_in_range(&poly, &BigInt::one(), &bound)
        .into_iter()
        .map(|p| p.magnitude().clone())
        .collect()
}

/// All integer roots of h in [lo, hi], exact. Linear and quadratic cases are
/// solved algebraically; beyond that, roots are found modulo a fixed 61-bit
/// prime (every integer root in range lifts uniquely when the range fits in
/// (-P/2, P/2)) and each candidate is verified by exact evaluation.
pub fn integer_roots_in_range(h: &[BigInt], lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    let mut h = h.to_vec();
    while h.last().is_some_and(Zero::is_zero) {
        h.pop();
    }
    let mut out: BTreeSet<BigInt> = BTreeSet::new();
    if h.is_empty() || lo > hi {
        return Vec::new();
    }
    // Factor out x^k.
    let shift = h.iter().take_while(|c| c.is_zero()).count();
    if shift > 0 {
        if *lo <= BigInt::zero() && BigInt::zero() <= *hi {
            out.insert(BigInt::zero());
        }
        h.drain(..shift);
    }
    match h.len() {
        0 | 1 => {}
        2 => {
            // a x + b = 0
            let (q, r) = (-&h[0]).div_rem(&h[1]);
            if r.is_zero() {
                out.insert(q);
            }
        }
        3 => {
            // a x^2 + b x + c = 0 via exact discriminant square test
            let (a, b, c) = (&h[2], &h[1], &h[0]);
            let disc = b * b - BigInt::from(4u32) * a * c;
            if !disc.is_negative() {
                let root = disc.magnitude().sqrt();
                if &root * &root == *disc.magnitude() {
                    let root = BigInt::from(root);
                    for num in [-b + &root, -b - &root] {
                        let (q, r) = num.div_rem(&(BigInt::from(2u32) * a));
                        if r.is_zero() {
                            out.insert(q);
                        }
                    }
                }
            }
        }
        _ => {
            for y in roots_mod_p61(&h) {
                if lo <= &y && &y <= hi && poly_eval_z(&h, &y).is_zero() {
                    out.insert(y);
                }
            }
        }
    }
    out.into_iter().filter(|y| lo <= y && y <= hi).collect()
}

/// 2^61 - 1, prime; balanced residues cover (-P/2, P/2).
const P61: u64 = 2_305_843_009_213_693_951;

/// Integer candidates from the roots of h mod P61, lifted to (-P/2, P/2).
/// Complete for integer roots in that window; candidates outside are culled
/// by the caller's exact verification.
fn roots_mod_p61(h: &[BigInt]) -> Vec<BigInt> {
    let p = P61;
    let hp: Vec<u64> = h
        .iter()
        .map(|c| {
            let r = c.mod_floor(&BigInt::from(p));
            r.to_u64().expect("reduced residue fits")
        })
        .collect();
    let hp = fp_trim(hp);
    if hp.len() <= 1 {
        return Vec::new();
    }
    let monic = fp_make_monic(&hp, p);
    // g = gcd(x^p - x, monic): the squarefree product of linear factors.
    let xp = fp_powmod_x(&monic, p, p);
    let mut xp_minus_x = xp;
    if xp_minus_x.len() < 2 {
        xp_minus_x.resize(2, 0);
    }
    xp_minus_x[1] = sub_mod(xp_minus_x[1], 1, p);
    let g = fp_gcd(&fp_trim(xp_minus_x), &monic, p);
    let mut roots = Vec::new();
    fp_split_linear(&g, p, 0, &mut roots);
    roots
        .into_iter()
        .map(|r| {
            if r > p / 2 {
                BigInt::from(r) - BigInt::from(p)
            } else {
                BigInt::from(r)
            }
        })
        .collect()
}

// Dense polynomials over F_p, lowest degree first.

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    add_mod(a, p - b % p, p)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::arith::powmod_u64(a, p - 2, p)
}

fn fp_make_monic(f: &[u64], p: u64) -> Vec<u64> {
    let inv = inv_mod(*f.last().unwrap(), p);
    f.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    out
}

/// a mod f for monic f.
fn fp_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let d = f.len() - 1;
    while r.len() > d {
        let lead = *r.last().unwrap();
        let k = r.len() - 1 - d;
        if lead != 0 {
            for (i, &c) in f.iter().enumerate() {
                r[k + i] = sub_mod(r[k + i], mul_mod(lead, c, p), p);
            }
        }
        r.pop();
    }
    fp_trim(r)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = fp_trim(a.to_vec());
    let mut b = fp_trim(b.to_vec());
    while !b.is_empty() {
        let bm = fp_make_monic(&b, p);
        let r = fp_rem(&a, &bm, p);
        a = bm;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        fp_make_monic(&a, p)
    }
}

/// x^e mod f (f monic).
fn fp_powmod_x(f: &[u64], e: u64, p: u64) -> Vec<u64> {
    let mut base = fp_rem(&[0, 1], f, p);
    let mut acc = vec![1u64];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(&fp_mul(&acc, &base, p), f, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), f, p);
        e >>= 1;
    }
    acc
}

/// (x + c)^e mod f.
fn fp_powmod_shifted(f: &[u64], c: u64, e: u64, p: u64) -> Vec<u64> {
    let mut base = fp_rem(&[c, 1], f, p);
    let mut acc = vec![1u64];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(&fp_mul(&acc, &base, p), f, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), f, p);
        e >>= 1;
    }
    acc
}

/// Splits a squarefree product of linear factors into roots by scanning
/// deterministic shifts c and splitting on gcd((x+c)^((p-1)/2) - 1, g).
fn fp_split_linear(g: &[u64], p: u64, depth: u32, roots: &mut Vec<u64>) {
    let g = fp_trim(g.to_vec());
    if g.len() <= 1 {
        return;
    }
    if g.len() == 2 {
        // monic x + c0: root = -c0
        let gm = fp_make_monic(&g, p);
        roots.push(sub_mod(0, gm[0], p));
        return;
    }
    // If 0 is a root, peel it.
    if g[0] == 0 {
        roots.push(0);
        let peeled: Vec<u64> = g[1..].to_vec();
        fp_split_linear(&peeled, p, depth, roots);
        return;
    }
    let gm = fp_make_monic(&g, p);
    for c in depth..depth + 256 {
        let mut w = fp_powmod_shifted(&gm, c as u64, (p - 1) / 2, p);
        if w.is_empty() {
            w = vec![0];
        }
        w[0] = sub_mod(w[0], 1, p);
        let d = fp_gcd(&fp_trim(w), &gm, p);
        if d.len() > 1 && d.len() < gm.len() {
            let (q, r) = fp_divide(&gm, &d, p);
            debug_assert!(r.is_empty());
            fp_split_linear(&d, p, c + 1, roots);
            fp_split_linear(&q, p, c + 1, roots);
            return;
        }
    }
    unreachable!("split of a squarefree linear product stalled");
}

fn fp_divide(a: &[u64], f: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    let d = f.len() - 1;
    let mut q = vec![0u64; a.len().saturating_sub(d)];
    while r.len() > d {
        let lead = *r.last().unwrap();
        let k = r.len() - 1 - d;
        if lead != 0 {
            q[k] = lead;
            for (i, &c) in f.iter().enumerate() {
                r[k + i] = sub_mod(r[k + i], mul_mod(lead, c, p), p);
            }
        }
        r.pop();
    }
    (fp_trim(q), fp_trim(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn poly_shift_is_taylor() {
        // f(x) = x^2 + 3x + 5; f(x + 2) = x^2 + 7x + 15
        let f = vec![bi(5), bi(3), bi(1)];
        assert_eq!(poly_shift(&f, &bi(2)), vec![bi(15), bi(7), bi(1)]);
        // random check by evaluation
        let t = bi(-7);
        let g = poly_shift(&f, &t);
        for x in [-3i64, 0, 4] {
            assert_eq!(poly_eval_z(&g, &bi(x)), poly_eval_z(&f, &(bi(x) + &t)));
        }
    }

    #[test]
    fn integer_roots_quadratic_and_linear() {
        // p^2 = 9 -> [3]
        let lhs = vec![bi(-9), bi(0), bi(1)];
        assert_eq!(integer_roots(&lhs, &b(0), 0), vec![b(3)]);
        // 2p - 14 = 0 -> [7]
        let lhs = vec![bi(-14), bi(2)];
        assert_eq!(integer_roots(&lhs, &b(0), 0), vec![b(7)]);
        // p^2 - 5 = 0: no integer root
        let lhs = vec![bi(-5), bi(0), bi(1)];
        assert!(integer_roots(&lhs, &b(0), 0).is_empty());
    }

    #[test]
    fn integer_roots_high_degree() {
        // (p - 13) * p^3 = 0 against rhs 0: expands the power-search match
        // equation shape v(p - M) = i p^r with planted root 13.
        // lhs = (p - 4)(p - 13)(p^2 + 1)
        let lhs = poly_mul_z(
            &poly_mul_z(&[bi(-4), bi(1)], &[bi(-13), bi(1)]),
            &[bi(1), bi(0), bi(1)],
        );
        assert_eq!(integer_roots(&lhs, &b(0), 0), vec![b(4), b(13)]);
    }

    #[test]
    fn integer_roots_in_range_mod_p_path() {
        // degree 5 with roots -2, 0, 7 (and a quartic factor with none)
        let f = poly_mul_z(
            &poly_mul_z(&[bi(2), bi(1)], &[bi(0), bi(1)]),
            &poly_mul_z(&[bi(-7), bi(1)], &[bi(3), bi(0), bi(1)]),
        );
        let roots = integer_roots_in_range(&f, &bi(-100), &bi(100));
        assert_eq!(roots, vec![bi(-2), bi(0), bi(7)]);
        // range filter
        let roots = integer_roots_in_range(&f, &bi(1), &bi(100));
        assert_eq!(roots, vec![bi(7)]);
    }

    #[test]
    fn shift_lattice_det_identity() {
        let n = b(100160063);
        let f = vec![bi(12345), bi(1)];
        let params = shift_params(&n, Rat::new(1, 2), 1);
        let x = b(50);
        let lat = build_shift_lattice(&n, &f, params, &x);
        // build asserts the determinant identity internally; double-check
        let diag: BigUint = (0..lat.rank()).map(|d| lat.rows()[d][d].magnitude().clone()).product();
        assert_eq!(diag, expected_shift_det(&n, 1, params, &x));
        // lower triangular
        for (r, row) in lat.rows().iter().enumerate() {
            for c in r + 1..row.len() {
                assert!(row[c].is_zero());
            }
        }
    }

    #[test]
    fn shift_lattice_rows_vanish_at_planted_root() {
        // N = p*q with p = 10007; f(x) = x + s t where p = m x0 + s.
        let p = b(10007);
        let n = b(10007) * b(10009);
        let m = b(317);
        let s = &p % &m; // 180
        let t = mod_inv(&m, &n).unwrap();
        let a = &s * &t % &n;
        let x0 = (&p - &s) / &m; // 31
        let f = vec![BigInt::from(a), bi(1)];
        let params = shift_params(&n, Rat::new(1, 2), 1);
        let lat = build_shift_lattice(&n, &f, params, &b(40));
        // every row, with X-scaling stripped, vanishes mod p^m_pow at x0
        let pm = p.pow(params.m_pow);
        let x = bi(40);
        for row in lat.rows() {
            let mut xpow = BigInt::one();
            let mut val = BigInt::zero();
            let mut x0pow = BigInt::one();
            for c in row {
                let (q, r) = c.div_rem(&xpow);
                assert!(r.is_zero());
                val += q * &x0pow;
                xpow *= &x;
                x0pow *= BigInt::from(x0.clone());
            }
            assert!(val.mod_floor(&BigInt::from(pm.clone())).is_zero());
        }
    }

    #[test]
    fn small_roots_planted_linear_root() {
        // N = 10007 * 10009; the divisor must clear N^beta, so plant the
        // larger prime: 10009 = 317*31 + 182, f(x) = x + 182*317^-1,
        // beta = 1/2, delta = 1 -> recovers x0 = 31.
        let n = b(100160063);
        let t = mod_inv(&b(317), &n).unwrap();
        let a = b(182) * t % &n;
        let inst = HintInstance {
            n: n.clone(),
            beta: Rat::new(1, 2),
            delta_deg: 1,
            c: Rat::new(2, 1),
            f: vec![BigInt::from(a), bi(1)],
        };
        let roots = small_roots(&inst).unwrap();
        assert!(roots.contains(&bi(31)), "roots = {:?}", roots);
    }

    #[test]
    fn small_roots_zero_root() {
        // f(x) = x, beta = 1, delta = 1: 0 is always a solution (b = N).
        let n = b(100160063);
        let inst = HintInstance {
            n,
            beta: Rat::new(1, 1),
            delta_deg: 1,
            c: Rat::new(1, 1),
            f: vec![bi(0), bi(1)],
        };
        let roots = small_roots(&inst).unwrap();
        assert!(roots.contains(&bi(0)));
    }

    #[test]
    fn rpower_sweep_examples() {
        // 4839991 = 13^3 * 2203; 13 = 13 mod 20
        let out = rpower_divisors_congruence(&b(4839991), 3, &b(13), &b(20)).unwrap();
        assert_eq!(out, vec![b(13)]);
        // 2047 = 23 * 89 squarefree: no square divisors
        let out = rpower_divisors_congruence(&b(2047), 2, &b(1), &b(2)).unwrap();
        assert!(out.is_empty());
        // 81 = 3^4, 3 = 3 mod 5
        let out = rpower_divisors_congruence(&b(81), 4, &b(3), &b(5)).unwrap();
        assert_eq!(out, vec![b(3)]);
        // shared factor channel
        assert_eq!(
            rpower_divisors_congruence(&b(81), 2, &b(1), &b(6)),
            Err(CoppersmithError::SharedFactor(b(3)))
        );
    }

    #[test]
    fn rpower_sweep_matches_brute_force() {
        let mut state = 0xc0ffeeu64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for _ in 0..24 {
            let r = 2 + (next() % 3) as u32; // 2..4
            let n = b((next() >> 24) | (1 << 34)) + 1u32; // ~35 bits
            let m = b(2 + next() % 40);
            if !m.gcd(&n).is_one() {
                continue;
            }
            let s = b(next() % 41) % &m;
            let got = rpower_divisors_congruence(&n, r, &s, &m).unwrap();
            // brute force over p = s, s+m, ... <= N^(1/r)
            let lim = int_root_floor(&n, &BigUint::one(), 1, r);
            let mut expect = Vec::new();
            let mut p = s.clone();
            if p.is_zero() {
                p += &m;
            }
            while p <= lim {
                if p >= b(2) && is_rpower_divisor(&n, &p, r) {
                    expect.push(p.clone());
                }
                p += &m;
            }
            assert_eq!(got, expect, "N={} r={} s={} m={}", n, r, s, m);
        }
    }

    #[test]
    fn factor_with_congruence_examples() {
        // planted: 100160063 = 10007 * 10009, 10007 = 180 mod 317
        let out = factor_with_congruence(&b(100160063), &b(180), &b(317)).unwrap();
        assert_eq!(out, vec![b(10007)]);
        // 35: 5 = 5 mod 6 (35 is 5 mod 6 too but composite)
        let out = factor_with_congruence(&b(35), &b(5), &b(6)).unwrap();
        assert_eq!(out, vec![b(5)]);
        // 2047 = 23 * 89, both = 1 mod 11 (and 2047 itself, filtered as composite)
        let out = factor_with_congruence(&b(2047), &b(1), &b(11)).unwrap();
        assert_eq!(out, vec![b(23), b(89)]);
    }
}

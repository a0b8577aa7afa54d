//! Prime-field arithmetic, primitive roots, cyclotomic classes and numbers,
//! and the quadratic-partition solvers the sequence constructions depend on.
//!
//! For a prime p = ef + 1 and a primitive root g, the cyclotomic classes of
//! order e are the cosets D_i = g^i · ⟨g^e⟩ of the e-th power residues, and
//! the cyclotomic number (i,j) counts the x ∈ D_i with x+1 ∈ D_j. Counting
//! is always by exhaustive enumeration; the closed-form order-4 table is a
//! cross-check against it, never the other way around.

use serde::Serialize;
use thiserror::Error;

use crate::MAX_PRIME;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CyclotomyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound 2^31")]
    PrimeTooLarge(u64),
    #[error("order {e} does not divide p-1 = {pm1}")]
    OrderDoesNotDivide { e: u64, pm1: u64 },
    #[error("{generator} is not a primitive root mod {p}")]
    NotPrimitiveRoot { generator: u64, p: u64 },
    #[error("{p} has no representation {form}")]
    NotRepresentable { p: u64, form: QuadraticForm },
    #[error("order-4 table formulas match brute force for neither sign of b (p = {p})")]
    FormulaMismatch { p: u64 },
}

/// Reasons the order-8 construction rejects a prime.
#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum AdmissibilityError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not congruent to 1 mod 16")]
    NotOneMod16(u64),
    #[error("{0} is not of the form x^2 + 16")]
    NoSquarePlus16(u64),
    #[error("{0} is not of the form a^2 + 2b^2")]
    NoTwoSquareForm(u64),
    #[error("normalized components give x - a = {gap}, not 4 (x = {x}, a = {a})")]
    GapNotFour { x: i64, a: i64, gap: i64 },
}

pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the base set is exact for all n < 3.3e24,
/// far beyond [`MAX_PRIME`].
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let r = (n - 1).trailing_zeros();
    let d = (n - 1) >> r;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow_wide(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod_wide(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// is_prime accepts any u64, so its inner arithmetic widens to u128.
fn mul_mod_wide(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn mod_pow_wide(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_wide(acc, base, modulus);
        }
        base = mul_mod_wide(base, base, modulus);
        exp >>= 1;
    }
    acc
}

fn check_odd_prime(p: u64) -> Result<(), CyclotomyError> {
    if p > MAX_PRIME {
        return Err(CyclotomyError::PrimeTooLarge(p));
    }
    if p < 3 || !is_prime(p) {
        return Err(CyclotomyError::NotPrime(p));
    }
    Ok(())
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_primitive_root(g: u64, p: u64) -> bool {
    if g % p == 0 {
        return false;
    }
    prime_factors(p - 1)
        .iter()
        .all(|&q| mod_pow(g, (p - 1) / q, p) != 1)
}

/// Smallest positive primitive root mod p. Deterministic.
pub fn find_primitive_root(p: u64) -> Result<u64, CyclotomyError> {
    check_odd_prime(p)?;
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .ok_or(CyclotomyError::NotPrime(p))
}

/// All primitive roots of p, ascending: the powers g^k with gcd(k, p-1) = 1.
pub fn primitive_roots(p: u64) -> Result<Vec<u64>, CyclotomyError> {
    let g = find_primitive_root(p)?;
    let mut roots = Vec::new();
    let mut x = 1u64;
    for k in 0..p - 1 {
        if k > 0 {
            x = x * g % p;
        }
        if gcd(k, p - 1) == 1 {
            roots.push(x);
        }
    }
    roots.sort_unstable();
    Ok(roots)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The partition of Z_p^* into cyclotomic classes of order e, with an O(1)
/// residue -> class index lookup.
#[derive(Debug, Clone)]
pub struct CyclotomicSystem {
    p: u64,
    e: u64,
    f: u64,
    generator: u64,
    classes: Vec<Vec<u64>>,
    class_of: Vec<u32>,
}

const NO_CLASS: u32 = u32::MAX;

impl CyclotomicSystem {
    /// Builds the classes for a given order. With `generator = None` the
    /// smallest primitive root is used.
    pub fn new(p: u64, e: u64, generator: Option<u64>) -> Result<Self, CyclotomyError> {
        check_odd_prime(p)?;
        if e == 0 || (p - 1) % e != 0 {
            return Err(CyclotomyError::OrderDoesNotDivide { e, pm1: p - 1 });
        }
        let generator = match generator {
            Some(g) => {
                let g = g % p;
                if !is_primitive_root(g, p) {
                    return Err(CyclotomyError::NotPrimitiveRoot { generator: g, p });
                }
                g
            }
            None => find_primitive_root(p)?,
        };
        let f = (p - 1) / e;
        let mut classes = vec![Vec::with_capacity(f as usize); e as usize];
        let mut class_of = vec![NO_CLASS; p as usize];
        let mut x = 1u64;
        for j in 0..p - 1 {
            let i = (j % e) as usize;
            classes[i].push(x);
            class_of[x as usize] = i as u32;
            x = x * generator % p;
        }
        for class in &mut classes {
            class.sort_unstable();
        }
        Ok(Self { p, e, f, generator, classes, class_of })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> u64 {
        self.e
    }

    /// Class size f = (p-1)/e.
    pub fn cofactor(&self) -> u64 {
        self.f
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn class(&self, i: usize) -> &[u64] {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[Vec<u64>] {
        &self.classes
    }

    /// Class index of a residue, None for t ≡ 0 (mod p).
    pub fn class_index(&self, t: u64) -> Option<usize> {
        let r = self.class_of[(t % self.p) as usize];
        (r != NO_CLASS).then_some(r as usize)
    }

    pub fn contains(&self, i: usize, t: u64) -> bool {
        self.class_index(t) == Some(i)
    }
}

/// Cyclotomic number (i,j): #{x : x ∈ D_i, x+1 ∈ D_j}, counted exhaustively.
pub fn cyclotomic_number(system: &CyclotomicSystem, i: usize, j: usize) -> u64 {
    system
        .class(i)
        .iter()
        .filter(|&&x| system.class_index((x + 1) % system.p()) == Some(j))
        .count() as u64
}

/// The e×e table of cyclotomic numbers.
///
/// The counting convention is fixed crate-wide: entry (i,j) counts the
/// x ∈ D_i with x+1 ∈ D_j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycNumTable {
    pub e: u64,
    pub entries: Vec<Vec<u64>>,
}

impl CycNumTable {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    /// All e² entries as one sorted multiset; identical across generators.
    pub fn multiset(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.entries.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

/// Brute-force table for the whole system, one pass over Z_p^*.
pub fn cyclotomic_table(system: &CyclotomicSystem) -> CycNumTable {
    let e = system.order() as usize;
    let mut entries = vec![vec![0u64; e]; e];
    for i in 0..e {
        for &x in system.class(i) {
            if let Some(j) = system.class_index((x + 1) % system.p()) {
                entries[i][j] += 1;
            }
        }
    }
    CycNumTable { e: e as u64, entries }
}

/// The prime decompositions used by the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadraticForm {
    /// p = a² + 4b², a ≡ 1 (mod 4)
    A4B,
    /// p = a² + 2b², a ≡ 1 (mod 4)
    A2B,
    /// p = x² + 16, x ≡ 1 (mod 4)
    X16,
    /// p = x² + 4y², x ≡ 1 (mod 4)
    X4Y,
}

impl std::fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            QuadraticForm::A4B => "a^2 + 4b^2",
            QuadraticForm::A2B => "a^2 + 2b^2",
            QuadraticForm::X16 => "x^2 + 16",
            QuadraticForm::X4Y => "x^2 + 4y^2",
        };
        f.write_str(s)
    }
}

/// A solved decomposition. `first` is sign-normalized to ≡ 1 (mod 4);
/// `second` is stored nonnegative because its sign is generator-dependent —
/// use [`QuadraticPartition::second_signs`] where the sign matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadraticPartition {
    pub p: u64,
    pub form: QuadraticForm,
    pub first: i64,
    pub second: i64,
}

impl QuadraticPartition {
    pub fn second_signs(&self) -> [i64; 2] {
        [self.second, -self.second]
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn norm_one_mod_four(v: i64) -> i64 {
    if v.rem_euclid(4) == 1 {
        v
    } else {
        -v
    }
}

/// Exhaustive search for p in the requested form. The identity holds
/// exactly; `first` comes back ≡ 1 (mod 4).
pub fn solve_partition(p: u64, form: QuadraticForm) -> Result<QuadraticPartition, CyclotomyError> {
    check_odd_prime(p)?;
    let not_rep = CyclotomyError::NotRepresentable { p, form };
    let (mult, fixed_second) = match form {
        QuadraticForm::A4B | QuadraticForm::X4Y => (4u64, None),
        QuadraticForm::A2B => (2, None),
        QuadraticForm::X16 => (4, Some(2u64)),
    };
    let mut found = None;
    let mut b = 0u64;
    while mult * b * b <= p {
        if fixed_second.map_or(true, |s| s == b) {
            let rest = p - mult * b * b;
            let a = isqrt(rest);
            if a * a == rest {
                found = Some((a as i64, b as i64));
                break;
            }
        }
        b += 1;
    }
    let (a, b) = found.ok_or(not_rep)?;
    Ok(QuadraticPartition { p, form, first: norm_one_mod_four(a), second: b })
}

/// Closed-form order-4 cyclotomic number table from the p = a² + 4b²
/// decomposition. There are five distinct values; their placement differs
/// with the parity of f, and the sign of b is resolved by requiring the
/// whole table to equal exhaustive counting for this system's generator.
pub fn order4_formula_table(
    system: &CyclotomicSystem,
    partition: &QuadraticPartition,
) -> Result<CycNumTable, CyclotomyError> {
    assert_eq!(partition.form, QuadraticForm::A4B, "table formulas need the a^2 + 4b^2 form");
    assert_eq!(system.order(), 4, "table formulas are order-4 only");
    let brute = cyclotomic_table(system);
    for b in partition.second_signs() {
        if let Some(table) = formula_table_for_sign(partition.p, partition.first, b, system.cofactor() % 2 == 1)
        {
            if table == brute {
                return Ok(table);
            }
        }
    }
    Err(CyclotomyError::FormulaMismatch { p: partition.p })
}

/// Signed b resolved against the generator: the sign for which the
/// closed-form order-4 table reproduces brute-force counting.
pub fn resolved_quartic_b(system: &CyclotomicSystem) -> Result<i64, CyclotomyError> {
    let partition = solve_partition(system.p(), QuadraticForm::A4B)?;
    let brute = cyclotomic_table(system);
    for b in partition.second_signs() {
        if let Some(table) = formula_table_for_sign(partition.p, partition.first, b, system.cofactor() % 2 == 1)
        {
            if table == brute {
                return Ok(b);
            }
        }
    }
    Err(CyclotomyError::FormulaMismatch { p: system.p() })
}

fn formula_table_for_sign(p: u64, a: i64, b: i64, f_odd: bool) -> Option<CycNumTable> {
    let p = p as i64;
    let mut slots = [[0i64; 4]; 4];
    if f_odd {
        let av = p - 7 + 2 * a;
        let bv = p + 1 + 2 * a - 8 * b;
        let cv = p + 1 - 6 * a;
        let dv = p + 1 + 2 * a + 8 * b;
        let ev = p - 3 - 2 * a;
        for row in &mut slots {
            *row = [ev; 4];
        }
        for (i, j) in [(0, 0), (2, 2), (2, 0)] {
            slots[i][j] = av;
        }
        for (i, j) in [(0, 1), (1, 3), (3, 2)] {
            slots[i][j] = bv;
        }
        for (i, j) in [(1, 2), (0, 3), (3, 1)] {
            slots[i][j] = dv;
        }
        slots[0][2] = cv;
    } else {
        let av = p - 11 - 6 * a;
        let bv = p - 3 + 2 * a + 8 * b;
        let cv = p - 3 + 2 * a;
        let dv = p - 3 + 2 * a - 8 * b;
        let ev = p + 1 - 2 * a;
        for row in &mut slots {
            *row = [ev; 4];
        }
        slots[0][0] = av;
        for (i, j) in [(0, 1), (1, 0), (3, 3)] {
            slots[i][j] = bv;
        }
        for (i, j) in [(0, 2), (2, 0), (2, 2)] {
            slots[i][j] = cv;
        }
        for (i, j) in [(0, 3), (3, 0), (1, 1)] {
            slots[i][j] = dv;
        }
    }
    let mut entries = vec![vec![0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let v = slots[i][j];
            if v < 0 || v % 16 != 0 {
                return None;
            }
            entries[i][j] = (v / 16) as u64;
        }
    }
    Some(CycNumTable { e: 4, entries })
}

/// The solved decompositions behind an admissible order-8 prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Order8Params {
    /// x from p = x² + 16, x ≡ 1 (mod 4)
    pub x: i64,
    /// a from p = a² + 2b², a ≡ 1 (mod 4)
    pub a: i64,
}

/// Decides whether p supports the order-8 construction: p ≡ 1 (mod 16),
/// p = x² + 16 = a² + 2b² with x ≡ a ≡ 1 (mod 4), and x - a = 4.
pub fn order8_admissibility(p: u64) -> Result<Order8Params, AdmissibilityError> {
    if p > MAX_PRIME || !is_prime(p) {
        return Err(AdmissibilityError::NotPrime(p));
    }
    if p % 16 != 1 {
        return Err(AdmissibilityError::NotOneMod16(p));
    }
    let x16 = solve_partition(p, QuadraticForm::X16)
        .map_err(|_| AdmissibilityError::NoSquarePlus16(p))?;
    let a2b = solve_partition(p, QuadraticForm::A2B)
        .map_err(|_| AdmissibilityError::NoTwoSquareForm(p))?;
    let (x, a) = (x16.first, a2b.first);
    if x - a != 4 {
        return Err(AdmissibilityError::GapNotFour { x, a, gap: x - a });
    }
    Ok(Order8Params { x, a })
}

/// Primes in `range` passing [`order8_admissibility`].
pub fn order8_admissible_primes(range: std::ops::RangeInclusive<u64>) -> Vec<u64> {
    range.filter(|&p| order8_admissibility(p).is_ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_primitive_roots() {
        assert_eq!(find_primitive_root(5).unwrap(), 2);
        assert_eq!(find_primitive_root(7).unwrap(), 3);
        assert_eq!(find_primitive_root(17).unwrap(), 3);
    }

    #[test]
    fn primitive_root_rejects_composite() {
        assert_eq!(find_primitive_root(15), Err(CyclotomyError::NotPrime(15)));
        assert_eq!(find_primitive_root(1), Err(CyclotomyError::NotPrime(1)));
    }

    #[test]
    fn all_roots_of_17() {
        let roots = primitive_roots(17).unwrap();
        assert_eq!(roots, vec![3, 5, 6, 7, 10, 11, 12, 14]);
        for &g in &roots {
            assert!(is_primitive_root(g, 17));
        }
    }

    #[test]
    fn classes_p5_order4() {
        let sys = CyclotomicSystem::new(5, 4, Some(2)).unwrap();
        assert_eq!(sys.class(0), &[1]);
        assert_eq!(sys.class(1), &[2]);
        assert_eq!(sys.class(2), &[4]);
        assert_eq!(sys.class(3), &[3]);
    }

    #[test]
    fn classes_p17_order8() {
        let sys = CyclotomicSystem::new(17, 8, Some(3)).unwrap();
        assert_eq!(sys.class(0), &[1, 16]);
        assert_eq!(sys.class(1), &[3, 14]);
        assert_eq!(sys.class(2), &[8, 9]);
        for j in 0..16u64 {
            let t = mod_pow(3, j, 17);
            assert_eq!(sys.class_index(t), Some((j % 8) as usize));
        }
    }

    #[test]
    fn order_one_class_is_whole_group() {
        let sys = CyclotomicSystem::new(7, 1, None).unwrap();
        assert_eq!(sys.class(0), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn partition_covers_group() {
        for (p, e) in [(13, 4), (17, 8), (29, 4), (41, 8)] {
            let sys = CyclotomicSystem::new(p, e, None).unwrap();
            let mut seen = vec![false; p as usize];
            for i in 0..e as usize {
                assert_eq!(sys.class(i).len() as u64, sys.cofactor());
                for &t in sys.class(i) {
                    assert!(!seen[t as usize]);
                    seen[t as usize] = true;
                }
            }
            assert!(seen[1..].iter().all(|&s| s));
        }
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(
            CyclotomicSystem::new(13, 5, None),
            Err(CyclotomyError::OrderDoesNotDivide { .. })
        ));
        assert!(matches!(
            CyclotomicSystem::new(13, 4, Some(3)),
            Err(CyclotomyError::NotPrimitiveRoot { .. })
        ));
    }

    #[test]
    fn cyclotomic_numbers_p13() {
        let sys = CyclotomicSystem::new(13, 4, Some(2)).unwrap();
        assert_eq!(cyclotomic_number(&sys, 0, 0), 0);
        assert_eq!(cyclotomic_number(&sys, 0, 2), 2);
    }

    #[test]
    fn cyclotomic_number_order_one() {
        let sys = CyclotomicSystem::new(7, 1, None).unwrap();
        assert_eq!(cyclotomic_number(&sys, 0, 0), 5);
    }

    #[test]
    fn row_sums() {
        for (p, e) in [(13, 4), (17, 8), (29, 2), (41, 4)] {
            let sys = CyclotomicSystem::new(p, e, None).unwrap();
            let table = cyclotomic_table(&sys);
            for i in 0..e as usize {
                let expect = sys.cofactor() - u64::from(sys.contains(i, p - 1));
                assert_eq!(table.entries[i].iter().sum::<u64>(), expect);
            }
        }
    }

    #[test]
    fn formula_table_p13_values() {
        let sys = CyclotomicSystem::new(13, 4, Some(2)).unwrap();
        let partition = solve_partition(13, QuadraticForm::A4B).unwrap();
        assert_eq!(partition.first, -3);
        let table = order4_formula_table(&sys, &partition).unwrap();
        assert_eq!(table.get(0, 0), 0);
        assert_eq!(table.get(0, 2), 2);
        // all-others value (p-3-2a)/16 with a = -3
        assert_eq!(table.get(1, 0), 1);
    }

    #[test]
    fn formula_table_p17_values() {
        let sys = CyclotomicSystem::new(17, 4, None).unwrap();
        let partition = solve_partition(17, QuadraticForm::A4B).unwrap();
        assert_eq!(partition.first, 1);
        let table = order4_formula_table(&sys, &partition).unwrap();
        assert_eq!(table.get(0, 0), 0);
        assert_eq!(table.get(0, 2), 1);
        assert_eq!(table.get(1, 2), 1);
    }

    #[test]
    fn partitions() {
        let x16 = solve_partition(17, QuadraticForm::X16).unwrap();
        assert_eq!((x16.first, x16.second), (1, 2));
        let a2b = solve_partition(17, QuadraticForm::A2B).unwrap();
        assert_eq!((a2b.first, a2b.second), (-3, 2));
        let x97 = solve_partition(97, QuadraticForm::X16).unwrap();
        let a97 = solve_partition(97, QuadraticForm::A2B).unwrap();
        assert_eq!(x97.first - a97.first, 4);
        assert_eq!(
            solve_partition(13, QuadraticForm::X16),
            Err(CyclotomyError::NotRepresentable { p: 13, form: QuadraticForm::X16 })
        );
    }

    #[test]
    fn order8_admissible_set() {
        assert_eq!(order8_admissibility(17).unwrap(), Order8Params { x: 1, a: -3 });
        assert_eq!(order8_admissibility(97).unwrap(), Order8Params { x: 9, a: 5 });
        assert_eq!(order8_admissibility(13), Err(AdmissibilityError::NotOneMod16(13)));
        assert_eq!(order8_admissible_primes(1..=15000), vec![17, 97, 641, 2417, 6577, 14657]);
    }

    #[test]
    fn generator_independent_multiset() {
        for e in [4u64, 8] {
            let sys0 = CyclotomicSystem::new(41, e, None).unwrap();
            let reference = cyclotomic_table(&sys0).multiset();
            for g in primitive_roots(41).unwrap() {
                let sys = CyclotomicSystem::new(41, e, Some(g)).unwrap();
                assert_eq!(cyclotomic_table(&sys).multiset(), reference);
            }
        }
    }
}

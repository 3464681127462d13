//! Euler-product specifications: the value domain, coefficient rules,
//! direction vectors, and dependence modes, with parsing and validation.

mod builtins;
mod parse;

pub use builtins::{builtin_descriptions, builtin_names, builtin_spec};
pub use parse::{parse_spec, serialize};

use crate::error::{Error, Result};
use crate::value::{ComplexRational, CoefficientValue};
use num::complex::Complex64;
use num::{BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A number given either exactly (fraction literal) or as binary floating
/// point (decimal literal). Exact entries survive serialization round
/// trips bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberLiteral {
    pub exact: Option<BigRational>,
    pub value: f64,
}

impl NumberLiteral {
    pub fn from_rational(r: BigRational) -> Self {
        let value = crate::value::ratio_to_f64(&r);
        NumberLiteral {
            exact: Some(r),
            value,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_f64(value: f64) -> Self {
        NumberLiteral { exact: None, value }
    }
}

impl fmt::Display for NumberLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{}", r),
            None => write!(f, "{}", self.value),
        }
    }
}

/// One direction vector c_l in R^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(pub Vec<NumberLiteral>);

impl Direction {
    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|e| e.value).collect()
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(e, x)| e.value * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.value == 0.0)
    }
}

/// The rule generating the coefficient alpha_{lk}(p) for each prime.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientRule {
    /// alpha(p) = value for every prime.
    ConstantExact(ComplexRational),
    /// alpha(p) = p^{-exponent}, exponent a positive rational.
    PowerDecay { exponent: BigRational },
    /// alpha(p) = table[p mod q] for p coprime to q, 0 otherwise.
    DirichletCharacter {
        modulus: u64,
        table: BTreeMap<u64, ComplexRational>,
    },
    /// alpha(p_n) = base^n where p_n is the n-th prime (p_1 = 2).
    UnitPowerByIndex { base: ComplexRational },
    /// Explicit values on finitely many primes, another rule elsewhere.
    FiniteSupport {
        support: BTreeMap<u64, ComplexRational>,
        default: Box<CoefficientRule>,
    },
    /// alpha(p) = inner(p)^{1/order} * e^{2 pi i index / order}, the
    /// factorization of a degree-`order` factor into unit-rotated roots.
    /// Produced by the integer-dependence reduction; exact whenever the
    /// root and the rotation stay Gaussian-rational.
    RootOfRule {
        inner: Box<CoefficientRule>,
        order: u32,
        index: u32,
    },
}

/// Worst-case exactness of the values a rule can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValueClass {
    Exact,
    /// Exact Gaussian rationals plus positive-real decay values.
    WithDecay,
    /// May produce numeric complex values (downgraded certificates).
    WithNumeric,
}

impl CoefficientRule {
    /// Coefficient value at prime `p` with 1-based prime index `index`.
    pub fn value_at(&self, p: u64, index: usize) -> CoefficientValue {
        match self {
            CoefficientRule::ConstantExact(v) => CoefficientValue::Exact(v.clone()),
            CoefficientRule::PowerDecay { exponent } => {
                let a = crate::value::ratio_to_f64(exponent);
                CoefficientValue::PositiveReal((-a * (p as f64).ln()).exp())
            }
            CoefficientRule::DirichletCharacter { modulus, table } => {
                let r = p % modulus;
                if gcd(r, *modulus) != 1 {
                    CoefficientValue::Exact(ComplexRational::zero())
                } else {
                    CoefficientValue::Exact(
                        table.get(&r).cloned().unwrap_or_else(ComplexRational::zero),
                    )
                }
            }
            CoefficientRule::UnitPowerByIndex { base } => {
                CoefficientValue::Exact(base.pow(index as u64))
            }
            CoefficientRule::FiniteSupport { support, default } => match support.get(&p) {
                Some(v) => CoefficientValue::Exact(v.clone()),
                None => default.value_at(p, index),
            },
            CoefficientRule::RootOfRule {
                inner,
                order,
                index: k,
            } => root_value(inner.value_at(p, index), *order, *k),
        }
    }

    /// Finite set of supported primes, or None for infinite support.
    pub fn finite_support(&self) -> Option<Vec<u64>> {
        match self {
            CoefficientRule::ConstantExact(v) => v.is_zero().then(Vec::new),
            CoefficientRule::PowerDecay { .. } => None,
            CoefficientRule::DirichletCharacter { table, .. } => table
                .values()
                .all(|v| v.is_zero())
                .then(Vec::new),
            CoefficientRule::UnitPowerByIndex { .. } => None,
            CoefficientRule::FiniteSupport { support, default } => {
                let mut base = default.finite_support()?;
                for (&p, v) in support {
                    if !v.is_zero() {
                        base.push(p);
                    }
                }
                base.sort_unstable();
                base.dedup();
                Some(base)
            }
            CoefficientRule::RootOfRule { inner, .. } => inner.finite_support(),
        }
    }

    pub fn value_class(&self) -> ValueClass {
        match self {
            CoefficientRule::ConstantExact(_)
            | CoefficientRule::DirichletCharacter { .. }
            | CoefficientRule::UnitPowerByIndex { .. } => ValueClass::Exact,
            CoefficientRule::PowerDecay { .. } => ValueClass::WithDecay,
            CoefficientRule::FiniteSupport { default, .. } => default.value_class(),
            CoefficientRule::RootOfRule {
                inner,
                order,
                index,
            } => {
                // Exact only if every reachable inner value has an exact
                // root and the rotation is a fourth root of unity.
                if exact_unit_rotation(*index, *order).is_none() {
                    return ValueClass::WithNumeric;
                }
                match inner.value_class() {
                    ValueClass::Exact => {
                        if inner
                            .reachable_exact_values()
                            .map(|vals| {
                                vals.iter().all(|v| exact_principal_root(v, *order).is_some())
                            })
                            .unwrap_or(false)
                        {
                            ValueClass::Exact
                        } else {
                            ValueClass::WithNumeric
                        }
                    }
                    ValueClass::WithDecay => {
                        // Root of p^{-a} is p^{-a/order} times the rotation:
                        // positive real only when the rotation is 1.
                        if *index == *order {
                            ValueClass::WithDecay
                        } else {
                            ValueClass::WithNumeric
                        }
                    }
                    ValueClass::WithNumeric => ValueClass::WithNumeric,
                }
            }
        }
    }

    /// All exact values the rule can take, when that set is finite and
    /// enumerable (used to decide root exactness and class structure).
    pub fn reachable_exact_values(&self) -> Option<Vec<ComplexRational>> {
        match self {
            CoefficientRule::ConstantExact(v) => Some(vec![v.clone()]),
            CoefficientRule::DirichletCharacter { table, .. } => {
                let mut vals: Vec<_> = table.values().cloned().collect();
                vals.push(ComplexRational::zero());
                Some(vals)
            }
            CoefficientRule::UnitPowerByIndex { base } => {
                if base.is_fourth_root_of_unity() {
                    Some((1..=4).map(|n| base.pow(n)).collect())
                } else {
                    None
                }
            }
            CoefficientRule::FiniteSupport { support, default } => {
                let mut vals = default.reachable_exact_values()?;
                vals.extend(support.values().cloned());
                Some(vals)
            }
            CoefficientRule::PowerDecay { .. } => None,
            CoefficientRule::RootOfRule {
                inner,
                order,
                index,
            } => {
                let unit = exact_unit_rotation(*index, *order)?;
                let inner_vals = inner.reachable_exact_values()?;
                let mut out = Vec::new();
                for v in inner_vals {
                    out.push(&exact_principal_root(&v, *order)? * &unit);
                }
                Some(out)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            CoefficientRule::ConstantExact(v) => check_magnitude(v),
            CoefficientRule::PowerDecay { exponent } => {
                if exponent.is_positive() {
                    Ok(())
                } else {
                    Err(Error::Constraint(format!(
                        "power-decay exponent must be positive, got {exponent}"
                    )))
                }
            }
            CoefficientRule::DirichletCharacter { modulus, table } => {
                validate_character(*modulus, table)
            }
            CoefficientRule::UnitPowerByIndex { base } => {
                if base.is_unit() {
                    Ok(())
                } else {
                    Err(Error::Constraint(format!(
                        "unit-power base must have |base| = 1, got {base}"
                    )))
                }
            }
            CoefficientRule::FiniteSupport { support, default } => {
                for (&p, v) in support {
                    if !is_prime_u64(p) {
                        return Err(Error::Constraint(format!(
                            "finite-support key {p} is not prime"
                        )));
                    }
                    check_magnitude(v)?;
                }
                default.validate()
            }
            CoefficientRule::RootOfRule {
                inner,
                order,
                index,
            } => {
                if *order == 0 || *index == 0 || index > order {
                    return Err(Error::Constraint(format!(
                        "root rule needs 1 <= index <= order, got index {index}, order {order}"
                    )));
                }
                inner.validate()
            }
        }
    }
}

fn check_magnitude(v: &ComplexRational) -> Result<()> {
    if v.magnitude_at_most_one() {
        Ok(())
    } else {
        Err(Error::Constraint(format!(
            "coefficient value {v} has |value| > 1"
        )))
    }
}

fn validate_character(modulus: u64, table: &BTreeMap<u64, ComplexRational>) -> Result<()> {
    if modulus == 0 {
        return Err(Error::Constraint("character modulus must be positive".into()));
    }
    for (&r, v) in table {
        if r >= modulus {
            return Err(Error::Constraint(format!(
                "character residue {r} out of range mod {modulus}"
            )));
        }
        check_magnitude(v)?;
        if gcd(r, modulus) != 1 && !v.is_zero() {
            return Err(Error::Constraint(format!(
                "character value at non-coprime residue {r} mod {modulus} must be 0"
            )));
        }
    }
    let coprime: Vec<u64> = (1..modulus.max(2)).filter(|&a| gcd(a, modulus) == 1).collect();
    let get = |a: u64| -> Result<ComplexRational> {
        table.get(&(a % modulus)).cloned().ok_or_else(|| {
            Error::Constraint(format!(
                "character table missing coprime residue {} mod {modulus}",
                a % modulus
            ))
        })
    };
    if modulus == 1 {
        // chi mod 1 is identically 1 on the empty residue system; treat a
        // {0: 1} table as the principal character.
        return Ok(());
    }
    if !get(1)?.is_real() || get(1)?.re != BigRational::one() {
        return Err(Error::Constraint(format!(
            "character table must have chi(1) = 1 mod {modulus}"
        )));
    }
    // Complete multiplicativity on the residue group.
    for &a in &coprime {
        for &b in &coprime {
            let lhs = &get(a)? * &get(b)?;
            let rhs = get(a * b % modulus)?;
            if lhs != rhs {
                return Err(Error::Constraint(format!(
                    "character table not multiplicative: chi({a})*chi({b}) != chi({})",
                    a * b % modulus
                )));
            }
        }
    }
    Ok(())
}

/// Exact value of e^{2 pi i k / order} when it is a fourth root of unity.
fn exact_unit_rotation(k: u32, order: u32) -> Option<ComplexRational> {
    let g = gcd(k as u64, order as u64);
    let den = order as u64 / g;
    let num = k as u64 / g;
    if den > 4 || den == 3 {
        return None;
    }
    // e^{2 pi i num/den} = i^{4 num/den}
    let quarter_turns = 4 * num / den % 4;
    Some(ComplexRational::i().pow(quarter_turns))
}

/// Exact principal `order`-th root within Q(i), when it exists.
fn exact_principal_root(v: &ComplexRational, order: u32) -> Option<ComplexRational> {
    if order == 1 {
        return Some(v.clone());
    }
    if v.is_zero() {
        return Some(ComplexRational::zero());
    }
    if !v.is_real() {
        return None;
    }
    if v.re.is_positive() {
        rational_nth_root(&v.re, order).map(|r| ComplexRational::new(r, BigRational::zero()))
    } else if order == 2 {
        // principal sqrt of a negative real is i * sqrt(|v|)
        rational_nth_root(&v.re.abs(), 2).map(|r| ComplexRational::new(BigRational::zero(), r))
    } else {
        None
    }
}

fn rational_nth_root(x: &BigRational, order: u32) -> Option<BigRational> {
    let n = x.numer().nth_root(order);
    let d = x.denom().nth_root(order);
    if &n.pow(order) == x.numer() && &d.pow(order) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn root_value(inner: CoefficientValue, order: u32, k: u32) -> CoefficientValue {
    if order == 1 {
        return inner;
    }
    let exact_unit = exact_unit_rotation(k, order);
    if let CoefficientValue::Exact(v) = &inner {
        if v.is_zero() {
            return CoefficientValue::Exact(ComplexRational::zero());
        }
        if let (Some(root), Some(unit)) = (exact_principal_root(v, order), exact_unit.as_ref()) {
            return CoefficientValue::Exact(&root * unit);
        }
    }
    // Numeric fallback: principal root times the rotation.
    let z = inner.to_complex64();
    if z.norm() == 0.0 {
        return CoefficientValue::Exact(ComplexRational::zero());
    }
    let root = Complex64::from_polar(z.norm().powf(1.0 / order as f64), z.arg() / order as f64);
    let unit = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / order as f64);
    let value = root * unit;
    if order == 2 && k == 2 {
        if let CoefficientValue::PositiveReal(x) = inner {
            return CoefficientValue::PositiveReal(x.sqrt());
        }
    }
    CoefficientValue::Numeric(value)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Declared dependence structure of the direction vectors.
#[derive(Clone, Debug, PartialEq)]
pub enum DependenceMode {
    /// (A1): the c_l are linearly independent.
    Independent,
    /// (A2): c_l = gamma_l * c_1 with user-declared scaling factors that
    /// are linearly independent over the rationals (not decided here).
    ScalarMultiples { gammas: Vec<NumberLiteral> },
    /// c_l = gamma_l * c with positive integers; reducible to a rank-one
    /// product before classification.
    IntegerDependent { gammas: Vec<u64> },
}

impl DependenceMode {
    pub fn name(&self) -> &'static str {
        match self {
            DependenceMode::Independent => "independent",
            DependenceMode::ScalarMultiples { .. } => "scalar",
            DependenceMode::IntegerDependent { .. } => "integer",
        }
    }
}

/// Truncation parameters shared by evaluation and classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationBounds {
    /// Primes p <= prime_cutoff enter products and sums.
    pub prime_cutoff: u64,
    /// Prime powers p^r with r <= power_cutoff enter log expansions.
    pub power_cutoff: u32,
    /// Dirichlet coefficients a(n) are tabulated for n <= coefficient_cutoff.
    pub coefficient_cutoff: u64,
}

impl TruncationBounds {
    pub fn new(prime_cutoff: u64, power_cutoff: u32, coefficient_cutoff: u64) -> Result<Self> {
        if prime_cutoff < 2 || power_cutoff < 1 || coefficient_cutoff < 1 {
            return Err(Error::Parameter(format!(
                "truncation bounds need P >= 2, R >= 1, N >= 1; got P={prime_cutoff}, R={power_cutoff}, N={coefficient_cutoff}"
            )));
        }
        Ok(TruncationBounds {
            prime_cutoff,
            power_cutoff,
            coefficient_cutoff,
        })
    }
}

impl Default for TruncationBounds {
    fn default() -> Self {
        TruncationBounds {
            prime_cutoff: 100_000,
            power_cutoff: 60,
            coefficient_cutoff: 10_000,
        }
    }
}

/// A validated multidimensional polynomial Euler product description.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerProductSpec {
    pub dimension: usize,
    pub phi: usize,
    pub eta: usize,
    pub directions: Vec<Direction>,
    /// phi x eta grid; rules[l][k] generates alpha_{(l+1)(k+1)}(p).
    pub rules: Vec<Vec<CoefficientRule>>,
    pub mode: DependenceMode,
}

impl EulerProductSpec {
    pub fn new(
        dimension: usize,
        directions: Vec<Direction>,
        rules: Vec<Vec<CoefficientRule>>,
        mode: DependenceMode,
    ) -> Result<Self> {
        let phi = directions.len();
        if dimension == 0 || phi == 0 {
            return Err(Error::Constraint(
                "dimension and rank count must be positive".into(),
            ));
        }
        if rules.len() != phi {
            return Err(Error::Constraint(format!(
                "rule grid has {} ranks, expected phi = {phi}",
                rules.len()
            )));
        }
        let eta = rules[0].len();
        if eta == 0 {
            return Err(Error::Constraint("degree eta must be positive".into()));
        }
        for (l, row) in rules.iter().enumerate() {
            if row.len() != eta {
                return Err(Error::Constraint(format!(
                    "rank {} has {} rules, expected eta = {eta}",
                    l + 1,
                    row.len()
                )));
            }
            for rule in row {
                rule.validate()?;
            }
        }
        for (l, dir) in directions.iter().enumerate() {
            if dir.0.len() != dimension {
                return Err(Error::Constraint(format!(
                    "direction {} has {} entries, expected dimension = {dimension}",
                    l + 1,
                    dir.0.len()
                )));
            }
            if dir.is_zero() {
                return Err(Error::Constraint(format!(
                    "direction vector {} is zero",
                    l + 1
                )));
            }
        }
        match &mode {
            DependenceMode::Independent => {}
            DependenceMode::ScalarMultiples { gammas } => {
                if gammas.len() != phi {
                    return Err(Error::Constraint(format!(
                        "scalar mode lists {} factors, expected phi = {phi}",
                        gammas.len()
                    )));
                }
                if gammas[0].value != 1.0 {
                    return Err(Error::Constraint("scalar mode requires gamma_1 = 1".into()));
                }
                for i in 0..gammas.len() {
                    for j in i + 1..gammas.len() {
                        if gammas[i].value == gammas[j].value {
                            return Err(Error::Constraint(
                                "scalar mode factors must be distinct".into(),
                            ));
                        }
                    }
                }
            }
            DependenceMode::IntegerDependent { gammas } => {
                if gammas.len() != phi {
                    return Err(Error::Constraint(format!(
                        "integer mode lists {} factors, expected phi = {phi}",
                        gammas.len()
                    )));
                }
                if gammas.iter().any(|&g| g == 0) {
                    return Err(Error::Constraint(
                        "integer mode factors must be positive".into(),
                    ));
                }
            }
        }
        Ok(EulerProductSpec {
            dimension,
            phi,
            eta,
            directions,
            rules,
            mode,
        })
    }

    /// Coefficient value alpha_{lk}(p); `l`, `k` are 1-based, `index` is
    /// the 1-based position of `p` in the primes.
    pub fn coefficient(&self, l: usize, k: usize, p: u64, index: usize) -> CoefficientValue {
        self.rules[l - 1][k - 1].value_at(p, index)
    }

    /// Union of finite supports, or None when some rule reaches all primes.
    pub fn finite_support(&self) -> Option<Vec<u64>> {
        let mut all = Vec::new();
        for row in &self.rules {
            for rule in row {
                all.extend(rule.finite_support()?);
            }
        }
        all.sort_unstable();
        all.dedup();
        Some(all)
    }

    /// Worst exactness class over the whole rule grid.
    pub fn value_class(&self) -> ValueClass {
        self.rules
            .iter()
            .flatten()
            .map(|r| r.value_class())
            .max()
            .unwrap_or(ValueClass::Exact)
    }

    /// min_l <c_l, sigma>, the abscissa parameter v.
    pub fn min_direction_dot(&self, sigma: &[f64]) -> f64 {
        self.directions
            .iter()
            .map(|c| c.dot(sigma))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Outcome of checking the declared dependence mode against the vectors.
#[derive(Clone, Debug)]
pub struct DependenceReport {
    pub mode: &'static str,
    pub passed: bool,
    pub notes: Vec<String>,
}

/// Checks the declared dependence structure numerically.
///
/// Independent mode verifies rank {c_l} = phi by Gaussian elimination
/// (pivot tolerance 1e-10). Scalar mode verifies c_l = gamma_l c_1
/// componentwise within 1e-12; rational linear independence of the
/// gammas is user-declared and is not decided. Integer mode additionally
/// notes that classification requires reduction first.
pub fn validate_dependence(spec: &EulerProductSpec) -> DependenceReport {
    let mut notes = Vec::new();
    let passed = match &spec.mode {
        DependenceMode::Independent => {
            let rank = matrix_rank(
                spec.directions.iter().map(|d| d.as_f64()).collect(),
                1e-10,
            );
            if rank == spec.phi {
                notes.push(format!("rank {} = phi, vectors independent", rank));
                true
            } else {
                notes.push(format!(
                    "rank deficiency: rank {} < phi = {}",
                    rank, spec.phi
                ));
                false
            }
        }
        DependenceMode::ScalarMultiples { gammas } => {
            let mut ok = true;
            let base = spec.directions[0].as_f64();
            for (l, dir) in spec.directions.iter().enumerate() {
                let g = gammas[l].value;
                for (j, entry) in dir.as_f64().iter().enumerate() {
                    if (entry - g * base[j]).abs() > 1e-12 {
                        notes.push(format!(
                            "mismatch: c_{}[{}] = {} but gamma_{} * c_1[{}] = {}",
                            l + 1,
                            j + 1,
                            entry,
                            l + 1,
                            j + 1,
                            g * base[j]
                        ));
                        ok = false;
                    }
                }
            }
            notes.push(
                "rational linear independence of the scaling factors is user-declared".into(),
            );
            ok
        }
        DependenceMode::IntegerDependent { gammas } => {
            let mut ok = true;
            let g1 = gammas[0] as f64;
            let base: Vec<f64> = spec.directions[0].as_f64().iter().map(|x| x / g1).collect();
            for (l, dir) in spec.directions.iter().enumerate() {
                let g = gammas[l] as f64;
                for (j, entry) in dir.as_f64().iter().enumerate() {
                    if (entry - g * base[j]).abs() > 1e-12 {
                        notes.push(format!(
                            "mismatch: c_{}[{}] = {} but gamma_{} * c[{}] = {}",
                            l + 1,
                            j + 1,
                            entry,
                            l + 1,
                            j + 1,
                            g * base[j]
                        ));
                        ok = false;
                    }
                }
            }
            notes.push("reduce before classification".into());
            ok
        }
    };
    DependenceReport {
        mode: spec.mode.name(),
        passed,
        notes,
    }
}

fn matrix_rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < nrows && col < ncols {
        let (pivot_row, pivot_abs) = (rank..nrows)
            .map(|r| (r, rows[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_abs <= tol {
            col += 1;
            continue;
        }
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col];
        for r in rank + 1..nrows {
            let factor = rows[r][col] / pivot;
            for c in col..ncols {
                rows[r][c] -= factor * rows[rank][c];
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

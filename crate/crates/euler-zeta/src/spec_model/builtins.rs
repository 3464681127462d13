//! Built-in Euler product specifications used across tests, the CLI, and
//! the reproduction commands.

use super::{
    CoefficientRule, DependenceMode, Direction, EulerProductSpec, NumberLiteral,
};
use crate::error::{Error, Result};
use crate::value::ComplexRational;
use std::collections::BTreeMap;

/// Representative instances of every builtin family.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "riemann",
        "dirichlet-chi4",
        "dedekind-qi",
        "zq",
        "fn:0",
        "fn:1",
        "fn:2",
        "fn:3",
        "zeta-l2s",
        "zeta2-l2s",
        "l-zeta2s",
        "zeta3s-factored",
        "zeta-k:2",
        "zeta-k:3",
    ]
}

/// One-line descriptions for the CLI listing.
pub fn builtin_descriptions() -> Vec<(&'static str, &'static str)> {
    vec![
        ("riemann", "Riemann zeta: d=1, phi=1, eta=1, alpha(p) = 1"),
        (
            "dirichlet-chi4",
            "Dirichlet L for the nontrivial character mod 4",
        ),
        ("dedekind-qi", "Dedekind zeta of Q(i): zeta(s) * L(s)"),
        (
            "zq",
            "degree-3 product at p=2 with values {1, i, -i}; alias of fn:1",
        ),
        (
            "fn:<n>",
            "(1-2^-s)^-n (1-i 2^-s)^-1 (1+i 2^-s)^-1 family at p=2",
        ),
        ("zeta-l2s", "zeta(s) L(2s), integer-dependent directions (1,2)"),
        ("zeta2-l2s", "zeta(s)^2 L(2s), integer-dependent directions (1,2)"),
        ("l-zeta2s", "L(s) zeta(2s), integer-dependent directions (1,2)"),
        (
            "zeta3s-factored",
            "zeta(3s) factored into cube-root-of-unity factors (numeric)",
        ),
        ("zeta-k:<k>", "zeta(s)^k: eta = k factors with alpha(p) = 1"),
    ]
}

pub fn builtin_spec(name: &str) -> Result<EulerProductSpec> {
    if let Some(n) = name.strip_prefix("fn:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
        return fn_family(n);
    }
    if let Some(k) = name.strip_prefix("zeta-k:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
        if k == 0 {
            return Err(Error::UnknownBuiltin(name.to_string()));
        }
        return zeta_power(k);
    }
    match name {
        "riemann" => zeta_power(1),
        "dirichlet-chi4" => EulerProductSpec::new(
            1,
            vec![unit_direction()],
            vec![vec![chi4_rule()]],
            DependenceMode::Independent,
        ),
        "dedekind-qi" => EulerProductSpec::new(
            1,
            vec![unit_direction()],
            vec![vec![one_rule(), chi4_rule()]],
            DependenceMode::Independent,
        ),
        "zq" => fn_family(1),
        "zeta-l2s" => EulerProductSpec::new(
            1,
            vec![unit_direction(), double_direction()],
            vec![vec![one_rule()], vec![chi4_rule()]],
            DependenceMode::IntegerDependent { gammas: vec![1, 2] },
        ),
        "zeta2-l2s" => EulerProductSpec::new(
            1,
            vec![unit_direction(), double_direction()],
            vec![
                vec![one_rule(), one_rule()],
                vec![chi4_rule(), zero_rule()],
            ],
            DependenceMode::IntegerDependent { gammas: vec![1, 2] },
        ),
        "l-zeta2s" => EulerProductSpec::new(
            1,
            vec![unit_direction(), double_direction()],
            vec![vec![chi4_rule()], vec![one_rule()]],
            DependenceMode::IntegerDependent { gammas: vec![1, 2] },
        ),
        "zeta3s-factored" => {
            // zeta(3s) written with the three cube roots of unity:
            // (1-x)(1-wx)(1-w^2 x) = 1-x^3 with w = e^{2 pi i/3}.
            let root = |index: u32| CoefficientRule::RootOfRule {
                inner: Box::new(one_rule()),
                order: 3,
                index,
            };
            EulerProductSpec::new(
                1,
                vec![unit_direction()],
                vec![vec![root(1), root(2), root(3)]],
                DependenceMode::Independent,
            )
        }
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

fn unit_direction() -> Direction {
    Direction(vec![NumberLiteral::from_integer(1)])
}

fn double_direction() -> Direction {
    Direction(vec![NumberLiteral::from_integer(2)])
}

fn one_rule() -> CoefficientRule {
    CoefficientRule::ConstantExact(ComplexRational::one())
}

fn zero_rule() -> CoefficientRule {
    CoefficientRule::ConstantExact(ComplexRational::zero())
}

fn chi4_rule() -> CoefficientRule {
    let mut table = BTreeMap::new();
    table.insert(1, ComplexRational::one());
    table.insert(3, ComplexRational::from_integers(-1, 0));
    CoefficientRule::DirichletCharacter { modulus: 4, table }
}

fn at_two(value: ComplexRational) -> CoefficientRule {
    let mut support = BTreeMap::new();
    support.insert(2, value);
    CoefficientRule::FiniteSupport {
        support,
        default: Box::new(zero_rule()),
    }
}

/// F_n: n unit factors plus the conjugate pair {i, -i}, all at p = 2.
fn fn_family(n: usize) -> Result<EulerProductSpec> {
    let mut rules = Vec::with_capacity(n + 2);
    for _ in 0..n {
        rules.push(at_two(ComplexRational::one()));
    }
    rules.push(at_two(ComplexRational::i()));
    rules.push(at_two(ComplexRational::from_integers(0, -1)));
    EulerProductSpec::new(
        1,
        vec![unit_direction()],
        vec![rules],
        DependenceMode::Independent,
    )
}

fn zeta_power(k: usize) -> Result<EulerProductSpec> {
    EulerProductSpec::new(
        1,
        vec![unit_direction()],
        vec![vec![one_rule(); k]],
        DependenceMode::Independent,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_model::{validate_dependence, ValueClass};
    use crate::value::CoefficientValue;

    #[test]
    fn riemann_is_identity_coefficient() {
        let spec = builtin_spec("riemann").unwrap();
        assert_eq!(spec.dimension, 1);
        assert_eq!(spec.phi, 1);
        assert_eq!(spec.eta, 1);
        assert_eq!(
            spec.coefficient(1, 1, 97, 25),
            CoefficientValue::Exact(ComplexRational::one())
        );
    }

    #[test]
    fn zq_matches_example_values() {
        let spec = builtin_spec("zq").unwrap();
        assert_eq!(spec.eta, 3);
        let vals: Vec<_> = (1..=3).map(|k| spec.coefficient(1, k, 2, 1)).collect();
        assert_eq!(
            vals,
            vec![
                CoefficientValue::Exact(ComplexRational::one()),
                CoefficientValue::Exact(ComplexRational::i()),
                CoefficientValue::Exact(ComplexRational::from_integers(0, -1)),
            ]
        );
        for k in 1..=3 {
            assert!(spec.coefficient(1, k, 3, 2).is_zero());
        }
        assert_eq!(spec.finite_support(), Some(vec![2]));
    }

    #[test]
    fn every_builtin_validates() {
        for name in builtin_names() {
            let spec = builtin_spec(name).unwrap();
            let report = validate_dependence(&spec);
            assert!(report.passed, "dependence check failed for `{name}`");
        }
    }

    #[test]
    fn every_builtin_rule_value_bounded() {
        // |alpha(p)| <= 1 for a sample of primes and every builtin rule.
        let primes = [(2u64, 1usize), (3, 2), (5, 3), (7, 4), (11, 5), (101, 26)];
        for name in builtin_names() {
            let spec = builtin_spec(name).unwrap();
            for l in 1..=spec.phi {
                for k in 1..=spec.eta {
                    for &(p, idx) in &primes {
                        let v = spec.coefficient(l, k, p, idx).to_complex64();
                        assert!(
                            v.norm() <= 1.0 + 1e-12,
                            "{name}: |alpha_{l}{k}({p})| = {} > 1",
                            v.norm()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(builtin_spec("no-such-spec").is_err());
        assert!(builtin_spec("fn:x").is_err());
        assert!(builtin_spec("zeta-k:0").is_err());
    }

    #[test]
    fn zeta3s_is_numeric_class() {
        let spec = builtin_spec("zeta3s-factored").unwrap();
        assert_eq!(spec.value_class(), ValueClass::WithNumeric);
        // Product over the three factors at any p equals 1 - x^3 inverted:
        // check the three values multiply the linear terms correctly.
        let vals: Vec<_> = (1..=3)
            .map(|k| spec.coefficient(1, k, 5, 3).to_complex64())
            .collect();
        let sum: num::complex::Complex64 = vals.iter().sum();
        let prod: num::complex::Complex64 = vals.iter().product();
        assert!(sum.norm() < 1e-14, "cube roots of unity sum to 0");
        assert!((prod - num::complex::Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }
}

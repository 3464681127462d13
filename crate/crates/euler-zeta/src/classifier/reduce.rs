//! Reduction of integer-dependent direction vectors: each degree-1 factor
//! at direction gamma_l * c splits into gamma_l unit-rotated root factors
//! at direction c, giving a rank-one product classifiable by the
//! one-dimensional theory.

use crate::error::{Error, Result};
use crate::spec_model::{
    CoefficientRule, DependenceMode, Direction, EulerProductSpec, NumberLiteral,
};
use num::BigRational;

pub fn reduce_integer_dependent(spec: &EulerProductSpec) -> Result<EulerProductSpec> {
    let DependenceMode::IntegerDependent { gammas } = &spec.mode else {
        return Err(Error::Mode(format!(
            "reduce_integer_dependent needs integer mode, spec is `{}`",
            spec.mode.name()
        )));
    };
    // base direction c = c_1 / gamma_1
    let g1 = gammas[0];
    let base = Direction(
        spec.directions[0]
            .0
            .iter()
            .map(|entry| match &entry.exact {
                Some(r) => NumberLiteral::from_rational(
                    r / BigRational::from_integer((g1 as i64).into()),
                ),
                None => NumberLiteral::from_f64(entry.value / g1 as f64),
            })
            .collect(),
    );
    let mut rules = Vec::new();
    for (l, row) in spec.rules.iter().enumerate() {
        let gamma = gammas[l];
        for rule in row {
            if gamma == 1 {
                rules.push(rule.clone());
            } else {
                for index in 1..=gamma {
                    rules.push(CoefficientRule::RootOfRule {
                        inner: Box::new(rule.clone()),
                        order: gamma as u32,
                        index: index as u32,
                    });
                }
            }
        }
    }
    EulerProductSpec::new(
        spec.dimension,
        vec![base],
        vec![rules],
        DependenceMode::Independent,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{eval_product, EvalPoint};
    use crate::spec_model::{builtin_spec, TruncationBounds};
    use crate::value::{CoefficientValue, ComplexRational};

    #[test]
    fn zeta_l2s_pairs_roots_of_chi() {
        // zeta(s) L(2s): the chi factor at 2s becomes the pair {-sqrt(chi),
        // +sqrt(chi)} at s; at p = 3 mod 4 that is {i, -i} in some order.
        let spec = builtin_spec("zeta-l2s").unwrap();
        let reduced = reduce_integer_dependent(&spec).unwrap();
        assert_eq!(reduced.phi, 1);
        assert_eq!(reduced.eta, 3);
        let values: Vec<_> = (1..=3)
            .map(|k| reduced.coefficient(1, k, 3, 2))
            .collect();
        assert_eq!(
            values[0],
            CoefficientValue::Exact(ComplexRational::one())
        );
        let pair: Vec<_> = values[1..].to_vec();
        assert!(pair.contains(&CoefficientValue::Exact(ComplexRational::i())));
        assert!(pair.contains(&CoefficientValue::Exact(ComplexRational::from_integers(0, -1))));
    }

    #[test]
    fn gamma_one_is_identity() {
        let spec = EulerProductSpec::new(
            1,
            vec![Direction(vec![NumberLiteral::from_integer(1)])],
            vec![vec![CoefficientRule::ConstantExact(ComplexRational::one())]],
            DependenceMode::IntegerDependent { gammas: vec![1] },
        )
        .unwrap();
        let reduced = reduce_integer_dependent(&spec).unwrap();
        assert_eq!(reduced.rules, spec.rules);
        assert_eq!(reduced.directions, spec.directions);
        assert_eq!(reduced.mode, DependenceMode::Independent);
    }

    #[test]
    fn non_integer_mode_rejected() {
        let spec = builtin_spec("riemann").unwrap();
        assert!(matches!(
            reduce_integer_dependent(&spec),
            Err(Error::Mode(_))
        ));
    }

    #[test]
    fn reduction_preserves_product_values() {
        let bounds = TruncationBounds::new(2000, 80, 1).unwrap();
        for name in ["zeta-l2s", "zeta2-l2s", "l-zeta2s"] {
            let spec = builtin_spec(name).unwrap();
            let reduced = reduce_integer_dependent(&spec).unwrap();
            for (sigma, t) in [(1.5, 0.0), (2.0, 1.0), (1.2, -3.5), (3.0, 7.0), (1.7, 0.3)] {
                let point = EvalPoint::new(vec![sigma], vec![t]);
                let z1 = eval_product(&spec, &point, &bounds).unwrap();
                let z2 = eval_product(&reduced, &point, &bounds).unwrap();
                assert!(
                    (z1 - z2).norm() < 1e-10 * z1.norm().max(1.0),
                    "{name} at ({sigma}, {t}): {z1} vs {z2}"
                );
            }
        }
    }

    #[test]
    fn cube_root_factorization_of_zeta3s() {
        // gamma = 3 on the identity coefficient gives the three cube roots
        // of unity; the product matches the builtin factored form.
        let spec = EulerProductSpec::new(
            1,
            vec![Direction(vec![NumberLiteral::from_integer(3)])],
            vec![vec![CoefficientRule::ConstantExact(ComplexRational::one())]],
            DependenceMode::IntegerDependent { gammas: vec![3] },
        )
        .unwrap();
        let reduced = reduce_integer_dependent(&spec).unwrap();
        assert_eq!(reduced.eta, 3);
        let factored = builtin_spec("zeta3s-factored").unwrap();
        let bounds = TruncationBounds::new(2000, 60, 1).unwrap();
        let point = EvalPoint::new(vec![1.4], vec![0.7]);
        let z1 = eval_product(&reduced, &point, &bounds).unwrap();
        let z2 = eval_product(&factored, &point, &bounds).unwrap();
        assert!((z1 - z2).norm() < 1e-12);
    }
}

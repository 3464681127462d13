//! Class structure of coefficient rules over the primes.
//!
//! The rules are homogeneous in p: a constant has one class, a character
//! mod q one class per coprime residue, a fourth-root-of-unity index rule
//! one class per index residue. Joint classes of a rank carry one abstract
//! value tuple each, which lets per-class certificates cover all primes
//! beyond any explicit scan.

use super::analysis::AnalysisValue;
use crate::spec_model::CoefficientRule;
use crate::value::ComplexRational;
use num::complex::Complex64;
use num::BigRational;

/// Abstract value of a rule on one of its prime classes.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum ClassValue {
    Exact(ComplexRational),
    /// phase * p^{-exponent}, phase an exact fourth root of unity.
    Decay {
        phase: ComplexRational,
        exponent: BigRational,
    },
    /// decaying magnitude p^{-exponent} with numeric phase
    DecayDisc { exponent: BigRational },
    /// constant numeric value on the class
    NumericConst(Complex64),
}

impl ClassValue {
    pub fn to_analysis(&self, p_min: f64) -> AnalysisValue {
        match self {
            ClassValue::Exact(v) => AnalysisValue::Exact(v.clone()),
            ClassValue::Decay { phase, exponent } => AnalysisValue::Decay {
                phase: phase.clone(),
                bound: p_min.powf(-crate::value::ratio_to_f64(exponent)),
                val: None,
            },
            ClassValue::DecayDisc { exponent } => AnalysisValue::Disc {
                bound: p_min.powf(-crate::value::ratio_to_f64(exponent)),
            },
            ClassValue::NumericConst(z) => AnalysisValue::Numeric(*z),
        }
    }
}

/// How one rule partitions the primes.
#[derive(Clone, Debug)]
pub(crate) enum RuleClasses {
    Single(ClassValue),
    /// keyed by p mod modulus, coprime residues only
    ByResidue {
        modulus: u64,
        values: Vec<(u64, ClassValue)>,
    },
    /// keyed by 1-based prime index mod period
    ByIndex {
        period: u64,
        values: Vec<(u64, ClassValue)>,
    },
    /// no finite class structure (certificates stay bounded)
    Unclassifiable,
}

pub(crate) fn rule_classes(rule: &CoefficientRule) -> RuleClasses {
    match rule {
        CoefficientRule::ConstantExact(v) => {
            RuleClasses::Single(ClassValue::Exact(v.clone()))
        }
        CoefficientRule::PowerDecay { exponent } => RuleClasses::Single(ClassValue::Decay {
            phase: ComplexRational::one(),
            exponent: exponent.clone(),
        }),
        CoefficientRule::DirichletCharacter { modulus, table } => {
            let values = (0..*modulus)
                .filter(|&a| crate::spec_model::gcd(a, *modulus) == 1)
                .map(|a| {
                    let v = table.get(&a).cloned().unwrap_or_else(ComplexRational::zero);
                    (a, ClassValue::Exact(v))
                })
                .collect();
            RuleClasses::ByResidue {
                modulus: *modulus,
                values,
            }
        }
        CoefficientRule::UnitPowerByIndex { base } => {
            if !base.is_fourth_root_of_unity() {
                return RuleClasses::Unclassifiable;
            }
            let period = (1..=4u64)
                .find(|&n| base.pow(n) == ComplexRational::one())
                .unwrap();
            let values = (0..period)
                .map(|j| {
                    // class j holds primes with index = j mod period
                    let exponent = if j == 0 { period } else { j };
                    (j, ClassValue::Exact(base.pow(exponent)))
                })
                .collect();
            RuleClasses::ByIndex { period, values }
        }
        CoefficientRule::FiniteSupport { default, .. } => rule_classes(default),
        CoefficientRule::RootOfRule {
            inner,
            order,
            index,
        } => map_root_classes(rule_classes(inner), *order, *index),
    }
}

fn map_root_classes(inner: RuleClasses, order: u32, index: u32) -> RuleClasses {
    let map_value = |v: &ClassValue| root_class_value(v, order, index);
    match inner {
        RuleClasses::Single(v) => RuleClasses::Single(map_value(&v)),
        RuleClasses::ByResidue { modulus, values } => RuleClasses::ByResidue {
            modulus,
            values: values.iter().map(|(k, v)| (*k, map_value(v))).collect(),
        },
        RuleClasses::ByIndex { period, values } => RuleClasses::ByIndex {
            period,
            values: values.iter().map(|(k, v)| (*k, map_value(v))).collect(),
        },
        RuleClasses::Unclassifiable => RuleClasses::Unclassifiable,
    }
}

fn root_class_value(v: &ClassValue, order: u32, index: u32) -> ClassValue {
    // mirror CoefficientRule::value_at for the root rule, on class values
    let probe = CoefficientRule::RootOfRule {
        inner: Box::new(CoefficientRule::ConstantExact(ComplexRational::one())),
        order,
        index,
    };
    match v {
        ClassValue::Exact(x) => {
            let rule = CoefficientRule::RootOfRule {
                inner: Box::new(CoefficientRule::ConstantExact(x.clone())),
                order,
                index,
            };
            match rule.value_at(2, 1) {
                crate::value::CoefficientValue::Exact(e) => ClassValue::Exact(e),
                crate::value::CoefficientValue::Numeric(z) => ClassValue::NumericConst(z),
                crate::value::CoefficientValue::PositiveReal(x) => {
                    ClassValue::NumericConst(Complex64::new(x, 0.0))
                }
            }
        }
        ClassValue::Decay { phase, exponent } => {
            let new_exp = exponent / BigRational::from_integer((order as i64).into());
            // rotation of the phase by e^{2 pi i index / order}
            match probe.value_at(2, 1) {
                crate::value::CoefficientValue::Exact(unit) => {
                    // the root of the phase itself must stay exact: only
                    // phase == 1 does (principal root of 1 is 1)
                    if phase == &ComplexRational::one() {
                        ClassValue::Decay {
                            phase: unit,
                            exponent: new_exp,
                        }
                    } else {
                        ClassValue::DecayDisc { exponent: new_exp }
                    }
                }
                _ => ClassValue::DecayDisc { exponent: new_exp },
            }
        }
        ClassValue::DecayDisc { exponent } => ClassValue::DecayDisc {
            exponent: exponent / BigRational::from_integer((order as i64).into()),
        },
        ClassValue::NumericConst(z) => {
            let root =
                Complex64::from_polar(z.norm().powf(1.0 / order as f64), z.arg() / order as f64);
            let unit = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * index as f64 / order as f64,
            );
            ClassValue::NumericConst(root * unit)
        }
    }
}

/// Exceptional primes of a rule: finitely many primes where the class
/// structure does not apply (character moduli divisors, finite-support keys).
pub(crate) fn exceptional_primes(rule: &CoefficientRule) -> Vec<u64> {
    match rule {
        CoefficientRule::ConstantExact(_)
        | CoefficientRule::PowerDecay { .. }
        | CoefficientRule::UnitPowerByIndex { .. } => Vec::new(),
        CoefficientRule::DirichletCharacter { modulus, .. } => (2..=*modulus)
            .filter(|&p| crate::spec_model::is_prime_u64(p) && modulus % p == 0)
            .collect(),
        CoefficientRule::FiniteSupport { support, default } => {
            let mut out: Vec<u64> = support.keys().copied().collect();
            out.extend(exceptional_primes(default));
            out.sort_unstable();
            out.dedup();
            out
        }
        CoefficientRule::RootOfRule { inner, .. } => exceptional_primes(inner),
    }
}

/// One joint class of a rank: the value tuple shared by all its primes,
/// plus the membership predicate data.
#[derive(Clone, Debug)]
pub(crate) struct JointClass {
    pub values: Vec<ClassValue>,
    /// per-rule key: (kind, modulus/period, class id); used for membership
    pub keys: Vec<ClassKey>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum ClassKey {
    Any,
    Residue { modulus: u64, class: u64 },
    Index { period: u64, class: u64 },
}

impl JointClass {
    /// Does prime `p` with 1-based index `idx` belong to this class?
    pub fn contains(&self, p: u64, idx: usize) -> bool {
        self.keys.iter().all(|key| match key {
            ClassKey::Any => true,
            ClassKey::Residue { modulus, class } => p % modulus == *class,
            ClassKey::Index { period, class } => (idx as u64) % period == *class,
        })
    }
}

/// All joint classes of one rank, or None when some rule lacks finite
/// class structure. Class counts are capped to keep certificates cheap.
pub(crate) fn joint_classes(rules: &[CoefficientRule]) -> Option<Vec<JointClass>> {
    const MAX_CLASSES: usize = 4096;
    let mut classes = vec![JointClass {
        values: Vec::new(),
        keys: Vec::new(),
    }];
    for rule in rules {
        let rc = rule_classes(rule);
        let expansions: Vec<(ClassKey, ClassValue)> = match rc {
            RuleClasses::Single(v) => vec![(ClassKey::Any, v)],
            RuleClasses::ByResidue { modulus, values } => values
                .into_iter()
                .map(|(class, v)| (ClassKey::Residue { modulus, class }, v))
                .collect(),
            RuleClasses::ByIndex { period, values } => values
                .into_iter()
                .map(|(class, v)| (ClassKey::Index { period, class }, v))
                .collect(),
            RuleClasses::Unclassifiable => return None,
        };
        let mut next = Vec::with_capacity(classes.len() * expansions.len());
        for base in &classes {
            for (key, value) in &expansions {
                let mut jc = base.clone();
                jc.keys.push(key.clone());
                jc.values.push(value.clone());
                next.push(jc);
            }
        }
        if next.len() > MAX_CLASSES {
            return None;
        }
        classes = next;
    }
    // drop arithmetically impossible key combinations (conflicting residues
    // of non-coprime moduli, conflicting index classes); keeping them would
    // fail closure on classes that contain no primes at all
    classes.retain(|c| keys_satisfiable(&c.keys));
    Some(classes)
}

fn keys_satisfiable(keys: &[ClassKey]) -> bool {
    for (i, a) in keys.iter().enumerate() {
        for b in keys.iter().skip(i + 1) {
            let compatible = match (a, b) {
                (
                    ClassKey::Residue {
                        modulus: qa,
                        class: ca,
                    },
                    ClassKey::Residue {
                        modulus: qb,
                        class: cb,
                    },
                ) => {
                    let g = crate::spec_model::gcd(*qa, *qb);
                    ca % g == cb % g
                }
                (
                    ClassKey::Index {
                        period: pa,
                        class: ca,
                    },
                    ClassKey::Index {
                        period: pb,
                        class: cb,
                    },
                ) => {
                    let g = crate::spec_model::gcd(*pa, *pb);
                    ca % g == cb % g
                }
                _ => true,
            };
            if !compatible {
                return false;
            }
        }
    }
    true
}

use std::sync::OnceLock;

use naqkit_core::complexity::{khat_in, levin_value, m_exact_in, Caps, ProgramTable};
use naqkit_core::executor::{ReferenceExecutor, UniversalExecutor};
use naqkit_core::naq::{empirical_cdf, naq_midrank, MValue, Pool, Z};
use naqkit_core::oracle::{cdf_oracle, khat_oracle, kt_oracle, m_oracle, midrank_oracle};
use naqkit_core::validity::{Instance, Predicate};
use naqkit_core::{BitString, KtValue};
use proptest::prelude::*;

const CAPS: Caps = Caps { length_cap: 16, step_budget: 4096 };

fn table() -> &'static ProgramTable {
    static T: OnceLock<ProgramTable> = OnceLock::new();
    T.get_or_init(|| ProgramTable::build(CAPS, None).unwrap())
}

fn bits(max: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(any::<bool>(), 0..=max).prop_map(BitString::from_bits)
}

fn predicate() -> impl Strategy<Value = Predicate> {
    prop_oneof![
        Just(Predicate::Always),
        Just(Predicate::Never),
        Just(Predicate::Empty),
        Just(Predicate::Nonempty),
        Just(Predicate::EndsWithOne),
        Just(Predicate::OddParity),
        Just(Predicate::EqualsInstance),
        Just(Predicate::ContainsInstance),
        Just(Predicate::IdentityFamily),
        (0usize..6).prop_map(|min| Predicate::MinLength { min }),
        bits(5).prop_map(|target| Predicate::Equals { target }),
        (0usize..3).prop_map(|radius| Predicate::HammingBall { center: None, radius }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn khat_matches_enumeration(r in bits(8)) {
        prop_assert_eq!(khat_in(table(), &r).bits(), khat_oracle(&r, CAPS.length_cap, CAPS.step_budget));
    }

    #[test]
    fn m_exact_matches_enumeration(x in bits(4), v in predicate()) {
        let xi = Instance::binary(x);
        let est = m_exact_in(table(), &xi, &v, u64::MAX);
        let brute = m_oracle(&xi, &v, CAPS.length_cap, CAPS.step_budget);
        prop_assert_eq!(est.bits(), brute.map(|(l, _)| l));
    }

    #[test]
    fn levin_matches_untruncated_search(x in bits(3), v in predicate(), b in 6u64..=11) {
        let xi = Instance::binary(x);
        let got = levin_value(&xi, &ReferenceExecutor, &v, b, u64::MAX).unwrap();
        let want = kt_oracle(&xi, &ReferenceExecutor, &v, b);
        prop_assert_eq!(got.value, want.as_ref().map(|(k, _)| *k));
        prop_assert_eq!(got.witness, want.map(|(_, w)| w));
    }

    #[test]
    fn levin_on_universal(x in bits(3), v in predicate(), b in 6u64..=10) {
        let xi = Instance::binary(x);
        let e = UniversalExecutor::default();
        let got = levin_value(&xi, &e, &v, b, u64::MAX).unwrap();
        prop_assert_eq!(got.value, kt_oracle(&xi, &e, &v, b).map(|(k, _)| k));
    }

    #[test]
    fn midrank_and_cdf_match_counting(pool in proptest::collection::vec(0u64..20, 1..40), m in 0u64..22) {
        let p = Pool::from_bits(&pool);
        prop_assert_eq!(Some(naq_midrank(MValue::bits(m), &p).unwrap()), midrank_oracle(m, &pool));
        prop_assert_eq!(Some(empirical_cdf(&p, Z::Value(KtValue::bits(m))).unwrap()), cdf_oracle(m, &pool));
    }
}

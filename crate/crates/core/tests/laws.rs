mod common;

use common::laws;
use proptest::prelude::*;

fn ix() -> impl Strategy<Value = usize> {
    0usize..6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn composition_is_associative(a in ix(), b in ix(), c in ix(), d in ix(), seed in any::<u64>()) {
        laws::associativity([a, b, c, d], seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn identity_is_a_two_sided_unit(a in ix(), b in ix(), seed in any::<u64>()) {
        laws::unit([a, b], seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn composition_distributes_over_sums(a in ix(), b in ix(), c in ix(), seed in any::<u64>()) {
        laws::sum_distributes([a, b, c], seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn stabilizers_transport_by_conjugation(a in ix(), b in ix(), seed in any::<u64>()) {
        laws::stabilizer_conjugation([a, b], seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn composition_agrees_with_the_naive_quotient(a in ix(), b in ix(), c in ix(), seed in any::<u64>()) {
        laws::composition_matches_naive_coend([a, b, c], seed).map_err(TestCaseError::fail)?;
    }
}

mod common;

use common::props;
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn holds_and_not_holds_partition_the_scope(input in arb_scoped_candidate(5, 14)) {
        props::holds_partitions_scope(input)?;
    }

    #[test]
    fn holds_is_idempotent(input in arb_scoped_candidate(5, 14)) {
        props::holds_is_idempotent(input)?;
    }

    #[test]
    fn error_shrinks_as_the_left_side_grows(
        (r, c) in arb_candidate(6, 16),
        extra in 0usize..6,
    ) {
        props::error_is_monotone((r, c, extra))?;
    }

    #[test]
    fn validation_matches_pairwise_comparison(
        (r, c) in arb_candidate(5, 14),
        pick in proptest::collection::vec(any::<bool>(), 14),
    ) {
        props::validation_matches_pairwise((r, c, pick))?;
    }

    #[test]
    fn closure_laws(fs in arb_fdset(), x in arb_attr_subset(6), y in arb_attr_subset(6)) {
        props::closure_laws((fs, x, y))?;
    }

    #[test]
    fn fdset_survives_export_and_import(fs in arb_fdset()) {
        props::fdset_round_trip(fs)?;
    }

    #[test]
    fn fdml_prints_and_parses_back(q in arb_fdml()) {
        props::fdml_fixpoint(q)?;
    }

    #[test]
    fn minefd_prints_and_parses_back(s in arb_minefd()) {
        props::minefd_fixpoint(s)?;
    }

    #[test]
    fn select_prints_and_parses_back(q in arb_select()) {
        props::select_fixpoint(q)?;
    }

    #[test]
    fn tableau_selects_what_the_condition_selects(
        input in arb_relation(4, 12).prop_flat_map(|r| {
            let p = arb_row_predicate(r.attribute_names());
            let attrs = arb_attr_subset(r.arity());
            (Just(r), p, attrs)
        }),
    ) {
        props::tableau_is_faithful(input)?;
    }

    #[test]
    fn dependent_matches_exhaustive_mining(
        (r, c) in arb_candidate(5, 12),
        t in prop_oneof![Just(0.0), arb_fraction()],
    ) {
        props::dependent_matches_oracle((r, c, t))?;
    }

    #[test]
    fn violates_matches_pairwise_search(
        (r, c, on) in arb_scoped_candidate(4, 12),
        suspect in 0usize..4,
        threshold in prop_oneof![Just(0.0), Just(0.75), Just(1.0), arb_fraction()],
    ) {
        props::violates_matches_oracle((r, c, suspect, threshold, on))?;
    }

    #[test]
    fn levelwise_miner_matches_exhaustive_miner(
        r in arb_relation(6, 16),
        t in prop_oneof![3 => Just(0.0), 1 => arb_fraction()],
        max_len in proptest::option::of(1usize..4),
    ) {
        props::miner_matches_oracle((r, t, max_len))?;
    }

    #[test]
    fn cfd_confidence_matches_subset_search(input in arb_cfd_instance()) {
        props::cfd_matches_oracle(input)?;
    }
}

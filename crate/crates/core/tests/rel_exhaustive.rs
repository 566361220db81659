use std::collections::BTreeSet;

use cpm_core::rel::{
    canonical_cpm_structure, enumerate_cpm_classical_structures, groupoid_to_delta, is_cp_relation,
    kraus_relation_search, all_groupoids, Doubling, EnumerationOptions, FiniteRelation,
};

#[test]
fn cp_conditions_match_kraus_existence_on_all_doubled_two_sets() {
    let d = Doubling::single(2).unwrap();
    let mut cp = 0;
    for mask in 0u32..1 << 16 {
        let r = FiniteRelation::from_pairs(4, 4, (0..16).filter(|b| mask >> b & 1 == 1).map(|b| (b / 4, b % 4)))
            .unwrap();
        let by_conditions = is_cp_relation(&r, &d, &d).unwrap();
        let by_kraus = kraus_relation_search(&r, 2, 2, 4).unwrap().is_some();
        assert_eq!(by_conditions, by_kraus, "mask {mask:#06x}");
        cp += by_conditions as u32;
    }
    assert!(cp > 1);
}

#[test]
fn size_three_survivors_are_exactly_canonical() {
    let opts = EnumerationOptions { workers: 4, ..Default::default() };
    let report = enumerate_cpm_classical_structures(3, &opts).unwrap();
    assert_eq!(report.candidates, 1_395_793);
    let survivors: BTreeSet<FiniteRelation> = report.survivors.iter().map(|s| groupoid_to_delta(&s.groupoid)).collect();
    let canonical: BTreeSet<FiniteRelation> = all_groupoids(3).iter().map(canonical_cpm_structure).collect();
    assert_eq!(canonical.len(), 10);
    assert_eq!(survivors, canonical);
    assert!(report.survivors_match_canonical);
}

#[test]
fn enumeration_is_independent_of_worker_count() {
    let one = enumerate_cpm_classical_structures(2, &EnumerationOptions { workers: 1, ..Default::default() }).unwrap();
    let many = enumerate_cpm_classical_structures(2, &EnumerationOptions { workers: 3, ..Default::default() }).unwrap();
    assert_eq!(one, many);
}

//! Finite relations: classical structures as abelian groupoids, completely
//! positive relations between doubled sets, and the enumeration comparing
//! classical structures on doubled sets with the canonical ones.

mod cpm;
mod enumerate;
mod groupoid;
mod kraus;
mod relation;

pub use cpm::{
    canonical_cpm_structure, canonical_cpm_structure_with, is_cp_comultiplication, is_cp_relation,
    select_convention, Doubling, DoublingConvention,
};
pub use enumerate::{
    all_groupoids, element_reading, enumerate_cpm_classical_structures, enumerate_partial, set_partitions,
    ElementReading, EnumerationOptions, EnumerationReport, Progress, Survivor, DEFAULT_CAP, MAX_X_SIZE,
};
pub use groupoid::{
    check_abelian_group, groupoid_to_delta, labeled_groups, verify_classical_structure, AbelianGroupoid, MAX_BLOCK,
};
pub use kraus::{cp_from_kraus, default_max_z, kraus_relation_search, KrausWitness, MAX_VERTICES};
pub use relation::{rel_compose, rel_dagger, rel_tensor, FiniteRelation};

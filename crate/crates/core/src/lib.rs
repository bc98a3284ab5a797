//! Combinatorial toolkit and simulator for device-to-device coded caching.
//!
//! The pieces, bottom up:
//!
//! - [`field`]: prime-field arithmetic and codeword enumeration for
//!   generator matrices.
//! - [`design`]: block designs, parallel-class resolutions, grid designs,
//!   designs from linear codes, and cross intersection profiles.
//! - [`pda`]: the `F x K` arrays over `{*} ∪ [S]`, the C1-C4 validators,
//!   sender-mapping derivation, canonical relabeling, and equivalence.
//! - [`construction`]: the registered array constructions over cross
//!   resolvable designs (`I`, `II`, and the multi-class `general` form).
//! - [`bounds`] and [`catalog`]: exact-rational load bounds, optimality
//!   classification, the named closed-form scheme formulas, and the
//!   comparison report.
//! - [`sim`]: cache placement, XOR multicast delivery, and one-shot
//!   decoding with byte-exact verification.
//!
//! ```
//! use dpda_core::prelude::*;
//!
//! let grid = grid_mcrd(3).unwrap();
//! let built = construct_i(&grid).unwrap();
//! assert_eq!(built.params().to_string(), "(6,9,3,18)");
//!
//! let library = FileLibrary::synthetic(4, 1024, 7).unwrap();
//! let demand = random_demand(6, 4, 7);
//! let report = sim_run(built.dpda(), &demand, &library).unwrap();
//! assert!(report.all_decoded());
//! ```

pub mod bounds;
pub mod catalog;
pub mod construction;
pub mod design;
pub mod field;
pub mod pda;
pub mod sim;

/// Commonly used items under one roof.
pub mod prelude {
    pub use crate::bounds::{
        bound_jmqx, bound_new, classify, compare_csv, compare_json, compare_report, ratio_string,
        CompareRow, OptimalityReport, SchemeParams, Tighter,
    };
    pub use crate::catalog::{find_scheme, schemes, CatalogInputs, CatalogScheme};
    pub use crate::construction::{
        construct_general, construct_i, construct_ii, constructions, find_construction,
        ConstructedDpda, Construction,
    };
    pub use crate::design::{
        design_from_code, find_resolution, grid_mcrd, CrossProfile, Design, Resolution,
    };
    pub use crate::field::{GeneratorMatrix, PrimeField};
    pub use crate::pda::{
        array_from_json, array_to_json, canonicalize, derive_phi, equivalent, parse_entry_grid,
        parse_symbolic_grid, regularity, validate_dpda, validate_pda, ArrayParams, Dpda, Entry,
        PdaArray, Phi, Regularity, SymbolicArray, Violation,
    };
    pub use crate::sim::run as sim_run;
    pub use crate::sim::{
        deliver, place, random_demand, FileLibrary, LibrarySpec, SimulationReport, Transmission,
    };
}

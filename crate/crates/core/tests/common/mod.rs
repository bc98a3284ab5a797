//! Shared fixtures: known-good reference arrays as whitespace grids, and
//! the generator matrix behind the nine-point four-class design.
//!
//! Each integration test binary compiles this module separately and uses a
//! different subset of it.
#![allow(dead_code)]

use dpda_core::design::{design_from_code, Resolution};
use dpda_core::field::GeneratorMatrix;
use dpda_core::pda::{parse_entry_grid, parse_symbolic_grid, PdaArray};

/// Hand-entered (6,4,2,6) array whose sender map is the identity.
pub const REF_6_4_2_6: &str = "\
    * 3 * 5 * 1\n\
    * 6 1 * 4 *\n\
    3 * * 6 2 *\n\
    5 * 2 * * 4\n";

/// (4,4,2,4): point-rows construction over the 2x2 grid design.
pub const GOLDEN_I_N2: &str = "\
    *  13 *  12\n\
    *  24 12 *\n\
    13 *  *  34\n\
    24 *  34 *\n";

/// (6,9,3,18): point-rows construction over the 3x3 grid design.
pub const GOLDEN_I_N3: &str = "\
    *  14 17 *  12 13\n\
    *  25 28 12 *  23\n\
    *  36 39 13 23 *\n\
    14 *  47 *  45 46\n\
    25 *  58 45 *  56\n\
    36 *  69 46 56 *\n\
    17 47 *  *  78 79\n\
    28 58 *  78 *  89\n\
    39 69 *  79 89 *\n";

/// (12,9,3,36): the general construction over the four-class design of the
/// rank-2 GF(3) code.
pub const GOLDEN_GENERAL_GF3: &str = "\
    *  03 06 *  07 05 *  08 04 *  02 01\n\
    *  14 17 13 *  18 15 *  16 01 12 *\n\
    *  25 28 26 24 *  27 23 *  02 *  12\n\
    03 *  36 *  13 38 37 *  23 34 *  35\n\
    14 *  47 46 *  24 04 48 *  *  34 45\n\
    25 *  58 05 57 *  *  15 56 45 35 *\n\
    06 36 *  *  46 26 56 16 *  68 67 *\n\
    17 47 *  07 *  57 *  37 27 78 *  67\n\
    28 58 *  38 18 *  08 *  48 *  78 68\n";

/// (9,6,2,18): block-rows construction over the 3x3 grid design.
pub const GOLDEN_II_N3: &str = "\
    *   *   *   1_1 2_1 3_1 1_2 2_2 3_2\n\
    4_1 5_1 6_1 *   *   *   4_2 5_2 6_2\n\
    7_1 8_1 9_1 7_2 8_2 9_2 *   *   *\n\
    *   1_1 1_2 *   4_1 4_2 *   7_1 7_2\n\
    2_1 *   2_2 5_1 *   5_2 8_1 *   8_2\n\
    3_1 3_2 *   6_1 6_2 *   9_1 9_2 *\n";

/// (16,8,2,48): block-rows construction over the 4x4 grid design.
pub const GOLDEN_II_N4: &str = "\
    *   *   *   *   1_1 2_1 3_1 4_1 1_2 2_2 3_2 4_2 1_3 2_3 3_3 4_3\n\
    5_1 6_1 7_1 8_1 *   *   *   *   5_2 6_2 7_2 8_2 5_3 6_3 7_3 8_3\n\
    9_1 a_1 b_1 c_1 9_2 a_2 b_2 c_2 *   *   *   *   9_3 a_3 b_3 c_3\n\
    d_1 e_1 f_1 g_1 d_2 e_2 f_2 g_2 d_3 e_3 f_3 g_3 *   *   *   *\n\
    *   1_1 1_2 1_3 *   5_1 5_2 5_3 *   9_1 9_2 9_3 *   d_1 d_2 d_3\n\
    2_1 *   2_2 2_3 6_1 *   6_2 6_3 a_1 *   a_2 a_3 e_1 *   e_2 e_3\n\
    3_1 3_2 *   3_3 7_1 7_2 *   7_3 b_1 b_2 *   b_3 f_1 f_2 *   f_3\n\
    4_1 4_2 4_3 *   8_1 8_2 8_3 *   c_1 c_2 c_3 *   g_1 g_2 g_3 *\n";

/// Canonical form of a symbolic golden grid.
pub fn golden(text: &str) -> PdaArray {
    parse_symbolic_grid(text)
        .expect("golden grid parses")
        .canonicalize()
        .0
}

pub fn ref_array() -> PdaArray {
    parse_entry_grid(REF_6_4_2_6).expect("reference array parses")
}

pub fn gf3_matrix() -> GeneratorMatrix {
    GeneratorMatrix::new(3, vec![vec![1, 0, 1, 1], vec![0, 1, 1, 2]]).expect("full rank")
}

pub fn gf3_design() -> Resolution {
    design_from_code(&gf3_matrix()).expect("code design builds")
}

//! Published comparison data for the eight land-use-extended DRASTIC parameters.

use super::Tfn;

pub const DRASTIC_PARAMETERS: [&str; 7] = ["D", "R", "A", "S", "T", "I", "C"];
pub const DRASTIC_LU_PARAMETERS: [&str; 8] = ["D", "R", "A", "S", "T", "I", "C", "LU"];

/// Integer DRASTIC weights in parameter order.
pub const DRASTIC_WEIGHTS: [f64; 7] = [5.0, 4.0, 3.0, 2.0, 1.0, 5.0, 3.0];
/// DRASTIC weights with land use; also the priority vector of the AHP ratio matrix.
pub const DRASTIC_LU_WEIGHTS: [f64; 8] = [5.0, 4.0, 3.0, 2.0, 1.0, 5.0, 3.0, 5.0];

/// Row-wise triples of the published fuzzy comparison matrix, as printed
/// (two decimals). Off-diagonal triples are not ordered `l <= m <= u`.
pub const DRASTIC_LU_FUZZY: [[[f64; 3]; 8]; 8] = {
    const ONE: [f64; 3] = [1.00, 1.00, 1.00];
    [
        [ONE, [1.25, 0.80, 1.00], [1.67, 0.60, 1.00], [2.50, 0.40, 1.00], [5.00, 0.20, 1.00], ONE, [1.67, 0.60, 1.00], ONE],
        [[0.80, 1.25, 1.00], ONE, [1.33, 0.75, 1.00], [2.00, 0.50, 1.00], [4.00, 0.25, 1.00], [0.80, 1.25, 1.00], [1.33, 0.75, 1.00], [0.80, 1.25, 1.00]],
        [[0.60, 1.67, 1.00], [0.75, 1.33, 1.00], ONE, [1.50, 0.67, 1.00], [3.00, 0.33, 1.00], [0.60, 1.67, 1.00], ONE, [0.60, 1.67, 1.00]],
        [[0.40, 2.50, 1.00], [0.50, 2.00, 1.00], [0.67, 1.50, 1.00], ONE, [2.00, 0.50, 1.00], [0.40, 2.50, 1.00], [0.67, 1.50, 1.00], [0.40, 2.50, 1.00]],
        [[0.20, 5.00, 1.00], [0.25, 4.00, 1.00], [0.33, 3.00, 1.00], [0.50, 2.00, 1.00], ONE, [0.20, 5.00, 1.00], [0.33, 3.00, 1.00], [0.20, 5.00, 1.00]],
        [ONE, [1.25, 0.80, 1.00], [1.67, 0.60, 1.00], [2.50, 0.40, 1.00], [5.00, 0.20, 1.00], ONE, [1.67, 0.60, 1.00], ONE],
        [[0.60, 1.67, 1.00], [0.75, 1.33, 1.00], ONE, [1.50, 0.67, 1.00], [3.00, 0.33, 1.00], [0.60, 1.67, 1.00], ONE, [0.60, 1.67, 1.00]],
        [ONE, [1.25, 0.80, 1.00], [1.67, 0.60, 1.00], [2.50, 0.40, 1.00], [5.00, 0.20, 1.00], ONE, [1.67, 0.60, 1.00], ONE],
    ]
};

pub fn drastic_lu_fuzzy_rows() -> Vec<Vec<Tfn>> {
    DRASTIC_LU_FUZZY
        .iter()
        .map(|row| row.iter().map(|&t| Tfn::from(t)).collect())
        .collect()
}

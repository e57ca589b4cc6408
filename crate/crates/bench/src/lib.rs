//! Shared inputs for the criterion benches.

use arf_core::{sieve_table, FunctionKind, FunctionTable};

/// Sizes used across the kernels, small enough for quick sampling.
pub const SIZES: [u64; 3] = [1 << 12, 1 << 14, 1 << 16];

/// A table long enough for every kernel at `n` terms (order-3 needs `3n`).
pub fn table_for(kind: FunctionKind, n: u64) -> FunctionTable {
    sieve_table(kind, 3 * n).expect("bench sizes fit the default budget")
}

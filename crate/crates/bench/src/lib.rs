//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use orbgw_core::OrbifoldData;

/// `[C^3/Z_3]` with the diagonal action.
pub fn c3_z3() -> Arc<OrbifoldData> {
    Arc::new(OrbifoldData::build(&[3], &[vec![1], vec![1], vec![1]]).expect("valid action"))
}

/// `[C^3/(Z_2 x Z_2)]` with a faithful action.
pub fn c3_z2z2() -> Arc<OrbifoldData> {
    Arc::new(OrbifoldData::build(&[2, 2], &[vec![1, 0], vec![0, 1], vec![1, 1]]).expect("valid action"))
}

//! Fixtures shared by the benchmarks in `benches/`.

use ksgk::constructions::{build_ks_proof, default_bases, zero_one_gadget, GadgetBlueprint};
use ksgk::zero_error::{build_channel, Channel};

/// The two-basis proof in dimension 3.
pub fn ks_proof() -> GadgetBlueprint {
    build_ks_proof(3, 2, &default_bases(3, 2, 0), 0).expect("fixed parameters")
}

/// 01-gadget between two vectors at overlap `c`.
pub fn zero_one(c: f64) -> GadgetBlueprint {
    zero_one_gadget(&[1.0, 0.0, 0.0], &[c, (1.0 - c * c).sqrt(), 0.0], 0).expect("0 < c < 1")
}

/// Channel on the 01-gadget split into bases, weight 3/2.
pub fn zero_one_channel(c: f64) -> Channel {
    build_channel(&zero_one(c).partitioned(0).expect("partition exists"), 1.5).expect("feasible")
}

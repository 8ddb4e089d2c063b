//! Numerical model of the homogeneous nearly Kähler `S³×S³` and of the Hopf
//! hypersurfaces that live in it.
//!
//! The crate is organised bottom-up:
//!
//! * [`quat`]: quaternion arithmetic.
//! * [`pointwise`]: the quaternionic formulas for `J`, `g`, `P`, `Q` at a
//!   point `(p, q)`.
//! * [`frame`]: the same tensors as constant matrices in the left-invariant
//!   frame `E_i = (p e_i, 0)`, `F_i = (0, q e_i)`, together with the
//!   Levi-Civita connection, `G = ∇̃J` and the curvature tensor.
//! * [`isometry`]: the maps `F₁`, `F₂`, `F_abc` and their differentials.
//! * [`hypersurface`]: the example families `M₁ … M₆`, shape operators,
//!   spectra and residuals of the hypersurface structure equations.
//! * [`verify`]: seeded verification suites producing JSON reports.
//! * [`exec`]: parallel or sequential evaluation of sample batches.

pub mod error;
pub mod exec;
pub mod frame;
pub mod hypersurface;
pub mod isometry;
pub mod pointwise;
pub mod quat;
pub mod verify;

pub use error::{GeometryError, Result};
pub use frame::{FrameVector, StructureTables};
pub use pointwise::{AmbientPoint, TangentVector};
pub use quat::{ImaginaryQuaternion, Quaternion};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random generator used by every seeded routine in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

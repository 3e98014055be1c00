//! Exact computation with diagrams of associative algebras over a finite
//! category: barycentric subdivision, the pullback/left-adjoint pair on
//! diagram modules, relative projective resolutions and Ext, Hochschild
//! cohomology, and the single-algebra `!` construction over posets —
//! together with the machinery to compare both sides of each of the
//! cohomology isomorphisms these constructions induce.
//!
//! All arithmetic is exact (prime fields or the rationals); there is no
//! floating point anywhere in the crate.

pub mod error;
pub mod field;
pub mod matrix;
pub mod par;
pub mod sparse;

pub mod fincat;
pub mod subdivision;

pub mod ralg;

pub mod diagram;

pub mod homalg;

pub mod bang;

pub mod oracles;

pub mod corpus;
pub mod doc;
pub mod report;

pub use error::{Error, Result};
pub use field::{Field, Fp, Rat};
pub use matrix::Mat;

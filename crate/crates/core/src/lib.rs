//! Exact pullback dynamics of simple closed curves under quadratic Thurston
//! maps with four postcritical points.
//!
//! The pure mapping class group of the four-punctured sphere is free of
//! rank two. A map is described by its virtual endomorphism `ψ` on an
//! index-2 subgroup; curves are conjugates of three twist axes, and one
//! pullback step is one application of `ψ` to a twist power.
//!
//! * [`words`]: reduced words, cyclic reduction, conjugacy.
//! * [`endo`]: the transducer for `ψ`, its extension `ψ̂`, the nucleus.
//! * [`curves`]: canonical curves, pullback, orbit classification.
//! * [`spectra`]: Perron roots and the exact `ρ < 1` test.
//! * [`mapdef`]: map-definition files and the built-in maps.
//! * [`verify`]: identity checks and bounded sweeps.

pub mod curves;
pub mod endo;
pub mod mapdef;
pub mod spectra;
pub mod verify;
pub mod words;

pub use curves::{Classification, Curve, OrbitResult, PullbackStep};
pub use endo::{Nucleus, ParityHom, VirtualEndo};
pub use mapdef::{builtin, parse_mapdef, LoadedMap, MapDefinition};
pub use spectra::{AbelianVirtualEndo, RationalMatrix};
pub use words::{Alphabet, CyclicWord, Letter, Word};

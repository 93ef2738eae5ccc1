//! Self-similar graph systems `(G, E, φ)`.
//!
//! The crate covers the combinatorial side of these systems: graphs and
//! paths, group backends, the inverse semigroup `S_{G,E}`, germs of its tight
//! groupoid over eventually periodic infinite paths, decision procedures for
//! Hausdorffness, minimality, effectiveness and local contractivity, Katsura
//! systems, Smith-normal-form K-theory and homology, and desingularization of
//! sources and infinite receivers.
//!
//! ```
//! use selfsim::{fixtures, SearchBudget};
//!
//! let grig = fixtures::grigorchuk();
//! let d = grig.parse_elem("d").unwrap();
//! let report = selfsim::sfp::minimal_strongly_fixed(&grig, &d, SearchBudget::default().with_depth(8));
//! assert!(report.verdict.is_infinite());
//! ```

pub mod cli;
pub mod desing;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod group;
pub mod groupoid;
pub mod invariants;
pub mod katsura;
pub mod props;
pub mod semigroup;
pub mod sfp;
pub mod snf;
pub mod system;
pub mod verdict;

pub use graph::{Graph, Path};
pub use group::{Elem, Group};
pub use system::System;
pub use verdict::{SearchBudget, Verdict};

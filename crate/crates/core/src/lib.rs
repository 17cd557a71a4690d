//! Finite combinatorics of co-trees and bi-Gödel algebras: posets, canonical
//! co-tree forms, bi-p-morphisms and the image relation, multiset orders,
//! finite bi-Heyting duality, and a battery of exhaustive checks over all of
//! them.

pub mod analysis;
pub mod cotree;
pub mod duality;
pub mod error;
pub mod morphism;
pub mod multiset;
pub mod poset;

pub use cotree::{enumerate_cotrees, CanonicalCode, CoTree, Decomposition};
pub use error::{Error, Result};
pub use morphism::{check_bi_p_morphism, enumerate_bi_p_morphisms, leq_p, PosetMap};
pub use multiset::{embeddable, projects, projects_bruteforce, MsetMapWitness, Multiset};
pub use poset::{enumerate_posets, Dir, ElemSet, EmbeddingWitness, Poset, PosetClass, PosetKind};

//! Bar constructions: the levelled two-sided and bimodule bars, their module
//! structures and comparison maps, and the tree bar carrying the cooperad structure.

pub mod levelled;
pub mod structure;
pub mod tree;

pub use levelled::{bar, bar_bimodule, bar_map_right, reduced_bar, resolution_map, resolution_map_bi, resolution_map_left, simplicial_object, BarComplex, BarError, BarKey, BarMap};
pub use structure::{chi_left, chi_right, left_structure, module_structure_on_bar, right_structure, BarModule, Side};
pub use tree::{comodule_on_bar, cooperad_on_bar, cut_coaction, tree_bar, tree_bar_operad, CoactFn, Coaction, TreeBar};

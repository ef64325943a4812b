//! Shift graphs, the derandomized independent set, coloring searches and
//! fiber extraction.

mod coloring;
mod extract;
mod independent;
mod shift;

pub use coloring::{monochromatic_copy_search, ColorSearchReport, Coloring, MonochromaticWitness, SearchMode, Verdict, MAX_COLORINGS};
pub use extract::{base_labels, extract_dense_free_subset, Extraction, Fiber};
pub use independent::{weighted_independent_set, IndependentSet};
pub use shift::{shift_adjacent, verify_triangle_free, MAX_TRIANGLE_CHECK};

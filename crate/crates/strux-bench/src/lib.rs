//! Shared fixtures for the criterion benches.

use strux_core::tree::{generate_structure, GenConfig, StructNode};

/// A mid-size document shaped like the standard difficulty profile.
pub fn standard_doc(seed: u64) -> StructNode {
    generate_structure(&GenConfig {
        seed,
        max_depth: 3,
        max_width: 3,
        id_length_range: (3, 8),
        pairs_per_node_range: (1, 3),
        target_node_count: Some(24),
    })
    .expect("fixture generates")
}

/// A document shaped like the hard profile.
pub fn hard_doc(seed: u64) -> StructNode {
    generate_structure(&GenConfig {
        seed,
        max_depth: 5,
        max_width: 5,
        id_length_range: (3, 8),
        pairs_per_node_range: (1, 3),
        target_node_count: Some(120),
    })
    .expect("fixture generates")
}

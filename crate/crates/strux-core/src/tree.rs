//! Abstract structure tree every non-tabular document renders from.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::rng::{DetRng, LOWER, UPPER};

/// One node of the abstract document tree. Ids and pair values are lowercase
/// tokens unique across the whole tree (they share one namespace), keys are
/// uppercase tokens unique within their node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructNode {
    pub id: String,
    pub pairs: Vec<(String, String)>,
    pub children: Vec<StructNode>,
}

/// Convenience constructor used heavily by tests and examples.
pub fn node(id: &str, pairs: &[(&str, &str)], children: Vec<StructNode>) -> StructNode {
    StructNode {
        id: id.to_string(),
        pairs: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        children,
    }
}

/// Generation bounds and knobs for [`generate_structure`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Maximum node depth; the root has depth 0.
    pub max_depth: u32,
    /// Maximum children per node. Must be at least 1.
    pub max_width: u32,
    /// Inclusive length range for ids, keys and values.
    pub id_length_range: (usize, usize),
    /// Inclusive range for the number of key/value pairs per node.
    pub pairs_per_node_range: (usize, usize),
    /// When set, grow greedily toward this node count instead of sampling
    /// child counts; bounds still hold, so the result may fall short.
    pub target_node_count: Option<u32>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_depth: 3,
            max_width: 3,
            id_length_range: (3, 8),
            pairs_per_node_range: (1, 3),
            target_node_count: None,
        }
    }
}

impl GenConfig {
    fn validate(&self) -> Result<()> {
        if self.max_width == 0 {
            return Err(Error::Config("max_width must be at least 1".into()));
        }
        let (ilo, ihi) = self.id_length_range;
        if ilo == 0 || ilo > ihi {
            return Err(Error::Config(format!("bad id_length_range ({ilo}, {ihi})")));
        }
        let (plo, phi) = self.pairs_per_node_range;
        if plo > phi {
            return Err(Error::Config(format!("bad pairs_per_node_range ({plo}, {phi})")));
        }
        if self.target_node_count == Some(0) {
            return Err(Error::Config("target_node_count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Shape summary of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub node_count: u32,
    /// Edge count of the longest root-to-leaf path. A lone node has height 0.
    pub height: u32,
    /// Largest child list in the tree. A lone node has width 0.
    pub max_observed_width: u32,
}

/// Generate a structure tree. Draw order is fixed and documented: a node
/// draws its id, then its pairs, then its child count, then recurses into
/// each child, so a given seed reproduces the same tree everywhere.
pub fn generate_structure(config: &GenConfig) -> Result<StructNode> {
    config.validate()?;
    let mut rng = DetRng::from_seed(config.seed);
    let mut minted = HashSet::new();
    match config.target_node_count {
        None => build_sampled(config, &mut rng, &mut minted, 0),
        Some(target) => build_targeted(config, &mut rng, &mut minted, target),
    }
}

fn mint_node_fields(
    config: &GenConfig,
    rng: &mut DetRng,
    minted: &mut HashSet<String>,
) -> Result<(String, Vec<(String, String)>)> {
    let (llo, lhi) = config.id_length_range;
    let id = rng.mint(LOWER, llo, lhi, minted)?;
    let (plo, phi) = config.pairs_per_node_range;
    let pair_count = rng.range_usize(plo, phi);
    let mut keys = HashSet::new();
    let mut pairs = Vec::with_capacity(pair_count);
    for _ in 0..pair_count {
        let key = rng.mint(UPPER, llo, lhi, &mut keys)?;
        let val = rng.mint(LOWER, llo, lhi, minted)?;
        pairs.push((key, val));
    }
    Ok((id, pairs))
}

fn build_sampled(
    config: &GenConfig,
    rng: &mut DetRng,
    minted: &mut HashSet<String>,
    depth: u32,
) -> Result<StructNode> {
    let (id, pairs) = mint_node_fields(config, rng, minted)?;
    let child_count = if depth >= config.max_depth {
        0
    } else if depth == 0 {
        // The root always branches so no format degenerates to one line.
        rng.range_u64(1, config.max_width as u64) as usize
    } else {
        rng.range_u64(0, config.max_width as u64) as usize
    };
    let mut children = Vec::with_capacity(child_count);
    for _ in 0..child_count {
        children.push(build_sampled(config, rng, minted, depth + 1)?);
    }
    Ok(StructNode { id, pairs, children })
}

fn build_targeted(
    config: &GenConfig,
    rng: &mut DetRng,
    minted: &mut HashSet<String>,
    target: u32,
) -> Result<StructNode> {
    struct Slot {
        id: String,
        pairs: Vec<(String, String)>,
        children: Vec<usize>,
        depth: u32,
    }
    let mut slots: Vec<Slot> = Vec::new();
    let (id, pairs) = mint_node_fields(config, rng, minted)?;
    slots.push(Slot { id, pairs, children: Vec::new(), depth: 0 });
    while (slots.len() as u32) < target {
        // Eligible parents in index order keeps the choice deterministic.
        let eligible: Vec<usize> = (0..slots.len())
            .filter(|&i| {
                slots[i].depth < config.max_depth
                    && slots[i].children.len() < config.max_width as usize
            })
            .collect();
        if eligible.is_empty() {
            break;
        }
        // The first insertion goes under the root, matching the branching
        // rule of sampled mode.
        let parent = if slots.len() == 1 { 0 } else { *rng.choose(&eligible) };
        let (id, pairs) = mint_node_fields(config, rng, minted)?;
        let depth = slots[parent].depth + 1;
        let index = slots.len();
        slots.push(Slot { id, pairs, children: Vec::new(), depth });
        slots[parent].children.push(index);
    }
    fn materialize(slots: &[Slot], index: usize) -> StructNode {
        StructNode {
            id: slots[index].id.clone(),
            pairs: slots[index].pairs.clone(),
            children: slots[index].children.iter().map(|&c| materialize(slots, c)).collect(),
        }
    }
    Ok(materialize(&slots, 0))
}

/// Nodes in depth-first preorder (parent before children, children in order).
pub fn preorder(root: &StructNode) -> Vec<&StructNode> {
    let mut out = Vec::new();
    fn walk<'a>(n: &'a StructNode, out: &mut Vec<&'a StructNode>) {
        out.push(n);
        for c in &n.children {
            walk(c, out);
        }
    }
    walk(root, &mut out);
    out
}

/// Compute the shape summary of a tree.
pub fn stats_of(root: &StructNode) -> TreeStats {
    fn walk(n: &StructNode) -> (u32, u32, u32) {
        let mut count = 1;
        let mut height = 0;
        let mut width = n.children.len() as u32;
        for c in &n.children {
            let (cc, ch, cw) = walk(c);
            count += cc;
            height = height.max(ch + 1);
            width = width.max(cw);
        }
        (count, height, width)
    }
    let (node_count, height, max_observed_width) = walk(root);
    TreeStats { node_count, height, max_observed_width }
}

/// Map from node id to node, erroring on duplicate ids.
pub fn index_by_id(root: &StructNode) -> Result<BTreeMap<&str, &StructNode>> {
    let mut map = BTreeMap::new();
    for n in preorder(root) {
        if map.insert(n.id.as_str(), n).is_some() {
            return Err(Error::DuplicateId(n.id.clone()));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, max_depth: u32, max_width: u32) -> GenConfig {
        GenConfig { seed, max_depth, max_width, ..GenConfig::default() }
    }

    #[test]
    fn depth_zero_is_a_lone_node() {
        let t = generate_structure(&cfg(1, 0, 3)).unwrap();
        assert!(t.children.is_empty());
        assert_eq!(stats_of(&t), TreeStats { node_count: 1, height: 0, max_observed_width: 0 });
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_structure(&cfg(42, 3, 3)).unwrap();
        let b = generate_structure(&cfg(42, 3, 3)).unwrap();
        assert_eq!(a, b);
        let c = generate_structure(&cfg(43, 3, 3)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bounds_hold_across_seeds() {
        for seed in 0..100 {
            let t = generate_structure(&cfg(seed, 2, 2)).unwrap();
            let s = stats_of(&t);
            assert!(s.node_count <= 7, "seed {seed}: {s:?}");
            assert!(s.height <= 2, "seed {seed}: {s:?}");
            assert!(s.max_observed_width <= 2, "seed {seed}: {s:?}");
        }
    }

    #[test]
    fn root_branches_when_depth_allows() {
        for seed in 0..100 {
            let t = generate_structure(&cfg(seed, 3, 3)).unwrap();
            assert!(!t.children.is_empty(), "seed {seed} grew a childless root");
        }
    }

    #[test]
    fn stats_of_hand_trees() {
        let chain = node("a", &[], vec![node("b", &[], vec![node("c", &[], vec![])])]);
        assert_eq!(
            stats_of(&chain),
            TreeStats { node_count: 3, height: 2, max_observed_width: 1 }
        );
        let fork = node("r", &[], vec![node("x", &[], vec![]), node("y", &[], vec![])]);
        assert_eq!(
            stats_of(&fork),
            TreeStats { node_count: 3, height: 1, max_observed_width: 2 }
        );
    }

    #[test]
    fn preorder_is_parent_first() {
        let t = node(
            "r",
            &[],
            vec![node("a", &[], vec![node("b", &[], vec![])]), node("c", &[], vec![])],
        );
        let ids: Vec<&str> = preorder(&t).iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["r", "a", "b", "c"]);
    }

    #[test]
    fn index_by_id_finds_every_node() {
        let t = generate_structure(&cfg(7, 3, 3)).unwrap();
        let map = index_by_id(&t).unwrap();
        assert_eq!(map.len() as u32, stats_of(&t).node_count);
        assert!(map.contains_key(t.id.as_str()));
        assert!(map.get("zzzz-not-a-token").is_none());
    }

    #[test]
    fn index_by_id_rejects_duplicates() {
        let t = node("a", &[], vec![node("a", &[], vec![])]);
        assert!(matches!(index_by_id(&t), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn tokens_are_unique_and_well_formed() {
        for seed in 0..200 {
            let config = GenConfig { seed, ..GenConfig::default() };
            let t = generate_structure(&config).unwrap();
            let mut lower = HashSet::new();
            for n in preorder(&t) {
                assert!(lower.insert(n.id.as_str()), "duplicate token {}", n.id);
                assert!(n.id.bytes().all(|b| b.is_ascii_lowercase()));
                assert!((3..=8).contains(&n.id.len()));
                let (plo, phi) = config.pairs_per_node_range;
                assert!((plo..=phi).contains(&n.pairs.len()));
                let mut keys = HashSet::new();
                for (k, v) in &n.pairs {
                    assert!(keys.insert(k.as_str()), "duplicate key {k} in node {}", n.id);
                    assert!(k.bytes().all(|b| b.is_ascii_uppercase()));
                    assert!(lower.insert(v.as_str()), "duplicate token {v}");
                    assert!(v.bytes().all(|b| b.is_ascii_lowercase()));
                }
            }
        }
    }

    #[test]
    fn target_mode_hits_or_saturates() {
        let reached = generate_structure(&GenConfig {
            seed: 5,
            max_depth: 10,
            max_width: 3,
            target_node_count: Some(10),
            ..GenConfig::default()
        })
        .unwrap();
        assert_eq!(stats_of(&reached).node_count, 10);

        // Capacity for depth 2, width 3 is 1 + 3 + 9 = 13 nodes.
        let capped = generate_structure(&GenConfig {
            seed: 5,
            max_depth: 2,
            max_width: 3,
            target_node_count: Some(100),
            ..GenConfig::default()
        })
        .unwrap();
        let s = stats_of(&capped);
        assert_eq!(s.node_count, 13);
        assert!(s.height <= 2);

        let lone = generate_structure(&GenConfig {
            seed: 5,
            target_node_count: Some(1),
            ..GenConfig::default()
        })
        .unwrap();
        assert_eq!(stats_of(&lone).node_count, 1);
    }

    #[test]
    fn target_mode_is_deterministic() {
        let mk = || {
            generate_structure(&GenConfig {
                seed: 9,
                max_depth: 6,
                max_width: 4,
                target_node_count: Some(25),
                ..GenConfig::default()
            })
            .unwrap()
        };
        assert_eq!(mk(), mk());
    }

    #[test]
    fn tiny_token_space_exhausts() {
        let err = generate_structure(&GenConfig {
            seed: 1,
            max_depth: 10,
            max_width: 3,
            id_length_range: (1, 1),
            pairs_per_node_range: (1, 1),
            target_node_count: Some(20),
            ..GenConfig::default()
        })
        .unwrap_err();
        assert!(matches!(err, Error::IdSpaceExhausted { .. }));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad_width = GenConfig { max_width: 0, ..GenConfig::default() };
        assert!(matches!(generate_structure(&bad_width), Err(Error::Config(_))));
        let bad_range = GenConfig { id_length_range: (5, 2), ..GenConfig::default() };
        assert!(matches!(generate_structure(&bad_range), Err(Error::Config(_))));
        let bad_pairs = GenConfig { pairs_per_node_range: (3, 1), ..GenConfig::default() };
        assert!(matches!(generate_structure(&bad_pairs), Err(Error::Config(_))));
        let bad_target = GenConfig { target_node_count: Some(0), ..GenConfig::default() };
        assert!(matches!(generate_structure(&bad_target), Err(Error::Config(_))));
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BayId, BlockId, DataError, DeckPosition, SizeClass};

/// A stowage block: the unit of assignment in master planning.
///
/// Capacities follow the usual convention that the TEU capacity also
/// bounds the number of 20-foot boxes, while `cap_40` counts 40-foot
/// slots (each worth two TEU).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub id: BlockId,
    pub bay: BayId,
    pub deck: DeckPosition,
    /// TEU capacity, which equally bounds the count of 20-foot boxes.
    pub cap_teu: u32,
    /// Number of 40-foot slots.
    pub cap_40: u32,
    /// Number of reefer plugs.
    pub cap_reefer: u32,
    /// Maximum cargo weight in tonnes.
    pub weight_max: f64,
    /// Longitudinal centre of gravity of cargo stowed here, metres.
    pub cg_l: f64,
    /// Vertical centre of gravity, metres.
    pub cg_v: f64,
    /// Transversal centre of gravity, metres (negative to port).
    pub cg_t: f64,
}

/// A transverse section of the vessel holding a group of blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bay {
    pub id: BayId,
    pub blocks: Vec<BlockId>,
    /// Lightship weight attributed to this bay, tonnes.
    pub lightship_weight: f64,
    pub cg_l_bar: f64,
    pub cg_v_bar: f64,
    pub cg_t_bar: f64,
    /// Minimum cumulative weight bow-to-stern through this bay, tonnes.
    pub shear_min: f64,
    /// Maximum cumulative weight bow-to-stern through this bay, tonnes.
    pub shear_max: f64,
    /// For each on-deck block of the bay, the below-deck blocks whose
    /// hatch covers it sits on.
    pub hatch_cover_map: BTreeMap<BlockId, Vec<BlockId>>,
}

/// Static description of a vessel: geometry, capacities and the
/// stability envelope. Constructed through [`VesselProfile::new`],
/// which validates invariants and fills in the derived fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VesselProfile {
    pub name: String,
    /// Bays ordered bow to stern; bay ids equal their position here.
    pub bays: Vec<Bay>,
    /// Flat block table indexed by `BlockId`.
    pub blocks: Vec<Block>,
    /// Consecutive bay pairs (b, b+1), the crane "long" pairs.
    pub adjacent_bay_pairs: Vec<(BayId, BayId)>,
    pub lcg_min: f64,
    pub lcg_max: f64,
    pub vcg_max: f64,
    pub tcg_min: f64,
    pub tcg_max: f64,
    /// Sum of block TEU capacities.
    pub teu_capacity: u32,
    pub size_class: SizeClass,
}

/// Serde-facing description of one block within a bay.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub deck: DeckPosition,
    pub cap_teu: u32,
    pub cap_40: u32,
    pub cap_reefer: u32,
    pub weight_max: f64,
    pub cg_l: f64,
    pub cg_v: f64,
    pub cg_t: f64,
}

/// Serde-facing hatch cover entry; indices are local to the bay's
/// block list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HatchCoverSpec {
    /// Local index of the covering on-deck block.
    pub over: u32,
    /// Local indices of the covered below-deck blocks.
    pub under: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaySpec {
    pub lightship_weight: f64,
    pub cg_l_bar: f64,
    pub cg_v_bar: f64,
    pub cg_t_bar: f64,
    pub shear_min: f64,
    pub shear_max: f64,
    pub blocks: Vec<BlockSpec>,
    pub hatch_covers: Vec<HatchCoverSpec>,
}

/// Serde-facing vessel description; see `docs/formats.md`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselSpec {
    pub name: String,
    pub lcg_min: f64,
    pub lcg_max: f64,
    pub vcg_max: f64,
    pub tcg_min: f64,
    pub tcg_max: f64,
    pub bays: Vec<BaySpec>,
}

impl VesselProfile {
    /// Builds and validates a profile from its serde-facing spec.
    pub fn new(spec: VesselSpec) -> Result<VesselProfile, DataError> {
        if spec.bays.is_empty() {
            return Err(DataError::invalid("vessel must have at least one bay"));
        }
        if spec.lcg_min > spec.lcg_max {
            return Err(DataError::invalid("lcg_min > lcg_max"));
        }
        if spec.tcg_min > spec.tcg_max {
            return Err(DataError::invalid("tcg_min > tcg_max"));
        }
        for v in [
            spec.lcg_min,
            spec.lcg_max,
            spec.vcg_max,
            spec.tcg_min,
            spec.tcg_max,
        ] {
            if !v.is_finite() {
                return Err(DataError::invalid("non-finite stability limit"));
            }
        }

        let mut bays = Vec::with_capacity(spec.bays.len());
        let mut blocks: Vec<Block> = Vec::new();
        for (bi, bay_spec) in spec.bays.iter().enumerate() {
            let bay_id = BayId(bi as u32);
            if bay_spec.blocks.is_empty() {
                return Err(DataError::invalid(format!("bay {bi} has no blocks")));
            }
            if bay_spec.shear_min > bay_spec.shear_max {
                return Err(DataError::invalid(format!(
                    "bay {bi}: shear_min > shear_max"
                )));
            }
            if bay_spec.lightship_weight < 0.0 || !bay_spec.lightship_weight.is_finite() {
                return Err(DataError::invalid(format!(
                    "bay {bi}: lightship weight must be finite and >= 0"
                )));
            }

            let mut bay_blocks = Vec::with_capacity(bay_spec.blocks.len());
            for (li, bs) in bay_spec.blocks.iter().enumerate() {
                if 2 * bs.cap_40 > bs.cap_teu {
                    return Err(DataError::invalid(format!(
                        "bay {bi} block {li}: 2*cap_40 exceeds cap_teu"
                    )));
                }
                if bs.weight_max <= 0.0 || !bs.weight_max.is_finite() {
                    return Err(DataError::invalid(format!(
                        "bay {bi} block {li}: weight_max must be positive"
                    )));
                }
                for v in [bs.cg_l, bs.cg_v, bs.cg_t] {
                    if !v.is_finite() {
                        return Err(DataError::invalid(format!(
                            "bay {bi} block {li}: non-finite centre of gravity"
                        )));
                    }
                }
                let id = BlockId(blocks.len() as u32);
                bay_blocks.push(id);
                blocks.push(Block {
                    id,
                    bay: bay_id,
                    deck: bs.deck,
                    cap_teu: bs.cap_teu,
                    cap_40: bs.cap_40,
                    cap_reefer: bs.cap_reefer,
                    weight_max: bs.weight_max,
                    cg_l: bs.cg_l,
                    cg_v: bs.cg_v,
                    cg_t: bs.cg_t,
                });
            }

            // Hatch cover map keys must be exactly the bay's on-deck blocks.
            let mut hatch_cover_map = BTreeMap::new();
            for hc in &bay_spec.hatch_covers {
                let over_local = hc.over as usize;
                let over = *bay_blocks.get(over_local).ok_or_else(|| {
                    DataError::invalid(format!("bay {bi}: hatch cover over-index out of range"))
                })?;
                if blocks[over.idx()].deck != DeckPosition::OnDeck {
                    return Err(DataError::invalid(format!(
                        "bay {bi}: hatch cover block {over_local} is not on deck"
                    )));
                }
                let mut under = Vec::with_capacity(hc.under.len());
                for &u in &hc.under {
                    let ub = *bay_blocks.get(u as usize).ok_or_else(|| {
                        DataError::invalid(format!(
                            "bay {bi}: hatch cover under-index out of range"
                        ))
                    })?;
                    if blocks[ub.idx()].deck != DeckPosition::BelowDeck {
                        return Err(DataError::invalid(format!(
                            "bay {bi}: hatch cover under-block {u} is not below deck"
                        )));
                    }
                    under.push(ub);
                }
                if hatch_cover_map.insert(over, under).is_some() {
                    return Err(DataError::invalid(format!(
                        "bay {bi}: duplicate hatch cover entry for block {over_local}"
                    )));
                }
            }
            let on_deck_count = bay_blocks
                .iter()
                .filter(|b| blocks[b.idx()].deck == DeckPosition::OnDeck)
                .count();
            if hatch_cover_map.len() != on_deck_count {
                return Err(DataError::invalid(format!(
                    "bay {bi}: hatch_covers must list every on-deck block exactly once"
                )));
            }

            bays.push(Bay {
                id: bay_id,
                blocks: bay_blocks,
                lightship_weight: bay_spec.lightship_weight,
                cg_l_bar: bay_spec.cg_l_bar,
                cg_v_bar: bay_spec.cg_v_bar,
                cg_t_bar: bay_spec.cg_t_bar,
                shear_min: bay_spec.shear_min,
                shear_max: bay_spec.shear_max,
                hatch_cover_map,
            });
        }

        let adjacent_bay_pairs = (1..bays.len())
            .map(|b| (BayId(b as u32 - 1), BayId(b as u32)))
            .collect();
        let teu_capacity = blocks.iter().map(|b| b.cap_teu).sum();

        Ok(VesselProfile {
            name: spec.name,
            bays,
            blocks,
            adjacent_bay_pairs,
            lcg_min: spec.lcg_min,
            lcg_max: spec.lcg_max,
            vcg_max: spec.vcg_max,
            tcg_min: spec.tcg_min,
            tcg_max: spec.tcg_max,
            teu_capacity,
            size_class: SizeClass::from_teu_capacity(teu_capacity),
        })
    }

    /// Reconstructs the serde-facing spec (inverse of [`VesselProfile::new`]).
    pub fn to_spec(&self) -> VesselSpec {
        VesselSpec {
            name: self.name.clone(),
            lcg_min: self.lcg_min,
            lcg_max: self.lcg_max,
            vcg_max: self.vcg_max,
            tcg_min: self.tcg_min,
            tcg_max: self.tcg_max,
            bays: self
                .bays
                .iter()
                .map(|bay| {
                    let base = bay.blocks[0].0;
                    BaySpec {
                        lightship_weight: bay.lightship_weight,
                        cg_l_bar: bay.cg_l_bar,
                        cg_v_bar: bay.cg_v_bar,
                        cg_t_bar: bay.cg_t_bar,
                        shear_min: bay.shear_min,
                        shear_max: bay.shear_max,
                        blocks: bay
                            .blocks
                            .iter()
                            .map(|&b| {
                                let blk = &self.blocks[b.idx()];
                                BlockSpec {
                                    deck: blk.deck,
                                    cap_teu: blk.cap_teu,
                                    cap_40: blk.cap_40,
                                    cap_reefer: blk.cap_reefer,
                                    weight_max: blk.weight_max,
                                    cg_l: blk.cg_l,
                                    cg_v: blk.cg_v,
                                    cg_t: blk.cg_t,
                                }
                            })
                            .collect(),
                        hatch_covers: bay
                            .hatch_cover_map
                            .iter()
                            .map(|(over, under)| HatchCoverSpec {
                                over: over.0 - base,
                                under: under.iter().map(|u| u.0 - base).collect(),
                            })
                            .collect(),
                    }
                })
                .collect(),
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_bays(&self) -> usize {
        self.bays.len()
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.idx()]
    }

    /// Total lightship weight over all bays, tonnes.
    pub fn lightship_weight(&self) -> f64 {
        self.bays.iter().map(|b| b.lightship_weight).sum()
    }

    /// Lightship moment for the given CG axis selector.
    pub fn lightship_moment(&self, axis: impl Fn(&Bay) -> f64) -> f64 {
        self.bays
            .iter()
            .map(|b| b.lightship_weight * axis(b))
            .sum()
    }

    pub fn on_deck_blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks
            .iter()
            .filter(|b| b.deck == DeckPosition::OnDeck)
    }

    /// Below-deck blocks covered by the given on-deck block.
    pub fn covered_blocks(&self, over: BlockId) -> &[BlockId] {
        let bay = self.blocks[over.idx()].bay;
        self.bays[bay.idx()]
            .hatch_cover_map
            .get(&over)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_bay_spec() -> VesselSpec {
        VesselSpec {
            name: "t".into(),
            lcg_min: -10.0,
            lcg_max: 10.0,
            vcg_max: 20.0,
            tcg_min: -2.0,
            tcg_max: 2.0,
            bays: vec![BaySpec {
                lightship_weight: 100.0,
                cg_l_bar: 0.0,
                cg_v_bar: 5.0,
                cg_t_bar: 0.0,
                shear_min: 0.0,
                shear_max: 1e6,
                blocks: vec![
                    BlockSpec {
                        deck: DeckPosition::OnDeck,
                        cap_teu: 10,
                        cap_40: 5,
                        cap_reefer: 2,
                        weight_max: 200.0,
                        cg_l: 0.0,
                        cg_v: 12.0,
                        cg_t: 0.0,
                    },
                    BlockSpec {
                        deck: DeckPosition::BelowDeck,
                        cap_teu: 10,
                        cap_40: 5,
                        cap_reefer: 2,
                        weight_max: 200.0,
                        cg_l: 0.0,
                        cg_v: 4.0,
                        cg_t: 0.0,
                    },
                ],
                hatch_covers: vec![HatchCoverSpec {
                    over: 0,
                    under: vec![1],
                }],
            }],
        }
    }

    #[test]
    fn builds_and_derives() {
        let v = VesselProfile::new(one_bay_spec()).unwrap();
        assert_eq!(v.num_blocks(), 2);
        assert_eq!(v.teu_capacity, 20);
        assert_eq!(v.size_class, SizeClass::S);
        assert!(v.adjacent_bay_pairs.is_empty());
        assert_eq!(v.covered_blocks(BlockId(0)), &[BlockId(1)]);
    }

    #[test]
    fn rejects_overfull_forty_capacity() {
        let mut spec = one_bay_spec();
        spec.bays[0].blocks[0].cap_40 = 6;
        assert!(VesselProfile::new(spec).is_err());
    }

    #[test]
    fn rejects_missing_hatch_entry() {
        let mut spec = one_bay_spec();
        spec.bays[0].hatch_covers.clear();
        assert!(VesselProfile::new(spec).is_err());
    }

    #[test]
    fn rejects_inverted_shear_envelope() {
        let mut spec = one_bay_spec();
        spec.bays[0].shear_min = 2.0;
        spec.bays[0].shear_max = 1.0;
        assert!(VesselProfile::new(spec).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let v = VesselProfile::new(one_bay_spec()).unwrap();
        let v2 = VesselProfile::new(v.to_spec()).unwrap();
        assert_eq!(v, v2);
    }

    #[test]
    fn size_class_boundaries() {
        assert_eq!(SizeClass::from_teu_capacity(2_499), SizeClass::S);
        assert_eq!(SizeClass::from_teu_capacity(2_500), SizeClass::M);
        assert_eq!(SizeClass::from_teu_capacity(15_000), SizeClass::M);
        assert_eq!(SizeClass::from_teu_capacity(15_001), SizeClass::L);
    }
}

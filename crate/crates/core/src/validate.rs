//! Independent solution checker.
//!
//! Everything here is recomputed by direct summation over a
//! [`PlanAssignment`]; no code or matrices are shared with the model
//! assemblers, so agreement between a solver objective and
//! [`objective_of`] genuinely cross-checks both sides.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{
    BlockId, DeckPosition, Instance, PlanAssignment, PortIndex, Transport, TypeId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// All constraint families, including stability and shear; hatch
    /// overstows are allowed and reported.
    Full,
    /// Capacity families only, with hatch overstowage strictly
    /// forbidden. No stability or shear checks.
    Reduced,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Variant::Full),
            "reduced" => Ok(Variant::Reduced),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Full => write!(f, "full"),
            Variant::Reduced => write!(f, "reduced"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("plan references unknown block {0}")]
    UnknownBlock(BlockId),
    #[error("plan references unknown type {0}")]
    UnknownType(TypeId),
    #[error("plan transport {0} out of range for {1} ports")]
    BadTransport(Transport, u32),
    #[error("port {0} out of range")]
    PortOutOfRange(PortIndex),
}

/// One violated quantity: where, and by how much (model units).
#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub key: String,
    pub violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HatchCount {
    pub port: u32,
    pub block: u32,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub variant: Variant,
    pub tolerance: f64,
    pub load_all: Vec<Residual>,
    pub release: Vec<Residual>,
    pub capacity: Vec<Residual>,
    pub weight: Vec<Residual>,
    pub lcg: Vec<Residual>,
    pub tcg: Vec<Residual>,
    pub vcg: Vec<Residual>,
    pub shear: Vec<Residual>,
    /// Reduced variant only: hatch-overstow counts that must be zero.
    pub zero_overstow: Vec<Residual>,
    /// Hatch-overstow counts per (port, on-deck block), nonzero only.
    pub hatch_overstow: Vec<HatchCount>,
    /// Long-crane moves per port (busiest adjacent bay pair).
    pub makespan: Vec<u64>,
    pub feasible: bool,
}

impl ValidationReport {
    pub fn total_hatch_overstows(&self) -> u64 {
        self.hatch_overstow.iter().map(|h| h.count).sum()
    }

    pub fn total_makespan(&self) -> u64 {
        self.makespan.iter().sum()
    }

    pub fn worst_violation(&self) -> f64 {
        let families = [
            &self.load_all,
            &self.release,
            &self.capacity,
            &self.weight,
            &self.lcg,
            &self.tcg,
            &self.vcg,
            &self.shear,
            &self.zero_overstow,
        ];
        families
            .iter()
            .flat_map(|f| f.iter())
            .map(|r| r.violation)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "validation ({}, tol {:.1e}): {}",
            self.variant,
            self.tolerance,
            if self.feasible { "FEASIBLE" } else { "INFEASIBLE" }
        )?;
        let families: [(&str, &Vec<Residual>); 9] = [
            ("load-all", &self.load_all),
            ("release", &self.release),
            ("capacity", &self.capacity),
            ("weight", &self.weight),
            ("lcg", &self.lcg),
            ("tcg", &self.tcg),
            ("vcg", &self.vcg),
            ("shear", &self.shear),
            ("zero-overstow", &self.zero_overstow),
        ];
        for (name, list) in families {
            if list.is_empty() {
                continue;
            }
            writeln!(f, "  {name}: {} violation(s)", list.len())?;
            for r in list.iter().take(10) {
                writeln!(f, "    {:<28} {:.6}", r.key, r.violation)?;
            }
            if list.len() > 10 {
                writeln!(f, "    ... {} more", list.len() - 10)?;
            }
        }
        writeln!(
            f,
            "  hatch overstows: {}  makespan: {:?} (total {})",
            self.total_hatch_overstows(),
            self.makespan,
            self.total_makespan()
        )
    }
}

fn check_structure(inst: &Instance, plan: &PlanAssignment) -> Result<(), ValidateError> {
    for &(ty, t, l) in plan.x.keys() {
        if ty.idx() >= inst.types.len() {
            return Err(ValidateError::UnknownType(ty));
        }
        if l.idx() >= inst.vessel.num_blocks() {
            return Err(ValidateError::UnknownBlock(l));
        }
        if !(t.origin < t.destination && t.destination.0 < inst.num_ports) {
            return Err(ValidateError::BadTransport(t, inst.num_ports));
        }
    }
    Ok(())
}

/// Crane moves (loads plus discharges) per block at port `p`. Release
/// cargo is already stowed at port 0 and costs no moves there.
fn moves_per_block(inst: &Instance, plan: &PlanAssignment, p: PortIndex) -> Vec<u64> {
    let mut moves = vec![0u64; inst.vessel.num_blocks()];
    for (&(ty, t, l), &count) in &plan.x {
        if inst.moves_at(ty, t, p) {
            moves[l.idx()] += count as u64;
        }
    }
    moves
}

/// Hatch-overstow counts at `p` per on-deck block: the number of
/// overstowing containers sitting on an on-deck block whose covered
/// below-deck blocks see any active move.
pub fn hatch_overstow_count(
    inst: &Instance,
    plan: &PlanAssignment,
    p: PortIndex,
) -> Result<Vec<(BlockId, u64)>, ValidateError> {
    if p.0 >= inst.num_ports {
        return Err(ValidateError::PortOutOfRange(p));
    }
    check_structure(inst, plan)?;
    let moves = moves_per_block(inst, plan, p);
    let mut out = Vec::new();
    for block in inst.vessel.blocks.iter() {
        if block.deck != DeckPosition::OnDeck {
            continue;
        }
        let below_active: u64 = inst
            .vessel
            .covered_blocks(block.id)
            .iter()
            .map(|u| moves[u.idx()])
            .sum();
        let count = if below_active > 0 {
            plan.x
                .iter()
                .filter(|(&(_, t, l), _)| l == block.id && t.overstowing_at(p))
                .map(|(_, &c)| c as u64)
                .sum()
        } else {
            0
        };
        out.push((block.id, count));
    }
    Ok(out)
}

/// Long-crane makespan at `p`: moves in the busiest adjacent bay pair.
pub fn makespan_at(
    inst: &Instance,
    plan: &PlanAssignment,
    p: PortIndex,
) -> Result<u64, ValidateError> {
    if p.0 >= inst.num_ports {
        return Err(ValidateError::PortOutOfRange(p));
    }
    check_structure(inst, plan)?;
    let moves = moves_per_block(inst, plan, p);
    let per_bay: Vec<u64> = inst
        .vessel
        .bays
        .iter()
        .map(|bay| bay.blocks.iter().map(|b| moves[b.idx()]).sum())
        .collect();
    Ok(inst
        .vessel
        .adjacent_bay_pairs
        .iter()
        .map(|&(a, b)| per_bay[a.idx()] + per_bay[b.idx()])
        .max()
        .unwrap_or(0))
}

/// Transversal centre of gravity of the loaded vessel leaving `p`
/// (cargo aboard plus lightship), metres.
pub fn tcg_of(inst: &Instance, plan: &PlanAssignment, p: PortIndex) -> Result<f64, ValidateError> {
    if p.0 + 1 >= inst.num_ports {
        return Err(ValidateError::PortOutOfRange(p));
    }
    check_structure(inst, plan)?;
    let mut weight = inst.vessel.lightship_weight();
    let mut moment = inst.vessel.lightship_moment(|b| b.cg_t_bar);
    for (&(ty, t, l), &count) in &plan.x {
        if t.onboard_at(p) {
            let w = count as f64 * inst.types[ty.idx()].weight;
            weight += w;
            moment += w * inst.vessel.block(l).cg_t;
        }
    }
    if weight == 0.0 {
        return Ok(0.0);
    }
    Ok(moment / weight)
}

/// Port-side minus starboard-side weight aboard leaving `p`, tonnes.
/// Port side is negative `cg_t`; weight exactly on the centreline
/// counts for neither side.
pub fn side_balance_of(
    inst: &Instance,
    plan: &PlanAssignment,
    p: PortIndex,
) -> Result<f64, ValidateError> {
    if p.0 + 1 >= inst.num_ports {
        return Err(ValidateError::PortOutOfRange(p));
    }
    check_structure(inst, plan)?;
    let mut port = 0.0;
    let mut starboard = 0.0;
    for bay in &inst.vessel.bays {
        if bay.cg_t_bar < 0.0 {
            port += bay.lightship_weight;
        } else if bay.cg_t_bar > 0.0 {
            starboard += bay.lightship_weight;
        }
    }
    for (&(ty, t, l), &count) in &plan.x {
        if t.onboard_at(p) {
            let w = count as f64 * inst.types[ty.idx()].weight;
            let cg = inst.vessel.block(l).cg_t;
            if cg < 0.0 {
                port += w;
            } else if cg > 0.0 {
                starboard += w;
            }
        }
    }
    Ok(port - starboard)
}

/// Validator-side objective: cost_makespan * total makespan plus
/// cost_overstow * total hatch overstows.
pub fn objective_of(inst: &Instance, plan: &PlanAssignment) -> Result<f64, ValidateError> {
    let mut mk = 0u64;
    let mut ho = 0u64;
    for p in 0..inst.num_ports {
        let p = PortIndex(p);
        mk += makespan_at(inst, plan, p)?;
        ho += hatch_overstow_count(inst, plan, p)?
            .iter()
            .map(|&(_, c)| c)
            .sum::<u64>();
    }
    Ok(inst.cost_makespan * mk as f64 + inst.cost_overstow * ho as f64)
}

/// Recomputes every constraint family for `plan` from first
/// principles.
pub fn validate(
    inst: &Instance,
    plan: &PlanAssignment,
    variant: Variant,
    tol: f64,
) -> Result<ValidationReport, ValidateError> {
    check_structure(inst, plan)?;
    let nblocks = inst.vessel.num_blocks();
    let last_leg = inst.num_ports - 1; // legs are 0..last_leg

    let mut report = ValidationReport {
        variant,
        tolerance: tol,
        load_all: Vec::new(),
        release: Vec::new(),
        capacity: Vec::new(),
        weight: Vec::new(),
        lcg: Vec::new(),
        tcg: Vec::new(),
        vcg: Vec::new(),
        shear: Vec::new(),
        zero_overstow: Vec::new(),
        hatch_overstow: Vec::new(),
        makespan: Vec::new(),
        feasible: true,
    };

    // Load-all: per (type, transport), the stowed total must match the
    // demand (loadlist plus release).
    {
        let mut stowed: BTreeMap<(TypeId, Transport), u64> = BTreeMap::new();
        for (&(ty, t, _), &count) in &plan.x {
            *stowed.entry((ty, t)).or_insert(0) += count as u64;
        }
        let demand = inst.demand_pairs();
        let mut keys: Vec<(TypeId, Transport)> = stowed
            .keys()
            .copied()
            .chain(demand.keys().copied())
            .collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            let have = stowed.get(&key).copied().unwrap_or(0) as f64;
            let want = demand.get(&key).map(|d| d.total() as f64).unwrap_or(0.0);
            let viol = (have - want).abs();
            if viol > 0.0 {
                report.load_all.push(Residual {
                    key: format!("type{} {}", key.0, key.1),
                    violation: viol,
                });
            }
        }
    }

    // Release: fixed placements must appear exactly, and release
    // transports must not stow anywhere else.
    {
        let mut fixed_pairs: BTreeMap<(TypeId, Transport), BTreeMap<BlockId, u32>> =
            BTreeMap::new();
        for (&(ty, dest, block), &count) in &inst.release {
            let t = Transport {
                origin: PortIndex(0),
                destination: dest,
            };
            fixed_pairs.entry((ty, t)).or_default().insert(block, count);
        }
        for ((ty, t), blocks) in &fixed_pairs {
            for l in 0..nblocks {
                let l = BlockId(l as u32);
                let want = blocks.get(&l).copied().unwrap_or(0) as f64;
                let have = plan.count(*ty, *t, l) as f64;
                let viol = (have - want).abs();
                if viol > 0.0 {
                    report.release.push(Residual {
                        key: format!("type{ty} {t} block{l}"),
                        violation: viol,
                    });
                }
            }
        }
    }

    // Per-leg per-block capacity and weight families.
    for p in 0..last_leg {
        let p = PortIndex(p);
        let mut teu = vec![0.0f64; nblocks];
        let mut c20 = vec![0.0f64; nblocks];
        let mut c40 = vec![0.0f64; nblocks];
        let mut reefer = vec![0.0f64; nblocks];
        let mut w = vec![0.0f64; nblocks];
        for (&(ty, t, l), &count) in &plan.x {
            if !t.onboard_at(p) {
                continue;
            }
            let ct = &inst.types[ty.idx()];
            let c = count as f64;
            teu[l.idx()] += c * ct.teu as f64;
            if ct.teu == 1 {
                c20[l.idx()] += c;
            } else {
                c40[l.idx()] += c;
            }
            if ct.reefer {
                reefer[l.idx()] += c;
            }
            w[l.idx()] += c * ct.weight;
        }
        for l in 0..nblocks {
            let block = &inst.vessel.blocks[l];
            for (tag, have, cap) in [
                ("teu", teu[l], block.cap_teu as f64),
                ("20ft", c20[l], block.cap_teu as f64),
                ("40ft", c40[l], block.cap_40 as f64),
                ("reefer", reefer[l], block.cap_reefer as f64),
            ] {
                let viol = have - cap;
                if viol > 0.0 {
                    report.capacity.push(Residual {
                        key: format!("{tag} p{p} block{l}"),
                        violation: viol,
                    });
                }
            }
            let viol = w[l] - block.weight_max;
            if viol > 0.0 {
                report.weight.push(Residual {
                    key: format!("p{p} block{l}"),
                    violation: viol,
                });
            }
        }

        if variant == Variant::Full {
            // Centre-of-gravity families, residuals in metres.
            let mut weight = inst.vessel.lightship_weight();
            let mut m_l = inst.vessel.lightship_moment(|b| b.cg_l_bar);
            let mut m_v = inst.vessel.lightship_moment(|b| b.cg_v_bar);
            let mut m_t = inst.vessel.lightship_moment(|b| b.cg_t_bar);
            for (&(ty, t, l), &count) in &plan.x {
                if t.onboard_at(p) {
                    let cw = count as f64 * inst.types[ty.idx()].weight;
                    let block = inst.vessel.block(l);
                    weight += cw;
                    m_l += cw * block.cg_l;
                    m_v += cw * block.cg_v;
                    m_t += cw * block.cg_t;
                }
            }
            if weight > 0.0 {
                let v = &inst.vessel;
                let lcg = m_l / weight;
                let tcg = m_t / weight;
                let vcg = m_v / weight;
                let lcg_viol = (v.lcg_min - lcg).max(lcg - v.lcg_max);
                if lcg_viol > 0.0 {
                    report.lcg.push(Residual {
                        key: format!("p{p}"),
                        violation: lcg_viol,
                    });
                }
                let tcg_viol = (v.tcg_min - tcg).max(tcg - v.tcg_max);
                if tcg_viol > 0.0 {
                    report.tcg.push(Residual {
                        key: format!("p{p}"),
                        violation: tcg_viol,
                    });
                }
                let vcg_viol = vcg - v.vcg_max;
                if vcg_viol > 0.0 {
                    report.vcg.push(Residual {
                        key: format!("p{p}"),
                        violation: vcg_viol,
                    });
                }
            }

            // Shear: cumulative weight bow to stern, residuals in tonnes.
            let mut cargo_per_bay = vec![0.0f64; inst.vessel.num_bays()];
            for (&(ty, t, l), &count) in &plan.x {
                if t.onboard_at(p) {
                    let bay = inst.vessel.block(l).bay;
                    cargo_per_bay[bay.idx()] += count as f64 * inst.types[ty.idx()].weight;
                }
            }
            let mut cum = 0.0;
            for bay in &inst.vessel.bays {
                cum += bay.lightship_weight + cargo_per_bay[bay.id.idx()];
                let viol = (bay.shear_min - cum).max(cum - bay.shear_max);
                if viol > 0.0 {
                    report.shear.push(Residual {
                        key: format!("p{p} bay{}", bay.id),
                        violation: viol,
                    });
                }
            }
        }
    }

    // Moves-based quantities per port: hatch overstows and makespan.
    for p in 0..inst.num_ports {
        let p = PortIndex(p);
        for (block, count) in hatch_overstow_count(inst, plan, p)? {
            if count > 0 {
                report.hatch_overstow.push(HatchCount {
                    port: p.0,
                    block: block.0,
                    count,
                });
                if variant == Variant::Reduced {
                    report.zero_overstow.push(Residual {
                        key: format!("p{p} block{block}"),
                        violation: count as f64,
                    });
                }
            }
        }
        report.makespan.push(makespan_at(inst, plan, p)?);
    }

    report.feasible = report.worst_violation() <= tol;
    Ok(report)
}

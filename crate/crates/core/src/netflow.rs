//! Network-flow master-planning formulation.
//!
//! Containers flow from a source through one node per transport, one
//! node per (transport, type) pair, and one node per block, into the
//! sink. Flow on a block arc is exactly "containers of this type, for
//! this transport, stowed in this block", so capacity, weight and
//! makespan rows read the same quantities as the assignment model;
//! what the flow view adds is a conservation row per node and fixing
//! rows that pin transport and type arcs to the demand.
//!
//! The original network's exact topology is not printed in the paper
//! this layering reconstructs; the four-layer design here follows the
//! arc families (transport, type, block arcs) and keeps per-leg
//! capacity in the constraint index rather than in extra node layers.
//! Below-deck activity indicators are aggregated to one binary per
//! (port, below-deck block) — the weakest indexing that keeps the
//! no-overstowage coupling well posed; with one-to-one hatch covers it
//! coincides with the assignment model's per-lid indicator.
//!
//! Stability is deliberately absent: this formulation never includes
//! it, which is why only the reduced comparison uses it.

use std::collections::BTreeMap;

use crate::data::{
    plan_from_solution, BlockId, DeckPosition, ExtractError, Instance, PlanAssignment, PortIndex,
    Transport, TypeId,
};
use crate::linmodel::{LinearModel, ModelError, Sense, VarId, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Source,
    Sink,
    Transport(Transport),
    /// One per (transport, type) demand pair.
    TypeNode(TypeId, Transport),
    Block(BlockId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcRole {
    /// Source to transport node; carries all containers of the
    /// transport.
    Transport(Transport),
    /// Transport node to type node; carries the pair demand.
    Type(TypeId, Transport),
    /// Type node to block node; the stowage decision itself.
    Block {
        ty: TypeId,
        t: Transport,
        block: BlockId,
        on_deck: bool,
    },
    /// Block node to sink.
    Collect(BlockId),
}

#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub role: ArcRole,
}

/// The layered container-flow network for one instance.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub nodes: Vec<NodeRole>,
    pub arcs: Vec<Arc>,
    /// q at the source, -q at the sink, zero elsewhere.
    pub supply: Vec<f64>,
}

impl FlowNetwork {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn total_flow(&self) -> f64 {
        self.supply.first().copied().unwrap_or(0.0)
    }
}

/// Closed-form network and model sizes; audited against built
/// networks for the port-count growth checks.
///
/// For an instance with demand: T transports, K demand pairs, F of
/// them free, E positive release entries, BL blocks, BLU below-deck
/// blocks, H hatch-cover (lid, below) edges, B bays, P ports and
/// legs = P - 1:
///
/// * nodes: `2 + T + K + BL`
/// * arcs:  `T + K + (F*BL + E) + BL`
/// * model vars: `arcs + P*BLU + P`
/// * model rows: `nodes + T + K + 5*legs*BL + P*BLU + P*H + P*(B-1)`
///
/// An instance without demand collapses to the bare source and sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetflowCounts {
    pub nodes: usize,
    pub arcs: usize,
    pub vars: usize,
    pub rows: usize,
}

pub fn predicted_counts(inst: &Instance) -> NetflowCounts {
    let demand = inst.demand_pairs();
    if demand.is_empty() {
        let p = inst.num_ports as usize;
        // Only the indicator scaffolding remains.
        let blu = below_deck_blocks(inst).len();
        let h = hatch_edges(inst).len();
        let bays = inst.vessel.num_bays();
        return NetflowCounts {
            nodes: 2,
            arcs: 0,
            vars: p * blu + p,
            rows: 2 + p * blu + p * h + p * (bays - 1),
        };
    }
    let transports = inst.transports().len();
    let pairs = demand.len();
    let free = demand.values().filter(|d| d.free > 0).count();
    let release_entries: usize = demand.values().map(|d| d.fixed.len()).sum();
    let bl = inst.vessel.num_blocks();
    let bays = inst.vessel.num_bays();
    let blu = below_deck_blocks(inst).len();
    let h = hatch_edges(inst).len();
    let p = inst.num_ports as usize;
    let legs = p - 1;

    let nodes = 2 + transports + pairs + bl;
    let arcs = transports + pairs + (free * bl + release_entries) + bl;
    NetflowCounts {
        nodes,
        arcs,
        vars: arcs + p * blu + p,
        rows: nodes + transports + pairs + 5 * legs * bl + p * blu + p * h + p * (bays - 1),
    }
}

fn below_deck_blocks(inst: &Instance) -> Vec<BlockId> {
    inst.vessel
        .blocks
        .iter()
        .filter(|b| b.deck == DeckPosition::BelowDeck)
        .map(|b| b.id)
        .collect()
}

/// (lid, covered below-deck block) pairs across the vessel.
fn hatch_edges(inst: &Instance) -> Vec<(BlockId, BlockId)> {
    let mut out = Vec::new();
    for bay in &inst.vessel.bays {
        for (&over, under) in &bay.hatch_cover_map {
            for &lu in under {
                out.push((over, lu));
            }
        }
    }
    out
}

/// Builds the layered network: source, transport nodes, type nodes,
/// block nodes, sink.
pub fn build_network(inst: &Instance) -> FlowNetwork {
    let demand = inst.demand_pairs();
    let total: f64 = demand.values().map(|d| d.total() as f64).sum();
    if demand.is_empty() {
        return FlowNetwork {
            nodes: vec![NodeRole::Source, NodeRole::Sink],
            arcs: Vec::new(),
            supply: vec![0.0, 0.0],
        };
    }

    let mut nodes = vec![NodeRole::Source, NodeRole::Sink];
    let mut arcs = Vec::new();
    let source = 0usize;
    let sink = 1usize;

    let mut transport_node: BTreeMap<Transport, usize> = BTreeMap::new();
    for t in inst.transports() {
        let id = nodes.len();
        nodes.push(NodeRole::Transport(t));
        transport_node.insert(t, id);
        arcs.push(Arc {
            tail: source,
            head: id,
            role: ArcRole::Transport(t),
        });
    }

    let mut block_node: BTreeMap<BlockId, usize> = BTreeMap::new();
    let mut type_nodes: Vec<(TypeId, Transport, usize)> = Vec::new();
    for &(ty, t) in demand.keys() {
        let id = nodes.len();
        nodes.push(NodeRole::TypeNode(ty, t));
        type_nodes.push((ty, t, id));
        arcs.push(Arc {
            tail: transport_node[&t],
            head: id,
            role: ArcRole::Type(ty, t),
        });
    }
    for block in &inst.vessel.blocks {
        let id = nodes.len();
        nodes.push(NodeRole::Block(block.id));
        block_node.insert(block.id, id);
    }
    for &(ty, t, type_id) in &type_nodes {
        let dem = &demand[&(ty, t)];
        if dem.free > 0 {
            for block in &inst.vessel.blocks {
                arcs.push(Arc {
                    tail: type_id,
                    head: block_node[&block.id],
                    role: ArcRole::Block {
                        ty,
                        t,
                        block: block.id,
                        on_deck: block.deck == DeckPosition::OnDeck,
                    },
                });
            }
        } else {
            for &(block, _) in &dem.fixed {
                arcs.push(Arc {
                    tail: type_id,
                    head: block_node[&block],
                    role: ArcRole::Block {
                        ty,
                        t,
                        block,
                        on_deck: inst.vessel.block(block).deck == DeckPosition::OnDeck,
                    },
                });
            }
        }
    }
    for block in &inst.vessel.blocks {
        arcs.push(Arc {
            tail: block_node[&block.id],
            head: sink,
            role: ArcRole::Collect(block.id),
        });
    }

    let mut supply = vec![0.0; nodes.len()];
    supply[source] = total;
    supply[sink] = -total;
    FlowNetwork {
        nodes,
        arcs,
        supply,
    }
}

/// Variable layout of a built network-flow model.
#[derive(Debug, Clone, Default)]
pub struct NetflowVarIndex {
    /// One variable per arc, in network arc order.
    pub arc_vars: Vec<VarId>,
    /// Block-arc variables keyed like the assignment x variables.
    pub x: BTreeMap<(TypeId, Transport, BlockId), VarId>,
    /// Below-deck activity indicators per (port, below-deck block).
    pub y_below: BTreeMap<(PortIndex, BlockId), VarId>,
    /// Long-crane makespan per port.
    pub y_makespan: Vec<VarId>,
}

impl NetflowVarIndex {
    pub fn extract_plan(
        &self,
        solution: &[f64],
        tol: f64,
    ) -> Result<PlanAssignment, ExtractError> {
        plan_from_solution(&self.x, solution, tol)
    }
}

/// Primal heuristic over the block arcs, mirroring the assignment
/// one: first a structurally overstow-free constructive plan, then
/// largest-remainder rounding of the node LP point. Other arc values
/// are irrelevant to the candidate; the solver's verifying LP settles
/// them through the conservation rows.
pub fn primal_heuristic(
    inst: &Instance,
    index: &NetflowVarIndex,
) -> impl Fn(&[f64]) -> Option<Vec<f64>> {
    let demand = inst.demand_pairs();
    let mut groups: Vec<(Vec<VarId>, u64)> = Vec::new();
    for ((ty, t), dem) in &demand {
        if dem.free == 0 {
            continue;
        }
        let vars: Vec<VarId> = inst
            .vessel
            .blocks
            .iter()
            .filter_map(|b| index.x.get(&(*ty, *t, b.id)).copied())
            .collect();
        groups.push((vars, dem.free as u64));
    }
    let mut indicators: Vec<(VarId, Vec<VarId>)> = Vec::new();
    for (&(p, lu), &y) in &index.y_below {
        let mut watched = Vec::new();
        for &(ty, t) in demand.keys() {
            if inst.moves_at(ty, t, p) {
                if let Some(&var) = index.x.get(&(ty, t, lu)) {
                    watched.push(var);
                }
            }
        }
        indicators.push((y, watched));
    }
    let data = crate::assignment::RoundingData { groups, indicators };
    let constructive = crate::assignment::constructive_candidates(inst, &index.x);
    let calls = std::cell::Cell::new(0usize);
    move |lp_point: &[f64]| {
        let call = calls.get();
        calls.set(call + 1);
        if let Some(assignments) = constructive.get(call) {
            let mut out = lp_point.to_vec();
            for (vars, _) in &data.groups {
                for v in vars {
                    out[v.idx()] = 0.0;
                }
            }
            for &(v, c) in assignments {
                out[v.idx()] = c;
            }
            for (y, watched) in &data.indicators {
                let active: f64 = watched.iter().map(|v| out[v.idx()]).sum();
                out[y.idx()] = if active > 0.5 { 1.0 } else { 0.0 };
            }
            return Some(out);
        }
        crate::assignment::round_candidate(&data, lp_point)
    }
}

/// Assembles the flow model over a built network: conservation, arc
/// fixing, per-leg capacity, no-overstowage coupling and makespan.
pub fn build_model(
    net: &FlowNetwork,
    inst: &Instance,
) -> Result<(LinearModel, NetflowVarIndex), ModelError> {
    let mut model = LinearModel::new(format!("netflow_{}", inst.name));
    let mut index = NetflowVarIndex::default();
    let demand = inst.demand_pairs();
    let nports = inst.num_ports;
    let legs = nports - 1;
    let total: f64 = demand.values().map(|d| d.total() as f64).sum();

    // Arc variables. Integrality lives on the block arcs only; the
    // relaxation drops it everywhere.
    for (ai, arc) in net.arcs.iter().enumerate() {
        let var = match arc.role {
            ArcRole::Transport(t) => {
                let k: f64 = demand
                    .iter()
                    .filter(|((_, dt), _)| *dt == t)
                    .map(|(_, d)| d.total() as f64)
                    .sum();
                model.add_var(
                    format!("ftr_{}_{}", t.origin, t.destination),
                    0.0,
                    k,
                    VarKind::Continuous,
                )?
            }
            ArcRole::Type(ty, t) => {
                let e = demand[&(ty, t)].total() as f64;
                model.add_var(
                    format!("fty_t{}_{}_{}", ty, t.origin, t.destination),
                    0.0,
                    e,
                    VarKind::Continuous,
                )?
            }
            ArcRole::Block { ty, t, block, .. } => {
                let dem = &demand[&(ty, t)];
                let ct = &inst.types[ty.idx()];
                let b = inst.vessel.block(block);
                let var = if dem.free > 0 {
                    let mut ub = dem.free as f64;
                    ub = ub.min((b.cap_teu / ct.teu) as f64);
                    if ct.teu == 2 {
                        ub = ub.min(b.cap_40 as f64);
                    }
                    if ct.reefer {
                        ub = ub.min(b.cap_reefer as f64);
                    }
                    ub = ub.min((b.weight_max / ct.weight).floor());
                    model.add_var(
                        format!("f_t{}_{}_{}_l{}", ty, t.origin, t.destination, block),
                        0.0,
                        ub,
                        VarKind::Integer,
                    )?
                } else {
                    let fixed = dem
                        .fixed
                        .iter()
                        .find(|&&(bl, _)| bl == block)
                        .map(|&(_, c)| c as f64)
                        .unwrap_or(0.0);
                    model.add_var(
                        format!("f_t{}_{}_{}_l{}", ty, t.origin, t.destination, block),
                        fixed,
                        fixed,
                        VarKind::Integer,
                    )?
                };
                index.x.insert((ty, t, block), var);
                var
            }
            ArcRole::Collect(block) => model.add_var(
                format!("fcol_l{block}"),
                0.0,
                total,
                VarKind::Continuous,
            )?,
        };
        debug_assert_eq!(var.idx(), ai);
        index.arc_vars.push(var);
    }

    // Indicators and makespan variables.
    let below = below_deck_blocks(inst);
    for p in 0..nports {
        let p = PortIndex(p);
        for &lu in &below {
            let var = model.add_var(format!("y_p{p}_l{lu}"), 0.0, 1.0, VarKind::Binary)?;
            index.y_below.insert((p, lu), var);
        }
    }
    for p in 0..nports {
        let var = model.add_var(format!("yt_p{p}"), 0.0, f64::INFINITY, VarKind::Continuous)?;
        index.y_makespan.push(var);
    }

    // Flow conservation: outgoing minus incoming equals the supply.
    for (ni, &role) in net.nodes.iter().enumerate() {
        let mut coeffs: Vec<(VarId, f64)> = Vec::new();
        for (ai, arc) in net.arcs.iter().enumerate() {
            if arc.tail == ni {
                coeffs.push((index.arc_vars[ai], 1.0));
            }
            if arc.head == ni {
                coeffs.push((index.arc_vars[ai], -1.0));
            }
        }
        let name = match role {
            NodeRole::Source => "flow_source".to_string(),
            NodeRole::Sink => "flow_sink".to_string(),
            NodeRole::Transport(t) => format!("flow_tr_{}_{}", t.origin, t.destination),
            NodeRole::TypeNode(ty, t) => {
                format!("flow_ty_t{}_{}_{}", ty, t.origin, t.destination)
            }
            NodeRole::Block(b) => format!("flow_bl_l{b}"),
        };
        model.add_constraint(name, coeffs, Sense::Eq, net.supply[ni])?;
    }

    // Arc fixing rows: transports carry their full demand, type arcs
    // their pair demand.
    for (ai, arc) in net.arcs.iter().enumerate() {
        match arc.role {
            ArcRole::Transport(t) => {
                let k: f64 = demand
                    .iter()
                    .filter(|((_, dt), _)| *dt == t)
                    .map(|(_, d)| d.total() as f64)
                    .sum();
                model.add_constraint(
                    format!("od_{}_{}", t.origin, t.destination),
                    [(index.arc_vars[ai], 1.0)],
                    Sense::Eq,
                    k,
                )?;
            }
            ArcRole::Type(ty, t) => {
                model.add_constraint(
                    format!("ty_t{}_{}_{}", ty, t.origin, t.destination),
                    [(index.arc_vars[ai], 1.0)],
                    Sense::Eq,
                    demand[&(ty, t)].total() as f64,
                )?;
            }
            _ => {}
        }
    }

    // Per-leg capacity and weight rows over onboard block arcs.
    for p in 0..legs {
        let p = PortIndex(p);
        let onboard: Vec<(TypeId, Transport)> = demand
            .keys()
            .copied()
            .filter(|&(_, t)| t.onboard_at(p))
            .collect();
        for block in &inst.vessel.blocks {
            let l = block.id;
            let mut teu = Vec::new();
            let mut c20 = Vec::new();
            let mut c40 = Vec::new();
            let mut reefer = Vec::new();
            let mut weight = Vec::new();
            for &(ty, t) in &onboard {
                let Some(&var) = index.x.get(&(ty, t, l)) else {
                    continue;
                };
                let ct = &inst.types[ty.idx()];
                teu.push((var, ct.teu as f64));
                if ct.teu == 1 {
                    c20.push((var, 1.0));
                } else {
                    c40.push((var, 1.0));
                }
                if ct.reefer {
                    reefer.push((var, 1.0));
                }
                weight.push((var, ct.weight));
            }
            model.add_constraint(
                format!("cap_teu_p{p}_l{l}"),
                teu,
                Sense::Le,
                block.cap_teu as f64,
            )?;
            model.add_constraint(
                format!("cap_20_p{p}_l{l}"),
                c20,
                Sense::Le,
                block.cap_teu as f64,
            )?;
            model.add_constraint(
                format!("cap_40_p{p}_l{l}"),
                c40,
                Sense::Le,
                block.cap_40 as f64,
            )?;
            model.add_constraint(
                format!("cap_reefer_p{p}_l{l}"),
                reefer,
                Sense::Le,
                block.cap_reefer as f64,
            )?;
            model.add_constraint(
                format!("weight_p{p}_l{l}"),
                weight,
                Sense::Le,
                block.weight_max,
            )?;
        }
    }

    // No-overstowage coupling and makespan per call port.
    let hatch = hatch_edges(inst);
    for p in 0..nports {
        let p = PortIndex(p);
        let active: Vec<(TypeId, Transport)> = demand
            .keys()
            .copied()
            .filter(|&(ty, t)| inst.moves_at(ty, t, p))
            .collect();
        let overstowing: Vec<(TypeId, Transport)> = demand
            .keys()
            .copied()
            .filter(|&(_, t)| t.overstowing_at(p))
            .collect();
        let m_active: f64 = active.iter().map(|key| demand[key].total() as f64).sum();
        let m_over: f64 = overstowing
            .iter()
            .map(|key| demand[key].total() as f64)
            .sum();

        for &lu in &below {
            let y = index.y_below[&(p, lu)];
            let mut coeffs = Vec::new();
            for &(ty, t) in &active {
                if let Some(&var) = index.x.get(&(ty, t, lu)) {
                    coeffs.push((var, 1.0));
                }
            }
            coeffs.push((y, -m_active));
            model.add_constraint(format!("act_p{p}_l{lu}"), coeffs, Sense::Le, 0.0)?;
        }
        for &(lid, lu) in &hatch {
            let y = index.y_below[&(p, lu)];
            let mut coeffs = Vec::new();
            for &(ty, t) in &overstowing {
                if let Some(&var) = index.x.get(&(ty, t, lid)) {
                    coeffs.push((var, 1.0));
                }
            }
            coeffs.push((y, m_over));
            model.add_constraint(
                format!("hatch_p{p}_l{lid}_{lu}"),
                coeffs,
                Sense::Le,
                m_over,
            )?;
        }

        for (b1, b2) in &inst.vessel.adjacent_bay_pairs {
            let mut coeffs = Vec::new();
            for bay in [b1, b2] {
                for &l in &inst.vessel.bays[bay.idx()].blocks {
                    for &(ty, t) in &active {
                        if let Some(&var) = index.x.get(&(ty, t, l)) {
                            coeffs.push((var, 1.0));
                        }
                    }
                }
            }
            coeffs.push((index.y_makespan[p.idx()], -1.0));
            model.add_constraint(format!("mk_p{p}_b{b1}_{b2}"), coeffs, Sense::Le, 0.0)?;
        }
    }

    let obj: Vec<(VarId, f64)> = index
        .y_makespan
        .iter()
        .map(|&v| (v, inst.cost_makespan))
        .collect();
    model.set_objective(obj)?;

    Ok((model, index))
}

/// Convenience wrapper: network and model in one call.
pub fn build(inst: &Instance) -> Result<(FlowNetwork, LinearModel, NetflowVarIndex), ModelError> {
    let net = build_network(inst);
    let (model, index) = build_model(&net, inst)?;
    Ok((net, model, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::test_fixtures::{tiny_instance, tiny_types, tiny_vessel};
    use crate::data::Instance;
    use crate::solver::{solve_mip, SolveConfig};
    use crate::validate;
    use crate::SolveStatus;
    use std::collections::BTreeMap;

    #[test]
    fn empty_instance_network_is_source_and_sink() {
        let inst = Instance::new(
            "empty",
            tiny_vessel(),
            2,
            tiny_types(),
            BTreeMap::new(),
            BTreeMap::new(),
            1.0,
            1.0,
        )
        .unwrap();
        let net = build_network(&inst);
        assert_eq!(net.num_nodes(), 2);
        assert_eq!(net.num_arcs(), 0);
        assert_eq!(net.total_flow(), 0.0);
        let (model, _) = build_model(&net, &inst).unwrap();
        let r = solve_mip(&model, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective.unwrap(), 0.0);
    }

    #[test]
    fn hand_counted_small_network() {
        // 1 transport, 1 type with demand, 4 blocks: 1 transport arc,
        // 1 type arc, 4 block arcs, 4 collect arcs; 2 + 1 + 1 + 4 nodes.
        let inst = tiny_instance();
        let net = build_network(&inst);
        assert_eq!(net.num_nodes(), 8);
        assert_eq!(net.num_arcs(), 10);
        assert_eq!(net.total_flow(), 4.0);
        let sum: f64 = net.supply.iter().sum();
        assert_eq!(sum, 0.0);
    }

    #[test]
    fn counts_match_formula() {
        let inst = tiny_instance();
        let net = build_network(&inst);
        let (model, _) = build_model(&net, &inst).unwrap();
        let predicted = predicted_counts(&inst);
        assert_eq!(net.num_nodes(), predicted.nodes);
        assert_eq!(net.num_arcs(), predicted.arcs);
        assert_eq!(model.num_vars(), predicted.vars);
        assert_eq!(model.num_rows(), predicted.rows);
    }

    #[test]
    fn layer_order_is_respected() {
        let inst = tiny_instance();
        let net = build_network(&inst);
        let layer = |n: &NodeRole| -> u8 {
            match n {
                NodeRole::Source => 0,
                NodeRole::Transport(_) => 1,
                NodeRole::TypeNode(..) => 2,
                NodeRole::Block(_) => 3,
                NodeRole::Sink => 4,
            }
        };
        for arc in &net.arcs {
            assert!(layer(&net.nodes[arc.tail]) < layer(&net.nodes[arc.head]));
        }
    }

    #[test]
    fn flow_solution_validates_and_matches_makespan() {
        let inst = tiny_instance();
        let (_, model, index) = build(&inst).unwrap();
        let r = solve_mip(&model, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() - 8.0).abs() < 1e-9);
        let plan = index
            .extract_plan(r.solution.as_ref().unwrap(), 1e-6)
            .unwrap();
        let report = validate::validate(&inst, &plan, validate::Variant::Reduced, 1e-6).unwrap();
        assert!(report.feasible, "{report}");
        assert_eq!(report.total_makespan(), 8);
    }

    #[test]
    fn unavoidable_overstow_infeasible_matches_assignment() {
        // Same single-column trap as the assignment test: reefer plugs
        // only below deck pin the (0,1) cargo under the hatch, so the
        // (0,2) boxes must overstow; both reduced models must agree.
        use crate::data::{BaySpec, BlockSpec, ContainerType, DeckPosition, HatchCoverSpec, VesselProfile, VesselSpec};
        let vessel = VesselProfile::new(VesselSpec {
            name: "column".into(),
            lcg_min: -1e3,
            lcg_max: 1e3,
            vcg_max: 1e3,
            tcg_min: -1e3,
            tcg_max: 1e3,
            bays: vec![BaySpec {
                lightship_weight: 10.0,
                cg_l_bar: 0.0,
                cg_v_bar: 0.0,
                cg_t_bar: 0.0,
                shear_min: 0.0,
                shear_max: 1e9,
                blocks: vec![
                    BlockSpec {
                        deck: DeckPosition::OnDeck,
                        cap_teu: 2,
                        cap_40: 0,
                        cap_reefer: 0,
                        weight_max: 100.0,
                        cg_l: 0.0,
                        cg_v: 2.0,
                        cg_t: 0.0,
                    },
                    BlockSpec {
                        deck: DeckPosition::BelowDeck,
                        cap_teu: 2,
                        cap_40: 0,
                        cap_reefer: 2,
                        weight_max: 100.0,
                        cg_l: 0.0,
                        cg_v: 1.0,
                        cg_t: 0.0,
                    },
                ],
                hatch_covers: vec![HatchCoverSpec {
                    over: 0,
                    under: vec![1],
                }],
            }],
        })
        .unwrap();
        let types = vec![
            ContainerType {
                id: TypeId(0),
                teu: 1,
                length_ft: 20,
                weight: 10.0,
                reefer: false,
            },
            ContainerType {
                id: TypeId(1),
                teu: 1,
                length_ft: 20,
                weight: 10.0,
                reefer: true,
            },
        ];
        let mut loadlist = BTreeMap::new();
        loadlist.insert((Transport::new(0, 2), TypeId(0)), 2);
        loadlist.insert((Transport::new(0, 1), TypeId(1)), 2);
        let inst = Instance::new("forced", vessel, 3, types, loadlist, BTreeMap::new(), 1.0, 1.0)
            .unwrap();
        let (_, model, _) = build(&inst).unwrap();
        let r = solve_mip(&model, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        let (reduced, _) = crate::assignment::build_reduced(&inst).unwrap();
        let a = solve_mip(&reduced, &SolveConfig::default()).unwrap();
        assert_eq!(a.status, SolveStatus::Infeasible);
    }

    #[test]
    fn block_arc_totals_match_demand() {
        let inst = tiny_instance();
        let (net, model, index) = build(&inst).unwrap();
        let r = solve_mip(&model, &SolveConfig::default()).unwrap();
        let sol = r.solution.unwrap();
        // Per (type, transport): block-arc flows sum to the demand.
        let mut sums: BTreeMap<(TypeId, Transport), f64> = BTreeMap::new();
        for (&(ty, t, _), &var) in &index.x {
            *sums.entry((ty, t)).or_insert(0.0) += sol[var.idx()];
        }
        for (key, dem) in inst.demand_pairs() {
            assert!((sums[&key] - dem.total() as f64).abs() < 1e-6);
        }
        // Source outflow equals q.
        let outflow: f64 = net
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.tail == 0)
            .map(|(ai, _)| sol[index.arc_vars[ai].idx()])
            .sum();
        assert!((outflow - net.total_flow()).abs() < 1e-6);
    }
}

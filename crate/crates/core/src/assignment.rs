//! Assignment-based master-planning formulation.
//!
//! Decision variables count containers of a type stowed in a block for
//! the whole life of a transport; capacity, weight, stability and
//! shear rows are posted per departure leg over the transports then on
//! board. Two variants are built from the same skeleton:
//!
//! * **Full** — stability (LCG/TCG/VCG) and shear rows included; hatch
//!   overstows are allowed and priced in the objective.
//! * **Reduced** — no stability or shear rows, hatch overstowage
//!   strictly forbidden, makespan-only objective. This is the variant
//!   used for head-to-head comparison with the network-flow model.
//!
//! The displacement appearing on the right side of the stability rows
//! depends on the cargo itself; each row is kept linear by moving the
//! limit-times-weight terms to the left: with limit C and axis cg,
//!
//! ```text
//!   sum (cg_l - C) * W_t * x  >=  C * lightship - lightship_moment
//! ```
//!
//! Row and variable counts follow closed-form formulas (see
//! [`predicted_counts`]), which the tests check against built models.

use std::collections::BTreeMap;

use crate::data::{
    plan_from_solution, BlockId, DeckPosition, ExtractError, Instance, PlanAssignment, PortIndex,
    Transport, TypeId,
};
use crate::linmodel::{LinearModel, ModelError, Sense, VarId, VarKind};
use crate::validate::Variant;

/// Which transports count as crane moves in the makespan rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MakespanIndexing {
    /// Loads plus discharges at the port (the default: crane moves).
    #[default]
    ActiveTransports,
    /// Everything on board on the departing leg, as the makespan
    /// constraint is printed; counts idle cargo as crane work.
    OnboardTransports,
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub makespan: MakespanIndexing,
    /// Multiplier on the tightest-valid indicator constants; solutions
    /// must be invariant to enlarging it.
    pub big_m_scale: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            makespan: MakespanIndexing::ActiveTransports,
            big_m_scale: 1.0,
        }
    }
}

/// Variable layout of a built assignment model.
#[derive(Debug, Clone, Default)]
pub struct AssignVarIndex {
    /// x variables: containers of `type` on `transport` in `block`.
    pub x: BTreeMap<(TypeId, Transport, BlockId), VarId>,
    /// Below-deck activity indicators per (port, on-deck block).
    pub delta: BTreeMap<(PortIndex, BlockId), VarId>,
    /// Hatch-overstow counters per (port, on-deck block); empty in the
    /// reduced variant, where overstowage is forbidden outright.
    pub y_overstow: BTreeMap<(PortIndex, BlockId), VarId>,
    /// Long-crane makespan per port.
    pub y_makespan: Vec<VarId>,
}

impl AssignVarIndex {
    /// Rounds the x block of `solution` into a plan. Fails when any
    /// count strays from an integer by more than `tol` (solve the MIP,
    /// not the relaxation, before extracting).
    pub fn extract_plan(
        &self,
        solution: &[f64],
        tol: f64,
    ) -> Result<PlanAssignment, ExtractError> {
        plan_from_solution(&self.x, solution, tol)
    }
}

/// Grouping of x variables per demand pair plus indicator wiring,
/// enough to round a fractional LP point into a candidate integer
/// point (see [`primal_heuristic`]).
pub(crate) struct RoundingData {
    /// Per pair: (x variable ids, integer demand total).
    pub groups: Vec<(Vec<VarId>, u64)>,
    /// Per indicator: (indicator id, x variables whose activity it
    /// watches at that port).
    pub indicators: Vec<(VarId, Vec<VarId>)>,
}

pub(crate) fn rounding_data(inst: &Instance, index: &AssignVarIndex) -> RoundingData {
    let demand = inst.demand_pairs();
    let mut groups = Vec::new();
    for ((ty, t), dem) in &demand {
        if dem.free == 0 {
            continue; // fixed by bounds; nothing to round
        }
        let vars: Vec<VarId> = inst
            .vessel
            .blocks
            .iter()
            .map(|b| index.x[&(*ty, *t, b.id)])
            .collect();
        groups.push((vars, dem.free as u64));
    }
    let mut indicators = Vec::new();
    for (&(p, l), &delta) in &index.delta {
        let mut watched = Vec::new();
        for &lu in inst.vessel.covered_blocks(l) {
            for &(ty, t) in demand.keys() {
                if inst.moves_at(ty, t, p) {
                    if let Some(&var) = index.x.get(&(ty, t, lu)) {
                        watched.push(var);
                    }
                }
            }
        }
        indicators.push((delta, watched));
    }
    RoundingData { groups, indicators }
}

/// Largest-remainder rounding of each pair's block distribution; the
/// rounded counts keep every load-all row exact, and indicators are
/// set from the rounded activity. Capacity violations are possible and
/// left for the solver's fixing LP to reject.
pub(crate) fn round_candidate(data: &RoundingData, lp_point: &[f64]) -> Option<Vec<f64>> {
    let mut out = lp_point.to_vec();
    for (vars, total) in &data.groups {
        let mut floors = 0u64;
        let mut fracs: Vec<(usize, f64)> = Vec::with_capacity(vars.len());
        for (i, &v) in vars.iter().enumerate() {
            let val = lp_point[v.idx()].max(0.0);
            let fl = val.floor();
            floors += fl as u64;
            fracs.push((i, val - fl));
            out[v.idx()] = fl;
        }
        let missing = total.checked_sub(floors)?;
        if missing as usize > vars.len() {
            return None; // LP point far from the load-all plane
        }
        fracs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        for &(i, _) in fracs.iter().take(missing as usize) {
            out[vars[i].idx()] += 1.0;
        }
    }
    for (delta, watched) in &data.indicators {
        let active: f64 = watched.iter().map(|v| out[v.idx()]).sum();
        out[delta.idx()] = if active > 0.5 { 1.0 } else { 0.0 };
    }
    Some(out)
}

/// Constructive zero-overstow candidate, shared by both formulations.
///
/// Columns (a lid plus the holds it covers) are grouped into "combs":
/// the columns of every other bay at one within-bay position. A comb
/// never contains adjacent bays, and origins receive contiguous runs
/// of comb columns in proportion to their cargo, so when a port works
/// one origin's cargo the moves spread over non-adjacent bays and the
/// busiest adjacent-bay pair stays near the balanced bound. Within a
/// column all cargo shares one origin and the lid discharges no later
/// than anything below it, so hold work never happens under
/// overstowing deck cargo.
///
/// Returns integral values for the x variables; indicators and
/// objective variables are left for the verifying LP to settle. Fails
/// (None) on instances with release cargo or when the greedy deal
/// dead-ends.
pub(crate) fn constructive_counts_combs(
    inst: &Instance,
    x_index: &BTreeMap<(TypeId, Transport, BlockId), VarId>,
) -> Option<Vec<(VarId, f64)>> {
    if !inst.release.is_empty() {
        return None; // pre-placed cargo breaks the column discipline
    }
    let vessel = &inst.vessel;
    struct Column {
        lid: BlockId,
        holds: Vec<BlockId>,
        origin: Option<u32>,
        /// Smallest destination currently stowed below the lid.
        hold_min_dest: Option<u32>,
        /// Largest destination currently stowed on the lid.
        lid_max_dest: Option<u32>,
    }
    let mut columns: Vec<Column> = Vec::new();
    for bay in &vessel.bays {
        for (&lid, holds) in &bay.hatch_cover_map {
            columns.push(Column {
                lid,
                holds: holds.clone(),
                origin: None,
                hold_min_dest: None,
                lid_max_dest: None,
            });
        }
    }
    if columns.is_empty() {
        return None;
    }
    columns.sort_by_key(|c| (vessel.block(c.lid).bay, c.lid));

    let demand = inst.demand_pairs();
    if demand.is_empty() {
        return Some(Vec::new());
    }

    // Comb order: (within-bay position, bay parity, bay). Contiguous
    // runs in this order stay within one comb whenever they can.
    let mut within_bay: BTreeMap<crate::data::BayId, u32> = BTreeMap::new();
    let mut comb_key: Vec<(u32, u32, u32)> = Vec::with_capacity(columns.len());
    for col in &columns {
        let bay = vessel.block(col.lid).bay;
        let pos = within_bay.entry(bay).or_insert(0);
        comb_key.push((*pos, bay.0 % 2, bay.0));
        *pos += 1;
    }
    let mut order: Vec<usize> = (0..columns.len()).collect();
    order.sort_by_key(|&ci| comb_key[ci]);

    // TEU demand per origin, then contiguous column runs by quota.
    let mut teu_per_origin: BTreeMap<u32, u64> = BTreeMap::new();
    for ((ty, t), dem) in &demand {
        *teu_per_origin.entry(t.origin.0).or_insert(0) +=
            dem.total() as u64 * inst.types[ty.idx()].teu as u64;
    }
    let total_teu: u64 = teu_per_origin.values().sum();
    if total_teu == 0 {
        return Some(Vec::new());
    }
    let origins: Vec<u32> = teu_per_origin.keys().copied().collect();
    let shares: Vec<f64> = origins
        .iter()
        .map(|o| teu_per_origin[o] as f64 / total_teu as f64)
        .collect();
    let mut alloc: Vec<usize> = shares
        .iter()
        .map(|s| (s * columns.len() as f64).floor() as usize)
        .collect();
    let mut rem: Vec<(usize, f64)> = shares
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s * columns.len() as f64 - alloc[i] as f64))
        .collect();
    rem.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut left = columns.len() - alloc.iter().sum::<usize>();
    for (i, _) in rem {
        if left == 0 {
            break;
        }
        alloc[i] += 1;
        left -= 1;
    }
    {
        let mut at = 0usize;
        for (oi, &origin) in origins.iter().enumerate() {
            for _ in 0..alloc[oi] {
                if let Some(&ci) = order.get(at) {
                    columns[ci].origin = Some(origin);
                    at += 1;
                }
            }
        }
        // Any leftovers (rounding) go to the largest origin.
        while at < order.len() {
            columns[order[at]].origin = Some(origins[0]);
            at += 1;
        }
    }

    // Residual capacity per block.
    let mut teu_left: Vec<i64> = vessel.blocks.iter().map(|b| b.cap_teu as i64).collect();
    let mut c40_left: Vec<i64> = vessel.blocks.iter().map(|b| b.cap_40 as i64).collect();
    let mut reefer_left: Vec<i64> = vessel.blocks.iter().map(|b| b.cap_reefer as i64).collect();
    let mut weight_left: Vec<f64> = vessel.blocks.iter().map(|b| b.weight_max).collect();
    let mut counts: BTreeMap<(TypeId, Transport, BlockId), u32> = BTreeMap::new();

    let place = |block: BlockId,
                     ty: TypeId,
                     t: Transport,
                     teu_left: &mut Vec<i64>,
                     c40_left: &mut Vec<i64>,
                     reefer_left: &mut Vec<i64>,
                     weight_left: &mut Vec<f64>,
                     counts: &mut BTreeMap<(TypeId, Transport, BlockId), u32>|
     -> bool {
        let ct = &inst.types[ty.idx()];
        let li = block.idx();
        if teu_left[li] < ct.teu as i64
            || (ct.teu == 2 && c40_left[li] < 1)
            || (ct.reefer && reefer_left[li] < 1)
            || weight_left[li] < ct.weight
        {
            return false;
        }
        teu_left[li] -= ct.teu as i64;
        if ct.teu == 2 {
            c40_left[li] -= 1;
        }
        if ct.reefer {
            reefer_left[li] -= 1;
        }
        weight_left[li] -= ct.weight;
        *counts.entry((ty, t, block)).or_insert(0) += 1;
        true
    };

    // Deal boxes round robin over each origin's columns with staggered
    // per-pair cursors. Holds take cargo discharging no earlier than
    // anything on their lid; lids take cargo discharging no later than
    // anything below them.
    for &origin in &origins {
        let my_cols: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&ci| columns[ci].origin == Some(origin))
            .collect();
        if my_cols.is_empty() {
            return None;
        }

        // Box queue: destination descending so late cargo sinks into
        // the holds; within a destination, reefers go first while the
        // plugs are plentiful.
        let mut boxes: Vec<(u32, bool, TypeId, Transport)> = Vec::new();
        for ((ty, t), dem) in &demand {
            if t.origin.0 == origin {
                let reefer = inst.types[ty.idx()].reefer;
                for _ in 0..dem.free {
                    boxes.push((t.destination.0, reefer, *ty, *t));
                }
            }
        }
        boxes.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));

        let mut pair_cursor: BTreeMap<(TypeId, Transport), usize> = BTreeMap::new();
        for (dest, _, ty, t) in boxes {
            let seed = (pair_cursor.len() * 7) % my_cols.len();
            let cursor = pair_cursor.entry((ty, t)).or_insert(seed);
            let mut placed = false;
            for step in 0..my_cols.len() {
                let ci = my_cols[(*cursor + step) % my_cols.len()];
                // Hold pass.
                if columns[ci].lid_max_dest.is_none_or(|d| dest >= d) {
                    let mut done = false;
                    for &hold in &columns[ci].holds.clone() {
                        if place(
                            hold, ty, t, &mut teu_left, &mut c40_left, &mut reefer_left,
                            &mut weight_left, &mut counts,
                        ) {
                            let col = &mut columns[ci];
                            col.hold_min_dest =
                                Some(col.hold_min_dest.map_or(dest, |d| d.min(dest)));
                            done = true;
                            break;
                        }
                    }
                    if done {
                        *cursor = (*cursor + step + 1) % my_cols.len();
                        placed = true;
                        break;
                    }
                }
                // Lid pass.
                if columns[ci].hold_min_dest.is_none_or(|d| dest <= d)
                    && place(
                        columns[ci].lid, ty, t, &mut teu_left, &mut c40_left,
                        &mut reefer_left, &mut weight_left, &mut counts,
                    )
                {
                    let col = &mut columns[ci];
                    col.lid_max_dest = Some(col.lid_max_dest.map_or(dest, |d| d.max(dest)));
                    *cursor = (*cursor + step + 1) % my_cols.len();
                    placed = true;
                    break;
                }
            }
            if !placed {
                return None;
            }
        }
    }

    Some(
        counts
            .into_iter()
            .filter_map(|(key, c)| x_index.get(&key).map(|&v| (v, c as f64)))
            .collect(),
    )
}

/// Alternative constructive deal for vessels with few bays: columns
/// go to origins in stride batches (fore bay i with aft bay i + B/2),
/// and each pair's boxes alternate between the fore and aft halves of
/// its origin's columns. On short hulls the adjacent-pair optimum
/// equals the half-sum, which this split hits exactly when counts are
/// even. Same stacking discipline as the comb deal.
pub(crate) fn constructive_counts_halves(
    inst: &Instance,
    x_index: &BTreeMap<(TypeId, Transport, BlockId), VarId>,
) -> Option<Vec<(VarId, f64)>> {
    if !inst.release.is_empty() {
        return None;
    }
    let vessel = &inst.vessel;
    struct Column {
        lid: BlockId,
        holds: Vec<BlockId>,
        origin: Option<u32>,
        hold_min_dest: Option<u32>,
        lid_max_dest: Option<u32>,
    }
    let mut columns: Vec<Column> = Vec::new();
    for bay in &vessel.bays {
        for (&lid, holds) in &bay.hatch_cover_map {
            columns.push(Column {
                lid,
                holds: holds.clone(),
                origin: None,
                hold_min_dest: None,
                lid_max_dest: None,
            });
        }
    }
    if columns.is_empty() {
        return None;
    }
    columns.sort_by_key(|c| (vessel.block(c.lid).bay, c.lid));

    let demand = inst.demand_pairs();
    if demand.is_empty() {
        return Some(Vec::new());
    }

    let mut teu_per_origin: BTreeMap<u32, u64> = BTreeMap::new();
    for ((ty, t), dem) in &demand {
        *teu_per_origin.entry(t.origin.0).or_insert(0) +=
            dem.total() as u64 * inst.types[ty.idx()].teu as u64;
    }
    let total_teu: u64 = teu_per_origin.values().sum();
    if total_teu == 0 {
        return Some(Vec::new());
    }
    let origins: Vec<u32> = teu_per_origin.keys().copied().collect();
    let mut quota: BTreeMap<u32, f64> = origins
        .iter()
        .map(|&o| {
            (
                o,
                columns.len() as f64 * teu_per_origin[&o] as f64 / total_teu as f64,
            )
        })
        .collect();

    let mid = (vessel.num_bays() as f64 - 1.0) / 2.0;
    let bay_pos = |ci: usize, columns: &[Column]| -> f64 {
        vessel.block(columns[ci].lid).bay.idx() as f64
    };
    let fore: Vec<usize> = (0..columns.len())
        .filter(|&ci| bay_pos(ci, &columns) < mid)
        .collect();
    let aft: Vec<usize> = (0..columns.len())
        .filter(|&ci| bay_pos(ci, &columns) > mid)
        .collect();
    let centre: Vec<usize> = (0..columns.len())
        .filter(|&ci| bay_pos(ci, &columns) == mid)
        .collect();
    let mut batches: Vec<Vec<usize>> = Vec::new();
    for i in 0..fore.len().max(aft.len()) {
        let mut batch = Vec::new();
        if let Some(&ci) = fore.get(i) {
            batch.push(ci);
        }
        if let Some(&ci) = aft.get(i) {
            batch.push(ci);
        }
        batches.push(batch);
    }
    for ci in centre {
        batches.push(vec![ci]);
    }
    for batch in batches {
        let &best = origins
            .iter()
            .max_by(|&&a, &&b| quota[&a].partial_cmp(&quota[&b]).unwrap().then(b.cmp(&a)))
            .unwrap();
        for ci in batch {
            columns[ci].origin = Some(best);
            *quota.get_mut(&best).unwrap() -= 1.0;
        }
    }

    let mut teu_left: Vec<i64> = vessel.blocks.iter().map(|b| b.cap_teu as i64).collect();
    let mut c40_left: Vec<i64> = vessel.blocks.iter().map(|b| b.cap_40 as i64).collect();
    let mut reefer_left: Vec<i64> = vessel.blocks.iter().map(|b| b.cap_reefer as i64).collect();
    let mut weight_left: Vec<f64> = vessel.blocks.iter().map(|b| b.weight_max).collect();
    let mut counts: BTreeMap<(TypeId, Transport, BlockId), u32> = BTreeMap::new();

    let place = |block: BlockId,
                     ty: TypeId,
                     t: Transport,
                     teu_left: &mut Vec<i64>,
                     c40_left: &mut Vec<i64>,
                     reefer_left: &mut Vec<i64>,
                     weight_left: &mut Vec<f64>,
                     counts: &mut BTreeMap<(TypeId, Transport, BlockId), u32>|
     -> bool {
        let ct = &inst.types[ty.idx()];
        let li = block.idx();
        if teu_left[li] < ct.teu as i64
            || (ct.teu == 2 && c40_left[li] < 1)
            || (ct.reefer && reefer_left[li] < 1)
            || weight_left[li] < ct.weight
        {
            return false;
        }
        teu_left[li] -= ct.teu as i64;
        if ct.teu == 2 {
            c40_left[li] -= 1;
        }
        if ct.reefer {
            reefer_left[li] -= 1;
        }
        weight_left[li] -= ct.weight;
        *counts.entry((ty, t, block)).or_insert(0) += 1;
        true
    };

    for &origin in &origins {
        let my_cols: Vec<usize> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.origin == Some(origin))
            .map(|(i, _)| i)
            .collect();
        if my_cols.is_empty() {
            return None;
        }
        let pools: [Vec<usize>; 3] = {
            let mut pools: [Vec<usize>; 3] = Default::default();
            for &ci in &my_cols {
                let pos = bay_pos(ci, &columns);
                let pool = if pos < mid {
                    0
                } else if pos > mid {
                    1
                } else {
                    2
                };
                pools[pool].push(ci);
            }
            pools
        };

        let mut boxes: Vec<(u32, bool, TypeId, Transport)> = Vec::new();
        for ((ty, t), dem) in &demand {
            if t.origin.0 == origin {
                let reefer = inst.types[ty.idx()].reefer;
                for _ in 0..dem.free {
                    boxes.push((t.destination.0, reefer, *ty, *t));
                }
            }
        }
        boxes.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));

        let mut side_of_pair: BTreeMap<(TypeId, Transport), u8> = BTreeMap::new();
        let mut cursors: BTreeMap<((TypeId, Transport), u8), usize> = BTreeMap::new();
        for (dest, _, ty, t) in boxes {
            let start = (side_of_pair.len() % 2) as u8;
            let side = side_of_pair.entry((ty, t)).or_insert(start);
            let preference = [*side, 1 - *side, 2];
            *side = 1 - *side;
            let mut placed = false;
            'pools: for &h in &preference {
                let pool = &pools[h as usize];
                if pool.is_empty() {
                    continue;
                }
                let seed = (cursors.len() * 7) % pool.len();
                let cursor = cursors.entry(((ty, t), h)).or_insert(seed);
                for step in 0..pool.len() {
                    let ci = pool[(*cursor + step) % pool.len()];
                    if columns[ci].lid_max_dest.is_none_or(|d| dest >= d) {
                        let mut done = false;
                        for &hold in &columns[ci].holds.clone() {
                            if place(
                                hold, ty, t, &mut teu_left, &mut c40_left,
                                &mut reefer_left, &mut weight_left, &mut counts,
                            ) {
                                let col = &mut columns[ci];
                                col.hold_min_dest =
                                    Some(col.hold_min_dest.map_or(dest, |d| d.min(dest)));
                                done = true;
                                break;
                            }
                        }
                        if done {
                            *cursor = (*cursor + step + 1) % pool.len();
                            placed = true;
                            break 'pools;
                        }
                    }
                    if columns[ci].hold_min_dest.is_none_or(|d| dest <= d)
                        && place(
                            columns[ci].lid, ty, t, &mut teu_left, &mut c40_left,
                            &mut reefer_left, &mut weight_left, &mut counts,
                        )
                    {
                        let col = &mut columns[ci];
                        col.lid_max_dest =
                            Some(col.lid_max_dest.map_or(dest, |d| d.max(dest)));
                        *cursor = (*cursor + step + 1) % pool.len();
                        placed = true;
                        break 'pools;
                    }
                }
            }
            if !placed {
                return None;
            }
        }
    }

    Some(
        counts
            .into_iter()
            .filter_map(|(key, c)| x_index.get(&key).map(|&v| (v, c as f64)))
            .collect(),
    )
}

/// Both constructive deals, preferred order depending on hull length.
pub(crate) fn constructive_candidates(
    inst: &Instance,
    x_index: &BTreeMap<(TypeId, Transport, BlockId), VarId>,
) -> Vec<Vec<(VarId, f64)>> {
    let a = constructive_counts_halves(inst, x_index);
    let b = constructive_counts_combs(inst, x_index);
    let (first, second) = if inst.vessel.num_bays() <= 6 {
        (a, b)
    } else {
        (b, a)
    };
    first.into_iter().chain(second).collect()
}

/// A primal heuristic for [`crate::solver::solve_mip_with`]: the
/// structurally overstow-free constructive plans first, afterwards
/// largest-remainder rounding of the node LP point.
pub fn primal_heuristic(
    inst: &Instance,
    index: &AssignVarIndex,
) -> impl Fn(&[f64]) -> Option<Vec<f64>> {
    let data = rounding_data(inst, index);
    let constructive = constructive_candidates(inst, &index.x);
    let calls = std::cell::Cell::new(0usize);
    move |lp_point: &[f64]| {
        let call = calls.get();
        calls.set(call + 1);
        if let Some(assignments) = constructive.get(call) {
            // Fixed (release) variables keep their LP values; the free
            // x entries are replaced wholesale.
            let mut out = lp_point.to_vec();
            for (vars, _) in &data.groups {
                for v in vars {
                    out[v.idx()] = 0.0;
                }
            }
            for &(v, c) in assignments {
                out[v.idx()] = c;
            }
            for (delta, watched) in &data.indicators {
                let active: f64 = watched.iter().map(|v| out[v.idx()]).sum();
                out[delta.idx()] = if active > 0.5 { 1.0 } else { 0.0 };
            }
            return Some(out);
        }
        round_candidate(&data, lp_point)
    }
}

/// Closed-form size of the model [`build`] produces.
///
/// With P ports, B bays, BL blocks, BLO on-deck blocks, F free demand
/// pairs, R positive release entries and legs = P - 1:
///
/// * variables: `F*BL + R` x-vars, `P*BLO` deltas, `P*BLO` overstow
///   counters (full only), `P` makespans;
/// * rows: `F` load-all, `5*legs*BL` capacity and weight,
///   `5*legs + 2*legs*B` stability and shear (full only), `P*BLO`
///   delta, `P*BLO` hatch, `P*(B-1)` makespan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelCounts {
    pub vars: usize,
    pub rows: usize,
}

pub fn predicted_counts(inst: &Instance, variant: Variant) -> ModelCounts {
    let p = inst.num_ports as usize;
    let legs = p - 1;
    let bl = inst.vessel.num_blocks();
    let bays = inst.vessel.num_bays();
    let blo = inst
        .vessel
        .blocks
        .iter()
        .filter(|b| b.deck == DeckPosition::OnDeck)
        .count();
    let demand = inst.demand_pairs();
    let free_pairs = demand.values().filter(|d| d.free > 0).count();
    let release_entries: usize = demand.values().map(|d| d.fixed.len()).sum();

    let mut vars = free_pairs * bl + release_entries + p * blo + p;
    let mut rows = free_pairs + 5 * legs * bl + p * blo + p * blo + p * (bays - 1);
    if variant == Variant::Full {
        vars += p * blo;
        rows += 5 * legs + 2 * legs * bays;
    }
    ModelCounts { vars, rows }
}

pub fn build_full(
    inst: &Instance,
    opts: &BuildOptions,
) -> Result<(LinearModel, AssignVarIndex), ModelError> {
    build(inst, Variant::Full, opts)
}

pub fn build_reduced(inst: &Instance) -> Result<(LinearModel, AssignVarIndex), ModelError> {
    build(inst, Variant::Reduced, &BuildOptions::default())
}

pub fn build(
    inst: &Instance,
    variant: Variant,
    opts: &BuildOptions,
) -> Result<(LinearModel, AssignVarIndex), ModelError> {
    let mut model = LinearModel::new(format!("assign_{}_{}", variant, inst.name));
    let mut index = AssignVarIndex::default();
    let vessel = &inst.vessel;
    let nports = inst.num_ports;
    let legs = nports - 1;
    let demand = inst.demand_pairs();

    // x variables. Free pairs get one per block with capacity-implied
    // upper bounds; release pairs are fixed in place by their bounds.
    for ((ty, t), dem) in &demand {
        let ct = &inst.types[ty.idx()];
        if dem.free > 0 {
            for block in &vessel.blocks {
                let mut ub = dem.free as f64;
                ub = ub.min((block.cap_teu / ct.teu) as f64);
                if ct.teu == 2 {
                    ub = ub.min(block.cap_40 as f64);
                }
                if ct.reefer {
                    ub = ub.min(block.cap_reefer as f64);
                }
                ub = ub.min((block.weight_max / ct.weight).floor());
                let var = model.add_var(
                    format!("x_t{}_{}_{}_l{}", ty, t.origin, t.destination, block.id),
                    0.0,
                    ub,
                    VarKind::Integer,
                )?;
                index.x.insert((*ty, *t, block.id), var);
            }
        } else {
            for &(block, count) in &dem.fixed {
                let var = model.add_var(
                    format!("x_t{}_{}_{}_l{}", ty, t.origin, t.destination, block),
                    count as f64,
                    count as f64,
                    VarKind::Integer,
                )?;
                index.x.insert((*ty, *t, block), var);
            }
        }
    }

    // Indicator and objective variables.
    let on_deck: Vec<BlockId> = vessel.on_deck_blocks().map(|b| b.id).collect();
    for p in 0..nports {
        let p = PortIndex(p);
        for &l in &on_deck {
            let var = model.add_var(format!("delta_p{p}_l{l}"), 0.0, 1.0, VarKind::Binary)?;
            index.delta.insert((p, l), var);
            if variant == Variant::Full {
                let var = model.add_var(
                    format!("yo_p{p}_l{l}"),
                    0.0,
                    f64::INFINITY,
                    VarKind::Continuous,
                )?;
                index.y_overstow.insert((p, l), var);
            }
        }
    }
    for p in 0..nports {
        let var = model.add_var(format!("yt_p{p}"), 0.0, f64::INFINITY, VarKind::Continuous)?;
        index.y_makespan.push(var);
    }

    // Load-all rows for free pairs (release pairs are fixed by bounds).
    for ((ty, t), dem) in &demand {
        if dem.free > 0 {
            let coeffs: Vec<(VarId, f64)> = vessel
                .blocks
                .iter()
                .map(|b| (index.x[&(*ty, *t, b.id)], 1.0))
                .collect();
            model.add_constraint(
                format!("load_t{}_{}_{}", ty, t.origin, t.destination),
                coeffs,
                Sense::Eq,
                dem.free as f64,
            )?;
        }
    }

    // Per-leg capacity and weight rows.
    for p in 0..legs {
        let p = PortIndex(p);
        let onboard: Vec<(TypeId, Transport)> = demand
            .keys()
            .copied()
            .filter(|&(_, t)| t.onboard_at(p))
            .collect();
        for block in &vessel.blocks {
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

        if variant == Variant::Full {
            let lightship = vessel.lightship_weight();
            let ls_moment_l = vessel.lightship_moment(|b| b.cg_l_bar);
            let ls_moment_t = vessel.lightship_moment(|b| b.cg_t_bar);
            let ls_moment_v = vessel.lightship_moment(|b| b.cg_v_bar);
            // (axis selector, limit, sense, row tag, lightship moment)
            type CgRow = (fn(&crate::data::Block) -> f64, f64, Sense, &'static str, f64);
            let cg_rows: [CgRow; 5] = [
                (|b| b.cg_l, vessel.lcg_min, Sense::Ge, "lcg_min", ls_moment_l),
                (|b| b.cg_l, vessel.lcg_max, Sense::Le, "lcg_max", ls_moment_l),
                (|b| b.cg_t, vessel.tcg_min, Sense::Ge, "tcg_min", ls_moment_t),
                (|b| b.cg_t, vessel.tcg_max, Sense::Le, "tcg_max", ls_moment_t),
                (|b| b.cg_v, vessel.vcg_max, Sense::Le, "vcg_max", ls_moment_v),
            ];
            for (axis, limit, sense, tag, ls_moment) in cg_rows {
                let mut coeffs = Vec::new();
                for &(ty, t) in &onboard {
                    let w = inst.types[ty.idx()].weight;
                    for block in &vessel.blocks {
                        if let Some(&var) = index.x.get(&(ty, t, block.id)) {
                            coeffs.push((var, (axis(block) - limit) * w));
                        }
                    }
                }
                model.add_constraint(
                    format!("{tag}_p{p}"),
                    coeffs,
                    sense,
                    limit * lightship - ls_moment,
                )?;
            }

            // Cumulative shear envelope bow to stern.
            let mut cum_lightship = 0.0;
            for bay in &vessel.bays {
                cum_lightship += bay.lightship_weight;
                let mut coeffs = Vec::new();
                for b2 in &vessel.bays[..=bay.id.idx()] {
                    for &l in &b2.blocks {
                        for &(ty, t) in &onboard {
                            if let Some(&var) = index.x.get(&(ty, t, l)) {
                                coeffs.push((var, inst.types[ty.idx()].weight));
                            }
                        }
                    }
                }
                let b = bay.id;
                model.add_constraint(
                    format!("shear_min_p{p}_b{b}"),
                    coeffs.clone(),
                    Sense::Ge,
                    bay.shear_min - cum_lightship,
                )?;
                model.add_constraint(
                    format!("shear_max_p{p}_b{b}"),
                    coeffs,
                    Sense::Le,
                    bay.shear_max - cum_lightship,
                )?;
            }
        }
    }

    // Hatch-overstow machinery and makespan rows, per call port.
    // Release cargo is on board before planning starts: it is not
    // crane-handled at port 0, so it neither triggers hatch activity
    // nor counts toward the makespan there.
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
        let m_active: f64 = active
            .iter()
            .map(|key| demand[key].total() as f64)
            .sum::<f64>()
            * opts.big_m_scale;
        let m_over: f64 = overstowing
            .iter()
            .map(|key| demand[key].total() as f64)
            .sum::<f64>()
            * opts.big_m_scale;

        for &l in &on_deck {
            let delta = index.delta[&(p, l)];
            // Activity below the hatch turns the indicator on.
            let mut below = Vec::new();
            for &lu in vessel.covered_blocks(l) {
                for &(ty, t) in &active {
                    if let Some(&var) = index.x.get(&(ty, t, lu)) {
                        below.push((var, 1.0));
                    }
                }
            }
            below.push((delta, -m_active));
            model.add_constraint(format!("delta_p{p}_l{l}"), below, Sense::Le, 0.0)?;

            // Overstowing cargo on the lid is either counted (full) or
            // banned (reduced) when the indicator is on.
            let mut over = Vec::new();
            for &(ty, t) in &overstowing {
                if let Some(&var) = index.x.get(&(ty, t, l)) {
                    over.push((var, 1.0));
                }
            }
            over.push((delta, m_over));
            if variant == Variant::Full {
                over.push((index.y_overstow[&(p, l)], -1.0));
            }
            model.add_constraint(format!("hatch_p{p}_l{l}"), over, Sense::Le, m_over)?;
        }

        let moves: Vec<(TypeId, Transport)> = match opts.makespan {
            MakespanIndexing::ActiveTransports => active.clone(),
            // As printed, the makespan sums onboard transports; no leg
            // departs the final port.
            MakespanIndexing::OnboardTransports => {
                if p.0 + 1 < nports {
                    demand
                        .keys()
                        .copied()
                        .filter(|&(_, t)| t.onboard_at(p))
                        .collect()
                } else {
                    Vec::new()
                }
            }
        };
        for (b1, b2) in &vessel.adjacent_bay_pairs {
            let mut coeffs = Vec::new();
            for bay in [b1, b2] {
                for &l in &vessel.bays[bay.idx()].blocks {
                    for &(ty, t) in &moves {
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

    // Objective.
    let mut obj: Vec<(VarId, f64)> = index
        .y_makespan
        .iter()
        .map(|&v| (v, inst.cost_makespan))
        .collect();
    if variant == Variant::Full {
        for &var in index.y_overstow.values() {
            obj.push((var, inst.cost_overstow));
        }
    }
    model.set_objective(obj)?;

    Ok((model, index))
}

//! Shared helpers for integration tests: independent oracles and
//! fixture generators. Nothing here touches the engine internals it
//! is used to check.

#![allow(dead_code)]

pub mod naive_simplex;

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mpplan::data::{
    BaySpec, BlockId, BlockSpec, ContainerType, DeckPosition, HatchCoverSpec, Transport, TypeId,
    VesselSpec,
};
use mpplan::linmodel::{LinearModel, Sense, VarKind};
use mpplan::validate::{self, Variant};
use mpplan::{Instance, PlanAssignment, VesselProfile};

/// Random bounded LP: every variable has finite bounds, so the
/// outcome is always Optimal or Infeasible. When `anchored` is true
/// every row is satisfied by a hidden anchor point, guaranteeing
/// feasibility; otherwise rows are fully random and usually clash.
pub fn random_bounded_lp(seed: u64, max_vars: usize, max_rows: usize, anchored: bool) -> LinearModel {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(0..=max_rows);
    let mut model = LinearModel::new(format!("rand{seed}"));
    let mut anchor = Vec::with_capacity(n);
    for j in 0..n {
        let lo = (rng.random_range(-40..=20) as f64) / 4.0;
        let width = (rng.random_range(0..=32) as f64) / 4.0;
        model
            .add_var(format!("x{j}"), lo, lo + width, VarKind::Continuous)
            .unwrap();
        let frac = rng.random_range(0..=4) as f64 / 4.0;
        anchor.push(lo + frac * width);
    }
    for i in 0..m {
        let mut coeffs = Vec::new();
        let mut at_anchor = 0.0;
        for (j, &aj) in anchor.iter().enumerate() {
            if rng.random_bool(0.6) {
                let c = (rng.random_range(-20..=20) as f64) / 4.0;
                if c != 0.0 {
                    coeffs.push((mpplan::linmodel::VarId(j), c));
                    at_anchor += c * aj;
                }
            }
        }
        let sense = match rng.random_range(0..3) {
            0 => Sense::Le,
            1 => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs = if anchored {
            let slack = (rng.random_range(0..=20) as f64) / 4.0;
            match sense {
                Sense::Le => at_anchor + slack,
                Sense::Ge => at_anchor - slack,
                Sense::Eq => at_anchor,
            }
        } else {
            (rng.random_range(-60..=60) as f64) / 4.0
        };
        model
            .add_constraint(format!("c{i}"), coeffs, sense, rhs)
            .unwrap();
    }
    let obj: Vec<(mpplan::linmodel::VarId, f64)> = (0..n)
        .map(|j| {
            (
                mpplan::linmodel::VarId(j),
                (rng.random_range(-20..=20) as f64) / 4.0,
            )
        })
        .collect();
    model.set_objective(obj).unwrap();
    model
}

/// Crafted degenerate LPs: many ties in the ratio test, redundant
/// rows, and zero right-hand sides. Termination is the property under
/// test.
pub fn degenerate_lps() -> Vec<LinearModel> {
    let mut out = Vec::new();

    // Beale's cycling example (classic, cycles under naive Dantzig).
    {
        let mut m = LinearModel::new("beale");
        let x1 = m.add_var("x1", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let x2 = m.add_var("x2", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let x3 = m.add_var("x3", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let x4 = m.add_var("x4", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        m.add_constraint("r1", [(x1, 0.25), (x2, -8.0), (x3, -1.0), (x4, 9.0)], Sense::Le, 0.0)
            .unwrap();
        m.add_constraint("r2", [(x1, 0.5), (x2, -12.0), (x3, -0.5), (x4, 3.0)], Sense::Le, 0.0)
            .unwrap();
        m.add_constraint("r3", [(x3, 1.0)], Sense::Le, 1.0).unwrap();
        m.set_objective([(x1, -0.75), (x2, 150.0), (x3, -0.02), (x4, 6.0)])
            .unwrap();
        out.push(m);
    }

    // All-zero rhs: the origin is the only feasible point.
    {
        let mut m = LinearModel::new("origin");
        let vars: Vec<_> = (0..6)
            .map(|j| {
                m.add_var(format!("x{j}"), 0.0, f64::INFINITY, VarKind::Continuous)
                    .unwrap()
            })
            .collect();
        for i in 0..6 {
            let coeffs: Vec<_> = vars
                .iter()
                .enumerate()
                .map(|(j, &v)| (v, if i == j { 2.0 } else { 1.0 }))
                .collect();
            m.add_constraint(format!("c{i}"), coeffs, Sense::Le, 0.0)
                .unwrap();
        }
        m.set_objective(vars.iter().map(|&v| (v, -1.0)).collect::<Vec<_>>())
            .unwrap();
        out.push(m);
    }

    // Massive ratio-test ties: identical rows stacked.
    {
        let mut m = LinearModel::new("ties");
        let x = m.add_var("x", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let y = m.add_var("y", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        for i in 0..12 {
            m.add_constraint(format!("c{i}"), [(x, 1.0), (y, 1.0)], Sense::Le, 4.0)
                .unwrap();
        }
        m.add_constraint("cx", [(x, 1.0), (y, -1.0)], Sense::Eq, 0.0)
            .unwrap();
        m.set_objective([(x, -1.0), (y, -1.0)]).unwrap();
        out.push(m);
    }

    // Degenerate transportation-like equalities with zero supplies.
    {
        let mut m = LinearModel::new("zero_supply");
        let mut vars = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                vars.push(
                    m.add_var(format!("t{i}{j}"), 0.0, f64::INFINITY, VarKind::Continuous)
                        .unwrap(),
                );
            }
        }
        for i in 0..3 {
            let coeffs: Vec<_> = (0..3).map(|j| (vars[i * 3 + j], 1.0)).collect();
            let rhs = if i == 0 { 2.0 } else { 0.0 };
            m.add_constraint(format!("s{i}"), coeffs, Sense::Eq, rhs)
                .unwrap();
        }
        for j in 0..3 {
            let coeffs: Vec<_> = (0..3).map(|i| (vars[i * 3 + j], 1.0)).collect();
            let rhs = if j == 2 { 2.0 } else { 0.0 };
            m.add_constraint(format!("d{j}"), coeffs, Sense::Eq, rhs)
                .unwrap();
        }
        let obj: Vec<_> = vars
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, ((k * 7) % 5) as f64 + 1.0))
            .collect();
        m.set_objective(obj).unwrap();
        out.push(m);
    }

    out
}

/// Exhaustive-enumeration oracle: tries every distribution of every
/// demand pair over the blocks, checks feasibility with the validator,
/// and returns the best objective. Independent of both model builders
/// and of the solver.
pub fn brute_force_optimum(inst: &Instance, variant: Variant) -> Option<f64> {
    let nblocks = inst.vessel.num_blocks();
    let pairs: Vec<((TypeId, Transport), u32)> = inst
        .demand_pairs()
        .iter()
        .map(|(&key, d)| (key, d.free))
        .collect();
    // Fixed (release) placements are part of every plan.
    let mut base = PlanAssignment::default();
    for ((ty, t), dem) in inst.demand_pairs() {
        for (block, count) in dem.fixed {
            base.add(ty, t, block, count);
        }
    }

    let mut best: Option<f64> = None;
    let mut plan = base.clone();
    enumerate_pairs(inst, variant, &pairs, 0, nblocks, &mut plan, &mut best);
    best
}

fn enumerate_pairs(
    inst: &Instance,
    variant: Variant,
    pairs: &[((TypeId, Transport), u32)],
    at: usize,
    nblocks: usize,
    plan: &mut PlanAssignment,
    best: &mut Option<f64>,
) {
    if at == pairs.len() {
        let report = validate::validate(inst, plan, variant, 1e-6).expect("structure");
        if report.feasible {
            let obj = match variant {
                Variant::Full => validate::objective_of(inst, plan).expect("objective"),
                Variant::Reduced => inst.cost_makespan * report.total_makespan() as f64,
            };
            if best.map(|b| obj < b).unwrap_or(true) {
                *best = Some(obj);
            }
        }
        return;
    }
    let ((ty, t), count) = pairs[at];
    if count == 0 {
        enumerate_pairs(inst, variant, pairs, at + 1, nblocks, plan, best);
        return;
    }
    // All compositions of `count` into `nblocks` parts.
    let mut parts = vec![0u32; nblocks];
    compose(inst, variant, pairs, at, nblocks, ty, t, count, 0, &mut parts, plan, best);
}

#[allow(clippy::too_many_arguments)]
fn compose(
    inst: &Instance,
    variant: Variant,
    pairs: &[((TypeId, Transport), u32)],
    at: usize,
    nblocks: usize,
    ty: TypeId,
    t: Transport,
    left: u32,
    block: usize,
    parts: &mut [u32],
    plan: &mut PlanAssignment,
    best: &mut Option<f64>,
) {
    if block == nblocks - 1 {
        parts[block] = left;
        for (l, &c) in parts.iter().enumerate() {
            if c > 0 {
                plan.add(ty, t, BlockId(l as u32), c);
            }
        }
        enumerate_pairs(inst, variant, pairs, at + 1, nblocks, plan, best);
        for (l, &c) in parts.iter().enumerate() {
            if c > 0 {
                let key = (ty, t, BlockId(l as u32));
                let cur = plan.x.get_mut(&key).expect("present");
                *cur -= c;
                if *cur == 0 {
                    plan.x.remove(&key);
                }
            }
        }
        return;
    }
    for take in 0..=left {
        parts[block] = take;
        compose(
            inst, variant, pairs, at, nblocks, ty, t, left - take, block + 1, parts, plan, best,
        );
    }
    parts[block] = 0;
}

/// A small S-class vessel for cross-formulation tests: 4 bays of 4
/// blocks (two lids over two holds), 192 TEU, one-to-one hatch covers.
pub fn small_test_vessel() -> VesselProfile {
    let mut bays = Vec::new();
    for b in 0..4 {
        let lcg = (b as f64 - 1.5) * 15.0;
        let mut blocks = Vec::new();
        for deck in [DeckPosition::OnDeck, DeckPosition::BelowDeck] {
            for k in 0..2 {
                blocks.push(BlockSpec {
                    deck,
                    cap_teu: 12,
                    cap_40: 6,
                    cap_reefer: 4,
                    weight_max: 260.0,
                    cg_l: lcg,
                    cg_v: if deck == DeckPosition::OnDeck { 16.0 } else { 7.0 },
                    cg_t: (k as f64 - 0.5) * 8.0,
                });
            }
        }
        bays.push(BaySpec {
            lightship_weight: 500.0,
            cg_l_bar: lcg,
            cg_v_bar: 9.0,
            cg_t_bar: 0.0,
            shear_min: 0.0,
            shear_max: 1e7,
            blocks,
            hatch_covers: vec![
                HatchCoverSpec { over: 0, under: vec![2] },
                HatchCoverSpec { over: 1, under: vec![3] },
            ],
        });
    }
    VesselProfile::new(VesselSpec {
        name: "test-S".into(),
        lcg_min: -20.0,
        lcg_max: 20.0,
        vcg_max: 13.5,
        tcg_min: -2.5,
        tcg_max: 2.5,
        bays,
    })
    .unwrap()
}

/// Tiny instances for exhaustive-enumeration checks: at most 2 bays of
/// 2 blocks, 3 ports, and no more than 6 containers.
pub fn tiny_enum_instance(seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x7e57);
    let bays = rng.random_range(1..=2);
    let mut bay_specs = Vec::new();
    for b in 0..bays {
        let lcg = (b as f64 - (bays as f64 - 1.0) / 2.0) * 20.0;
        bay_specs.push(BaySpec {
            lightship_weight: 200.0,
            cg_l_bar: lcg,
            cg_v_bar: 6.0,
            cg_t_bar: 0.0,
            shear_min: 0.0,
            shear_max: 1e7,
            blocks: vec![
                BlockSpec {
                    deck: DeckPosition::OnDeck,
                    cap_teu: rng.random_range(2..=4),
                    cap_40: 1,
                    cap_reefer: 1,
                    weight_max: 90.0,
                    cg_l: lcg,
                    cg_v: 12.0,
                    cg_t: 0.0,
                },
                BlockSpec {
                    deck: DeckPosition::BelowDeck,
                    cap_teu: rng.random_range(2..=4),
                    cap_40: 1,
                    cap_reefer: 1,
                    weight_max: 90.0,
                    cg_l: lcg,
                    cg_v: 4.0,
                    cg_t: 0.0,
                },
            ],
            hatch_covers: vec![HatchCoverSpec { over: 0, under: vec![1] }],
        });
    }
    let vessel = VesselProfile::new(VesselSpec {
        name: format!("tiny-enum-{seed}"),
        lcg_min: -25.0,
        lcg_max: 25.0,
        vcg_max: 11.0,
        tcg_min: -3.0,
        tcg_max: 3.0,
        bays: bay_specs,
    })
    .unwrap();

    let types = vec![
        ContainerType { id: TypeId(0), teu: 1, length_ft: 20, weight: 8.0, reefer: false },
        ContainerType { id: TypeId(1), teu: 1, length_ft: 20, weight: 20.0, reefer: false },
        ContainerType { id: TypeId(2), teu: 2, length_ft: 40, weight: 14.0, reefer: false },
    ];
    let transports = [
        Transport::new(0, 1),
        Transport::new(0, 2),
        Transport::new(1, 2),
    ];
    let mut loadlist: BTreeMap<(Transport, TypeId), u32> = BTreeMap::new();
    let mut boxes_left = rng.random_range(3..=6u32);
    let mut teu_left: u32 = vessel.teu_capacity;
    while boxes_left > 0 {
        let ty = &types[rng.random_range(0..types.len())];
        if ty.teu > teu_left {
            break;
        }
        let t = transports[rng.random_range(0..transports.len())];
        *loadlist.entry((t, ty.id)).or_insert(0) += 1;
        boxes_left -= 1;
        teu_left -= ty.teu;
    }
    Instance::new(
        format!("tiny-enum-{seed}"),
        vessel,
        3,
        types,
        loadlist,
        BTreeMap::new(),
        1.0,
        1.0,
    )
    .unwrap()
}

/// Small empty-ROB S-class instances (5 ports) for the formulation
/// comparison, built on [`small_test_vessel`] with a reduced palette.
/// Counts are evened so perfectly balanced integral plans exist and
/// optimality proofs close quickly.
pub fn small_comparison_instance(seed: u64, utilization: f64) -> Instance {
    use mpplan::generator::{generate_with_palette, mini_palette, GenSpec};
    let spec = GenSpec {
        vessel_class: mpplan::SizeClass::S,
        num_ports: 5,
        rob_fraction: 0.0,
        utilization,
        seed,
    };
    let inst = generate_with_palette(&spec, &small_test_vessel(), mini_palette()).unwrap();
    let loadlist: BTreeMap<(Transport, TypeId), u32> = inst
        .loadlist
        .iter()
        .filter_map(|(&k, &c)| {
            let even = c - c % 2;
            (even > 0).then_some((k, even))
        })
        .collect();
    Instance::new(
        inst.name.clone(),
        inst.vessel.clone(),
        inst.num_ports,
        inst.types.clone(),
        loadlist,
        BTreeMap::new(),
        inst.cost_makespan,
        inst.cost_overstow,
    )
    .unwrap()
}

/// Fixed comparison suite: (seed, utilization) cells on
/// [`small_test_vessel`] whose integer solves close quickly, so the
/// paired-formulation equivalence checks run in seconds.
pub const COMPARISON_CELLS: [(u64, f64); 24] = [
    (0, 0.55),
    (0, 0.6),
    (2, 0.55),
    (2, 0.6),
    (3, 0.6),
    (4, 0.55),
    (5, 0.55),
    (5, 0.6),
    (6, 0.6),
    (7, 0.55),
    (8, 0.55),
    (8, 0.6),
    (9, 0.55),
    (10, 0.55),
    (10, 0.6),
    (11, 0.6),
    (12, 0.55),
    (12, 0.6),
    (15, 0.6),
    (16, 0.55),
    (17, 0.55),
    (17, 0.6),
    (18, 0.6),
    (19, 0.55),
];

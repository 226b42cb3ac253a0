//! Small fixtures shared by unit tests across the crate.

use std::collections::BTreeMap;

use super::*;

/// Two bays, two blocks each (on-deck over below-deck), generous limits.
pub fn tiny_vessel() -> VesselProfile {
    tiny_vessel_with_bays(2)
}

pub fn tiny_vessel_with_bays(num_bays: u32) -> VesselProfile {
    let mut bays = Vec::new();
    for b in 0..num_bays {
        // Spread bays along the hull, symmetric around amidships.
        let lcg = (b as f64 - (num_bays as f64 - 1.0) / 2.0) * 20.0;
        bays.push(BaySpec {
            lightship_weight: 100.0,
            cg_l_bar: lcg,
            cg_v_bar: 5.0,
            cg_t_bar: 0.0,
            shear_min: 0.0,
            shear_max: 1e7,
            blocks: vec![
                BlockSpec {
                    deck: DeckPosition::OnDeck,
                    cap_teu: 10,
                    cap_40: 5,
                    cap_reefer: 2,
                    weight_max: 400.0,
                    cg_l: lcg,
                    cg_v: 12.0,
                    cg_t: 0.0,
                },
                BlockSpec {
                    deck: DeckPosition::BelowDeck,
                    cap_teu: 10,
                    cap_40: 5,
                    cap_reefer: 2,
                    weight_max: 400.0,
                    cg_l: lcg,
                    cg_v: 4.0,
                    cg_t: 0.0,
                },
            ],
            hatch_covers: vec![HatchCoverSpec {
                over: 0,
                under: vec![1],
            }],
        });
    }
    VesselProfile::new(VesselSpec {
        name: format!("tiny-{num_bays}"),
        lcg_min: -1e3,
        lcg_max: 1e3,
        vcg_max: 1e3,
        tcg_min: -1e3,
        tcg_max: 1e3,
        bays,
    })
    .unwrap()
}

pub fn tiny_types() -> Vec<ContainerType> {
    vec![
        ContainerType {
            id: TypeId(0),
            teu: 1,
            length_ft: 20,
            weight: 10.0,
            reefer: false,
        },
        ContainerType {
            id: TypeId(1),
            teu: 2,
            length_ft: 40,
            weight: 24.0,
            reefer: false,
        },
    ]
}

/// Two ports, four type-0 boxes on the single transport.
pub fn tiny_instance() -> Instance {
    let mut loadlist = BTreeMap::new();
    loadlist.insert((Transport::new(0, 1), TypeId(0)), 4);
    Instance::new(
        "tiny",
        tiny_vessel(),
        2,
        tiny_types(),
        loadlist,
        BTreeMap::new(),
        1.0,
        1.0,
    )
    .unwrap()
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::plan::PlanAssignment;
use super::vessel::{VesselProfile, VesselSpec};
use super::{BlockId, DataError, PortIndex, TypeId};

/// A container type: a (length, weight class, reefer) bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainerType {
    #[serde(skip)]
    pub id: TypeId,
    /// TEU factor: 1 for 20-foot, 2 for 40-foot boxes.
    pub teu: u32,
    pub length_ft: u32,
    /// Weight per box, tonnes.
    pub weight: f64,
    pub reefer: bool,
}

impl ContainerType {
    fn validate(&self) -> Result<(), DataError> {
        let ok = (self.teu == 1 && self.length_ft == 20) || (self.teu == 2 && self.length_ft == 40);
        if !ok {
            return Err(DataError::invalid(format!(
                "container type {}: teu {} inconsistent with length {} ft",
                self.id, self.teu, self.length_ft
            )));
        }
        if self.weight <= 0.0 || !self.weight.is_finite() {
            return Err(DataError::invalid(format!(
                "container type {}: weight must be positive",
                self.id
            )));
        }
        Ok(())
    }
}

/// An (origin, destination) port pair describing a cargo flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transport {
    pub origin: PortIndex,
    pub destination: PortIndex,
}

impl Transport {
    pub fn new(origin: u32, destination: u32) -> Transport {
        Transport {
            origin: PortIndex(origin),
            destination: PortIndex(destination),
        }
    }

    /// True if this transport's cargo is aboard on the leg departing `p`.
    pub fn onboard_at(&self, p: PortIndex) -> bool {
        self.origin <= p && p < self.destination
    }

    /// True if this transport loads or discharges at `p`.
    pub fn active_at(&self, p: PortIndex) -> bool {
        self.origin == p || self.destination == p
    }

    /// True if this transport's cargo stays aboard across the call at `p`.
    pub fn overstowing_at(&self, p: PortIndex) -> bool {
        self.origin < p && p < self.destination
    }
}

impl std::fmt::Display for Transport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.origin, self.destination)
    }
}

/// One loadlist entry: containers of `type` to carry on (origin, destination).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadlistEntry {
    pub origin: u32,
    pub destination: u32,
    #[serde(rename = "type")]
    pub type_id: u32,
    pub count: u32,
}

/// One release (ROB) entry: containers already on board at the first
/// port, fixed in `block`, destined for `destination`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReleaseEntry {
    #[serde(rename = "type")]
    pub type_id: u32,
    pub destination: u32,
    pub block: u32,
    pub count: u32,
}

/// Serde-facing instance document; see `docs/formats.md`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub vessel: VesselSpec,
    pub num_ports: u32,
    pub types: Vec<ContainerType>,
    pub loadlist: Vec<LoadlistEntry>,
    pub release: Vec<ReleaseEntry>,
    pub cost_makespan: f64,
    pub cost_overstow: f64,
}

/// A master-planning instance: vessel, rotation, cargo demand and
/// release (ROB) cargo, plus the two objective weights.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub vessel: VesselProfile,
    pub num_ports: u32,
    pub types: Vec<ContainerType>,
    /// Containers to load, keyed by (transport, type).
    pub loadlist: BTreeMap<(Transport, TypeId), u32>,
    /// Containers already on board, keyed by (type, destination, block).
    pub release: BTreeMap<(TypeId, PortIndex, BlockId), u32>,
    /// Objective weight of the per-port makespan term.
    pub cost_makespan: f64,
    /// Objective weight of the per-block hatch-overstow term.
    pub cost_overstow: f64,
}

impl Instance {
    #[allow(clippy::too_many_arguments)] // mirrors the instance fields
    pub fn new(
        name: impl Into<String>,
        vessel: VesselProfile,
        num_ports: u32,
        types: Vec<ContainerType>,
        loadlist: BTreeMap<(Transport, TypeId), u32>,
        release: BTreeMap<(TypeId, PortIndex, BlockId), u32>,
        cost_makespan: f64,
        cost_overstow: f64,
    ) -> Result<Instance, DataError> {
        let mut types = types;
        for (i, t) in types.iter_mut().enumerate() {
            t.id = TypeId(i as u32);
            t.validate()?;
        }
        if num_ports < 2 {
            return Err(DataError::invalid("instance needs at least two ports"));
        }
        if !cost_makespan.is_finite()
            || !cost_overstow.is_finite()
            || cost_makespan < 0.0
            || cost_overstow < 0.0
        {
            return Err(DataError::invalid("cost weights must be finite and >= 0"));
        }
        for &(t, ty) in loadlist.keys() {
            if !(t.origin < t.destination && t.destination.0 < num_ports) {
                return Err(DataError::invalid(format!(
                    "loadlist transport {t} violates 0 <= o < d < {num_ports}"
                )));
            }
            if ty.idx() >= types.len() {
                return Err(DataError::invalid(format!(
                    "loadlist references unknown type {ty}"
                )));
            }
        }
        for &(ty, dest, block) in release.keys() {
            if dest.0 == 0 || dest.0 >= num_ports {
                return Err(DataError::invalid(format!(
                    "release destination {dest} out of range (must be in 1..{num_ports})"
                )));
            }
            if ty.idx() >= types.len() {
                return Err(DataError::invalid(format!(
                    "release references unknown type {ty}"
                )));
            }
            if block.idx() >= vessel.num_blocks() {
                return Err(DataError::invalid(format!(
                    "release references unknown block {block}"
                )));
            }
            // Release cargo is fixed in place; a loadlist entry for the
            // same (type, transport) would contradict the fixing.
            let t = Transport {
                origin: PortIndex(0),
                destination: dest,
            };
            if loadlist.contains_key(&(t, ty)) {
                return Err(DataError::invalid(format!(
                    "loadlist and release overlap on type {ty}, transport {t}"
                )));
            }
        }
        Ok(Instance {
            name: name.into(),
            vessel,
            num_ports,
            types,
            loadlist,
            release,
            cost_makespan,
            cost_overstow,
        })
    }

    pub fn from_file(file: InstanceFile) -> Result<Instance, DataError> {
        let vessel = VesselProfile::new(file.vessel)?;
        let mut loadlist = BTreeMap::new();
        for e in &file.loadlist {
            let key = (Transport::new(e.origin, e.destination), TypeId(e.type_id));
            if loadlist.insert(key, e.count).is_some() {
                return Err(DataError::invalid(format!(
                    "duplicate loadlist entry for transport ({},{}) type {}",
                    e.origin, e.destination, e.type_id
                )));
            }
        }
        let mut release = BTreeMap::new();
        for e in &file.release {
            let key = (TypeId(e.type_id), PortIndex(e.destination), BlockId(e.block));
            if release.insert(key, e.count).is_some() {
                return Err(DataError::invalid(format!(
                    "duplicate release entry for type {} destination {} block {}",
                    e.type_id, e.destination, e.block
                )));
            }
        }
        Instance::new(
            file.name,
            vessel,
            file.num_ports,
            file.types,
            loadlist,
            release,
            file.cost_makespan,
            file.cost_overstow,
        )
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            name: self.name.clone(),
            vessel: self.vessel.to_spec(),
            num_ports: self.num_ports,
            types: self.types.clone(),
            loadlist: self
                .loadlist
                .iter()
                .map(|(&(t, ty), &count)| LoadlistEntry {
                    origin: t.origin.0,
                    destination: t.destination.0,
                    type_id: ty.0,
                    count,
                })
                .collect(),
            release: self
                .release
                .iter()
                .map(|(&(ty, dest, block), &count)| ReleaseEntry {
                    type_id: ty.0,
                    destination: dest.0,
                    block: block.0,
                    count,
                })
                .collect(),
            cost_makespan: self.cost_makespan,
            cost_overstow: self.cost_overstow,
        }
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Instance, DataError> {
        let text = std::fs::read_to_string(path)?;
        let file: InstanceFile = serde_json::from_str(&text)?;
        Instance::from_file(file)
    }

    pub fn to_json(&self) -> Result<String, DataError> {
        let mut s = serde_json::to_string_pretty(&self.to_file())?;
        s.push('\n');
        Ok(s)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    fn check_port(&self, p: PortIndex, max_exclusive: u32) -> Result<(), DataError> {
        if p.0 >= max_exclusive {
            return Err(DataError::PortOutOfRange {
                port: p.0,
                num_ports: self.num_ports,
            });
        }
        Ok(())
    }

    /// All transports with any cargo (loadlist or release), sorted.
    pub fn transports(&self) -> Vec<Transport> {
        let mut set: BTreeSet<Transport> = self.loadlist.keys().map(|&(t, _)| t).collect();
        for &(_, dest, _) in self.release.keys() {
            set.insert(Transport {
                origin: PortIndex(0),
                destination: dest,
            });
        }
        set.into_iter().collect()
    }

    /// Transports aboard on the leg departing `p` (o <= p < d).
    pub fn transports_onboard(&self, p: PortIndex) -> Result<Vec<Transport>, DataError> {
        self.check_port(p, self.num_ports - 1)?;
        Ok(self
            .transports()
            .into_iter()
            .filter(|t| t.onboard_at(p))
            .collect())
    }

    /// Transports loading or discharging at `p` (o = p or d = p).
    pub fn transports_active(&self, p: PortIndex) -> Result<Vec<Transport>, DataError> {
        self.check_port(p, self.num_ports)?;
        Ok(self
            .transports()
            .into_iter()
            .filter(|t| t.active_at(p))
            .collect())
    }

    /// Transports staying aboard across the call at `p` (o < p < d).
    pub fn transports_overstowing(&self, p: PortIndex) -> Result<Vec<Transport>, DataError> {
        self.check_port(p, self.num_ports)?;
        Ok(self
            .transports()
            .into_iter()
            .filter(|t| t.overstowing_at(p))
            .collect())
    }

    /// True when (type, transport) carries release (ROB) cargo. Such
    /// pairs are disjoint from loadlist pairs by construction.
    pub fn is_release_pair(&self, ty: TypeId, t: Transport) -> bool {
        t.origin.0 == 0
            && self
                .release
                .range((ty, t.destination, BlockId(0))..=(ty, t.destination, BlockId(u32::MAX)))
                .any(|(_, &c)| c > 0)
    }

    /// Whether cargo of this pair is crane-handled at `p`. Release
    /// cargo is already stowed when planning starts, so it costs no
    /// moves at port 0; it still counts when discharged.
    pub fn moves_at(&self, ty: TypeId, t: Transport, p: PortIndex) -> bool {
        t.active_at(p) && !(p.0 == 0 && t.origin.0 == 0 && self.is_release_pair(ty, t))
    }

    /// Demand per (type, transport): loadlist counts plus, for release
    /// transports, the fixed per-block placements.
    pub fn demand_pairs(&self) -> BTreeMap<(TypeId, Transport), Demand> {
        let mut out: BTreeMap<(TypeId, Transport), Demand> = BTreeMap::new();
        for (&(t, ty), &count) in &self.loadlist {
            if count == 0 {
                continue;
            }
            out.entry((ty, t)).or_default().free = count;
        }
        for (&(ty, dest, block), &count) in &self.release {
            if count == 0 {
                continue;
            }
            let t = Transport {
                origin: PortIndex(0),
                destination: dest,
            };
            out.entry((ty, t)).or_default().fixed.push((block, count));
        }
        out
    }

    /// Total container count across loadlist and release.
    pub fn total_containers(&self) -> u64 {
        self.loadlist.values().map(|&c| c as u64).sum::<u64>()
            + self.release.values().map(|&c| c as u64).sum::<u64>()
    }

    /// Sum of demand TEU aboard on the leg departing `p`.
    pub fn onboard_teu(&self, p: PortIndex) -> Result<u64, DataError> {
        self.check_port(p, self.num_ports - 1)?;
        let mut teu = 0u64;
        for (&(t, ty), &count) in &self.loadlist {
            if t.onboard_at(p) {
                teu += count as u64 * self.types[ty.idx()].teu as u64;
            }
        }
        for (&(ty, dest, _), &count) in &self.release {
            let t = Transport {
                origin: PortIndex(0),
                destination: dest,
            };
            if t.onboard_at(p) {
                teu += count as u64 * self.types[ty.idx()].teu as u64;
            }
        }
        Ok(teu)
    }

    /// Vessel displacement leaving port `p`: lightship plus the weight
    /// of all cargo aboard under `plan`.
    pub fn displacement(&self, plan: &PlanAssignment, p: PortIndex) -> Result<f64, DataError> {
        self.check_port(p, self.num_ports - 1)?;
        let mut w = self.vessel.lightship_weight();
        for (&(ty, t, _), &count) in &plan.x {
            if t.onboard_at(p) {
                w += count as f64 * self.types[ty.idx()].weight;
            }
        }
        Ok(w)
    }
}

/// Demand for one (type, transport) pair.
#[derive(Debug, Clone, Default)]
pub struct Demand {
    /// Freely placeable container count (from the loadlist).
    pub free: u32,
    /// Fixed placements (from release cargo): (block, count).
    pub fixed: Vec<(BlockId, u32)>,
}

impl Demand {
    pub fn total(&self) -> u32 {
        self.free + self.fixed.iter().map(|&(_, c)| c).sum::<u32>()
    }
}

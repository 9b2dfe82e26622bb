use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use super::graph::{shortest_path, Edge, Node, NodeId, RoadNetwork, Weight};
use super::NetError;

pub type VehicleId = usize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleMission {
    pub id: VehicleId,
    pub origin: NodeId,
    pub dest: NodeId,
    /// Earliest departure, hours.
    pub t_earliest: f64,
    /// Latest arrival, hours.
    pub t_latest: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavingsParams {
    pub sigma_l: f64,
    pub sigma_f: f64,
    pub lambda: usize,
}

impl Default for SavingsParams {
    fn default() -> Self {
        SavingsParams {
            sigma_l: 0.02,
            sigma_f: 0.1,
            lambda: 10,
        }
    }
}

impl SavingsParams {
    pub fn validate(&self) -> Result<(), NetError> {
        if !(0.0 < self.sigma_l && self.sigma_l < self.sigma_f && self.sigma_f < 1.0) {
            return Err(NetError::Validation(format!(
                "sigma ordering: need 0 < sigma_l < sigma_f < 1, got {} and {}",
                self.sigma_l, self.sigma_f
            )));
        }
        if self.lambda < 2 {
            return Err(NetError::Validation(format!("lambda must be at least 2, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// How an instance was produced. Not part of the core schema; carried as an
/// optional `meta` object so generated files round-trip exactly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationMeta {
    pub model: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hubs: Option<(NodeId, NodeId)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_km: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub network: RoadNetwork,
    /// Sorted by id; `missions[v - 1].id == v`.
    pub missions: Vec<VehicleMission>,
    pub params: SavingsParams,
    pub meta: Option<GenerationMeta>,
}

impl ProblemInstance {
    pub fn new(
        network: RoadNetwork,
        mut missions: Vec<VehicleMission>,
        params: SavingsParams,
        meta: Option<GenerationMeta>,
    ) -> Result<ProblemInstance, NetError> {
        missions.sort_by_key(|m| m.id);
        let inst = ProblemInstance {
            network,
            missions,
            params,
            meta,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), NetError> {
        self.params.validate()?;
        for (k, m) in self.missions.iter().enumerate() {
            if m.id != k + 1 {
                return Err(NetError::Validation(format!(
                    "vehicle ids must be 1..{} without gaps; found {} at position {}",
                    self.missions.len(),
                    m.id,
                    k + 1
                )));
            }
            if !self.network.contains(m.origin) || !self.network.contains(m.dest) {
                return Err(NetError::Validation(format!("vehicle {} uses an unknown node", m.id)));
            }
            if m.origin == m.dest {
                return Err(NetError::Validation(format!("vehicle {} has origin equal to destination", m.id)));
            }
            if !(m.t_earliest.is_finite() && m.t_latest.is_finite()) {
                return Err(NetError::Validation(format!("vehicle {} has a non-finite time window", m.id)));
            }
            let sp = shortest_path(&self.network, m.origin, m.dest, Weight::Time)
                .map_err(|_| NetError::Validation(format!("vehicle {} cannot reach its destination", m.id)))?;
            if m.t_latest < m.t_earliest + sp.time - 1e-9 {
                return Err(NetError::Validation(format!(
                    "time window: vehicle {} needs {} h but has {} h",
                    m.id,
                    sp.time,
                    m.t_latest - m.t_earliest
                )));
            }
        }
        Ok(())
    }

    pub fn mission(&self, v: VehicleId) -> &VehicleMission {
        &self.missions[v - 1]
    }

    pub fn num_vehicles(&self) -> usize {
        self.missions.len()
    }

    pub fn vehicle_ids(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.missions.iter().map(|m| m.id)
    }

    /// Total fuel when every vehicle drives its shortest fuel path alone.
    pub fn fuel_zero(&self) -> Result<f64, NetError> {
        let mut total = 0.0;
        for m in &self.missions {
            total += shortest_path(&self.network, m.origin, m.dest, Weight::Fuel)?.fuel;
        }
        Ok(total)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    vehicles: Vec<VehicleMission>,
    params: ParamsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<GenerationMeta>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    sigma_l: f64,
    sigma_f: f64,
    lambda: usize,
}

pub fn instance_to_json(inst: &ProblemInstance) -> String {
    let file = InstanceFile {
        nodes: inst.network.nodes().to_vec(),
        edges: inst.network.edges().to_vec(),
        vehicles: inst.missions.clone(),
        params: ParamsFile {
            sigma_l: inst.params.sigma_l,
            sigma_f: inst.params.sigma_f,
            lambda: inst.params.lambda,
        },
        meta: inst.meta.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str) -> Result<ProblemInstance, NetError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| NetError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let network = RoadNetwork::new(file.nodes, file.edges)?;
    let params = SavingsParams {
        sigma_l: file.params.sigma_l,
        sigma_f: file.params.sigma_f,
        lambda: file.params.lambda,
    };
    ProblemInstance::new(network, file.vehicles, params, file.meta)
}

pub fn save_instance(inst: &ProblemInstance, path: &FsPath) -> Result<(), NetError> {
    fs::write(path, instance_to_json(inst))?;
    Ok(())
}

pub fn load_instance(path: &FsPath) -> Result<ProblemInstance, NetError> {
    let text = fs::read_to_string(path)?;
    instance_from_json(&text)
}

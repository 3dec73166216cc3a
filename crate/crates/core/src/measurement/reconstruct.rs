//! Profile reconstruction from setting estimates.
//!
//! Magnitudes come from the Z-type setting. Each measurable pair with both
//! endpoints active gives a phase difference `atan2(sin, cos)`. Phases are
//! then propagated outward from the lowest active site of every connected
//! component along a maximum-weight spanning tree, weight being the squared
//! correlator magnitude.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{MeasurementError, ObservableId, Protocol, SettingEstimates, SettingLabel};
use crate::encoding::{hypercube_edges, EncodingMap};
use crate::profile::{wrap_phase, AmplitudeProfile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseEdge {
    pub j: usize,
    pub k: usize,
    /// `t_k - t_j` in (-pi, pi].
    pub delta: f64,
    pub weight: f64,
    pub in_tree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseGraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<PhaseEdge>,
    /// Component label per site; `None` for inactive sites. Components are
    /// numbered by their lowest site.
    pub component: Vec<Option<usize>>,
    pub n_components: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub inactive_sites: Vec<usize>,
    /// Reference sites of the components beyond the first; their phases are
    /// not tied to the global reference.
    pub detached_references: Vec<usize>,
    /// Active pairs whose correlator magnitude is too small to fix a phase.
    pub near_zero_pairs: Vec<(usize, usize)>,
    pub unknown_outcomes: u64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reconstruction {
    pub profile: AmplitudeProfile,
    pub graph: PhaseGraph,
    pub diagnostics: Diagnostics,
}

/// Pairs a protocol can measure.
fn measurable_pairs(protocol: Protocol, n_sites: usize, map: Option<&EncodingMap>) -> Result<Vec<(usize, usize)>, MeasurementError> {
    match (protocol, map) {
        (Protocol::Original, None) => Ok((1..n_sites).map(|k| (k - 1, k)).collect()),
        (Protocol::Binary, Some(m)) => Ok(hypercube_edges(m).into_iter().map(|e| (e.j, e.k)).collect()),
        (Protocol::Original, Some(_)) => Err(MeasurementError::MapNotAllowed),
        (Protocol::Binary, None) => Err(MeasurementError::MapRequired),
    }
}

fn required_labels(protocol: Protocol, map: Option<&EncodingMap>) -> Vec<SettingLabel> {
    match protocol {
        Protocol::Original => vec![SettingLabel::MZ, SettingLabel::MXX, SettingLabel::MXY],
        Protocol::Binary => {
            let n = map.map_or(0, |m| m.width());
            let mut v = vec![SettingLabel::BZ];
            v.extend((0..n).map(SettingLabel::BX));
            v.extend((0..n).map(SettingLabel::BY));
            v
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    /// Keeps the smaller root so roots stay at the lowest site.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// Rebuilds the amplitude profile from a complete family of estimates.
///
/// `epsilon` is the activity threshold on magnitudes.
pub fn reconstruct_profile(
    estimates: &[SettingEstimates],
    protocol: Protocol,
    map: Option<&EncodingMap>,
    n_sites: usize,
    epsilon: f64,
) -> Result<Reconstruction, MeasurementError> {
    if let Some(m) = map {
        if m.n_sites() != n_sites {
            return Err(MeasurementError::Inconsistent(format!(
                "map covers {} sites, expected {n_sites}",
                m.n_sites()
            )));
        }
    }
    let pairs = measurable_pairs(protocol, n_sites, map)?;
    let by_label: BTreeMap<SettingLabel, &SettingEstimates> = estimates.iter().map(|e| (e.label, e)).collect();
    for label in required_labels(protocol, map) {
        if !by_label.contains_key(&label) {
            return Err(MeasurementError::MissingSetting(label.to_string()));
        }
    }
    // Merged observable table.
    let mut table: BTreeMap<ObservableId, f64> = BTreeMap::new();
    let mut diagnostics = Diagnostics::default();
    for e in estimates {
        diagnostics.unknown_outcomes += e.unknown_outcomes;
        for (&id, est) in &e.estimates {
            table.insert(id, est.value);
        }
    }
    if diagnostics.unknown_outcomes > 0 {
        diagnostics
            .warnings
            .push(format!("{} outcomes outside the encoded codewords were ignored", diagnostics.unknown_outcomes));
    }

    let magnitudes: Vec<f64> = (0..n_sites)
        .map(|j| table.get(&ObservableId::Population(j)).copied().unwrap_or(0.0).max(0.0).sqrt())
        .collect();
    let active: Vec<bool> = magnitudes.iter().map(|&m| m > epsilon).collect();
    diagnostics.inactive_sites = (0..n_sites).filter(|&j| !active[j]).collect();

    let mut edges = Vec::new();
    for (j, k) in pairs {
        if !active[j] || !active[k] {
            continue;
        }
        let (c, s) = match (table.get(&ObservableId::Cos(j, k)), table.get(&ObservableId::Sin(j, k))) {
            (Some(&c), Some(&s)) => (c, s),
            _ => continue,
        };
        let weight = c * c + s * s;
        if weight.sqrt() < 2.0 * epsilon * epsilon {
            // No usable phase information; keep it out of the tree.
            diagnostics.near_zero_pairs.push((j, k));
            continue;
        }
        edges.push(PhaseEdge { j, k, delta: wrap_phase(s.atan2(c)), weight, in_tree: false });
    }

    // Kruskal on descending weight; ties broken by site order for determinism.
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| {
        edges[b]
            .weight
            .total_cmp(&edges[a].weight)
            .then((edges[a].j, edges[a].k).cmp(&(edges[b].j, edges[b].k)))
    });
    let mut uf = UnionFind((0..n_sites).collect());
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_sites];
    for i in order {
        let (j, k) = (edges[i].j, edges[i].k);
        if uf.union(j, k) {
            edges[i].in_tree = true;
            adjacency[j].push((k, edges[i].delta));
            adjacency[k].push((j, -edges[i].delta));
        }
    }

    let mut phases: Vec<Option<f64>> = vec![None; n_sites];
    let mut component: Vec<Option<usize>> = vec![None; n_sites];
    let mut n_components = 0;
    for root in 0..n_sites {
        if !active[root] || phases[root].is_some() {
            continue;
        }
        if n_components > 0 {
            diagnostics.detached_references.push(root);
        }
        phases[root] = Some(0.0);
        component[root] = Some(n_components);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let base = phases[u].expect("visited");
            for &(v, d) in &adjacency[u] {
                if phases[v].is_none() {
                    phases[v] = Some(wrap_phase(base + d));
                    component[v] = Some(n_components);
                    queue.push_back(v);
                }
            }
        }
        n_components += 1;
    }
    if !diagnostics.detached_references.is_empty() {
        diagnostics.warnings.push(format!(
            "phase graph has {n_components} components; phases of sites {:?} are set to 0 without a measured link",
            diagnostics.detached_references
        ));
    }
    if !diagnostics.near_zero_pairs.is_empty() {
        diagnostics
            .warnings
            .push(format!("{} pairs have near-zero correlators and carry no phase link", diagnostics.near_zero_pairs.len()));
    }

    let profile = AmplitudeProfile { magnitudes, phases, active, threshold: epsilon };
    let graph = PhaseGraph { nodes: profile.active_sites(), edges, component, n_components };
    Ok(Reconstruction { profile, graph, diagnostics })
}

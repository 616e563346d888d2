//! Service locations bound to network nodes and their availability in the
//! giant component at the percolation threshold.

use std::collections::BTreeMap;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{haversine_km, VenueRecord};
use crate::graph::{NodeId, RoadNetwork};

/// The ten canonical service categories (closed set, case-sensitive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    MedicalCenter,
    TravelTransport,
    Food,
    CollegeUniversity,
    Residence,
    ArtsEntertainment,
    ShopsService,
    NightlifeSpot,
    ProfessionalOther,
    OutdoorsRecreation,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::MedicalCenter,
        Category::TravelTransport,
        Category::Food,
        Category::CollegeUniversity,
        Category::Residence,
        Category::ArtsEntertainment,
        Category::ShopsService,
        Category::NightlifeSpot,
        Category::ProfessionalOther,
        Category::OutdoorsRecreation,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::MedicalCenter => "Medical Center",
            Category::TravelTransport => "Travel & Transport",
            Category::Food => "Food",
            Category::CollegeUniversity => "College & University",
            Category::Residence => "Residence",
            Category::ArtsEntertainment => "Arts & Entertainment",
            Category::ShopsService => "Shops & Service",
            Category::NightlifeSpot => "Nightlife Spot",
            Category::ProfessionalOther => "Professional & Other Places",
            Category::OutdoorsRecreation => "Outdoors & Recreation",
        }
    }

    pub fn parse(label: &str) -> Option<Category> {
        Category::ALL.iter().copied().find(|c| c.label() == label)
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A venue bound to its nearest network node.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceAssignment {
    pub venue_id: String,
    pub category: Category,
    pub node: NodeId,
    pub distance_km: f64,
}

/// Assignment results plus the venues discarded as too far from the network.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentOutcome {
    pub assignments: Vec<ServiceAssignment>,
    pub omitted: Vec<String>,
}

/// Distances closer than this are treated as equal when breaking
/// nearest-node ties (the smaller node id wins).
const TIE_EPS_KM: f64 = 1e-12;

/// Exact nearest-node lookup over nodes sorted by latitude.
///
/// Expands outward from the latitude closest to the query and stops once
/// the remaining latitude separation alone exceeds the best distance
/// (haversine distance is bounded below by the meridian arc).
struct NodeLocator<'a> {
    network: &'a RoadNetwork,
    by_lat: Vec<NodeId>,
}

impl<'a> NodeLocator<'a> {
    fn new(network: &'a RoadNetwork) -> Self {
        let mut by_lat: Vec<NodeId> = network.node_ids().collect();
        by_lat.sort_by(|&a, &b| {
            network
                .point(a)
                .lat
                .partial_cmp(&network.point(b).lat)
                .expect("validated latitudes are finite")
                .then(a.cmp(&b))
        });
        NodeLocator { network, by_lat }
    }

    fn nearest(&self, query: crate::geo::GeoPoint) -> (NodeId, f64) {
        let n = self.by_lat.len();
        debug_assert!(n > 0);
        let start = self
            .by_lat
            .partition_point(|&id| self.network.point(id).lat < query.lat);
        let km_per_deg = crate::geo::EARTH_RADIUS_KM * std::f64::consts::PI / 180.0;
        let lat_gap_km =
            |idx: usize| (self.network.point(self.by_lat[idx]).lat - query.lat).abs() * km_per_deg;

        let mut best: Option<(NodeId, f64)> = None;
        let mut lo = start as isize - 1;
        let mut hi = start;
        loop {
            // close a side once its latitude gap alone rules it out; gaps
            // only grow as the scan moves outward
            if let Some((_, bd)) = best {
                if lo >= 0 && lat_gap_km(lo as usize) > bd + TIE_EPS_KM {
                    lo = -1;
                }
                if hi < n && lat_gap_km(hi) > bd + TIE_EPS_KM {
                    hi = n;
                }
            }
            let next = match (lo >= 0, hi < n) {
                (false, false) => break,
                (true, false) => {
                    let v = lo as usize;
                    lo -= 1;
                    v
                }
                (false, true) => {
                    let v = hi;
                    hi += 1;
                    v
                }
                (true, true) => {
                    if lat_gap_km(lo as usize) <= lat_gap_km(hi) {
                        let v = lo as usize;
                        lo -= 1;
                        v
                    } else {
                        let v = hi;
                        hi += 1;
                        v
                    }
                }
            };
            let id = self.by_lat[next];
            let d = haversine_km(query, self.network.point(id));
            best = match best {
                None => Some((id, d)),
                Some((bid, bd)) => {
                    if d + TIE_EPS_KM < bd || ((d - bd).abs() <= TIE_EPS_KM && id < bid) {
                        Some((id, d))
                    } else {
                        Some((bid, bd))
                    }
                }
            };
        }
        best.expect("non-empty network")
    }
}

/// Binds each venue to its nearest network node by great-circle distance.
///
/// Venues farther than `radius_km` from every node are omitted (the radius
/// is inclusive). Ties within 1e-12 km go to the smaller node id.
pub fn assign_venues(
    network: &RoadNetwork,
    venues: &[VenueRecord],
    radius_km: f64,
) -> Result<AssignmentOutcome> {
    if network.node_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    if radius_km.is_nan() || radius_km <= 0.0 {
        return Err(Error::Validation(format!(
            "radius_km {radius_km} must be positive"
        )));
    }
    let locator = NodeLocator::new(network);
    let mut assignments = Vec::new();
    let mut omitted = Vec::new();
    for venue in venues {
        let (node, distance_km) = locator.nearest(venue.point);
        if distance_km <= radius_km {
            assignments.push(ServiceAssignment {
                venue_id: venue.venue_id.clone(),
                category: venue.category,
                node,
                distance_km,
            });
        } else {
            omitted.push(venue.venue_id.clone());
        }
    }
    Ok(AssignmentOutcome {
        assignments,
        omitted,
    })
}

/// Per-category service availability for one surviving node set.
#[derive(Debug, Clone, PartialEq)]
pub struct AvailabilityReport {
    /// Fraction of assigned venues reachable, per category with >=1 venue.
    pub per_category: BTreeMap<Category, f64>,
    /// Unweighted mean over categories with >=1 assigned venue.
    pub mean: f64,
    /// Venues assigned per category (all ten categories listed; zeros flag
    /// categories absent from the mean).
    pub assigned_counts: BTreeMap<Category, usize>,
    /// Venues retained per category.
    pub retained_counts: BTreeMap<Category, usize>,
}

/// Availability of assigned services within a surviving node set.
pub fn availability_at_threshold(
    assignments: &[ServiceAssignment],
    surviving_nodes: &HashSet<NodeId>,
) -> Result<AvailabilityReport> {
    if assignments.is_empty() {
        return Err(Error::NoAssignedVenues);
    }
    let mut assigned_counts: BTreeMap<Category, usize> =
        Category::ALL.iter().map(|&c| (c, 0)).collect();
    let mut retained_counts: BTreeMap<Category, usize> =
        Category::ALL.iter().map(|&c| (c, 0)).collect();
    for a in assignments {
        *assigned_counts
            .get_mut(&a.category)
            .expect("all categories present") += 1;
        if surviving_nodes.contains(&a.node) {
            *retained_counts
                .get_mut(&a.category)
                .expect("all categories present") += 1;
        }
    }
    let mut per_category = BTreeMap::new();
    for (&cat, &assigned) in &assigned_counts {
        if assigned > 0 {
            per_category.insert(cat, retained_counts[&cat] as f64 / assigned as f64);
        }
    }
    let mean = per_category.values().sum::<f64>() / per_category.len() as f64;
    Ok(AvailabilityReport {
        per_category,
        mean,
        assigned_counts,
        retained_counts,
    })
}

/// Availability averaged over percolation runs (a single run for the
/// attack scheme, one per realization for the error scheme).
#[derive(Debug, Clone, PartialEq)]
pub struct AvailabilityAverage {
    pub per_category: BTreeMap<Category, f64>,
    pub mean: f64,
    pub assigned_counts: BTreeMap<Category, usize>,
    /// Mean retained venue count per category over the runs.
    pub retained_mean: BTreeMap<Category, f64>,
    pub runs: usize,
}

/// Averages per-run reports; all runs share one assignment, so the
/// category roster is identical across them.
pub fn average_availability(reports: &[AvailabilityReport]) -> Result<AvailabilityAverage> {
    let first = reports.first().ok_or(Error::NoRuns)?;
    let n = reports.len() as f64;
    let mut per_category = BTreeMap::new();
    for &cat in first.per_category.keys() {
        let sum: f64 = reports.iter().map(|r| r.per_category[&cat]).sum();
        per_category.insert(cat, sum / n);
    }
    let mut retained_mean = BTreeMap::new();
    for &cat in first.assigned_counts.keys() {
        let sum: f64 = reports.iter().map(|r| r.retained_counts[&cat] as f64).sum();
        retained_mean.insert(cat, sum / n);
    }
    let mean = reports.iter().map(|r| r.mean).sum::<f64>() / n;
    Ok(AvailabilityAverage {
        per_category,
        mean,
        assigned_counts: first.assigned_counts.clone(),
        retained_mean,
        runs: reports.len(),
    })
}

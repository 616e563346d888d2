//! Geographic primitives and input-file parsing.
//!
//! Two input formats feed the toolkit: a paths file (one JSON object per
//! line, each an ordered polyline of map nodes) and a venues CSV
//! (`venue_id,category,lat,lon`). Coordinates are degrees; distances are
//! kilometers throughout.

use std::collections::HashSet;
use std::io::BufRead;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::services::Category;

/// IUGG mean Earth radius in kilometers.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// A geographic position in degrees, longitude first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    /// Validates that both coordinates are finite and in range
    /// (lon in [-180, 180], lat in [-90, 90]).
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::Validation(format!("longitude {lon} out of range")));
        }
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Validation(format!("latitude {lat} out of range")));
        }
        Ok(GeoPoint { lon, lat })
    }
}

/// One node of a raw map path: opaque id plus position.
#[derive(Debug, Clone, PartialEq)]
pub struct PathNode {
    pub id: String,
    pub point: GeoPoint,
}

/// One raw map path: an ordered polyline of at least two nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub path_id: String,
    pub nodes: Vec<PathNode>,
}

/// A categorized service location.
#[derive(Debug, Clone, PartialEq)]
pub struct VenueRecord {
    pub venue_id: String,
    pub category: Category,
    pub point: GeoPoint,
}

/// Great-circle distance in kilometers between two points.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat_a = a.lat.to_radians();
    let lat_b = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat_a.cos() * lat_b.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[derive(Deserialize)]
struct RawPathNode {
    id: String,
    lon: f64,
    lat: f64,
}

#[derive(Deserialize)]
struct RawPath {
    path_id: String,
    nodes: Vec<RawPathNode>,
}

/// Parses a paths file: one JSON object per line,
/// `{"path_id": "...", "nodes": [{"id": "...", "lon": .., "lat": ..}, ..]}`.
///
/// Every well-formed line yields one record preserving node order. A path
/// needs at least two nodes, in-range coordinates, and no two consecutive
/// nodes with the same id.
pub fn parse_paths_file<R: BufRead>(input: R) -> Result<Vec<PathRecord>> {
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let raw: RawPath = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if raw.nodes.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("path {:?} needs >=2 nodes", raw.path_id),
            });
        }
        let mut nodes = Vec::with_capacity(raw.nodes.len());
        for n in raw.nodes {
            let point = GeoPoint::new(n.lon, n.lat).map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            nodes.push(PathNode { id: n.id, point });
        }
        for pair in nodes.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!(
                        "path {:?} repeats node {:?} consecutively",
                        raw.path_id, pair[0].id
                    ),
                });
            }
        }
        records.push(PathRecord {
            path_id: raw.path_id,
            nodes,
        });
    }
    Ok(records)
}

/// Parses a venues CSV with header `venue_id,category,lat,lon`.
///
/// Categories are a closed set of ten labels; anything else is an error,
/// as are duplicate venue ids and out-of-range coordinates.
pub fn parse_venues_file<R: std::io::Read>(input: R) -> Result<Vec<VenueRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut seen: HashSet<String> = HashSet::new();
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line_no = idx + 2; // header is line 1
        let row = row.map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if row.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 fields, got {}", row.len()),
            });
        }
        let venue_id = row[0].to_string();
        let category = Category::parse(&row[1]).ok_or_else(|| Error::UnknownCategory {
            line: line_no,
            label: row[1].to_string(),
        })?;
        let lat: f64 = row[2].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad latitude {:?}", &row[2]),
        })?;
        let lon: f64 = row[3].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad longitude {:?}", &row[3]),
        })?;
        let point = GeoPoint::new(lon, lat).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if !seen.insert(venue_id.clone()) {
            return Err(Error::DuplicateVenue { id: venue_id });
        }
        records.push(VenueRecord {
            venue_id,
            category,
            point,
        });
    }
    Ok(records)
}

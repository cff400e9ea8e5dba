//! 8-bit PGM heatmaps of Wigner grids with a JSON sidecar.
//!
//! Columns run along `x` (left to right), rows along `p` with the largest
//! momentum in the top row. Values map linearly from `[min, max]` onto
//! `[0, 255]`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use weylquant::wavefunctions::GridSpec;
use weylquant::wigner::WignerGrid;

use crate::error::{CliError, CliResult};
use crate::SCHEMA_VERSION;

#[derive(Debug, Serialize)]
pub struct AxisInfo {
    pub min: f64,
    pub spacing: f64,
    pub points: usize,
}

impl From<&GridSpec> for AxisInfo {
    fn from(g: &GridSpec) -> Self {
        AxisInfo { min: g.x_min, spacing: g.dx, points: g.nx }
    }
}

#[derive(Debug, Serialize)]
pub struct HeatmapSidecar {
    pub schema_version: u32,
    pub image: String,
    pub width: usize,
    pub height: usize,
    pub min: f64,
    pub max: f64,
    pub hbar: f64,
    pub x: AxisInfo,
    pub p: AxisInfo,
    pub orientation: &'static str,
}

/// Raw P5 bytes and the value range used for the mapping.
pub fn render_pgm(f: &WignerGrid) -> (Vec<u8>, f64, f64) {
    let (nx, np) = (f.nx(), f.np());
    let min = f.values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = f.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let mut bytes = format!("P5\n{nx} {np}\n255\n").into_bytes();
    bytes.reserve(nx * np);
    for row in 0..np {
        let ip = np - 1 - row;
        for ix in 0..nx {
            let level = if span > 0.0 { ((f.at(ix, ip) - min) / span * 255.0).round() } else { 0.0 };
            bytes.push(level.clamp(0.0, 255.0) as u8);
        }
    }
    (bytes, min, max)
}

/// Writes `path` (PGM) and `path` with a `.json` extension (sidecar).
/// Returns the sidecar path.
pub fn export_heatmap(f: &WignerGrid, path: &Path) -> CliResult<PathBuf> {
    let (bytes, min, max) = render_pgm(f);
    fs::write(path, &bytes).map_err(|e| CliError::io(path, e))?;
    let sidecar = HeatmapSidecar {
        schema_version: SCHEMA_VERSION,
        image: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        width: f.nx(),
        height: f.np(),
        min,
        max,
        hbar: f.hbar,
        x: (&f.axes.x).into(),
        p: (&f.axes.p).into(),
        orientation: "columns x ascending, rows p descending",
    };
    let json_path = path.with_extension("json");
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes") + "\n";
    fs::write(&json_path, text).map_err(|e| CliError::io(&json_path, e))?;
    Ok(json_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use weylquant::wigner::{ho_wigner_analytic, PhaseGrid};

    #[test]
    fn ground_state_peaks_at_origin_pixel() {
        let axes = PhaseGrid::square(GridSpec::from_range(64, -6.0, 6.0).unwrap());
        let f = ho_wigner_analytic(0, &axes, 1.0);
        let (bytes, min, max) = render_pgm(&f);
        let header = b"P5\n64 64\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let pixels = &bytes[header.len()..];
        assert_eq!(pixels.len(), 64 * 64);
        // origin is ix = 32, ip = 32, i.e. row 31
        assert_eq!(pixels[31 * 64 + 32], 255);
        assert!(min >= 0.0 && max > 0.3);
    }

    #[test]
    fn flat_grid_maps_to_black() {
        let axes = PhaseGrid::square(GridSpec::from_range(4, -1.0, 1.0).unwrap());
        let f = WignerGrid::from_fn(axes, 1.0, |_, _| 0.25);
        let (bytes, _, _) = render_pgm(&f);
        assert!(bytes[bytes.len() - 16..].iter().all(|&b| b == 0));
    }
}

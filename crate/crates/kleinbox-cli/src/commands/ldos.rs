//! `kleinbox ldos`: LDOS maps of the left dimers alone, the right dimers
//! alone, and the whole chain, on a shared frequency axis.

use std::process::ExitCode;

use kleinbox_core::config::RunConfig;
use kleinbox_core::export;
use kleinbox_core::pipeline::three_ldos_maps;

use super::{write_artifact, CmdResult};
use crate::CommonArgs;

pub fn run(cfg: &RunConfig, common: &CommonArgs, gamma: f64, points: usize) -> CmdResult {
    if !(gamma > 0.0) {
        eprintln!("error: gamma must be positive");
        return Ok(ExitCode::from(2));
    }
    let params = cfg.params()?;
    let (win_lo, win_hi) = params.klein_window_abs();
    let maps = three_ldos_maps(cfg, gamma, points)?;
    let names = ["left", "right", "full"];

    let mut outputs = Vec::new();
    for (map, name) in maps.iter().zip(names) {
        write_artifact(
            &common.out_dir,
            &format!("ldos_{name}.csv"),
            &export::csv_ldos_map(map),
            &mut outputs,
        )?;
        let sites_f: Vec<f64> = map.sites.iter().map(|&s| s as f64).collect();
        let title = format!(
            "LDOS {name} chain (Klein window {win_lo:.1}..{win_hi:.1} MHz, gamma {gamma} MHz)"
        );
        write_artifact(
            &common.out_dir,
            &format!("ldos_{name}.svg"),
            &export::svg_heatmap(&title, &map.freq_mhz, &sites_f, &map.values),
            &mut outputs,
        )?;
        // DOS line alongside each map.
        let dos = map.dos();
        let pts: Vec<(f64, f64)> = map.freq_mhz.iter().copied().zip(dos).collect();
        write_artifact(
            &common.out_dir,
            &format!("dos_{name}.svg"),
            &export::svg_line_plot(&format!("DOS {name} chain"), &[("dos", &pts)]),
            &mut outputs,
        )?;
    }
    println!(
        "wrote {} artifacts to {} (window {:.3}..{:.3} MHz)",
        outputs.len(),
        common.out_dir.display(),
        win_lo,
        win_hi
    );
    Ok(ExitCode::SUCCESS)
}

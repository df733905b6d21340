//! `kleinbox levels`: window levels of both solvers side by side.

use std::process::ExitCode;

use kleinbox_core::config::RunConfig;
use kleinbox_core::export;
use kleinbox_core::lattice::{compare_levels, solve_chain};

use super::{write_artifact, CmdResult};
use crate::CommonArgs;

pub fn run(cfg: &RunConfig, common: &CommonArgs, symmetric_check: bool) -> CmdResult {
    let params = cfg.params()?;
    let mut clean = cfg.clone();
    clean.disorder_sigma_mhz = 0.0;
    let eig = solve_chain(&clean.chain()?)?;
    let cmp = compare_levels(&eig, &params)?;

    println!("# window levels ({} states), energies relative to f0 = {} MHz", cmp.lattice_mhz.len(), params.f0_mhz);
    println!("{:>3} {:>12} {:>12} {:>9}", "n", "lattice", "continuum", "delta");
    for i in 0..cmp.lattice_mhz.len() {
        println!(
            "{:>3} {:>12.4} {:>12.4} {:>9.4}",
            i + 1,
            cmp.lattice_mhz[i],
            cmp.continuum_mhz[i],
            cmp.delta_mhz[i]
        );
    }
    println!("max |delta| = {:.4} MHz", cmp.max_abs_delta_mhz);

    if symmetric_check {
        let e = &cmp.continuum_mhz;
        let worst = (0..e.len())
            .map(|n| (e[n] + e[e.len() - 1 - n] - params.v0_mhz).abs())
            .fold(0.0f64, f64::max);
        println!("symmetric-check: max |E_n + E_mirror - V0| = {worst:.3e} MHz");
    }

    let mut outputs = Vec::new();
    if common.format == "json" {
        let rows: Vec<serde_json::Value> = (0..cmp.lattice_mhz.len())
            .map(|i| {
                serde_json::json!({
                    "n": i + 1,
                    "e_lattice_mhz": cmp.lattice_mhz[i],
                    "e_continuum_mhz": cmp.continuum_mhz[i],
                    "delta_mhz": cmp.delta_mhz[i],
                })
            })
            .collect();
        write_artifact(
            &common.out_dir,
            "levels.json",
            &serde_json::to_string_pretty(&rows).expect("serializable"),
            &mut outputs,
        )?;
    } else {
        write_artifact(
            &common.out_dir,
            "levels.csv",
            &export::csv_level_comparison(&cmp, params.f0_mhz),
            &mut outputs,
        )?;
    }
    println!("wrote {}/{}", common.out_dir.display(), outputs[0]);
    Ok(ExitCode::SUCCESS)
}

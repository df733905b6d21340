//! `kleinbox pipeline`: simulate, synthesize spectra, extract, fit,
//! compare, and write everything down with a reproducibility manifest.

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use kleinbox_core::config::RunConfig;
use kleinbox_core::dirac::{build_eigenstate, default_grid_step, find_levels};
use kleinbox_core::error::PipelineError;
use kleinbox_core::export;
use kleinbox_core::lattice::{solve_chain, sublattice_envelopes, SiteMap};
use kleinbox_core::pipeline::{run_pipeline, three_ldos_maps};
use kleinbox_core::spectroscopy::{synth_reflection, FreqGrid};

use super::{write_artifact, CmdResult};
use crate::manifest::RunManifest;
use crate::PipelineArgs;

pub fn run(cfg: &RunConfig, args: &PipelineArgs) -> CmdResult {
    let mut manifest = RunManifest::new("pipeline", cfg.clone());
    manifest.seeds = args.seeds;
    manifest.gamma_mhz = args.gamma;
    manifest.grid_step_mm = args.grid_step;
    manifest.write_traces = args.write_traces;
    manifest.format = args.common.format.clone();
    execute(&args.common.out_dir, manifest, args.summary)
}

/// Re-run a finished pipeline from its manifest, writing next to it.
pub fn replay(manifest_path: &Path) -> CmdResult {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| PipelineError::Stage {
        stage: "replay",
        message: format!("cannot read {}: {e}", manifest_path.display()),
    })?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| PipelineError::Stage {
            stage: "replay",
            message: format!("manifest parse: {e}"),
        })?;
    let dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    execute(&dir, manifest, false)
}

fn execute(out_dir: &Path, mut manifest: RunManifest, summary: bool) -> CmdResult {
    let cfg = manifest.config.clone();
    let params = cfg.params()?;
    let mut outputs = Vec::new();

    let report = run_pipeline(&cfg, manifest.seeds)?;

    // Level comparison table.
    if let Some(cmp) = &report.level_comparison {
        write_artifact(
            out_dir,
            "levels.csv",
            &export::csv_level_comparison(cmp, params.f0_mhz),
            &mut outputs,
        )?;
    }

    // LDOS maps of the three measurement configurations.
    let maps = three_ldos_maps(&cfg, manifest.gamma_mhz.max(0.5), 1200)?;
    for (map, name) in maps.iter().zip(["left", "right", "full"]) {
        write_artifact(
            out_dir,
            &format!("ldos_{name}.csv"),
            &export::csv_ldos_map(map),
            &mut outputs,
        )?;
    }
    let dos = maps[2].dos();
    let pts: Vec<(f64, f64)> = maps[2].freq_mhz.iter().copied().zip(dos).collect();
    write_artifact(
        out_dir,
        "dos_full.svg",
        &export::svg_line_plot("DOS, whole chain", &[("dos", &pts)]),
        &mut outputs,
    )?;

    // Third-mode intensity comparison (the quantized-spinor figure data):
    // lattice eigenvector vs continuum spinor vs measured extraction.
    let mut clean = cfg.clone();
    clean.disorder_sigma_mhz = 0.0;
    let chain = clean.chain()?;
    let eig = solve_chain(&chain)?;
    let (lo, hi) = params.klein_window_abs();
    let idx = eig.indices_in_window(lo, hi);
    if idx.len() >= 3 {
        let continuum = find_levels(&params)?;
        let grid_step = manifest.grid_step_mm.unwrap_or_else(|| default_grid_step(&params));
        let field = build_eigenstate(continuum.energies_mhz[2], &params, grid_step)?;
        write_artifact(out_dir, "mode3_spinor.csv", &export::csv_spinor_field(&field), &mut outputs)?;
        let map = SiteMap::for_chain(&chain, params.a0_mm);
        let env = sublattice_envelopes(&eig, idx[2], &map, chain.n_left)?;
        write_artifact(out_dir, "mode3_lattice.csv", &export::csv_envelopes(&env), &mut outputs)?;
        if let Some(rt) = &report.roundtrip {
            let mut csv = String::from("site,x_mm,extracted,generated\n");
            for (i, (got, want)) in
                rt.intensity_profile.iter().zip(&rt.intensity_truth).enumerate()
            {
                let _ = writeln!(csv, "{},{},{},{}", i, map.x_of_site(i), got, want);
            }
            write_artifact(out_dir, "mode3_extracted.csv", &csv, &mut outputs)?;
            let a_pts: Vec<(f64, f64)> = rt
                .intensity_profile
                .iter()
                .enumerate()
                .step_by(2)
                .map(|(i, &v)| (map.x_of_site(i), v))
                .collect();
            let t_pts: Vec<(f64, f64)> = rt
                .intensity_truth
                .iter()
                .enumerate()
                .step_by(2)
                .map(|(i, &v)| (map.x_of_site(i), v))
                .collect();
            write_artifact(
                out_dir,
                "mode3_sublattice_a.svg",
                &export::svg_line_plot(
                    "third mode, sublattice A: extracted vs generated",
                    &[("extracted", &a_pts), ("generated", &t_pts)],
                ),
                &mut outputs,
            )?;
        }
    }

    // Per-seed recovery table.
    if let Some(rec) = &report.recovery {
        let mut csv =
            String::from("seed,mc2_mhz,hbar_c_mhz_mm,f0_mhz,delta_f_mhz,seq_converged\n");
        for s in &rec.per_seed {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                s.seed,
                s.headline.mc2_mhz,
                s.headline.hbar_c_mhz_mm,
                s.headline.f0_mhz,
                s.headline.delta_f_mhz,
                s.sequence.converged
            );
        }
        write_artifact(out_dir, "recovery.csv", &csv, &mut outputs)?;
        if summary {
            let m = &rec.median;
            println!("parameter recovery over {} seeds (medians):", rec.per_seed.len());
            println!("  mc^2     = {:9.4} MHz   (generator {:9.4})", m.mc2_mhz, params.mc2_mhz);
            println!(
                "  c hbar   = {:9.4} MHz mm (generator {:9.4})",
                m.hbar_c_mhz_mm, params.hbar_c_mhz_mm
            );
            println!("  f0       = {:9.3} MHz   (generator {:9.3})", m.f0_mhz, params.f0_mhz);
            println!("  delta f  = {:9.4} MHz   (generator {:9.4})", m.delta_f_mhz, params.v0_mhz);
        }
    }

    // Optional raw traces of the disordered chain.
    if manifest.write_traces {
        let eig_dis = solve_chain(&cfg.chain()?)?;
        let grid = FreqGrid::new(lo - 16.0, hi + 16.0, 1024);
        for site in 0..eig_dis.n_sites() {
            let trace =
                synth_reflection(&eig_dis, site, &grid, manifest.gamma_mhz, 0.25, 0.0, cfg.seed);
            write_artifact(
                &out_dir.join("traces"),
                &format!("site_{site:02}.csv"),
                &export::csv_trace(&trace),
                &mut outputs,
            )?;
        }
        // Re-prefix trace outputs with their subdirectory.
        for name in outputs.iter_mut().filter(|n| n.starts_with("site_")) {
            *name = format!("traces/{name}");
        }
    }

    // Summary + checks.
    let mut all_passed = true;
    for check in &report.checks {
        println!("[{}] {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
        all_passed &= check.passed;
    }
    let summary_json = serde_json::json!({
        "preset_seed": cfg.seed,
        "checks": report.checks,
        "all_passed": all_passed,
    });
    write_artifact(
        out_dir,
        "summary.json",
        &serde_json::to_string_pretty(&summary_json).expect("serializable"),
        &mut outputs,
    )?;

    manifest.outputs = outputs;
    let manifest_text = serde_json::to_string_pretty(&manifest).expect("serializable");
    std::fs::write(out_dir.join("manifest.json"), &manifest_text).map_err(|e| {
        PipelineError::Stage { stage: "manifest", message: e.to_string() }
    })?;
    println!(
        "pipeline complete: {} artifacts in {}, manifest.json written",
        manifest.outputs.len(),
        out_dir.display()
    );
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(4) })
}

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{assemble_dtn_matrix, build_kernel_spectrum, DtnMatrix, KernelSpectrum};
use crate::inversion::{decompose, image_from_svd, inject_noise, relative_perturbation, ImagingMap};
use crate::pipeline::ExperimentConfig;

pub const KERNEL_FILE: &str = "kernel.csv";
pub const MATRIX_BIN_FILE: &str = "matrix.bin";
pub const MATRIX_CSV_FILE: &str = "matrix.csv";
pub const MAP_CSV_FILE: &str = "map.csv";
pub const MAP_PGM_FILE: &str = "map.pgm";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Everything needed to reproduce a run. The `[config]` table can be fed back
/// to `reconstruct --config`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub noise_ratio: f64,
    pub retained_singular_values: usize,
    pub degenerate_points: usize,
    pub outputs: Vec<PathBuf>,
    pub config: ExperimentConfig,
    pub timings: Vec<StageTiming>,
}

impl RunManifest {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

/// In-memory products of a run, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct ExperimentProducts {
    pub spectrum: KernelSpectrum,
    pub clean: DtnMatrix,
    pub measured: DtnMatrix,
    pub noise_ratio: f64,
    pub retained: usize,
    pub map: ImagingMap,
    pub timings: Vec<StageTiming>,
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage))?;
    timings.push(StageTiming {
        stage: stage.to_string(),
        seconds: start.elapsed().as_secs_f64(),
    });
    Ok(out)
}

/// spectrum -> matrix -> noisy matrix -> SVD -> imaging map.
pub fn compute_experiment(config: &ExperimentConfig) -> Result<ExperimentProducts> {
    config.validate()?;
    let mut timings = Vec::new();
    let spectrum = timed(&mut timings, "kernel", || build_kernel_spectrum(&config.material, config.n_modes))?;
    let clean = timed(&mut timings, "matrix", || assemble_dtn_matrix(&spectrum, config.n_boundary))?;
    let measured = timed(&mut timings, "noise", || inject_noise(&clean, &config.noise))?;
    let noise_ratio = relative_perturbation(&clean, &measured);
    let svd = timed(&mut timings, "svd", || decompose(&measured))?;
    let (map, retained) = timed(&mut timings, "imaging", || {
        let imager = crate::inversion::Imager::new(&svd, &config.reg)?;
        Ok((image_from_svd(&svd, &config.reg, &config.grid)?, imager.retained()))
    })?;
    Ok(ExperimentProducts {
        spectrum,
        clean,
        measured,
        noise_ratio,
        retained,
        map,
        timings,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Creates the output directory and checks it accepts files.
fn prepare_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".shtomo-write-check");
    write(&probe, b"")?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let dir = &config.outputs.dir;
    prepare_output_dir(dir).map_err(|e| e.in_stage("output"))?;

    let products = compute_experiment(config)?;
    let mut outputs = Vec::new();
    let mut emit = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        write(&path, bytes).map_err(|e| e.in_stage("write"))?;
        outputs.push(path);
        Ok(())
    };
    let o = &config.outputs;
    if o.kernel_csv {
        emit(KERNEL_FILE, products.spectrum.to_csv().as_bytes())?;
    }
    if o.matrix_bin {
        emit(MATRIX_BIN_FILE, &products.measured.to_bytes())?;
    }
    if o.matrix_csv {
        emit(MATRIX_CSV_FILE, products.measured.to_csv().as_bytes())?;
    }
    if o.map_csv {
        emit(MAP_CSV_FILE, products.map.to_csv().as_bytes())?;
    }
    if o.map_pgm {
        emit(MAP_PGM_FILE, products.map.to_pgm().as_bytes())?;
    }
    outputs.push(dir.join(MANIFEST_FILE));

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.noise.seed,
        noise_ratio: products.noise_ratio,
        retained_singular_values: products.retained,
        degenerate_points: products.map.degenerate_count(),
        outputs,
        config: config.clone(),
        timings: products.timings,
    };
    write(&dir.join(MANIFEST_FILE), manifest.to_toml_string().as_bytes()).map_err(|e| e.in_stage("write"))?;
    Ok(manifest)
}

//! Implementations of the CLI subcommands.

use crate::manifest::{write_manifest, ManifestRow};
use persphere::analysis::{
    average_linkage, cut, distance_matrix, labels_from_csv, labels_to_csv, matrix_correlation,
    rand_index, DistanceMatrix,
};
use persphere::figures;
use persphere::generators::{
    fda_sample, fda_smooth, replicate_rng, sample_csr, sample_lattice, sample_matern2,
    sample_thomas, FdaConfig, PpConfig,
};
use persphere::homology::{rips_pd, sublevel_pd0, PointCloud, SampledCurve};
use persphere::image::{persistence_image, ImageParams, WeightScheme};
use persphere::landscape::{landscape, landscape_l2, TimeGrid};
use persphere::measure::Reweighting;
use persphere::numeric::fmt_f64;
use persphere::sphere::{self, SphereGrid};
use persphere::transport::{pot1, sliced_wasserstein};
use persphere::{Error, PersistenceMeasure, Result};
use std::path::{Path, PathBuf};

pub fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    let bad = || Error::InvalidParameter(format!("grid must look like 100x200, got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lat = parts[0].parse::<usize>().map_err(|_| bad())?;
    let lon = parts[1].parse::<usize>().map_err(|_| bad())?;
    Ok((lat, lon))
}

/// `--weight` values: `flat`, `pers`, `pers2`, `pers4`, `pers8`,
/// `arctan:SCALE`.
pub fn parse_weight(text: &str) -> Result<WeightScheme> {
    match text {
        "flat" => Ok(WeightScheme::Flat),
        "pers" => Ok(WeightScheme::PersPow(1)),
        "pers2" => Ok(WeightScheme::PersPow(2)),
        "pers4" => Ok(WeightScheme::PersPow(4)),
        "pers8" => Ok(WeightScheme::PersPow(8)),
        other => {
            if let Some(scale) = other.strip_prefix("arctan:") {
                let scale: f64 = scale.parse().map_err(|_| {
                    Error::InvalidParameter(format!("bad arctan scale in {text:?}"))
                })?;
                Ok(WeightScheme::ArctanStep { scale })
            } else {
                Err(Error::InvalidParameter(format!(
                    "unknown weight scheme {text:?}"
                )))
            }
        }
    }
}

fn measure_reweighting(w: &WeightScheme) -> Option<Reweighting> {
    match *w {
        WeightScheme::Flat => None,
        WeightScheme::PersPow(n) => Some(Reweighting::PersPow(n)),
        WeightScheme::ArctanStep { scale } => Some(Reweighting::ArctanStep { scale }),
    }
}

pub fn cmd_sphere(diagram: &Path, grid: (usize, usize), out: &Path) -> Result<()> {
    let mu = PersistenceMeasure::read_file(diagram)?;
    let grid = SphereGrid::lattice(grid.0, grid.1)?;
    sphere::sample(&mu, &grid).write_file(out)
}

pub struct DistOptions {
    pub metric: String,
    pub grid: (usize, usize),
    pub weight: WeightScheme,
    pub n_dirs: usize,
    pub pixel_size: Option<f64>,
    pub sigma: Option<f64>,
    pub h0_fix: Option<f64>,
    pub t_samples: usize,
}

pub fn cmd_dist(files: &[PathBuf], opts: &DistOptions, out: &Path) -> Result<()> {
    let diagrams: Result<Vec<PersistenceMeasure>> =
        files.iter().map(|f| PersistenceMeasure::read_file(f)).collect();
    let diagrams = diagrams?;
    let matrix = dist_matrix_for(&diagrams, opts)?;
    matrix.write_file(out)
}

/// Build the distance matrix for one of the supported metrics.
pub fn dist_matrix_for(
    diagrams: &[PersistenceMeasure],
    opts: &DistOptions,
) -> Result<DistanceMatrix> {
    let reweighted = |ds: &[PersistenceMeasure]| -> Result<Vec<PersistenceMeasure>> {
        match measure_reweighting(&opts.weight) {
            None => Ok(ds.to_vec()),
            Some(rw) => ds.iter().map(|d| d.reweight(&rw)).collect(),
        }
    };
    match opts.metric.as_str() {
        "pot1" => {
            let items = reweighted(diagrams)?;
            distance_matrix(&items, "pot1", |a, b| Ok(pot1(a, b)?.cost))
        }
        "sw" => {
            let items = reweighted(diagrams)?;
            let n_dirs = opts.n_dirs;
            distance_matrix(&items, "sw", |a, b| sliced_wasserstein(a, b, n_dirs))
        }
        "sphere-L2" | "sphere-sup" => {
            let items = reweighted(diagrams)?;
            let grid = SphereGrid::new(opts.grid.0, opts.grid.1)?;
            let samples: Vec<_> = items.iter().map(|d| sphere::sample(d, &grid)).collect();
            if opts.metric == "sphere-L2" {
                distance_matrix(&samples, "sphere-L2", sphere::l2_diff)
            } else {
                distance_matrix(&samples, "sphere-sup", sphere::sup_diff)
            }
        }
        "landscape-L2" => {
            if !matches!(opts.weight, WeightScheme::Flat) {
                return Err(Error::InvalidParameter(
                    "landscapes take counting measures; use --weight flat".into(),
                ));
            }
            let k_max = diagrams.iter().map(|d| d.len()).max().unwrap_or(1).max(1);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for d in diagrams {
                for a in d.atoms() {
                    lo = lo.min(a.point.x);
                    hi = hi.max(a.point.y);
                }
            }
            if !lo.is_finite() {
                lo = 0.0;
                hi = 1.0;
            }
            let pad = 0.05 * (hi - lo).max(1e-9);
            let grid = TimeGrid::new(lo - pad, hi + pad, opts.t_samples)?;
            let landscapes: Result<Vec<_>> =
                diagrams.iter().map(|d| landscape(d, k_max, &grid)).collect();
            distance_matrix(&landscapes?, "landscape-L2", landscape_l2)
        }
        "image-L2" => {
            let mut extent: f64 = 0.0;
            for d in diagrams {
                for a in d.atoms() {
                    extent = extent.max(a.point.x.abs()).max(a.point.y - a.point.x);
                }
            }
            let pixel = opts.pixel_size.unwrap_or(extent.max(1e-9) / 100.0);
            let sigma = opts.sigma.unwrap_or(10.0 * pixel);
            let refs: Vec<&PersistenceMeasure> = diagrams.iter().collect();
            let mut params = ImageParams::covering(&refs, pixel, sigma, opts.weight, 5.0)?;
            if let Some(a) = opts.h0_fix {
                params = params.with_h0_anchor(a);
            }
            let images: Result<Vec<_>> = diagrams
                .iter()
                .map(|d| persistence_image(d, &params))
                .collect();
            distance_matrix(&images?, "image-L2", |a, b| {
                persphere::image::image_l2(a, b)
            })
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown metric {other:?}; expected pot1, sw, sphere-L2, sphere-sup, landscape-L2, image-L2"
        ))),
    }
}

pub fn cmd_figures(name: &str, sigma: f64, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let (file, header, rows): (&str, &str, Vec<Vec<f64>>) = match name {
        "decay" => {
            let ks: Vec<usize> = (2..=200).collect();
            let grid = SphereGrid::new(100, 200)?;
            let rows = figures::decay_rows(&ks, &grid)?;
            (
                "decay.csv",
                "k,sup,l2,pot1,bound",
                rows.iter()
                    .map(|r| vec![r.k, r.sup, r.l2, r.pot, r.bound])
                    .collect(),
            )
        }
        "deletion" => {
            let ks: Vec<usize> = (0..=200).collect();
            let grid = SphereGrid::new(100, 200)?;
            let rows = figures::deletion_rows(&ks, &grid)?;
            (
                "deletion.csv",
                "k,sup,l2,pot1,sup_reference",
                rows.iter()
                    .map(|r| vec![r.k, r.sup, r.l2, r.pot, r.sup_reference])
                    .collect(),
            )
        }
        "pl-growth" => {
            let ks: Vec<usize> = (0..=10).collect();
            let rows = figures::pl_growth_rows(&ks)?;
            (
                "pl-growth.csv",
                "k,distance,distance_squared",
                rows.iter()
                    .map(|r| vec![r.k, r.distance, r.distance_squared])
                    .collect(),
            )
        }
        "pi-saturation" => {
            let seps: Vec<f64> = (0..=30).map(|i| i as f64 * sigma / 2.0).collect();
            let rows = figures::pi_saturation_rows(sigma, &seps)?;
            (
                "pi-saturation.csv",
                "separation,image_l2,closed_form,ceiling",
                rows.iter()
                    .map(|r| vec![r.separation, r.image_distance, r.closed_form, r.ceiling])
                    .collect(),
            )
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown figure {other:?}; expected decay, deletion, pl-growth, pi-saturation"
            )))
        }
    };
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    persphere::io::write_atomic(&out_dir.join(file), text.as_bytes())?;
    write_manifest(
        out_dir,
        &format!("figures {name}"),
        0,
        &[("sigma", sigma.to_string())],
        &[ManifestRow {
            file: file.to_string(),
            model: name.to_string(),
            class: String::new(),
            replicate: 0,
            stream: 0,
        }],
    )
}

pub struct SimulateOptions {
    pub model: String,
    pub seed: u64,
    pub replicates: Option<usize>,
    pub noise: f64,
    pub n: Option<usize>,
    pub cap: f64,
}

pub fn cmd_simulate(opts: &SimulateOptions, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    match opts.model.as_str() {
        "fda-i" | "fda-ii" | "fda-iii" | "fda-iv" => simulate_fda(opts, out_dir),
        "csr" | "thomas" | "matern2" | "lattice" => {
            let rows = simulate_pp_family(&opts.model, opts, out_dir, 0)?;
            finish_pp_manifest(opts, out_dir, rows)
        }
        "pp" => {
            let mut rows = Vec::new();
            for (k, family) in ["csr", "thomas", "matern2", "lattice"].iter().enumerate() {
                rows.extend(simulate_pp_family(family, opts, out_dir, k as u64)?);
            }
            finish_pp_manifest(opts, out_dir, rows)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown model {other:?}; expected fda-i..fda-iv, csr, thomas, matern2, lattice, pp"
        ))),
    }
}

fn simulate_fda(opts: &SimulateOptions, out_dir: &Path) -> Result<()> {
    let mut cfg = FdaConfig {
        noise: opts.noise,
        ..FdaConfig::default()
    };
    if opts.model == "fda-iv" {
        cfg = cfg.counter_bias();
    }
    if let Some(r) = opts.replicates {
        cfg.replicates = r;
    }
    if let Some(n) = opts.n {
        cfg.n_range = (n, n);
    }
    cfg.validate()?;
    // Streams 0 and 1 draw the two class functions; replicate r of class c
    // uses stream 2 + c * replicates + r.
    let mut rows = Vec::new();
    for class in 0..2usize {
        let f = fda_smooth(&cfg, &mut replicate_rng(opts.seed, class as u64))?;
        for rep in 0..cfg.replicates {
            let stream = 2 + (class * cfg.replicates + rep) as u64;
            let mut rng = replicate_rng(opts.seed, stream);
            let n = if cfg.n_range.0 == cfg.n_range.1 {
                cfg.n_range.0
            } else {
                use rand::Rng;
                rng.gen_range(cfg.n_range.0..=cfg.n_range.1)
            };
            let curve = fda_sample(&f, n, cfg.noise, &mut rng)?;
            let diagram = sublevel_pd0(&curve);
            let file = format!("{}_c{}_r{:03}.dgm.csv", opts.model, class + 1, rep);
            diagram.write_file(&out_dir.join(&file))?;
            rows.push(ManifestRow {
                file,
                model: opts.model.clone(),
                class: (class + 1).to_string(),
                replicate: rep,
                stream,
            });
        }
    }
    write_manifest(
        out_dir,
        &format!("simulate {}", opts.model),
        opts.seed,
        &[
            ("noise", cfg.noise.to_string()),
            ("replicates", cfg.replicates.to_string()),
            ("n_range", format!("{}..{}", cfg.n_range.0, cfg.n_range.1)),
            ("control_points", cfg.control_points.to_string()),
        ],
        &rows,
    )
}

fn pp_config(opts: &SimulateOptions) -> PpConfig {
    let mut cfg = PpConfig {
        cap: opts.cap,
        ..PpConfig::default()
    };
    if let Some(n) = opts.n {
        cfg.n = n;
    }
    cfg
}

fn simulate_pp_family(
    family: &str,
    opts: &SimulateOptions,
    out_dir: &Path,
    family_index: u64,
) -> Result<Vec<ManifestRow>> {
    let cfg = pp_config(opts);
    cfg.validate()?;
    let replicates = opts.replicates.unwrap_or(30);
    let sampler = match family {
        "csr" => sample_csr,
        "thomas" => sample_thomas,
        "matern2" => sample_matern2,
        "lattice" => sample_lattice,
        _ => unreachable!("caller matches the family"),
    };
    let mut rows = Vec::new();
    for rep in 0..replicates {
        let stream = family_index * 1_000_000 + rep as u64;
        let cloud = sampler(&cfg, &mut replicate_rng(opts.seed, stream))?;
        let file = format!("{family}_r{rep:03}.cloud.csv");
        cloud.write_file(&out_dir.join(&file))?;
        rows.push(ManifestRow {
            file,
            model: family.to_string(),
            class: family.to_string(),
            replicate: rep,
            stream,
        });
    }
    Ok(rows)
}

fn finish_pp_manifest(
    opts: &SimulateOptions,
    out_dir: &Path,
    rows: Vec<ManifestRow>,
) -> Result<()> {
    let cfg = pp_config(opts);
    write_manifest(
        out_dir,
        &format!("simulate {}", opts.model),
        opts.seed,
        &[
            ("n", cfg.n.to_string()),
            ("side", cfg.side.to_string()),
            ("cap", cfg.cap.to_string()),
            ("replicates", opts.replicates.unwrap_or(30).to_string()),
        ],
        &rows,
    )
}

/// Convert point-cloud files into H0/H1 diagram files. The Rips cap is
/// `cap_multiple` times the spacing `sqrt(area / n)`, with the window side
/// taken from `--side` when given and from the bounding box otherwise.
pub fn cmd_rips(
    clouds: &[PathBuf],
    cap_multiple: f64,
    side: Option<f64>,
    out_dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    for path in clouds {
        let cloud = PointCloud::read_file(path)?;
        if cloud.is_empty() {
            return Err(Error::InvalidData(format!(
                "empty point cloud in {}",
                path.display()
            )));
        }
        let spacing = match side {
            Some(l) => l / (cloud.len() as f64).sqrt(),
            None => {
                let xs = cloud.points().iter().map(|p| p.0);
                let ys = cloud.points().iter().map(|p| p.1);
                let w = xs.clone().fold(f64::NEG_INFINITY, f64::max)
                    - xs.fold(f64::INFINITY, f64::min);
                let h = ys.clone().fold(f64::NEG_INFINITY, f64::max)
                    - ys.fold(f64::INFINITY, f64::min);
                ((w * h).max(1e-12) / cloud.len() as f64).sqrt()
            }
        };
        let (h0, h1) = rips_pd(&cloud, cap_multiple * spacing)?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("cloud")
            .trim_end_matches(".cloud");
        h0.write_file(&out_dir.join(format!("{stem}_h0.dgm.csv")))?;
        h1.write_file(&out_dir.join(format!("{stem}_h1.dgm.csv")))?;
    }
    Ok(())
}

/// Convert sampled-curve files into sublevel H0 diagram files.
pub fn cmd_sublevel(curves: &[PathBuf], out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    for path in curves {
        let curve = SampledCurve::read_file(path)?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("curve")
            .trim_end_matches(".curve");
        sublevel_pd0(&curve).write_file(&out_dir.join(format!("{stem}_h0.dgm.csv")))?;
    }
    Ok(())
}

pub fn cmd_cluster(
    matrix: &Path,
    k: usize,
    truth: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let d = DistanceMatrix::read_file(matrix)?;
    let labels = cut(&average_linkage(&d), k)?;
    persphere::io::write_atomic(out, labels_to_csv(&labels).as_bytes())?;
    if let Some(truth) = truth {
        let reference = labels_from_csv(&std::fs::read_to_string(truth)?)?;
        let ri = rand_index(&labels, &reference)?;
        println!("rand_index,{ri}");
    }
    Ok(())
}

/// Correlate two distance matrices (upper triangles).
pub fn cmd_correlate(a: &Path, b: &Path) -> Result<()> {
    let da = DistanceMatrix::read_file(a)?;
    let db = DistanceMatrix::read_file(b)?;
    println!("correlation,{}", matrix_correlation(&da, &db)?);
    Ok(())
}

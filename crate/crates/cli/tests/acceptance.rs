//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use closed_curves::border::outer_borderline;
use closed_curves::features::{feature_matrix, AngleUnit, FeatureConfig};
use closed_curves::mnist::{
    encode_idx_images, encode_idx_labels, parse_idx_images, parse_idx_labels, BinaryMask, GrayImage, IdxError,
    ThresholdRule,
};
use closed_curves::normalize::{normalize_coords, resample, ResampledCurve};
use closed_curves::patterns::builtin;
use closed_curves::pipeline::{curve_features, similarity_with, PipelineConfig};
use closed_curves::potential::{build_potential, PotentialTorus};
use closed_curves::search::{canonical_path, lookahead_sums, Method, SearchConfig, TieRule};
use closed_curves_testkit::{dead_end_valley, enumerate_continuations, min_mean_cycle, parse_ppm};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn images_path() -> PathBuf {
    root().join("data/mnist/t10k-images-idx3-ubyte")
}

fn labels_path() -> PathBuf {
    root().join("data/mnist/t10k-labels-idx1-ubyte")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn mnist_masks(count: usize) -> Vec<BinaryMask> {
    let bytes = std::fs::read(images_path()).expect("t10k images present");
    parse_idx_images(&bytes)
        .expect("t10k images parse")
        .iter()
        .take(count)
        .map(|im| im.threshold(80, ThresholdRule::Greater))
        .collect()
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_closed-curves"));
    cmd.current_dir(root());
    cmd
}

fn run_binary(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = binary().args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`closed-curves {}` exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn random_torus(rng: &mut StdRng, size: usize) -> (Vec<Vec<f64>>, PotentialTorus) {
    let grid: Vec<Vec<f64>> = (0..size)
        .map(|_| (0..size).map(|_| rng.random_range(0.0..40.0)).collect())
        .collect();
    let v = PotentialTorus::from_fn(size, size, |i, j| grid[i][j]);
    (grid, v)
}

fn identity() -> Outcome {
    let config = PipelineConfig {
        search: SearchConfig::deterministic(Method::Base),
        ..PipelineConfig::default()
    };
    let masks = mnist_masks(25);
    let mut slowest = 0.0f64;
    for (k, mask) in masks.iter().enumerate() {
        let start = Instant::now();
        let (_, r) = similarity_with(mask, mask, &config).map_err(|e| format!("digit {k}: {e}"))?;
        slowest = slowest.max(start.elapsed().as_secs_f64());
        ensure(r.mean_potential == 0.0, || {
            format!("digit {k}: mean {}", r.mean_potential)
        })?;
        let diagonal =
            r.path.len() == 60 && r.path.cells.iter().all(|&(i, j)| i == j) && (r.path.wrap_x, r.path.wrap_y) == (1, 1);
        ensure(diagonal, || format!("digit {k}: path is not the 60-cell diagonal"))?;
    }
    ensure(slowest <= 1.0, || format!("slowest digit took {slowest:.3} s"))?;
    let json = run_binary(&["match", "mnist:7", "mnist:7", "--tie", "deterministic"])?;
    let value: serde_json::Value = serde_json::from_slice(&json).map_err(|e| e.to_string())?;
    ensure(value["mean_potential"] == 0.0, || {
        format!("cli self match: {}", value["mean_potential"])
    })?;
    Ok(format!(
        "{} digits, mean 0 on the diagonal, slowest {:.3} s",
        masks.len(),
        slowest
    ))
}

fn score(x: &BinaryMask, y: &BinaryMask, config: &PipelineConfig) -> Result<f64, String> {
    similarity_with(x, y, config)
        .map(|(_, r)| r.mean_potential)
        .map_err(|e| e.to_string())
}

fn upscale_drift(config: &PipelineConfig) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for reference in 0..10 {
        for d in (0..10).filter(|&d| d != reference) {
            let mask = builtin(d);
            let before = score(&mask, &builtin(reference), config)?;
            let after = score(&mask.upscaled(2), &builtin(reference), config)?;
            worst = worst.max((after - before).abs());
        }
    }
    Ok(worst)
}

fn invariances() -> Outcome {
    let config = PipelineConfig {
        search: SearchConfig::deterministic(Method::Base),
        ..PipelineConfig::default()
    };
    let reference = builtin(5);
    let mut moves = 0;
    for (k, mask) in mnist_masks(30).iter().enumerate() {
        let features = curve_features(mask, &config).map_err(|e| e.to_string())?.features;
        let s = score(mask, &reference, &config)?;
        for (dw, dh) in [(1, 0), (-1, 0), (0, 1), (0, -1), (2, -1), (-1, 2)] {
            let Some(moved) = mask.translated(dw, dh) else {
                continue;
            };
            let moved_features = curve_features(&moved, &config).map_err(|e| e.to_string())?.features;
            ensure(moved_features == features, || {
                format!("digit {k} shifted ({dw},{dh}): features differ")
            })?;
            let moved_score = score(&moved, &reference, &config)?;
            ensure(moved_score == s, || {
                format!("digit {k} shifted ({dw},{dh}): score {moved_score} vs {s}")
            })?;
            moves += 1;
        }
    }
    let default_drift = upscale_drift(&config)?;
    let radian_drift = upscale_drift(&PipelineConfig {
        features: FeatureConfig {
            angle_unit: AngleUnit::Radians,
            ..FeatureConfig::default()
        },
        search: SearchConfig::deterministic(Method::Lookahead { n: 20 }),
        ..PipelineConfig::default()
    })?;
    let detail = format!(
        "{moves} translations exact; 2x upscale max drift {default_drift:.3} (default), \
         {radian_drift:.3} (radians, lookahead 20), tolerance 0.5"
    );
    ensure(default_drift <= 0.5, || detail.clone())?;
    Ok(detail)
}

fn relabeling() -> Outcome {
    let config = PipelineConfig {
        search: SearchConfig::deterministic(Method::Base),
        ..PipelineConfig::default()
    };
    let mut masks = mnist_masks(10);
    masks.extend((0..10).map(builtin));
    let resampled: Vec<ResampledCurve> = masks
        .iter()
        .map(|m| resample(&outer_borderline(m).unwrap(), 60).unwrap())
        .collect();
    let features = |r: &ResampledCurve| feature_matrix(&normalize_coords(r).unwrap(), config.features);
    let mut checks = 0;
    for pair in resampled.windows(2) {
        let (fx, fy) = (features(&pair[0]), features(&pair[1]));
        let reference = canonical_path(&build_potential(&fx, &fy, &config.weights), &config.search)
            .map_err(|e| e.to_string())?
            .mean_potential;
        for k in 1..60 {
            let fxk = features(&pair[0].rotated(k));
            let fyk = features(&pair[1].rotated(k));
            for (a, b) in [(&fxk, &fy), (&fx, &fyk)] {
                let mean = canonical_path(&build_potential(a, b, &config.weights), &config.search)
                    .map_err(|e| e.to_string())?
                    .mean_potential;
                ensure(mean.to_bits() == reference.to_bits(), || {
                    format!("shift {k}: mean {mean} vs {reference}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} relabelings bit-identical"))
}

fn lookahead_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    for case in 0..50 {
        let (grid, v) = random_torus(&mut rng, 8);
        for n in 0..=6 {
            let s = lookahead_sums(&v, n);
            for i in 0..8 {
                for j in 0..8 {
                    let expected = enumerate_continuations(&grid, (i, j), n);
                    ensure(s.get(i, j) == expected, || {
                        format!("torus {case}, n={n}, ({i},{j}): {} vs {expected}", s.get(i, j))
                    })?;
                }
            }
        }
    }
    let fixture = dead_end_valley();
    let v = PotentialTorus::from_fn(12, 12, |i, j| fixture[i][j]);
    let walk = |n| {
        canonical_path(&v, &SearchConfig::deterministic(Method::Lookahead { n }))
            .map(|r| r.mean_potential)
            .map_err(|e| e.to_string())
    };
    let (plain, ahead) = (walk(0)?, walk(6)?);
    ensure(ahead < plain, || {
        format!("dead-end fixture: n=6 mean {ahead} vs n=0 mean {plain}")
    })?;
    Ok(format!(
        "50 tori x n=0..6 exact; dead-end fixture mean {plain:.3} -> {ahead:.3}"
    ))
}

fn optimality_bound() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut methods = vec![Method::Base, Method::Lookahead { n: 20 }];
    methods.extend((0..8).map(|row| Method::MultiStart { row }));
    methods.extend((0..=6).map(|n| Method::Lookahead { n }));
    let mut optimal = 0;
    let mut runs = 0;
    for case in 0..20 {
        let (grid, v) = random_torus(&mut rng, 8);
        let optimum = min_mean_cycle(&grid);
        for &method in &methods {
            for tie_rule in [TieRule::Deterministic, TieRule::Random { seed: case }] {
                let config = SearchConfig {
                    method,
                    tie_rule,
                    ..SearchConfig::default()
                };
                let r = canonical_path(&v, &config).map_err(|e| e.to_string())?;
                ensure(r.path.is_legal(8, 8), || {
                    format!("torus {case}, {method:?}: illegal path")
                })?;
                ensure(optimum <= r.mean_potential + 1e-9, || {
                    format!("torus {case}, {method:?}: {} below optimum {optimum}", r.mean_potential)
                })?;
                runs += 1;
                optimal += usize::from(r.mean_potential <= optimum + 1e-9);
            }
        }
    }
    Ok(format!(
        "20 tori x {} methods x 2 tie rules, none below the optimum, {optimal}/{runs} reach it",
        methods.len()
    ))
}

fn idx_parsing() -> Outcome {
    let image_bytes = std::fs::read(images_path()).map_err(|e| e.to_string())?;
    let label_bytes = std::fs::read(labels_path()).map_err(|e| e.to_string())?;
    let images = parse_idx_images(&image_bytes).map_err(|e| e.to_string())?;
    let labels = parse_idx_labels(&label_bytes).map_err(|e| e.to_string())?;
    ensure(images.len() == 10_000, || format!("{} images", images.len()))?;
    ensure(images.iter().all(|im| (im.width, im.height) == (28, 28)), || {
        "image not 28x28".into()
    })?;
    ensure(labels.len() == 10_000, || format!("{} labels", labels.len()))?;
    ensure(labels.iter().all(|&l| l <= 9), || "label above 9".into())?;
    let mut bad = image_bytes[..64].to_vec();
    bad[3] = 0x04;
    ensure(matches!(parse_idx_images(&bad), Err(IdxError::Magic { .. })), || {
        "bad image magic accepted".into()
    })?;
    ensure(parse_idx_images(&label_bytes).is_err(), || {
        "label file accepted as images".into()
    })?;
    ensure(parse_idx_labels(&image_bytes).is_err(), || {
        "image file accepted as labels".into()
    })?;
    let mut bad = label_bytes[..16].to_vec();
    bad[2] = 0x09;
    ensure(parse_idx_labels(&bad).is_err(), || "bad label magic accepted".into())?;
    Ok("10000 images 28x28, 10000 labels 0..9, bad magic rejected".into())
}

fn write_pattern_set(dir: &Path) -> Result<(), String> {
    let canvas = 28;
    let mut images = Vec::new();
    for d in 0..10 {
        let mask = builtin(d);
        let mut pixels = vec![0u8; canvas * canvas];
        for h in 0..mask.height {
            for w in 0..mask.width {
                if mask.is_inside(w as i64, h as i64) {
                    pixels[(h + 2) * canvas + w + 3] = 255;
                }
            }
        }
        images.push(GrayImage::new(canvas, canvas, pixels));
    }
    let labels: Vec<u8> = (0..10).collect();
    std::fs::write(dir.join("images"), encode_idx_images(&images)).map_err(|e| e.to_string())?;
    std::fs::write(dir.join("labels"), encode_idx_labels(&labels)).map_err(|e| e.to_string())
}

fn experiment_harness() -> Outcome {
    let images = images_path();
    let labels = labels_path();
    let (images, labels) = (images.to_str().unwrap(), labels.to_str().unwrap());
    let start = Instant::now();
    let csv = run_binary(&["classify", "--images", images, "--labels", labels, "--limit", "1000"])?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed <= 300.0, || format!("took {elapsed:.1} s"))?;
    let text = String::from_utf8(csv.clone()).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    ensure(
        lines.next() == Some("index,label,s0,s1,s2,s3,s4,s5,s6,s7,s8,s9,best,rejected"),
        || "unexpected header".into(),
    )?;
    let rows: Vec<&str> = lines.collect();
    ensure(rows.len() == 1000, || format!("{} rows", rows.len()))?;
    for (k, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        ensure(fields.len() == 14 && fields[0] == k.to_string(), || {
            format!("row {k}: {row}")
        })?;
        let scores: Vec<f64> = fields[2..12].iter().filter_map(|f| f.parse().ok()).collect();
        if scores.len() == 10 {
            let best: usize = fields[12]
                .parse()
                .map_err(|_| format!("row {k}: best {}", fields[12]))?;
            let low = scores.iter().copied().fold(f64::INFINITY, f64::min);
            ensure(scores[best] == low, || format!("row {k}: best is not the minimum"))?;
            ensure(fields[13] == (low > 13.0).to_string(), || {
                format!("row {k}: rejection flag")
            })?;
        }
    }
    let parallel = run_binary(&[
        "classify", "--images", images, "--labels", labels, "--limit", "1000", "--jobs", "4",
    ])?;
    ensure(parallel == csv, || "report differs between 1 and 4 jobs".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_pattern_set(dir.path())?;
    let own = run_binary(&[
        "classify",
        "--images",
        dir.path().join("images").to_str().unwrap(),
        "--labels",
        dir.path().join("labels").to_str().unwrap(),
    ])?;
    let own = String::from_utf8(own).map_err(|e| e.to_string())?;
    let mut correct = 0;
    for row in own.lines().skip(1) {
        let fields: Vec<&str> = row.split(',').collect();
        let label: usize = fields[1].parse().map_err(|_| row.to_string())?;
        if fields[12] == fields[1] && fields[2 + label].parse::<f64>() == Ok(0.0) {
            correct += 1;
        }
    }
    ensure(correct == 10, || format!("patterns against themselves: {correct}/10"))?;
    Ok(format!(
        "1000 rows in {elapsed:.1} s single-threaded; patterns 10/10 with score 0"
    ))
}

fn heatmap_rendering() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("pair.ppm");
    let out_str = out.to_str().unwrap();
    run_binary(&[
        "render",
        "mnist:823",
        "builtin:2",
        "--tie",
        "deterministic",
        "--out",
        out_str,
    ])?;
    let bytes = std::fs::read(&out).map_err(|e| e.to_string())?;
    let ppm = parse_ppm(&bytes)?;
    ensure((ppm.width, ppm.height) == (360, 360), || {
        format!("{}x{}", ppm.width, ppm.height)
    })?;
    let json = run_binary(&["match", "mnist:823", "builtin:2", "--tie", "deterministic"])?;
    let value: serde_json::Value = serde_json::from_slice(&json).map_err(|e| e.to_string())?;
    let cells = value["path"]["cells"].as_array().ok_or("no path cells")?;
    for cell in cells {
        let (i, j) = (cell[0].as_u64().unwrap() as usize, cell[1].as_u64().unwrap() as usize);
        // the potential ramp never has an empty blue channel, the path ramp always does
        ensure(ppm.pixel(i * 6 + 3, j * 6 + 3)[2] == 0, || {
            format!("cell ({i},{j}) lacks the overlay")
        })?;
    }
    let frozen = std::fs::read(golden("mnist823_pattern2.ppm")).map_err(|e| e.to_string())?;
    ensure(frozen == bytes, || {
        "mnist:823 vs builtin:2 differs from its golden image".into()
    })?;

    let fixture = dir.path().join("fixture.ppm");
    run_binary(&[
        "render",
        "--potential",
        golden("fixture_potential.csv").to_str().unwrap(),
        "--path",
        golden("fixture_path.json").to_str().unwrap(),
        "--out",
        fixture.to_str().unwrap(),
    ])?;
    let rendered = std::fs::read(&fixture).map_err(|e| e.to_string())?;
    parse_ppm(&rendered)?;
    let frozen = std::fs::read(golden("fixture.ppm")).map_err(|e| e.to_string())?;
    ensure(frozen == rendered, || {
        "fixture render differs from its golden image".into()
    })?;
    Ok(format!(
        "valid P6 with {}-cell overlay; 2 golden images byte-equal",
        cells.len()
    ))
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("identity", identity),
        ("invariances", invariances),
        ("index-origin invariance", relabeling),
        ("lookahead oracle", lookahead_oracle),
        ("optimality bound", optimality_bound),
        ("idx parsing", idx_parsing),
        ("experiment harness", experiment_harness),
        ("heatmap rendering", heatmap_rendering),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

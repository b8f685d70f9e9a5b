//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chartparser::axes::{detect_axes, plot_region, AxesGeometry};
use chartparser::bars::{bar_value, cluster_pixels, value_tick_ratio, BarRect, Orientation};
use chartparser::eval::{iou, EvalReport};
use chartparser::legend::{largest_group_size, merge_words};
use chartparser::ocr::TextBox;
use chartparser::output::{default_caption, from_json, render, to_json, Format};
use chartparser::pipeline::{extract, Thresholds};
use chartparser::raster::{binarize, run_profiles, BBox, BinaryImage, Raster};
use chartparser::synthgen::{self, corpus, ChartSpec};
use chartparser::ticklabel::{sweep_detect, Axis, SweepDirection, TickSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

type Outcome = Result<String, String>;
type Check = Box<dyn FnOnce(&mut ChaCha8Rng) -> Result<usize, String>>;
type Criterion = (&'static str, fn() -> Outcome);

fn cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_chartparser"))
        .args(args)
        .env_remove("CHARTPARSER_OCR_URL")
        .output()
        .map_err(|e| e.to_string())
}

fn cli_ok(args: &[&str], allowed: &[i32]) -> Result<Vec<u8>, String> {
    let out = cli(args)?;
    match out.status.code() {
        Some(c) if allowed.contains(&c) => Ok(out.stdout),
        c => Err(format!(
            "{:?} exited {c:?}: {}",
            args.first(),
            String::from_utf8_lossy(&out.stderr)
        )),
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen_parse_eval(count: usize, perturb: u8, root: &Path) -> Result<EvalReport, String> {
    let corpus_dir = root.join("corpus");
    let pred_dir = root.join("pred");
    let n = count.to_string();
    let k = perturb.to_string();
    cli_ok(
        &[
            "gen",
            "--count",
            &n,
            "--seed",
            "42",
            "--perturb",
            &k,
            "--out",
            s(&corpus_dir),
        ],
        &[0],
    )?;
    let fixture = format!("fixture:{}", s(&corpus_dir.join("ocr_fixture.json")));
    cli_ok(
        &[
            "parse",
            s(&corpus_dir),
            "--ocr",
            &fixture,
            "--out",
            s(&pred_dir),
            "--extraction",
        ],
        &[0, 2],
    )?;
    let report = cli_ok(&["eval", "--truth", s(&corpus_dir), "--pred", s(&pred_dir)], &[0])?;
    serde_json::from_slice(&report).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = gen_parse_eval(200, 0, tmp.path())?;
    let elapsed = start.elapsed();
    let a = report.accuracy;
    let exact = [
        ("x-axis", a.x_axis),
        ("y-axis", a.y_axis),
        ("x-label", a.x_label),
        ("y-label", a.y_label),
        ("x-ticks", a.x_ticks),
        ("y-ticks", a.y_ticks),
        ("legend", a.legend),
        ("legend-color", a.legend_color),
    ];
    let detail = format!(
        "{} charts, components {:?}, data association {:.3}, {:.1}s",
        report.corpus_size,
        exact.iter().map(|(_, v)| *v).collect::<Vec<_>>(),
        a.data_association,
        elapsed.as_secs_f64()
    );
    let misses: Vec<&str> = exact.iter().filter(|(_, v)| *v != 1.0).map(|(n, _)| *n).collect();
    if report.corpus_size == 200 && misses.is_empty() && a.data_association >= 0.98 && elapsed < Duration::from_secs(60)
    {
        Ok(detail)
    } else {
        Err(format!("{detail}; below 1.00: {misses:?}"))
    }
}

fn criterion_2() -> Outcome {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let report = gen_parse_eval(200, 4, tmp.path())?;
    let a = report.accuracy;
    let detail = format!(
        "legend-color {:.3} (>= 0.95), data association {:.3} (>= 0.90)",
        a.legend_color, a.data_association
    );
    if a.legend_color >= 0.95 && a.data_association >= 0.90 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Outcome {
    let real = Path::new(FIXTURES).join("real");
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let fixture = format!("fixture:{}", s(&real.join("ocr_fixture.json")));
    cli_ok(
        &[
            "parse",
            s(&real),
            "--ocr",
            &fixture,
            "--out",
            s(tmp.path()),
            "--extraction",
        ],
        &[0, 2],
    )?;
    let report: EvalReport =
        serde_json::from_slice(&cli_ok(&["eval", "--truth", s(&real), "--pred", s(tmp.path())], &[0])?)
            .map_err(|e| e.to_string())?;
    let axes = report.charts.iter().filter(|c| c.x_axis && c.y_axis).count();
    let data = report.charts.iter().filter(|c| c.data_association).count();
    let detail = format!(
        "{} charts, axes {axes}/10 (>= 7), data association {data}/10 (>= 5)",
        report.corpus_size
    );
    if report.corpus_size == 10 && axes >= 7 && data >= 5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Outcome {
    let axis_row = 200u32;
    let boxes: Vec<TextBox> = [0, 10, 20, 30]
        .iter()
        .enumerate()
        .map(|(i, v)| TextBox::new(v.to_string(), BBox::new(10, axis_row - 5 - 50 * i as u32, 12, 10)))
        .collect();
    let ticks = TickSet::new(Axis::Y, boxes).map_err(|e| e.to_string())?;
    let vmap = value_tick_ratio(&ticks, axis_row as f64).map_err(|e| e.to_string())?;

    // least-squares slope of value against pixel position
    let pts: Vec<(f64, f64)> = ticks
        .positions()
        .into_iter()
        .zip(ticks.ticks.iter().map(|t| t.value.unwrap()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();

    let axes = AxesGeometry {
        y_axis_col: 40,
        x_axis_row: axis_row,
        y_axis_extent: (0, axis_row),
        x_axis_extent: (40, 300),
    };
    let bar = BarRect::new("s", BBox::new(60, axis_row - 100, 20, 100), Orientation::Vertical);
    let value = bar_value(&bar, &vmap, &axes, Orientation::Vertical);
    let detail = format!(
        "alpha {:.12}, least squares {:.12}, bar of 100 px -> {value:.12}",
        vmap.alpha,
        slope.abs()
    );
    if (vmap.alpha - 0.2).abs() <= 1e-9 && (vmap.alpha - slope.abs()).abs() <= 1e-9 && (value - 20.0).abs() <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn longest_run_oracle(bits: impl Iterator<Item = bool>) -> u32 {
    let (mut best, mut cur) = (0, 0);
    for b in bits {
        cur = if b { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}

fn check_run_profiles(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut images = 0;
    for w in 1..=16u32 {
        for h in 1..=16u32 {
            for density in [0.2, 0.5, 0.9] {
                let bits: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(density)).collect();
                let bin = BinaryImage::from_bits(w, h, bits.clone()).map_err(|e| e.to_string())?;
                let p = run_profiles(&bin);
                for y in 0..h {
                    let want = longest_run_oracle((0..w).map(|x| bits[(y * w + x) as usize]));
                    if p.rows[y as usize] != want {
                        return Err(format!("{w}x{h} row {y}: {} vs {want}", p.rows[y as usize]));
                    }
                }
                for x in 0..w {
                    let want = longest_run_oracle((0..h).map(|y| bits[(y * w + x) as usize]));
                    if p.cols[x as usize] != want {
                        return Err(format!("{w}x{h} col {x}: {} vs {want}", p.cols[x as usize]));
                    }
                }
                images += 1;
            }
        }
    }
    Ok(images)
}

fn sweep_oracle(cands: &[TextBox], start: i64, end: i64, dir: SweepDirection) -> Vec<TextBox> {
    let hit = |b: &TextBox, pos: i64| match dir {
        SweepDirection::Down => pos >= b.bbox.y as i64 && pos < b.bbox.bottom() as i64,
        SweepDirection::Left => pos >= b.bbox.x as i64 && pos < b.bbox.right() as i64,
    };
    let (lo, hi) = (start.min(end), start.max(end));
    let mut best: Option<(usize, i64)> = None;
    for pos in lo..=hi {
        let count = cands.iter().filter(|b| hit(b, pos)).count();
        let better = match best {
            None => count > 0,
            Some((c, p)) => count > c || (count == c && (pos - start).abs() < (p - start).abs()),
        };
        if better {
            best = Some((count, pos));
        }
    }
    best.map(|(_, pos)| cands.iter().filter(|b| hit(b, pos)).cloned().collect())
        .unwrap_or_default()
}

fn check_sweep(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    for case in 0..1000 {
        let n = rng.gen_range(1..12);
        let cands: Vec<TextBox> = (0..n)
            .map(|i| {
                let bbox = BBox::new(
                    rng.gen_range(0..60),
                    rng.gen_range(0..60),
                    rng.gen_range(1..15),
                    rng.gen_range(1..15),
                );
                TextBox::new(format!("w{i}"), bbox)
            })
            .collect();
        let (dir, start, end) = if case % 2 == 0 {
            (SweepDirection::Down, rng.gen_range(0..30), 80)
        } else {
            (SweepDirection::Left, rng.gen_range(40..80), 0)
        };
        let got = sweep_detect(&cands, start, end, dir).map_err(|e| e.to_string())?;
        if got != sweep_oracle(&cands, start, end, dir) {
            return Err(format!("case {case}: sweep disagrees with exhaustive oracle"));
        }
    }
    Ok(1000)
}

fn check_merge_invariance(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut words: Vec<TextBox> = Vec::new();
    for row in 0..4u32 {
        let mut x = rng.gen_range(0..20);
        for i in 0..4 {
            let w = rng.gen_range(8..30);
            words.push(TextBox::new(
                format!("r{row}w{i}"),
                BBox::new(x, 20 * row + rng.gen_range(0..3), w, 10),
            ));
            x += w + rng.gen_range(4..16);
        }
    }
    let reference = merge_words(&words, 10);
    for i in 0..500 {
        let mut shuffled = words.clone();
        shuffled.shuffle(rng);
        if merge_words(&shuffled, 10) != reference {
            return Err(format!("permutation {i} changed the merge"));
        }
    }
    Ok(500)
}

fn check_iou(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let third = iou(&BBox::new(0, 0, 10, 10), &BBox::new(5, 0, 10, 10));
    if (third - 1.0 / 3.0).abs() > 1e-12 {
        return Err(format!("worked example gave {third}"));
    }
    for _ in 0..2000 {
        let mut b = || {
            BBox::new(
                rng.gen_range(0..40),
                rng.gen_range(0..40),
                rng.gen_range(1..30),
                rng.gen_range(1..30),
            )
        };
        let (a, c) = (b(), b());
        let (ab, ba) = (iou(&a, &c), iou(&c, &a));
        if ab != ba || !(0.0..=1.0).contains(&ab) || iou(&a, &a) != 1.0 {
            return Err(format!("iou({a:?}, {c:?}) = {ab} / {ba}"));
        }
    }
    Ok(2000)
}

fn check_cluster_disjoint() -> Result<usize, String> {
    let charts = corpus(200, 42);
    for chart in &charts {
        let img = &chart.raster;
        let axes = detect_axes(&run_profiles(&binarize(img, 128)), 10).map_err(|e| e.to_string())?;
        let plot = plot_region(&axes, img.dims()).map_err(|e| e.to_string())?;
        let seeds: Vec<[u8; 3]> = chart.truth.table.series.iter().map(|s| s.color).collect();
        let masks = cluster_pixels(img, &seeds, &plot);
        let mut owner = vec![false; (img.width() * img.height()) as usize];
        for m in &masks {
            for (i, &on) in m.bits().iter().enumerate() {
                if on {
                    if owner[i] {
                        return Err(format!("{}: pixel {i} in two masks", chart.image_id()));
                    }
                    owner[i] = true;
                }
            }
        }
    }
    Ok(charts.len())
}

fn check_growing_monotone(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    for case in 0..200 {
        let base: [u8; 3] = [rng.gen_range(0..200), rng.gen_range(0..200), rng.gen_range(0..200)];
        let spread = rng.gen_range(0..12);
        let pixels = (0..24 * 24)
            .map(|_| base.map(|c| (c as i32 + rng.gen_range(-spread..=spread)).clamp(0, 255) as u8))
            .collect();
        let img = Raster::new(24, 24, pixels).map_err(|e| e.to_string())?;
        let region = BBox::new(0, 0, 24, 24);
        let mut last = 0;
        for tol in 0..=20u8 {
            let size = largest_group_size(&img, &region, tol);
            if size < last {
                return Err(format!(
                    "case {case}: tolerance {tol} shrank the group {last} -> {size}"
                ));
            }
            last = size;
        }
    }
    Ok(200)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut parts = Vec::new();
    let checks: [(&str, Check); 6] = [
        ("run profiles", Box::new(check_run_profiles)),
        ("sweep", Box::new(check_sweep)),
        ("merge permutations", Box::new(check_merge_invariance)),
        ("iou", Box::new(check_iou)),
        ("cluster disjointness", Box::new(|_| check_cluster_disjoint())),
        ("growing monotonicity", Box::new(check_growing_monotone)),
    ];
    for (name, check) in checks {
        match check(&mut rng) {
            Ok(n) => parts.push(format!("{name} {n}")),
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    Ok(parts.join(", "))
}

fn criterion_6() -> Outcome {
    let golden = Path::new(FIXTURES).join("golden");
    let mut compared = 0;
    for name in ["grouped", "horizontal", "stacked"] {
        let spec_text = fs::read_to_string(golden.join(format!("{name}.spec.json"))).map_err(|e| e.to_string())?;
        let spec: ChartSpec = serde_json::from_str(&spec_text).map_err(|e| e.to_string())?;
        let (img, truth) = synthgen::render(&spec, name).map_err(|e| e.to_string())?;
        let ex = extract(&img, name, truth.text_boxes.clone(), &Thresholds::default());
        let table = ex.table.ok_or_else(|| format!("{name}: {:?}", ex.error))?;
        for format in [Format::Json, Format::Csv, Format::Html] {
            let path = golden.join(format!("{name}.{}", format.extension()));
            let want = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            if render(&table, format, &default_caption(&table)).bytes != want {
                return Err(format!("{name}.{} differs from golden", format.extension()));
            }
            compared += 1;
        }
    }
    let mut round_trips = 0;
    for chart in corpus(200, 42) {
        let ex = extract(
            &chart.raster,
            chart.image_id(),
            chart.truth.text_boxes.clone(),
            &Thresholds::default(),
        );
        for table in ex.table.iter().chain(std::iter::once(&chart.truth.table)) {
            let json = to_json(table);
            let back = from_json(json.as_str()).map_err(|e| format!("{}: {e}", chart.image_id()))?;
            if to_json(&back).bytes != json.bytes {
                return Err(format!("{}: JSON round trip changed the table", chart.image_id()));
            }
            round_trips += 1;
        }
    }
    Ok(format!(
        "{compared} golden files byte-exact, {round_trips} JSON round trips"
    ))
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path: PathBuf = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        files.insert(name, fs::read(&path).map_err(|e| e.to_string())?);
    }
    Ok(files)
}

fn criterion_7() -> Outcome {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let root = tmp.path().join(run);
        let (c, p) = (root.join("corpus"), root.join("pred"));
        cli_ok(
            &["gen", "--count", "40", "--seed", "7", "--perturb", "2", "--out", s(&c)],
            &[0],
        )?;
        let fixture = format!("fixture:{}", s(&c.join("ocr_fixture.json")));
        cli_ok(
            &[
                "parse",
                s(&c),
                "--ocr",
                &fixture,
                "--format",
                "html",
                "--out",
                s(&p),
                "--extraction",
            ],
            &[0, 2],
        )?;
        let report = root.join("report.json");
        cli_ok(&["eval", "--truth", s(&c), "--pred", s(&p), "--out", s(&report)], &[0])?;
        runs.push((
            snapshot(&c)?,
            snapshot(&p)?,
            fs::read(&report).map_err(|e| e.to_string())?,
        ));
    }
    let (a, b) = (&runs[0], &runs[1]);
    let files = a.0.len() + a.1.len() + 1;
    match (a.0 == b.0, a.1 == b.1, a.2 == b.2) {
        (true, true, true) => Ok(format!("{files} files identical across two runs")),
        (g, p, e) => Err(format!("identical: gen {g}, parse {p}, eval {e}")),
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("crisp corpus end to end", criterion_1),
        ("perturbed corpus robustness", criterion_2),
        ("real charts", criterion_3),
        ("value-tick ratio", criterion_4),
        ("property suites", criterion_5),
        ("format goldens and JSON round trip", criterion_6),
        ("determinism", criterion_7),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (status, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        let _ = writeln!(out, "acceptance {} {status} {name}: {detail}", i + 1);
    }
    let _ = writeln!(out, "acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::json;
use wheelsense::dtw::classify;
use wheelsense::features::{extract_features, FrontEndConfig};
use wheelsense::media_io::{
    encode_raw_samples, read_ppm, read_pgm, read_raw_samples, read_template_library, read_wav,
    write_calibration, write_pgm, write_ppm, write_template, write_template_library, write_wav,
    AudioSignal, CameraRig, TemplateLibrary, TEMPLATE_EXTENSION, TEMPLATE_INDEX,
};
use wheelsense::nav::word_code;
use wheelsense::obstacle::{detect_obstacles, ObstacleMask};
use wheelsense::pipeline::{navigate, NavigateConfig, NavigateOutput};
use wheelsense::stereo::compute_disparity;
use wheelsense::synth::{random_scene, render_stereo_scene, synth_word, ObstacleSpec, SceneSpec, PALETTE};

use crate::args::{AudioInput, Cli, Command, FrontEndOpts, StereoOpts, SynthCommand};
use crate::errors::{InputError, UsageError};
use crate::manifest::Manifest;
use crate::settings::{self, Settings};

struct Ctx {
    json: bool,
    out_dir: PathBuf,
    settings: Settings,
}

impl Ctx {
    fn emit(&self, text: &str, value: serde_json::Value) {
        if self.json {
            println!("{value}");
        } else {
            println!("{text}");
        }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let settings = Settings::load(cli.config.as_deref())?;
    let out_dir = cli.out_dir.clone().or_else(|| settings.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(|e| InputError(format!("{}: {e}", out_dir.display())))?;
    let ctx = Ctx { json: cli.json, out_dir, settings };
    let mut manifest = match &cli.command {
        Command::Detect { left, vision } => {
            let cfg = settings::navigate_config(vision, &StereoOpts::default(), &ctx.settings)?;
            detect(&ctx, left, &cfg)?
        }
        Command::Disparity { left, right, mask, vision, stereo } => {
            let cfg = settings::navigate_config(vision, stereo, &ctx.settings)?;
            disparity(&ctx, left, right, mask.as_deref(), &cfg)?
        }
        Command::Navigate { left, right, calib, vision, stereo } => {
            let cfg = settings::navigate_config(vision, stereo, &ctx.settings)?;
            navigate_pair(&ctx, left, right, calib, &cfg)?
        }
        Command::Features { audio, output, front_end } => features(&ctx, audio, output.as_deref(), front_end)?,
        Command::Train { words, templates, front_end } => train(&ctx, words, templates.as_deref(), front_end)?,
        Command::Recognize { audio, templates, mode, front_end } => {
            let dir = templates
                .clone()
                .or_else(|| ctx.settings.templates.clone())
                .ok_or_else(|| UsageError("recognize needs --templates".into()))?;
            recognize(&ctx, audio, &dir, settings::dtw_mode(*mode, &ctx.settings), front_end)?
        }
        Command::Synth(SynthCommand::Scene { seed, obstacles, random, right_gain, d_max, calib }) => {
            synth_scene(&ctx, *seed, obstacles, *random, *right_gain, *d_max, calib)?
        }
        Command::Synth(SynthCommand::Word { label, seed, wav, sample_rate }) => {
            synth_word_cmd(&ctx, label, *seed, *wav, *sample_rate)?
        }
        Command::Pipeline { frames, calib, vision, stereo } => {
            let cfg = settings::navigate_config(vision, stereo, &ctx.settings)?;
            pipeline(&ctx, frames, calib, &cfg)?
        }
    };
    if let Some(path) = &cli.config {
        manifest.param("config_file", path)?;
    }
    manifest.write(&ctx.out_dir)?;
    Ok(())
}

fn detect(ctx: &Ctx, left: &Path, cfg: &NavigateConfig) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("detect");
    m.param("region", cfg.region)?;
    m.param("detect", cfg.detect)?;
    m.input(left)?;
    let image = read_ppm(left)?;
    let mask = detect_obstacles(&image, &cfg.region, &cfg.detect)?;
    let path = ctx.out("mask.pgm");
    write_pgm(&path, &mask.to_gray())?;
    m.output(&path);
    ctx.emit(
        &format!("mask={} obstacle_pixels={}", path.display(), mask.count()),
        json!({ "mask": path, "obstacle_pixels": mask.count() }),
    );
    Ok(m)
}

fn disparity(ctx: &Ctx, left: &Path, right: &Path, mask_path: Option<&Path>, cfg: &NavigateConfig) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("disparity");
    m.param("config", cfg)?;
    m.input(left)?;
    m.input(right)?;
    if let Some(p) = mask_path {
        m.input(p)?;
    }
    let (l, r) = (read_ppm(left)?, read_ppm(right)?);
    let mask = match mask_path {
        Some(p) => ObstacleMask::from_gray(&read_pgm(p)?),
        None => detect_obstacles(&l, &cfg.region, &cfg.detect)?,
    };
    let map = compute_disparity(&l.to_gray(), &r.to_gray(), &mask, &cfg.nav_region, &cfg.matching)?;
    let (mask_out, disp_out) = (ctx.out("mask.pgm"), ctx.out("disparity.pgm"));
    write_pgm(&mask_out, &mask.to_gray())?;
    write_pgm(&disp_out, &map.to_gray())?;
    m.output(&mask_out);
    m.output(&disp_out);
    let hist = map.histogram();
    let matched: usize = hist[1..].iter().sum();
    ctx.emit(
        &format!("disparity={} matched_pixels={matched}", disp_out.display()),
        json!({ "disparity": disp_out, "mask": mask_out, "matched_pixels": matched, "histogram": hist }),
    );
    Ok(m)
}

fn decision_json(out: &NavigateOutput) -> serde_json::Value {
    json!({
        "D": out.distance_mm,
        "action": out.decision.action.name(),
        "code": out.code().value(),
        "side_means": [out.decision.side_means.0, out.decision.side_means.1],
    })
}

fn navigate_pair(ctx: &Ctx, left: &Path, right: &Path, calib: &Option<PathBuf>, cfg: &NavigateConfig) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("navigate");
    let (rig, calib_path) = settings::rig(calib, &ctx.settings)?;
    m.param("config", cfg)?;
    m.param("rig", rig)?;
    m.input(left)?;
    m.input(right)?;
    if let Some(p) = &calib_path {
        m.input(p)?;
    }
    let out = navigate(&read_ppm(left)?, &read_ppm(right)?, &rig, cfg)?;
    let (mask_out, disp_out) = (ctx.out("mask.pgm"), ctx.out("disparity.pgm"));
    write_pgm(&mask_out, &out.mask.to_gray())?;
    write_pgm(&disp_out, &out.disparity.to_gray())?;
    m.output(&mask_out);
    m.output(&disp_out);
    ctx.emit(&out.summary_line(), decision_json(&out));
    Ok(m)
}

/// Reads `--wav` or `--raw`; unless a sample rate was configured, the front
/// end adopts the file's rate.
fn read_audio(audio: &AudioInput, opts: &FrontEndOpts, s: &Settings, m: &mut Manifest) -> anyhow::Result<(AudioSignal, FrontEndConfig)> {
    let mut fe = settings::front_end(opts, s);
    let signal = match (&audio.wav, &audio.raw) {
        (Some(p), _) => {
            m.input(p)?;
            read_wav(p)?
        }
        (None, Some(p)) => {
            m.input(p)?;
            read_raw_samples(p, fe.sample_rate)?
        }
        (None, None) => return Err(UsageError("one of --wav or --raw is required".into()).into()),
    };
    if opts.sample_rate.or(s.sample_rate).is_none() {
        fe.sample_rate = signal.sample_rate();
    }
    Ok((signal, fe))
}

fn features(ctx: &Ctx, audio: &AudioInput, output: Option<&Path>, opts: &FrontEndOpts) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("features");
    let (signal, fe) = read_audio(audio, opts, &ctx.settings, &mut m)?;
    m.param("front_end", &fe)?;
    let feats = extract_features(&signal, &fe)?;
    let path = output.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(&format!("features.{TEMPLATE_EXTENSION}")));
    write_template(&path, &feats)?;
    m.output(&path);
    ctx.emit(
        &format!("features={} channels={} frames={}", path.display(), feats.channels(), feats.frames()),
        json!({ "features": path, "channels": feats.channels(), "frames": feats.frames() }),
    );
    Ok(m)
}

fn train(ctx: &Ctx, words: &[(String, PathBuf)], templates: Option<&Path>, opts: &FrontEndOpts) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("train");
    let dir = templates
        .map(Path::to_path_buf)
        .or_else(|| ctx.settings.templates.clone())
        .unwrap_or_else(|| ctx.out_dir.clone());
    let mut lib = TemplateLibrary::new();
    let mut fe_used = None;
    let mut report = Vec::new();
    for (label, path) in words {
        let is_wav = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        let audio = AudioInput {
            wav: is_wav.then(|| path.clone()),
            raw: (!is_wav).then(|| path.clone()),
        };
        let (signal, fe) = read_audio(&audio, opts, &ctx.settings, &mut m)?;
        if let Some(prev) = &fe_used {
            if *prev != fe {
                return Err(InputError(format!("{}: sample rate differs from earlier training files", path.display())).into());
            }
        }
        let feats = extract_features(&signal, &fe).with_context(|| format!("word '{label}'"))?;
        report.push((label.clone(), feats.frames()));
        lib.push(label.clone(), feats)?;
        fe_used = Some(fe);
    }
    m.param("front_end", &fe_used)?;
    write_template_library(&dir, &lib)?;
    for (label, _) in &report {
        m.output(&dir.join(format!("{label}.{TEMPLATE_EXTENSION}")));
    }
    m.output(&dir.join(TEMPLATE_INDEX));
    let text = report.iter().map(|(l, f)| format!("template {l} frames={f}")).collect::<Vec<_>>().join("\n");
    ctx.emit(
        &text,
        json!({ "templates": dir, "words": report.iter().map(|(l, f)| json!({"label": l, "frames": f})).collect::<Vec<_>>() }),
    );
    Ok(m)
}

fn recognize(ctx: &Ctx, audio: &AudioInput, dir: &Path, mode: wheelsense::dtw::DtwMode, opts: &FrontEndOpts) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("recognize");
    let (signal, fe) = read_audio(audio, opts, &ctx.settings, &mut m)?;
    m.param("front_end", &fe)?;
    m.param("mode", mode)?;
    let lib = read_template_library(dir)?;
    let mut files: Vec<PathBuf> = lib.entries().iter().map(|(l, _)| dir.join(format!("{l}.{TEMPLATE_EXTENSION}"))).collect();
    let index = dir.join(TEMPLATE_INDEX);
    if index.is_file() {
        files.push(index);
    }
    for f in &files {
        m.input(f)?;
    }
    let feats = extract_features(&signal, &fe)?;
    if lib.channels() != Some(feats.channels()) {
        return Err(InputError(format!(
            "templates in {} have {} channels but the front end produces {}",
            dir.display(),
            lib.channels().unwrap_or(0),
            feats.channels()
        ))
        .into());
    }
    let result = classify(&feats, &lib, mode)?;
    let code = word_code(&result.label);
    let mut text = format!(
        "{} {}\ncode={}",
        result.label,
        result.distance,
        code.map_or_else(|| "-".to_string(), |c| c.to_string())
    );
    for (label, d) in &result.distances {
        text.push_str(&format!("\ndistance {label} {d}"));
    }
    ctx.emit(
        &text,
        json!({
            "label": result.label,
            "distance": result.distance,
            "code": code.map(|c| c.value()),
            "distances": result.distances.iter().map(|(l, d)| json!({"label": l, "distance": d})).collect::<Vec<_>>(),
        }),
    );
    Ok(m)
}

/// `depth=<mm>|d=<px>,top=,left=,width=,height=[,color=R:G:B]`
fn parse_obstacle(s: &str, rig: &CameraRig) -> Result<ObstacleSpec, String> {
    let mut o = ObstacleSpec { color: PALETTE[0], depth_mm: f64::NAN, top: 0, left: 0, width: 0, height: 0 };
    let mut seen = std::collections::HashSet::new();
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("'{part}' is not key=value"))?;
        let k = k.trim();
        let v = v.trim();
        let int = || v.parse::<usize>().map_err(|_| format!("{k}: '{v}' is not a non-negative integer"));
        match k {
            "depth" => o.depth_mm = v.parse().map_err(|_| format!("depth: '{v}' is not a number"))?,
            "d" => {
                let d = int()?;
                if d == 0 {
                    return Err("d must be at least 1".into());
                }
                o.depth_mm = rig.focal_baseline() / d as f64;
            }
            "top" => o.top = int()?,
            "left" => o.left = int()?,
            "width" => o.width = int()?,
            "height" => o.height = int()?,
            "color" => {
                let c: Vec<u8> = v
                    .split(':')
                    .map(|x| x.parse::<u8>().map_err(|_| format!("color: '{v}' is not R:G:B")))
                    .collect::<Result<_, _>>()?;
                o.color = c.try_into().map_err(|_| format!("color: '{v}' is not R:G:B"))?;
            }
            other => return Err(format!("unknown obstacle key '{other}'")),
        }
        seen.insert(if k == "d" { "depth" } else { k });
    }
    for key in ["depth", "top", "left", "width", "height"] {
        if !seen.contains(key) {
            return Err(format!("missing '{key}'"));
        }
    }
    Ok(o)
}

fn synth_scene(
    ctx: &Ctx,
    seed: u64,
    obstacles: &[String],
    random: Option<usize>,
    right_gain: Option<f64>,
    d_max: Option<usize>,
    calib: &Option<PathBuf>,
) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("synth scene");
    let (rig, calib_path) = settings::rig(calib, &ctx.settings)?;
    if let Some(p) = &calib_path {
        m.input(p)?;
    }
    let mut spec = match random {
        Some(n) => {
            let mut spec = random_scene(seed, n);
            // keep each obstacle's disparity under the requested rig
            for o in &mut spec.obstacles {
                let d = (spec.rig.focal_baseline() / o.depth_mm).round();
                o.depth_mm = rig.focal_baseline() / d;
            }
            spec
        }
        None => SceneSpec {
            seed,
            obstacles: obstacles
                .iter()
                .map(|s| parse_obstacle(s, &rig).map_err(|e| UsageError(format!("--obstacle {s}: {e}"))))
                .collect::<Result<_, _>>()?,
            ..Default::default()
        },
    };
    spec.rig = rig;
    if let Some(g) = right_gain {
        spec.right_gain = g;
    }
    if let Some(d) = d_max.or(ctx.settings.d_max) {
        spec.d_max = d;
    }
    m.param("scene", &spec)?;
    let scene = render_stereo_scene(&spec)?;
    let paths = [ctx.out("left.ppm"), ctx.out("right.ppm"), ctx.out("truth.pgm"), ctx.out("calib.txt")];
    write_ppm(&paths[0], &scene.left)?;
    write_ppm(&paths[1], &scene.right)?;
    write_pgm(&paths[2], &scene.truth.to_gray())?;
    write_calibration(&paths[3], &spec.rig)?;
    for p in &paths {
        m.output(p);
    }
    let disparities: Vec<usize> = spec.obstacles.iter().map(|o| spec.disparity_of(o)).collect();
    let text = paths.iter().map(|p| format!("wrote {}", p.display())).collect::<Vec<_>>().join("\n");
    ctx.emit(&text, json!({ "outputs": paths, "obstacle_disparities": disparities }));
    Ok(m)
}

fn synth_word_cmd(ctx: &Ctx, label: &str, seed: u64, wav: bool, sample_rate: Option<u32>) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("synth word");
    let mut fe = FrontEndConfig::default();
    if let Some(rate) = sample_rate.or(ctx.settings.sample_rate) {
        fe.sample_rate = rate;
    }
    m.param("label", label)?;
    m.param("seed", seed)?;
    m.param("sample_rate", fe.sample_rate)?;
    let signal = synth_word(label, seed, &fe)?;
    let raw = ctx.out(&format!("{label}.txt"));
    std::fs::write(&raw, encode_raw_samples(&signal)).map_err(|e| InputError(format!("{}: {e}", raw.display())))?;
    m.output(&raw);
    let mut outputs = vec![raw];
    if wav {
        let p = ctx.out(&format!("{label}.wav"));
        write_wav(&p, &signal)?;
        m.output(&p);
        outputs.push(p);
    }
    let text = outputs.iter().map(|p| format!("wrote {} samples={}", p.display(), signal.len())).collect::<Vec<_>>().join("\n");
    ctx.emit(&text, json!({ "outputs": outputs, "samples": signal.len(), "sample_rate": signal.sample_rate() }));
    Ok(m)
}

/// Frame numbers `N` with both `left<N>.ppm` and `right<N>.ppm` present,
/// ascending.
fn frame_pairs(dir: &Path) -> anyhow::Result<Vec<(u64, PathBuf, PathBuf)>> {
    let listing = std::fs::read_dir(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
    let mut frames = Vec::new();
    for entry in listing {
        let entry = entry.map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(n) = name.strip_prefix("left").and_then(|s| s.strip_suffix(".ppm")) else { continue };
        if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) {
            continue;
        }
        let right = dir.join(format!("right{n}.ppm"));
        if !right.is_file() {
            return Err(InputError(format!("{}: no matching right frame", right.display())).into());
        }
        let number: u64 = n.parse().map_err(|_| InputError(format!("frame number '{n}' too large")))?;
        frames.push((number, entry.path(), right));
    }
    if frames.is_empty() {
        return Err(InputError(format!("{}: no left<N>.ppm / right<N>.ppm pairs", dir.display())).into());
    }
    frames.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(frames)
}

fn pipeline(ctx: &Ctx, dir: &Path, calib: &Option<PathBuf>, cfg: &NavigateConfig) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new("pipeline");
    let (rig, calib_path) = settings::rig(calib, &ctx.settings)?;
    m.param("config", cfg)?;
    m.param("rig", rig)?;
    if let Some(p) = &calib_path {
        m.input(p)?;
    }
    let frames = frame_pairs(dir)?;
    for (_, l, r) in &frames {
        m.input(l)?;
        m.input(r)?;
    }
    for (n, l, r) in &frames {
        let out = navigate(&read_ppm(l)?, &read_ppm(r)?, &rig, cfg).with_context(|| format!("frame {n}"))?;
        let mut value = decision_json(&out);
        value["frame"] = json!(n);
        ctx.emit(&out.summary_line(), value);
    }
    m.param("frames", frames.iter().map(|f| f.0).collect::<Vec<_>>())?;
    Ok(m)
}

//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 when a library call fails, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::friction::{
    build_friction_table, export_urdf, friction_map, reference_anchors, uniform_axis, FrictionAnchor, FrictionTable,
    LookupMode, UrdfObject, DEFAULT_DISK_RESOLUTION, DEFAULT_GRID_SIZE,
};
use crate::integrator::{render, RenderConfig, DEFAULT_MAX_BOUNCES};
use crate::io::write_pfm;
use crate::layout::{
    assign_openings, eval_layout, fit_floor_plane, polygonize, project_topdown, read_point_cloud, LayoutPolygon, Plane,
    WallSegment, DEFAULT_MIN_POINTS, DEFAULT_RANSAC_ITERATIONS, DEFAULT_RANSAC_THRESHOLD, DEFAULT_ROOM_HEIGHT,
    DEFAULT_SEGMENT_WIDTH,
};
use crate::scene::{load_scene, Camera, Scene};
use crate::viewsel::{rank_views, sample_wall_views, score_candidates, WallViewParams, DEFAULT_SPACING};

#[derive(Debug, Parser)]
#[command(name = "roomgt", version, about = "Ground-truth channels and scene preparation for indoor scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radiance and first-hit buffers.
    Render(RenderArgs),
    /// Radiance, buffers, per-light shading, visibility and per-pixel envmaps.
    Channels(ChannelArgs),
    /// Score wall views of a room and keep the best.
    SelectViews(SelectArgs),
    /// Fit a floor polygon and openings to a point cloud.
    FitLayout(FitArgs),
    /// Corner, edge and IoU metrics of a predicted layout.
    EvalLayout(EvalArgs),
    /// Build the albedo/roughness to friction table.
    FrictionTable(TableArgs),
    /// Per-pixel friction coefficients for a camera.
    FrictionMap(MapArgs),
    /// Single-link URDF for one scene mesh.
    ExportUrdf(UrdfArgs),
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Camera index in the scene file.
    #[arg(long, default_value_t = 0)]
    camera: usize,
    /// JSON render config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    spp: Option<usize>,
    #[arg(long, help = format!("maximum path bounces [default: {DEFAULT_MAX_BOUNCES}]"))]
    bounces: Option<u32>,
    /// Light the radiance channel with this light only.
    #[arg(long)]
    light: Option<String>,
    #[arg(long)]
    direct_only: bool,
    #[arg(long)]
    no_occlusion: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ChannelArgs {
    #[command(flatten)]
    render: RenderArgs,
    #[arg(long)]
    envmap_stride: Option<usize>,
    #[arg(long)]
    envmap_samples: Option<usize>,
    #[arg(long)]
    no_envmaps: bool,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Layout JSON with the floor polygon.
    #[arg(long)]
    layout: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_SPACING)]
    spacing: f64,
    /// Output JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// `x y z [label]` text file.
    #[arg(long)]
    points: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    cell: f64,
    #[arg(long, default_value_t = DEFAULT_RANSAC_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = DEFAULT_RANSAC_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ROOM_HEIGHT)]
    height: f64,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_WIDTH)]
    segment_width: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_POINTS)]
    min_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    pixels_per_meter: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// JSON list of `{name, albedo, roughness, mu}`; the three reference
    /// materials when absent.
    #[arg(long)]
    anchors: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_DISK_RESOLUTION)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    table: PathBuf,
    #[arg(long, default_value_t = 0)]
    camera: usize,
    #[arg(long, default_value = "bilinear")]
    mode: LookupMode,
    /// Output PFM.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct UrdfArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Mesh name in the scene file.
    #[arg(long)]
    mesh: String,
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    mass: f64,
    /// Visual mesh path written into the URDF; `<mesh>.obj` by default.
    #[arg(long)]
    visual: Option<String>,
    #[arg(long)]
    collision: Option<String>,
    #[arg(long, default_value = "bilinear")]
    mode: LookupMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Render(a) => {
            let mut config = render_config(&a)?;
            config.channels.per_light = false;
            config.channels.envmaps = false;
            run_render(&a, &config)
        }
        Command::Channels(a) => {
            let mut config = render_config(&a.render)?;
            config.channels.gbuffer = true;
            config.channels.per_light = true;
            config.channels.envmaps = !a.no_envmaps;
            if let Some(s) = a.envmap_stride {
                config.envmap.stride = s;
            }
            if let Some(s) = a.envmap_samples {
                config.envmap.samples = s;
            }
            run_render(&a.render, &config)
        }
        Command::SelectViews(a) => {
            let scene = load_scene(&a.scene)?;
            let layout = LayoutPolygon::read(&a.layout)?;
            let params = WallViewParams {
                spacing: a.spacing,
                floor_z: layout.floor_z,
                ..WallViewParams::default()
            };
            let cams = sample_wall_views(&layout.vertices, &params)?;
            let ranked = rank_views(&score_candidates(&scene, &cams), a.k)?;
            emit_json(&ranked, a.out.as_deref())
        }
        Command::FitLayout(a) => fit_layout(&a),
        Command::EvalLayout(a) => {
            let pred = LayoutPolygon::read(&a.pred)?;
            let gt = LayoutPolygon::read(&a.gt)?;
            let m = eval_layout(&pred.vertices, &gt.vertices, a.pixels_per_meter)?;
            emit_json(&m, a.out.as_deref())
        }
        Command::FrictionTable(a) => {
            let anchors: Vec<FrictionAnchor> = match &a.anchors {
                Some(p) => serde_json::from_str(&read_text(p)?).map_err(|e| json_error(p, e))?,
                None => reference_anchors(),
            };
            let axis = uniform_axis(a.grid);
            let table = build_friction_table(&anchors, &axis, &axis, a.resolution)?;
            write_text(&a.out, &table.to_json()?)
        }
        Command::FrictionMap(a) => {
            let scene = load_scene(&a.scene)?;
            let table = read_table(&a.table)?;
            let cam = camera(&scene, a.camera)?;
            write_pfm(&friction_map(&scene, cam, &table, a.mode), &a.out)
        }
        Command::ExportUrdf(a) => {
            let scene = load_scene(&a.scene)?;
            let table = read_table(&a.table)?;
            let mesh = scene.meshes.iter().find(|m| m.name == a.mesh).ok_or_else(|| Error::Reference {
                kind: "mesh",
                id: a.mesh.clone(),
            })?;
            let obj = UrdfObject {
                name: a.mesh.clone(),
                mesh,
                material: &scene.materials[mesh.material],
                visual_mesh: a.visual.clone().unwrap_or_else(|| format!("{}.obj", a.mesh)),
                collision_mesh: a.collision.clone(),
                mass: a.mass,
            };
            let xml = export_urdf(&obj, &table, a.mode)?;
            match &a.out {
                Some(p) => write_text(p, &xml),
                None => {
                    print!("{xml}");
                    Ok(())
                }
            }
        }
    }
}

fn render_config(a: &RenderArgs) -> Result<RenderConfig> {
    let mut c = match &a.config {
        Some(p) => serde_json::from_str(&read_text(p)?).map_err(|e| json_error(p, e))?,
        None => RenderConfig::default(),
    };
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if let Some(s) = a.spp {
        c.spp = s;
    }
    if let Some(b) = a.bounces {
        c.max_bounces = b;
    }
    if a.light.is_some() {
        c.light_filter = a.light.clone();
    }
    c.direct_only |= a.direct_only;
    if a.no_occlusion {
        c.occlusion = false;
    }
    c.threads = a.threads;
    c.validate()?;
    Ok(c)
}

fn run_render(a: &RenderArgs, config: &RenderConfig) -> Result<()> {
    let scene = load_scene(&a.scene)?;
    let cam = camera(&scene, a.camera)?;
    let set = render(&scene, cam, config)?;
    set.write(&a.out, config)?;
    Ok(())
}

fn camera(scene: &Scene, i: usize) -> Result<&Camera> {
    scene.cameras.get(i).ok_or_else(|| Error::Reference {
        kind: "camera",
        id: i.to_string(),
    })
}

#[derive(Serialize)]
struct FitOutput {
    vertices: Vec<[f64; 2]>,
    floor_z: f64,
    height: f64,
    plane: PlaneOut,
    openings: Vec<WallSegment>,
}

#[derive(Serialize)]
struct PlaneOut {
    normal: [f64; 3],
    offset: f64,
}

fn fit_layout(a: &FitArgs) -> Result<()> {
    let cloud = read_point_cloud(&a.points)?;
    let plane: Plane = fit_floor_plane(&cloud, a.threshold, a.iterations, a.seed)?;
    let grid = project_topdown(&cloud, &plane, a.cell)?;
    let ring = polygonize(&grid)?;
    // floor height where the plane crosses the room centre
    let (cx, cy) = ring.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
    let (cx, cy) = (cx / ring.len() as f64, cy / ring.len() as f64);
    let n = plane.normal;
    let floor_z = (plane.offset - n.x * cx - n.y * cy) / n.z;
    let layout = LayoutPolygon::new(ring, floor_z, a.height)?;
    let openings = assign_openings(&cloud, &layout, a.segment_width, a.min_points);
    let out = FitOutput {
        vertices: layout.vertices.clone(),
        floor_z: layout.floor_z,
        height: layout.height,
        plane: PlaneOut {
            normal: plane.normal.into(),
            offset: plane.offset,
        },
        openings,
    };
    emit_json(&out, a.out.as_deref())
}

fn read_text(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::io(p, e))
}

fn write_text(p: &Path, text: &str) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(p, text).map_err(|e| Error::io(p, e))
}

fn json_error(p: &Path, e: serde_json::Error) -> Error {
    Error::Parse {
        file: p.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    }
}

fn read_table(p: &Path) -> Result<FrictionTable> {
    FrictionTable::from_json(&read_text(p)?, &p.display().to_string())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

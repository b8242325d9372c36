//! Scene catalog, walkability raster and route-point sampling.
//!
//! Catalog files hold one object per line, `name minx miny minz maxx maxy
//! maxz`; `#` starts a comment. Names may repeat.
//!
//! The navigation grid is a PBM bitmap (`P1` or `P4`); black pixels (1) are
//! blocked, white (0) walkable. Image row 0 is the row with the largest y.
//! A sidecar `<file>.meta` gives `origin_x`, `origin_y` (world position of
//! the lower-left corner of cell (0, 0)) and `resolution` (cell edge, m) as
//! `key=value` lines.

use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{Aabb, Vec2, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub name: String,
    pub bbox: Aabb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NavGrid {
    width: usize,
    height: usize,
    origin: Vec2,
    resolution: f64,
    /// Row-major from y = 0 upward.
    walkable: Vec<bool>,
}

impl NavGrid {
    pub fn new(
        width: usize,
        height: usize,
        origin: Vec2,
        resolution: f64,
        walkable: Vec<bool>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::BadParams(
                "navgrid must have at least one cell".into(),
            ));
        }
        if !(resolution > 0.0 && resolution.is_finite()) || !origin.is_finite() {
            return Err(Error::BadParams(format!(
                "bad navgrid resolution {resolution}"
            )));
        }
        if walkable.len() != width * height {
            return Err(Error::LengthMismatch {
                left: walkable.len(),
                right: width * height,
            });
        }
        Ok(Self {
            width,
            height,
            origin,
            resolution,
            walkable,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_walkable_cell(&self, ix: usize, iy: usize) -> bool {
        self.walkable[iy * self.width + ix]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        self.origin
            + Vec2::new(
                (ix as f64 + 0.5) * self.resolution,
                (iy as f64 + 0.5) * self.resolution,
            )
    }

    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let u = ((p.x - self.origin.x) / self.resolution).floor();
        let v = ((p.y - self.origin.y) / self.resolution).floor();
        if u < 0.0 || v < 0.0 || u >= self.width as f64 || v >= self.height as f64 {
            return None;
        }
        Some((u as usize, v as usize))
    }

    pub fn is_walkable(&self, p: Vec2) -> bool {
        self.cell_of(p)
            .is_some_and(|(x, y)| self.is_walkable_cell(x, y))
    }

    pub fn walkable_cells(&self) -> Vec<(usize, usize)> {
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .filter(|&(x, y)| self.is_walkable_cell(x, y))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneCatalog {
    pub objects: Vec<SceneObject>,
    pub navgrid: NavGrid,
}

impl SceneCatalog {
    /// Distinct object names in first-appearance order.
    pub fn object_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for o in &self.objects {
            if !out.iter().any(|n| n.eq_ignore_ascii_case(&o.name)) {
                out.push(&o.name);
            }
        }
        out
    }

    pub fn has_object(&self, name: &str) -> bool {
        self.objects
            .iter()
            .any(|o| o.name.eq_ignore_ascii_case(name))
    }

    pub fn objects_named<'a>(
        &'a self,
        name: &'a str,
    ) -> impl Iterator<Item = &'a SceneObject> + 'a {
        self.objects
            .iter()
            .filter(move |o| o.name.eq_ignore_ascii_case(name))
    }
}

pub fn parse_catalog(text: &str, name: &str) -> Result<Vec<SceneObject>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 7 {
            return Err(Error::format(
                name,
                i + 1,
                "expected `name minx miny minz maxx maxy maxz`",
            ));
        }
        let v: Vec<f64> = toks[1..]
            .iter()
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| {
                Error::format(name, i + 1, "bounding box values must be finite numbers")
            })?;
        let bbox = Aabb::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]));
        if !bbox.is_proper() {
            return Err(Error::format(
                name,
                i + 1,
                "bounding box needs min < max on every axis",
            ));
        }
        out.push(SceneObject {
            name: toks[0].to_string(),
            bbox,
        });
    }
    Ok(out)
}

pub fn read_catalog(path: impl AsRef<Path>) -> Result<Vec<SceneObject>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_catalog(&text, &path.display().to_string())
}

fn pbm_tokens(bytes: &[u8]) -> impl Iterator<Item = (usize, &[u8])> {
    let mut pos = 0;
    std::iter::from_fn(move || {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        if pos >= bytes.len() {
            return None;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        Some((pos, &bytes[start..pos]))
    })
}

/// Decodes a PBM into `(width, height, blocked)` with rows top to bottom.
pub fn parse_pbm(bytes: &[u8], name: &str) -> Result<(usize, usize, Vec<bool>)> {
    let bad = |m: &str| Error::format(name, 0, m);
    let mut toks = pbm_tokens(bytes);
    let magic = toks.next().map(|t| t.1).ok_or_else(|| bad("empty file"))?;
    let mut dim = || -> Result<(usize, usize)> {
        let (end, t) = toks.next().ok_or_else(|| bad("missing dimension"))?;
        let v = std::str::from_utf8(t)
            .ok()
            .and_then(|s| s.parse().ok())
            .filter(|&v: &usize| v > 0)
            .ok_or_else(|| bad("dimensions must be positive integers"))?;
        Ok((end, v))
    };
    let (_, width) = dim()?;
    let (header_end, height) = dim()?;
    let n = width * height;
    match magic {
        b"P1" => {
            let mut out = Vec::with_capacity(n);
            for &b in &bytes[header_end..] {
                match b {
                    b'0' => out.push(false),
                    b'1' => out.push(true),
                    c if c.is_ascii_whitespace() => {}
                    _ => return Err(bad("P1 pixels must be 0 or 1")),
                }
            }
            if out.len() != n {
                return Err(bad("pixel count does not match dimensions"));
            }
            Ok((width, height, out))
        }
        b"P4" => {
            let data = &bytes[(header_end + 1).min(bytes.len())..];
            let row_bytes = width.div_ceil(8);
            if data.len() != row_bytes * height {
                return Err(bad("raw bitmap size does not match dimensions"));
            }
            let out = (0..height)
                .flat_map(|r| (0..width).map(move |c| (r, c)))
                .map(|(r, c)| data[r * row_bytes + c / 8] >> (7 - c % 8) & 1 == 1)
                .collect();
            Ok((width, height, out))
        }
        _ => Err(bad("not a PBM file (expected P1 or P4)")),
    }
}

pub fn navgrid_from_pbm(bytes: &[u8], meta: &str, name: &str) -> Result<NavGrid> {
    let (w, h, blocked) = parse_pbm(bytes, name)?;
    let mut origin = [None; 2];
    let mut resolution = None;
    for (i, raw) in meta.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::format(format!("{name}.meta"), i + 1, "expected key=value"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::format(format!("{name}.meta"), i + 1, "value must be a number"))?;
        match k.trim() {
            "origin_x" => origin[0] = Some(v),
            "origin_y" => origin[1] = Some(v),
            "resolution" => resolution = Some(v),
            other => {
                return Err(Error::format(
                    format!("{name}.meta"),
                    i + 1,
                    format!("unknown key `{other}`"),
                ))
            }
        }
    }
    let missing = || {
        Error::format(
            format!("{name}.meta"),
            0,
            "needs origin_x, origin_y and resolution",
        )
    };
    let origin = Vec2::new(
        origin[0].ok_or_else(missing)?,
        origin[1].ok_or_else(missing)?,
    );
    let mut walkable = vec![false; w * h];
    for r in 0..h {
        for c in 0..w {
            walkable[(h - 1 - r) * w + c] = !blocked[r * w + c];
        }
    }
    NavGrid::new(w, h, origin, resolution.ok_or_else(missing)?, walkable)
}

pub fn meta_path(pbm: &Path) -> PathBuf {
    let mut s = pbm.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn read_navgrid(path: impl AsRef<Path>) -> Result<NavGrid> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mp = meta_path(path);
    let meta = std::fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
    navgrid_from_pbm(&bytes, &meta, &path.display().to_string())
}

/// Plain `P1` encoding plus the sidecar text.
pub fn encode_navgrid(g: &NavGrid) -> (String, String) {
    let mut pbm = format!("P1\n{} {}\n", g.width, g.height);
    for r in 0..g.height {
        let y = g.height - 1 - r;
        let row: Vec<&str> = (0..g.width)
            .map(|x| if g.is_walkable_cell(x, y) { "0" } else { "1" })
            .collect();
        pbm.push_str(&row.join(" "));
        pbm.push('\n');
    }
    let meta = format!(
        "origin_x={}\norigin_y={}\nresolution={}\n",
        g.origin.x, g.origin.y, g.resolution
    );
    (pbm, meta)
}

pub fn load_catalog(catalog: impl AsRef<Path>, navgrid: impl AsRef<Path>) -> Result<SceneCatalog> {
    Ok(SceneCatalog {
        objects: read_catalog(catalog)?,
        navgrid: read_navgrid(navgrid)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteParams {
    pub max_attempts: usize,
    pub initial_margin: f64,
    pub growth: f64,
    pub grow_every: usize,
}

impl Default for RouteParams {
    fn default() -> Self {
        Self {
            max_attempts: 64,
            initial_margin: 0.5,
            growth: 1.5,
            grow_every: 8,
        }
    }
}

pub fn sample_route_point(
    catalog: &SceneCatalog,
    target: Option<&str>,
    seed: u64,
    max_attempts: usize,
) -> Result<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = RouteParams {
        max_attempts,
        ..Default::default()
    };
    sample_route_point_with(catalog, target, &mut rng, &params)
}

/// Route point drawn from a caller-owned RNG stream.
///
/// With no target: the center of a uniformly chosen walkable cell. With a
/// target: a uniform point in the footprint of one randomly chosen object of
/// that name, inflated by a margin that grows every `grow_every` rejections.
pub fn sample_route_point_with<R: Rng>(
    catalog: &SceneCatalog,
    target: Option<&str>,
    rng: &mut R,
    params: &RouteParams,
) -> Result<Vec2> {
    let nav = &catalog.navgrid;
    let cells = nav.walkable_cells();
    if cells.is_empty() {
        return Err(Error::NoWalkableCell);
    }
    let Some(name) = target else {
        let &(x, y) = cells.choose(rng).ok_or(Error::NoWalkableCell)?;
        return Ok(nav.cell_center(x, y));
    };
    let candidates: Vec<&SceneObject> = catalog.objects_named(name).collect();
    let obj = candidates
        .choose(rng)
        .ok_or_else(|| Error::UnknownObject(name.to_string()))?;
    let (lo, hi) = (obj.bbox.min.xy(), obj.bbox.max.xy());
    let mut margin = params.initial_margin;
    for attempt in 0..params.max_attempts {
        if attempt > 0 && params.grow_every > 0 && attempt % params.grow_every == 0 {
            margin *= params.growth;
        }
        let p = Vec2::new(
            rng.random_range(lo.x - margin..=hi.x + margin),
            rng.random_range(lo.y - margin..=hi.y + margin),
        );
        if nav.is_walkable(p) {
            return Ok(p);
        }
    }
    Err(Error::Unreachable {
        target: name.to_string(),
        attempts: params.max_attempts,
    })
}

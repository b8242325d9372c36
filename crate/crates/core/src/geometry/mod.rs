mod hull2d;
mod mesh;
mod pattern;
mod winding;

pub use hull2d::{convex_hull_2d, point_in_hull, Hull2D, HULL_EPS};
pub use mesh::{
    convex_hull_3d, parse_obj, read_mesh_dir, read_obj, write_obj, MeshSequence, TriMesh,
};
pub use pattern::{point_in_pattern, ObstaclePattern, PatternKind, PATTERN_EPS};
pub use winding::{
    mesh_intersection_count, winding_number, winding_number_checked, INSIDE_THRESHOLD, SURFACE_EPS,
};

//! Plot text to executable per-character commands.

mod command;
mod distribute;
pub mod llm;
mod parse;
pub mod scene;
mod validate;

pub use command::{Command, CommandScript, InvalidReason, MotionType, Order};
pub use distribute::{distribute, merge, CharacterQueues, CommandQueues, HhiEntry, Queued};
pub use llm::{
    extract_orders, generate_plot, revise_orders, EchoClient, HttpClient, LlmClient, MockClient,
    RetryPolicy,
};
pub use parse::{parse_commands, parse_orders_line, MOTION_WORDS};
pub use scene::{
    load_catalog, read_catalog, read_navgrid, sample_route_point, sample_route_point_with, NavGrid,
    RouteParams, SceneCatalog, SceneObject,
};
pub use validate::{validate_and_revise, Character, Revision, Warning};

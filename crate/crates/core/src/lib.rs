//! Multi-robot warehouse planning with kinematics-aware routing.

pub mod assignment;
pub mod collision;
pub mod geometry;
pub mod ipp;
pub mod kinematics;
pub mod layouts;
pub mod metrics;
pub mod model;
pub mod routing;
pub mod scenario;
pub mod simulator;
pub mod time;
pub mod trajectory;
pub mod vpstar;
pub mod world;

pub use time::Time;

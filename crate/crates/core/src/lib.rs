pub mod data;
pub mod dispatch;
pub mod plan;
pub mod routing;
pub mod solver;
pub mod sim;
pub mod tsb;

//! Charts, surface models and map expressions.

pub mod chart;
pub mod expr;
pub mod manifold;
pub mod map;

pub use chart::Chart;
pub use expr::Expr;
pub use manifold::{BoundaryComponent, ManifoldModel, ModelKind};
pub use map::{compose, evaluate, invert, jacobian_fd, Branch, MapExpr, Region};

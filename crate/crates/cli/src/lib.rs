pub mod experiments;
pub mod svg;

pub mod app;
pub mod report;
pub mod scene;
pub mod svg;

pub mod linalg;
pub mod metric_graph;
pub mod scalar;
pub mod series_model;
pub mod diagram_engine;
pub mod fixtures;
pub mod bifurcation;
pub mod smoothing;
pub mod cli_io;
pub mod cli;

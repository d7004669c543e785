pub mod ball;
pub mod exact;
pub mod field;
pub mod linalg;
pub mod precision;
pub mod units;
pub mod verdict;
pub mod ot;
pub mod form;
pub mod inoue;
pub mod embedder;
pub mod cli;

pub mod diagnose;
pub mod fit;
pub mod generate;
pub mod replicate;

pub mod judgement;
pub mod linalg;
pub mod oracle;
pub mod substrate;
pub mod task;

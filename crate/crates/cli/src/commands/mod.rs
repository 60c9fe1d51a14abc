pub mod decompose;
pub mod graph;
pub mod sim;
pub mod test;

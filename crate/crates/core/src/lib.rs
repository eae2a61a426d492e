pub mod bench;
pub mod eval;
pub mod goal;
pub mod pddl;
pub mod planner;
pub mod scene;
pub mod sim;
pub mod text;

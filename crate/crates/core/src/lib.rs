pub mod domain;
pub mod domains;
pub mod error;
pub mod num;
pub mod arena;
pub mod deals;
pub mod mechanisms;
pub mod lies;
pub mod planner;
pub mod scenario;
pub mod worth_game;

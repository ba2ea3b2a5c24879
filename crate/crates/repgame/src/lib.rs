pub mod game;
pub mod order;
pub mod criteria;
pub mod repeated;
pub mod equilibria;
pub mod catalog;

pub mod angle;
pub mod audit;
pub mod complex;
pub mod coset;
pub mod embed;
pub mod export;
pub mod garside;
pub mod graph;
pub mod perm;
pub mod reps;
pub mod words;

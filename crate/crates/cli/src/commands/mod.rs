pub mod attack;
pub mod bench;
pub mod game;
pub mod keys;
pub mod verify;

pub mod algsolve;
pub mod mpoly;
pub mod parser;
pub mod phi;
pub mod pipeline;
pub mod solutions;
pub mod symexpr;
pub mod verify;
pub mod wave;

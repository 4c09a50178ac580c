pub mod check_geometry;
pub mod green_check;
pub mod korn;
pub mod mosco;
pub mod optimize;
pub mod solve;

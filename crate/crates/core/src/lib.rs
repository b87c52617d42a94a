pub mod eriksen;
pub mod fseries;
pub mod ncalg;
pub mod pattern;
pub mod relfw;

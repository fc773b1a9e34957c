//! Worked example protocols, each written once for censuses of any size.

pub mod card_game;
pub mod cli;
pub mod example_chor;
pub mod gmw;
pub mod kvs;
pub mod lottery;
pub mod ot;
pub mod sharing;

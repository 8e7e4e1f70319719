pub mod blocks;
pub mod shared;
pub mod slotted;

pub use blocks::{Blocks, BlocksAtom, BlocksState, Move};
pub use shared::{Op, SharedAtom, SharedResource, SharedState};
pub use slotted::{BlockId, SlottedAction, SlottedAtom, SlottedBlocks, SlottedState};

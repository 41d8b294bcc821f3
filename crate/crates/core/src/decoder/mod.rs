//! Finite-length decoding: sum-product BP per message and the joint
//! decoder that couples them through state nodes.

mod bp;
mod joint;
mod state_node;

pub use bp::{decode_p2p, BpDecoder, BpOutput};
pub use joint::{
    joint_decode, joint_decode_with_tap, FiniteCodes, JointDecodeOutput, JointDecoderConfig, ReceiverView, TapEvent,
    TapStage, TraceRow,
};
pub use state_node::{bpsk_llr, state_node_llr, StateNode, StateNodePrior};

//! Reference rate regions: BPSK capacity, time sharing, and the
//! finite-allocation Han-Kobayashi subregion.

mod capacity;
mod curve;
mod mac;
mod quadrature;
mod subregion;
mod ts;

pub use capacity::{bpsk_awgn_capacity, bpsk_awgn_capacity_with, gaussian_capacity};
pub use curve::{RatePoint, RegionCurve};
pub use mac::{
    mac_mutual_informations, mac_mutual_informations_mc, mac_mutual_informations_with, MacConstants,
    ReceiverConstellation,
};
pub use quadrature::{GaussHermite, DEFAULT_NODES};
pub use subregion::{alpha_grid, hk_subregion, union_boundary, SplitRatePolytope, SubregionOptions};
pub use ts::{shared_schedule, ts_point, ts_regions, Signaling, TsMode};

//! Ground-truth ranging signal model: subcarrier plan, codes, Rayleigh
//! channels, time-domain synthesis, the receiver front-end, and a direct
//! frequency-domain evaluation used to cross-check the synthesis.

mod channel;
mod codebook;
mod frontend;
mod oracle;
mod plan;
mod uplink;
mod user;

pub use channel::{channel_frequency_response, draw_channel, ChannelProfile};
pub use codebook::{fourier_codebook, CodeBook};
pub use frontend::{receiver_frontend, SubchannelObservation};
pub use oracle::{model_oracle, OracleMode};
pub use plan::RangingPlan;
pub use uplink::{synthesize_scene, synthesize_uplink, SubchannelLoad};
pub use user::{ranging_signature, validate_users, UserTruth};

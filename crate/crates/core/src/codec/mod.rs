//! Byte-level representations: the β bit map, message packing, the binary
//! record format and JSON-lines transcripts.

pub mod beta;
pub mod bits;
pub mod pack;
pub mod transcript;
pub mod wire;

pub use beta::{beta_decode, beta_encode, beta_len};
pub use bits::BitString;
pub use pack::{
    element_capacity, pack_message_element, pack_message_vector, unpack_message_element,
    unpack_message_vector, vector_capacity,
};
pub use transcript::{Transcript, TranscriptEntry};
pub use wire::{deserialize, deserialize_as, serialize, Kind, Record};

//! PASME: a toy encryption scheme built from digit-level base-change
//! encodings, prime "garbage" injection, and a factoring-style key
//! envelope, plus a hybrid file mode, append-style steganography, and an
//! attack suite that demonstrates why none of it is safe.
//!
//! **This is a study object.** Every mode in this crate is breakable by
//! design and the [`audit`] module breaks them programmatically. Do not
//! protect real secrets with it.

pub mod audit;
pub mod codec;
pub mod container;
pub mod hybrid;
pub mod numtheory;
pub mod protocol;
pub mod stego;

pub use codec::DigitString;
pub use container::HybridContainer;
pub use hybrid::KeySheet;
pub use numtheory::{entropy_source, seeded_source, RandomSource};
pub use protocol::{PublicBundle, PublicParams, SecurityConfig};

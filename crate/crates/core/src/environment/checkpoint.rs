use std::fmt;
use std::sync::Arc;

use super::physics::AgentState;
use super::EnvError;
use crate::geometry::Position;

const MAGIC: &[u8; 4] = b"RPCK";
const VERSION: u8 = 1;
/// magic + version + world fingerprint + 7 f64 + grounded + checksum
const ENCODED_LEN: usize = 4 + 1 + 8 + 7 * 8 + 1 + 8;

/// Opaque, canonical encoding of one agent's full simulator state.
///
/// Cheap to clone; the bytes are shared.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Checkpoint(Arc<[u8]>);

impl fmt::Debug for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Checkpoint({} bytes)", self.0.len())
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl Checkpoint {
    pub fn from_bytes(bytes: impl Into<Arc<[u8]>>) -> Self {
        Checkpoint(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub(crate) fn encode(state: &AgentState, world: u64) -> Self {
        let mut out = Vec::with_capacity(ENCODED_LEN);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&world.to_le_bytes());
        for v in [
            state.position.x,
            state.position.y,
            state.position.z,
            state.velocity.x,
            state.velocity.y,
            state.velocity.z,
            state.yaw,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(u8::from(state.grounded));
        let sum = fnv1a(&out);
        out.extend_from_slice(&sum.to_le_bytes());
        Checkpoint(out.into())
    }

    pub(crate) fn decode(&self, world: u64) -> Result<AgentState, EnvError> {
        let b = &self.0;
        if b.len() != ENCODED_LEN {
            return Err(EnvError::BadCheckpoint("wrong length"));
        }
        if &b[..4] != MAGIC || b[4] != VERSION {
            return Err(EnvError::BadCheckpoint("bad header"));
        }
        let body = ENCODED_LEN - 8;
        if fnv1a(&b[..body]) != read_u64(&b[body..]) {
            return Err(EnvError::BadCheckpoint("checksum mismatch"));
        }
        if read_u64(&b[5..13]) != world {
            return Err(EnvError::BadCheckpoint("checkpoint belongs to a different world"));
        }
        let f = |i: usize| f64::from_le_bytes(b[13 + 8 * i..21 + 8 * i].try_into().unwrap());
        let grounded = match b[13 + 56] {
            0 => false,
            1 => true,
            _ => return Err(EnvError::BadCheckpoint("bad grounded flag")),
        };
        let state = AgentState {
            position: Position::new(f(0), f(1), f(2)),
            velocity: Position::new(f(3), f(4), f(5)),
            yaw: f(6),
            grounded,
        };
        if !(state.position.is_finite() && state.velocity.is_finite() && state.yaw.is_finite()) {
            return Err(EnvError::BadCheckpoint("non-finite state"));
        }
        Ok(state)
    }
}

fn read_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b[..8].try_into().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> AgentState {
        AgentState {
            position: Position::new(1.5, -2.25, 0.451),
            velocity: Position::new(0.0, 4.0, 4.02),
            yaw: 1.25,
            grounded: false,
        }
    }

    #[test]
    fn encode_decode() {
        let cp = Checkpoint::encode(&state(), 42);
        assert_eq!(cp.as_bytes().len(), ENCODED_LEN);
        assert_eq!(cp.decode(42).unwrap(), state());
    }

    #[test]
    fn rejects_corruption_and_foreign_worlds() {
        let cp = Checkpoint::encode(&state(), 42);
        assert!(cp.decode(43).is_err());
        let mut bytes = cp.as_bytes().to_vec();
        bytes[20] ^= 0x40;
        assert_eq!(
            Checkpoint::from_bytes(bytes).decode(42),
            Err(EnvError::BadCheckpoint("checksum mismatch"))
        );
        assert!(Checkpoint::from_bytes(vec![1, 2, 3]).decode(42).is_err());
    }
}

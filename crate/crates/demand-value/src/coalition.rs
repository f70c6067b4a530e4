//! Coalitions: canonically-encoded subsets of source indices.

use thiserror::Error;

use std::fmt;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoalitionError {
    #[error("member index {index} out of range for {n_players} players")]
    MemberOutOfRange { index: usize, n_players: usize },
}

/// Canonical encoding of a member set, usable as a cache key.
///
/// A single machine word covers games up to 64 players; beyond that the
/// encoding widens to a fixed number of words derived from the player count,
/// so it stays injective (driver-level games reach thousands of sources).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoalitionKey {
    Bits(u64),
    Wide(Box<[u64]>),
}

impl CoalitionKey {
    /// The packed bits for games with at most 64 players.
    pub fn as_u64(&self) -> Option<u64> {
        match self {
            CoalitionKey::Bits(b) => Some(*b),
            CoalitionKey::Wide(_) => None,
        }
    }
}

/// A subset of the player indices `0..n_players`, kept sorted and deduplicated.
///
/// Equal member sets produce equal keys no matter the order they were built
/// in, which is what makes the value-function cache sound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalition {
    n_players: usize,
    members: Vec<usize>,
    key: CoalitionKey,
}

impl Coalition {
    /// Builds a coalition from member indices. Duplicates are allowed in the
    /// input and removed; any index `>= n_players` is an error.
    pub fn new(members: impl IntoIterator<Item = usize>, n_players: usize) -> Result<Self, CoalitionError> {
        let mut members: Vec<usize> = members.into_iter().collect();
        for &index in &members {
            if index >= n_players {
                return Err(CoalitionError::MemberOutOfRange { index, n_players });
            }
        }
        members.sort_unstable();
        members.dedup();
        let key = Self::encode(&members, n_players);
        Ok(Self {
            n_players,
            members,
            key,
        })
    }

    pub fn empty(n_players: usize) -> Self {
        Self::new([], n_players).expect("empty coalition is always valid")
    }

    /// The grand coalition of all players.
    pub fn full(n_players: usize) -> Self {
        Self::new(0..n_players, n_players).expect("full coalition is always valid")
    }

    /// Builds a coalition from a bitmask over at most 64 players.
    pub fn from_mask(mask: u64, n_players: usize) -> Self {
        assert!(n_players <= 64, "mask construction requires at most 64 players");
        let members = (0..n_players).filter(|i| mask >> i & 1 == 1);
        Self::new(members, n_players).expect("mask bits are in range")
    }

    /// Returns a new coalition with `player` added (no-op if already a member).
    pub fn with_member(&self, player: usize) -> Result<Self, CoalitionError> {
        if player >= self.n_players {
            return Err(CoalitionError::MemberOutOfRange {
                index: player,
                n_players: self.n_players,
            });
        }
        match self.members.binary_search(&player) {
            Ok(_) => Ok(self.clone()),
            Err(pos) => {
                let mut members = self.members.clone();
                members.insert(pos, player);
                let key = Self::encode(&members, self.n_players);
                Ok(Self {
                    n_players: self.n_players,
                    members,
                    key,
                })
            }
        }
    }

    /// Returns a new coalition with `player` removed (no-op if absent).
    pub fn without_member(&self, player: usize) -> Self {
        let members = self.members.iter().copied().filter(|&m| m != player);
        Self::new(members, self.n_players).expect("members stay in range")
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.n_players
    }

    pub fn contains(&self, player: usize) -> bool {
        self.members.binary_search(&player).is_ok()
    }

    pub fn key(&self) -> &CoalitionKey {
        &self.key
    }

    /// Recovers the member set from a key, inverting [`Coalition::key`].
    pub fn from_key(key: &CoalitionKey, n_players: usize) -> Self {
        let words: &[u64] = match key {
            CoalitionKey::Bits(b) => std::slice::from_ref(b),
            CoalitionKey::Wide(w) => w,
        };
        let members = (0..n_players).filter(|i| words[i / 64] >> (i % 64) & 1 == 1);
        Self::new(members, n_players).expect("key bits are in range")
    }

    fn encode(members: &[usize], n_players: usize) -> CoalitionKey {
        if n_players <= 64 {
            let mut bits = 0u64;
            for &m in members {
                bits |= 1 << m;
            }
            CoalitionKey::Bits(bits)
        } else {
            let mut words = vec![0u64; n_players.div_ceil(64)];
            for &m in members {
                words[m / 64] |= 1 << (m % 64);
            }
            CoalitionKey::Wide(words.into_boxed_slice())
        }
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

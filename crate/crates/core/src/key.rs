use std::fmt;

use thiserror::Error;

/// Key held by the head sentinels of every list.
pub const SENTINEL_MIN: i64 = i64::MIN;
/// Key held by the tail sentinels of every list.
pub const SENTINEL_MAX: i64 = i64::MAX;

/// A vertex identifier.
///
/// Keys are strictly inside `(SENTINEL_MIN, SENTINEL_MAX)`, so a `Key` can
/// never collide with a list sentinel. The check happens once, here, and every
/// graph operation takes an already-validated `Key`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key(i64);

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error("key {0} is reserved for a list sentinel")]
    Sentinel(i64),
}

impl Key {
    pub const MIN: Key = Key(SENTINEL_MIN + 1);
    pub const MAX: Key = Key(SENTINEL_MAX - 1);

    pub fn new(value: i64) -> Result<Self, KeyError> {
        if value == SENTINEL_MIN || value == SENTINEL_MAX {
            Err(KeyError::Sentinel(value))
        } else {
            Ok(Key(value))
        }
    }

    #[inline]
    pub fn get(self) -> i64 {
        self.0
    }
}

impl TryFrom<i64> for Key {
    type Error = KeyError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Key::new(value)
    }
}

impl From<Key> for i64 {
    fn from(k: Key) -> i64 {
        k.0
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinels_are_rejected() {
        assert_eq!(Key::new(SENTINEL_MIN), Err(KeyError::Sentinel(SENTINEL_MIN)));
        assert_eq!(Key::new(SENTINEL_MAX), Err(KeyError::Sentinel(SENTINEL_MAX)));
        assert_eq!(Key::try_from(0).map(Key::get), Ok(0));
        assert_eq!(Key::MIN.get(), SENTINEL_MIN + 1);
        assert_eq!(Key::MAX.get(), SENTINEL_MAX - 1);
    }

    #[test]
    fn keys_order_like_integers() {
        let a = Key::new(-3).unwrap();
        let b = Key::new(7).unwrap();
        assert!(a < b);
        assert_eq!(i64::from(b), 7);
    }
}

//! Counter nonces and frame-counter replay protection.
//!
//! The sender uses an up-ticking 96-bit counter as the nonce and persists
//! the next counter *before* releasing a nonce, so a crash can skip counters
//! but never repeat one. The receiver decrypts each frame with the counter
//! carried alongside it, accepting reordered frames and rejecting repeats
//! inside a 1024-counter sliding window. Anything older than the window is
//! rejected.
//!
//! # Store record
//!
//! One file per key, 36 bytes, all integers big-endian:
//!
//! ```text
//! offset  size  field
//! 0       8     key id (first 8 bytes of SHA-256 of the key)
//! 8       12    next_counter: next nonce the sender will issue
//! 20      12    highest_seen + 1 (receiver side), 0 = nothing seen;
//!               saturates at 2^96 - 1, which restores as highest_seen = 2^96 - 1
//! 32      4     CRC-32 (IEEE) over bytes 0..32
//! ```
//!
//! `next_counter = 2^96` does not fit in 12 bytes; a key whose final nonce
//! has been issued is instead marked by a separate `<id>.retired` file,
//! written before that nonce is released.
//!
//! The receiver's window bitmap lives in a sidecar (`<id>.window`, 144
//! bytes: highest_seen 12 ‖ bitmap 128 ‖ CRC-32 4). If the sidecar is
//! missing, corrupt, or disagrees with the record's `highest_seen`, every
//! counter at or below `highest_seen` is treated as already seen.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::grain::{KeyMaterial, Nonce};

pub const RECORD_LEN: usize = 36;
pub const REPLAY_WINDOW: u128 = 1024;
pub const WINDOW_RECORD_LEN: usize = 12 + 128 + 4;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("all 2^96 nonces of key {0} have been issued; retire the key")]
    Exhausted(KeyId),
    #[error("session record for key {key} is corrupt: {reason}")]
    Corrupt { key: KeyId, reason: &'static str },
    #[error("session record belongs to key {found}, expected {expected}")]
    WrongKey { expected: KeyId, found: KeyId },
    #[error("session store: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KeyId(pub u64);

impl KeyId {
    pub fn for_key(key: &KeyMaterial) -> Self {
        Self(key.fingerprint())
    }

    /// Id for a key known only by name.
    pub fn for_name(name: &str) -> Self {
        let digest = Sha256::digest(name.as_bytes());
        Self(u64::from_be_bytes(digest[..8].try_into().expect("32-byte digest")))
    }
}

impl std::fmt::Display for KeyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Durable storage for session records.
pub trait SessionStore {
    fn load(&self, id: KeyId) -> io::Result<Option<Vec<u8>>>;
    /// Must be durable when it returns `Ok`.
    fn save(&mut self, id: KeyId, record: &[u8; RECORD_LEN]) -> io::Result<()>;
    fn mark_retired(&mut self, id: KeyId) -> io::Result<()>;
    fn is_retired(&self, id: KeyId) -> io::Result<bool>;

    /// Receiver replay-window sidecar. Stores without one always restore a
    /// fully-set window.
    fn load_window(&self, _id: KeyId) -> io::Result<Option<Vec<u8>>> {
        Ok(None)
    }

    fn save_window(&mut self, _id: KeyId, _window: &[u8; WINDOW_RECORD_LEN]) -> io::Result<()> {
        Ok(())
    }
}

/// One file per key under a directory.
#[derive(Clone, Debug)]
pub struct FileStore {
    dir: PathBuf,
}

impl FileStore {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn record_path(&self, id: KeyId) -> PathBuf {
        self.dir.join(format!("{id}.session"))
    }

    fn retired_path(&self, id: KeyId) -> PathBuf {
        self.dir.join(format!("{id}.retired"))
    }

    fn window_path(&self, id: KeyId) -> PathBuf {
        self.dir.join(format!("{id}.window"))
    }

    fn write_durably(&self, path: &Path, bytes: &[u8]) -> io::Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            io::Write::write_all(&mut f, bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        // directory fsync is not supported everywhere
        if let Ok(d) = fs::File::open(&self.dir) {
            let _ = d.sync_all();
        }
        Ok(())
    }
}

impl SessionStore for FileStore {
    fn load(&self, id: KeyId) -> io::Result<Option<Vec<u8>>> {
        match fs::read(self.record_path(id)) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn save(&mut self, id: KeyId, record: &[u8; RECORD_LEN]) -> io::Result<()> {
        self.write_durably(&self.record_path(id), record)
    }

    fn mark_retired(&mut self, id: KeyId) -> io::Result<()> {
        self.write_durably(&self.retired_path(id), b"retired\n")
    }

    fn is_retired(&self, id: KeyId) -> io::Result<bool> {
        Ok(self.retired_path(id).exists())
    }

    fn load_window(&self, id: KeyId) -> io::Result<Option<Vec<u8>>> {
        match fs::read(self.window_path(id)) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn save_window(&mut self, id: KeyId, window: &[u8; WINDOW_RECORD_LEN]) -> io::Result<()> {
        self.write_durably(&self.window_path(id), window)
    }
}

/// In-memory store, for tests and environments without a filesystem.
#[derive(Clone, Debug, Default)]
pub struct MemoryStore {
    records: std::collections::HashMap<KeyId, Vec<u8>>,
    windows: std::collections::HashMap<KeyId, Vec<u8>>,
    retired: std::collections::HashSet<KeyId>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Overwrites a stored record with arbitrary bytes.
    pub fn put_raw(&mut self, id: KeyId, bytes: Vec<u8>) {
        self.records.insert(id, bytes);
    }
}

impl SessionStore for MemoryStore {
    fn load(&self, id: KeyId) -> io::Result<Option<Vec<u8>>> {
        Ok(self.records.get(&id).cloned())
    }

    fn save(&mut self, id: KeyId, record: &[u8; RECORD_LEN]) -> io::Result<()> {
        self.records.insert(id, record.to_vec());
        Ok(())
    }

    fn mark_retired(&mut self, id: KeyId) -> io::Result<()> {
        self.retired.insert(id);
        Ok(())
    }

    fn is_retired(&self, id: KeyId) -> io::Result<bool> {
        Ok(self.retired.contains(&id))
    }

    fn load_window(&self, id: KeyId) -> io::Result<Option<Vec<u8>>> {
        Ok(self.windows.get(&id).cloned())
    }

    fn save_window(&mut self, id: KeyId, window: &[u8; WINDOW_RECORD_LEN]) -> io::Result<()> {
        self.windows.insert(id, window.to_vec());
        Ok(())
    }
}

/// Receiver verdict for an incoming frame counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameDecision {
    /// Decrypt with this nonce (the frame counter itself).
    Accept(Nonce),
    Duplicate,
    /// Below the replay window; cannot be told apart from a replay.
    Stale,
    /// Not a 96-bit value.
    OutOfRange,
}

/// Per-key session state: sender counter and receiver replay window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionRecord {
    key_id: KeyId,
    next_counter: u128,
    highest_seen: Option<u128>,
    // bit i set = counter highest_seen - i has been accepted
    window: [u64; (REPLAY_WINDOW / 64) as usize],
}

impl SessionRecord {
    pub fn new(key_id: KeyId) -> Self {
        Self {
            key_id,
            next_counter: 0,
            highest_seen: None,
            window: [0; 16],
        }
    }

    /// A sender record that will issue `next_counter` next.
    pub fn with_next_counter(key_id: KeyId, next_counter: u128) -> Self {
        Self {
            next_counter,
            ..Self::new(key_id)
        }
    }

    pub fn key_id(&self) -> KeyId {
        self.key_id
    }

    pub fn next_counter(&self) -> u128 {
        self.next_counter
    }

    pub fn highest_seen(&self) -> Option<u128> {
        self.highest_seen
    }

    pub fn is_exhausted(&self) -> bool {
        self.next_counter > Nonce::MAX_COUNTER
    }

    /// Issues the next nonce. The advanced record is written to `store`
    /// before the nonce is returned; if the write fails, nothing is issued.
    pub fn issue_nonce<S: SessionStore + ?Sized>(&mut self, store: &mut S) -> Result<Nonce, SessionError> {
        let nonce = Nonce::from_counter(self.next_counter).ok_or(SessionError::Exhausted(self.key_id))?;
        let mut advanced = self.clone();
        advanced.next_counter += 1;
        if advanced.is_exhausted() {
            store.mark_retired(self.key_id)?;
        }
        store.save(self.key_id, &advanced.encode())?;
        *self = advanced;
        Ok(nonce)
    }

    pub fn persist<S: SessionStore + ?Sized>(&self, store: &mut S) -> Result<(), SessionError> {
        if self.is_exhausted() {
            store.mark_retired(self.key_id)?;
        }
        if let Some(high) = self.highest_seen {
            store.save_window(self.key_id, &self.encode_window(high))?;
        }
        store.save(self.key_id, &self.encode())?;
        Ok(())
    }

    /// Loads the record for `key_id`, or a fresh one if the store has none.
    pub fn restore<S: SessionStore + ?Sized>(store: &S, key_id: KeyId) -> Result<Self, SessionError> {
        let mut record = match store.load(key_id)? {
            None => Self::new(key_id),
            Some(bytes) => {
                let decoded = Self::decode(&bytes).map_err(|reason| SessionError::Corrupt { key: key_id, reason })?;
                if decoded.key_id != key_id {
                    return Err(SessionError::WrongKey {
                        expected: key_id,
                        found: decoded.key_id,
                    });
                }
                decoded
            }
        };
        if store.is_retired(key_id)? {
            record.next_counter = Nonce::MAX_COUNTER + 1;
        }
        if let (Some(high), Some(bytes)) = (record.highest_seen, store.load_window(key_id)?) {
            if let Some(window) = Self::decode_window(&bytes, high) {
                record.window = window;
            }
        }
        Ok(record)
    }

    fn encode_window(&self, high: u128) -> [u8; WINDOW_RECORD_LEN] {
        let mut out = [0u8; WINDOW_RECORD_LEN];
        out[..12].copy_from_slice(&high.to_be_bytes()[4..]);
        for (i, word) in self.window.iter().enumerate() {
            out[12 + 8 * i..20 + 8 * i].copy_from_slice(&word.to_be_bytes());
        }
        let crc = crc32fast::hash(&out[..140]);
        out[140..].copy_from_slice(&crc.to_be_bytes());
        out
    }

    /// The stored bitmap, if intact and taken at `high`.
    fn decode_window(bytes: &[u8], high: u128) -> Option<[u64; 16]> {
        if bytes.len() != WINDOW_RECORD_LEN
            || crc32fast::hash(&bytes[..140]).to_be_bytes() != bytes[140..]
        {
            return None;
        }
        let mut wide = [0u8; 16];
        wide[4..].copy_from_slice(&bytes[..12]);
        if u128::from_be_bytes(wide) != high {
            return None;
        }
        Some(std::array::from_fn(|i| {
            u64::from_be_bytes(bytes[12 + 8 * i..20 + 8 * i].try_into().unwrap())
        }))
    }

    /// Receiver side: decides whether a frame carrying `frame_counter` may be
    /// decrypted, and records it as seen if so.
    pub fn accept_frame(&mut self, frame_counter: u128) -> FrameDecision {
        let Some(nonce) = Nonce::from_counter(frame_counter) else {
            return FrameDecision::OutOfRange;
        };
        match self.highest_seen {
            None => {
                self.highest_seen = Some(frame_counter);
                self.window = [0; 16];
                self.mark(0);
            }
            Some(high) if frame_counter > high => {
                self.slide(frame_counter - high);
                self.highest_seen = Some(frame_counter);
                self.mark(0);
            }
            Some(high) => {
                let age = high - frame_counter;
                if age >= REPLAY_WINDOW {
                    return FrameDecision::Stale;
                }
                if self.is_marked(age) {
                    return FrameDecision::Duplicate;
                }
                self.mark(age);
            }
        }
        FrameDecision::Accept(nonce)
    }

    fn mark(&mut self, age: u128) {
        self.window[(age / 64) as usize] |= 1 << (age % 64);
    }

    fn is_marked(&self, age: u128) -> bool {
        self.window[(age / 64) as usize] & (1 << (age % 64)) != 0
    }

    fn slide(&mut self, by: u128) {
        if by >= REPLAY_WINDOW {
            self.window = [0; 16];
            return;
        }
        let words = (by / 64) as usize;
        let bits = (by % 64) as u32;
        let old = self.window;
        for i in (0..16).rev() {
            let mut v = 0;
            if i >= words {
                v = old[i - words] << bits;
                if bits > 0 && i > words {
                    v |= old[i - words - 1] >> (64 - bits);
                }
            }
            self.window[i] = v;
        }
    }

    pub fn encode(&self) -> [u8; RECORD_LEN] {
        let mut out = [0u8; RECORD_LEN];
        out[..8].copy_from_slice(&self.key_id.0.to_be_bytes());
        let next = self.next_counter.min(Nonce::MAX_COUNTER);
        out[8..20].copy_from_slice(&next.to_be_bytes()[4..]);
        let seen = self.highest_seen.map_or(0, |h| (h + 1).min(Nonce::MAX_COUNTER));
        out[20..32].copy_from_slice(&seen.to_be_bytes()[4..]);
        let crc = crc32fast::hash(&out[..32]);
        out[32..].copy_from_slice(&crc.to_be_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, &'static str> {
        if bytes.len() != RECORD_LEN {
            return Err("wrong length");
        }
        let crc = u32::from_be_bytes(bytes[32..].try_into().unwrap());
        if crc32fast::hash(&bytes[..32]) != crc {
            return Err("checksum mismatch");
        }
        let read96 = |b: &[u8]| {
            let mut wide = [0u8; 16];
            wide[4..].copy_from_slice(b);
            u128::from_be_bytes(wide)
        };
        let key_id = KeyId(u64::from_be_bytes(bytes[..8].try_into().unwrap()));
        let seen = read96(&bytes[20..32]);
        let highest_seen = match seen {
            0 => None,
            Nonce::MAX_COUNTER => Some(Nonce::MAX_COUNTER),
            v => Some(v - 1),
        };
        Ok(Self {
            key_id,
            next_counter: read96(&bytes[8..20]),
            highest_seen,
            // without a matching window sidecar everything up to highest_seen counts as seen
            window: if highest_seen.is_some() { [u64::MAX; 16] } else { [0; 16] },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ID: KeyId = KeyId(0x0123_4567_89ab_cdef);

    #[test]
    fn fresh_session_issues_zero() {
        let mut store = MemoryStore::new();
        let mut s = SessionRecord::new(ID);
        assert_eq!(s.issue_nonce(&mut store).unwrap().counter(), 0);
        assert_eq!(s.next_counter(), 1);
        assert_eq!(SessionRecord::restore(&store, ID).unwrap().next_counter(), 1);
    }

    #[test]
    fn exhaustion_boundary() {
        let mut store = MemoryStore::new();
        let mut s = SessionRecord::with_next_counter(ID, Nonce::MAX_COUNTER);
        assert_eq!(s.issue_nonce(&mut store).unwrap().counter(), Nonce::MAX_COUNTER);
        assert!(matches!(s.issue_nonce(&mut store), Err(SessionError::Exhausted(_))));
        let mut restored = SessionRecord::restore(&store, ID).unwrap();
        assert!(matches!(restored.issue_nonce(&mut store), Err(SessionError::Exhausted(_))));
    }

    #[test]
    fn in_order_and_reordered_frames() {
        let mut s = SessionRecord::new(ID);
        for c in [0, 1, 2] {
            assert_eq!(s.accept_frame(c), FrameDecision::Accept(Nonce::from_counter(c).unwrap()));
        }
        let mut s = SessionRecord::new(ID);
        for c in [0, 2, 1] {
            assert!(matches!(s.accept_frame(c), FrameDecision::Accept(n) if n.counter() == c));
        }
        let mut s = SessionRecord::new(ID);
        assert!(matches!(s.accept_frame(0), FrameDecision::Accept(_)));
        assert!(matches!(s.accept_frame(1), FrameDecision::Accept(_)));
        assert_eq!(s.accept_frame(1), FrameDecision::Duplicate);
    }

    #[test]
    fn window_edges() {
        let mut s = SessionRecord::new(ID);
        assert!(matches!(s.accept_frame(5000), FrameDecision::Accept(_)));
        assert!(matches!(s.accept_frame(5000 - 1023), FrameDecision::Accept(_)));
        assert_eq!(s.accept_frame(5000 - 1024), FrameDecision::Stale);
        assert_eq!(s.accept_frame(5000 - 1023), FrameDecision::Duplicate);
        // slide by 70 keeps the mark at age 70 + 0
        assert!(matches!(s.accept_frame(5070), FrameDecision::Accept(_)));
        assert_eq!(s.accept_frame(5000), FrameDecision::Duplicate);
        assert!(matches!(s.accept_frame(5001), FrameDecision::Accept(_)));
        assert_eq!(s.accept_frame(1 << 96), FrameDecision::OutOfRange);
    }

    #[test]
    fn record_layout() {
        let mut s = SessionRecord::with_next_counter(ID, 5);
        s.accept_frame(9);
        let bytes = s.encode();
        assert_eq!(&bytes[..8], &ID.0.to_be_bytes());
        assert_eq!(&bytes[8..20], &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 5]);
        assert_eq!(&bytes[20..32], &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 10]);
        assert_eq!(&bytes[32..], &crc32fast::hash(&bytes[..32]).to_be_bytes());
        let back = SessionRecord::decode(&bytes).unwrap();
        assert_eq!(back.next_counter(), 5);
        assert_eq!(back.highest_seen(), Some(9));
    }

    #[test]
    fn restored_receiver_keeps_its_window() {
        let mut store = MemoryStore::new();
        let mut s = SessionRecord::new(ID);
        s.accept_frame(10);
        s.persist(&mut store).unwrap();
        let mut r = SessionRecord::restore(&store, ID).unwrap();
        assert_eq!(r.accept_frame(10), FrameDecision::Duplicate);
        assert!(matches!(r.accept_frame(3), FrameDecision::Accept(_)));
        assert!(matches!(r.accept_frame(11), FrameDecision::Accept(_)));
    }

    #[test]
    fn restored_receiver_without_window_fails_closed() {
        let mut store = MemoryStore::new();
        let mut s = SessionRecord::new(ID);
        s.accept_frame(10);
        s.persist(&mut store).unwrap();
        // stale sidecar: taken at a different highest_seen
        s.accept_frame(12);
        let stale = s.encode_window(12);
        s.accept_frame(20);
        s.persist(&mut store).unwrap();
        store.save_window(ID, &stale).unwrap();
        let mut r = SessionRecord::restore(&store, ID).unwrap();
        assert_eq!(r.accept_frame(11), FrameDecision::Duplicate);
        assert!(matches!(r.accept_frame(21), FrameDecision::Accept(_)));

        // no sidecar at all
        let mut bare = MemoryStore::new();
        bare.save(ID, &s.encode()).unwrap();
        let mut r = SessionRecord::restore(&bare, ID).unwrap();
        assert_eq!(r.accept_frame(3), FrameDecision::Duplicate);
    }

    #[test]
    fn corrupt_records_are_refused() {
        let mut store = MemoryStore::new();
        let mut s = SessionRecord::with_next_counter(ID, 5);
        s.issue_nonce(&mut store).unwrap();
        let good = store.load(ID).unwrap().unwrap();

        store.put_raw(ID, good[..30].to_vec());
        assert!(matches!(SessionRecord::restore(&store, ID), Err(SessionError::Corrupt { .. })));

        let mut flipped = good.clone();
        flipped[19] ^= 1;
        store.put_raw(ID, flipped);
        assert!(matches!(SessionRecord::restore(&store, ID), Err(SessionError::Corrupt { .. })));

        store.put_raw(KeyId(1), good);
        assert!(matches!(SessionRecord::restore(&store, KeyId(1)), Err(SessionError::WrongKey { .. })));
    }

    #[test]
    fn file_store_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = FileStore::new(dir.path()).unwrap();
        let mut s = SessionRecord::new(ID);
        for _ in 0..5 {
            s.issue_nonce(&mut store).unwrap();
        }
        assert_eq!(fs::read(store.record_path(ID)).unwrap().len(), RECORD_LEN);
        let mut again = SessionRecord::restore(&store, ID).unwrap();
        assert_eq!(again.issue_nonce(&mut store).unwrap().counter(), 5);
    }
}

//! Cache placement, per-symbol XOR multicasts, and one-shot decoding.
//!
//! The delivery loop reads operand bytes out of the sender's cache and the
//! decoder uses nothing but its own cache plus received payloads, so a
//! byte-exact decode is an independent check of the array, not a tautology.
//!
//! Demands and user/file ids are 1-based at this boundary, matching the
//! array's column numbering; packet and row ids are 0-based internally.

use std::collections::BTreeMap;

use num::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bounds::{ratio, ratio_string};
use crate::pda::Dpda;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("library has no files")]
    EmptyLibrary,
    #[error("files must be at least one byte, got {0}")]
    EmptyFiles(usize),
    #[error("library files have unequal sizes ({0} vs {1})")]
    UnequalFileSizes(usize, usize),
    #[error("demand has {got} entries, expected one per user ({expected})")]
    DemandLength { got: usize, expected: usize },
    #[error("demand for user {user} is {file}, outside 1..={files}")]
    DemandOutOfRange {
        user: usize,
        file: usize,
        files: usize,
    },
    #[error("sender {sender} does not cache packet (file {file}, packet {packet})")]
    SenderMissingPacket {
        sender: usize,
        file: usize,
        packet: usize,
    },
    #[error("user {user} cannot cancel operand (file {file}, packet {packet})")]
    OperandNotCached {
        user: usize,
        file: usize,
        packet: usize,
    },
    #[error("{count} usable transmissions for packet {packet} of user {user}, expected exactly 1")]
    OneShotConflict {
        user: usize,
        packet: usize,
        count: usize,
    },
}

/// `N` equal-sized files, optionally synthesized from a seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileLibrary {
    files: Vec<Vec<u8>>,
    seed: Option<u64>,
}

/// JSON shape for a synthetic library: `{"N": int, "B": int, "seed": int}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct LibrarySpec {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
}

impl FileLibrary {
    /// Seeded random bytes: file 0 is drawn first, then file 1, and so on.
    pub fn synthetic(n: usize, b: usize, seed: u64) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::EmptyLibrary);
        }
        if b == 0 {
            return Err(SimError::EmptyFiles(b));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..n)
            .map(|_| {
                let mut buf = vec![0u8; b];
                rng.fill_bytes(&mut buf);
                buf
            })
            .collect();
        Ok(FileLibrary {
            files,
            seed: Some(seed),
        })
    }

    pub fn from_spec(spec: &LibrarySpec) -> Result<Self, SimError> {
        Self::synthetic(spec.n, spec.b, spec.seed)
    }

    pub fn from_files(files: Vec<Vec<u8>>) -> Result<Self, SimError> {
        if files.is_empty() {
            return Err(SimError::EmptyLibrary);
        }
        let b = files[0].len();
        if b == 0 {
            return Err(SimError::EmptyFiles(b));
        }
        if let Some(other) = files.iter().find(|f| f.len() != b) {
            return Err(SimError::UnequalFileSizes(b, other.len()));
        }
        Ok(FileLibrary { files, seed: None })
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn file_size(&self) -> usize {
        self.files[0].len()
    }

    pub fn file(&self, n: usize) -> &[u8] {
        &self.files[n]
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// Zero-padded equal packets of ceil(len / f) bytes.
pub fn split_file(bytes: &[u8], f: usize) -> Vec<Vec<u8>> {
    let packet_len = bytes.len().div_ceil(f);
    (0..f)
        .map(|j| {
            let start = (j * packet_len).min(bytes.len());
            let end = ((j + 1) * packet_len).min(bytes.len());
            let mut packet = bytes[start..end].to_vec();
            packet.resize(packet_len, 0);
            packet
        })
        .collect()
}

fn xor_into(acc: &mut [u8], src: &[u8]) {
    debug_assert_eq!(acc.len(), src.len());
    for (a, s) in acc.iter_mut().zip(src) {
        *a ^= s;
    }
}

/// Everything one user stores: for each file, the packets whose rows carry a
/// star in the user's column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheContent {
    /// 1-based user id.
    pub user: usize,
    /// (0-based file, 0-based packet) -> bytes.
    pub packets: BTreeMap<(usize, usize), Vec<u8>>,
}

/// Fills every user's cache. File `n` is split into `F` packets and user `k`
/// stores packet `j` of every file whenever row `j` has a star in column `k`.
pub fn place(dpda: &Dpda, library: &FileLibrary) -> Result<Vec<CacheContent>, SimError> {
    if library.num_files() == 0 {
        return Err(SimError::EmptyLibrary);
    }
    let array = dpda.array();
    let f = array.num_rows();
    let packets_per_file: Vec<Vec<Vec<u8>>> = (0..library.num_files())
        .map(|n| split_file(library.file(n), f))
        .collect();
    let caches = (0..array.num_cols())
        .map(|k| {
            let mut packets = BTreeMap::new();
            for j in 0..f {
                if array.entry(j, k).is_star() {
                    for (n, file_packets) in packets_per_file.iter().enumerate() {
                        packets.insert((n, j), file_packets[j].clone());
                    }
                }
            }
            CacheContent {
                user: k + 1,
                packets,
            }
        })
        .collect();
    Ok(caches)
}

/// One multicast: the XOR over `{(k, j) : p_{j,k} = s}` of packet `j` of each
/// user `k`'s demanded file, sent by the user the mapping assigns to `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub symbol: u32,
    /// 1-based sender (a user id).
    pub sender: usize,
    /// Contributing (1-based user, 0-based packet index) pairs.
    pub operands: Vec<(usize, usize)>,
    pub payload: Vec<u8>,
}

/// Runs the delivery loop for every symbol in order. Operand bytes are taken
/// from the sender's own cache; a miss there means the mapping is wrong and
/// is reported as an error rather than papered over.
pub fn deliver(
    dpda: &Dpda,
    caches: &[CacheContent],
    demand: &[usize],
    library: &FileLibrary,
) -> Result<Vec<Transmission>, SimError> {
    check_demand(dpda, demand, library)?;
    let array = dpda.array();
    let packet_len = library.file_size().div_ceil(array.num_rows());
    let occurrences = array.occurrences();
    let mut transmissions = Vec::with_capacity(occurrences.len());
    for (&symbol, cells) in &occurrences {
        let sender = dpda.phi().col(symbol);
        let mut payload = vec![0u8; packet_len];
        let mut operands = Vec::with_capacity(cells.len());
        for &(j, k) in cells {
            let file = demand[k] - 1;
            let bytes =
                caches[sender]
                    .packets
                    .get(&(file, j))
                    .ok_or(SimError::SenderMissingPacket {
                        sender: sender + 1,
                        file: file + 1,
                        packet: j + 1,
                    })?;
            xor_into(&mut payload, bytes);
            operands.push((k + 1, j));
        }
        transmissions.push(Transmission {
            symbol,
            sender: sender + 1,
            operands,
            payload,
        });
    }
    Ok(transmissions)
}

/// What one user recovered and how.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// 1-based user id.
    pub user: usize,
    /// 1-based demanded file.
    pub file: usize,
    pub bytes: Vec<u8>,
    pub packets_from_cache: usize,
    pub packets_from_transmissions: usize,
    /// Every missing packet was served by exactly one transmission (counted).
    pub one_shot: bool,
}

/// Rebuilds user `k`'s demanded file from its cache and the transmissions.
/// For a missing packet `j` with `p_{j,k} = s`, the unique transmission for
/// `s` is XORed with the other operands' packets, all of which the user
/// caches. The number of usable transmissions per packet is counted, not
/// assumed.
pub fn decode(
    dpda: &Dpda,
    user: usize,
    cache: &CacheContent,
    transmissions: &[Transmission],
    demand: &[usize],
    file_len: usize,
) -> Result<DecodeOutcome, SimError> {
    let array = dpda.array();
    let k = user - 1;
    let file = demand[k] - 1;
    let f = array.num_rows();
    let mut packets: Vec<Vec<u8>> = Vec::with_capacity(f);
    let mut from_cache = 0;
    let mut from_transmissions = 0;
    for j in 0..f {
        match array.entry(j, k).symbol() {
            None => {
                let bytes = cache
                    .packets
                    .get(&(file, j))
                    .ok_or(SimError::OperandNotCached {
                        user,
                        file: file + 1,
                        packet: j + 1,
                    })?;
                packets.push(bytes.clone());
                from_cache += 1;
            }
            Some(symbol) => {
                let usable: Vec<&Transmission> = transmissions
                    .iter()
                    .filter(|t| t.symbol == symbol)
                    .collect();
                if usable.len() != 1 {
                    return Err(SimError::OneShotConflict {
                        user,
                        packet: j + 1,
                        count: usable.len(),
                    });
                }
                let transmission = usable[0];
                let mut packet = transmission.payload.clone();
                for &(other_user, other_j) in &transmission.operands {
                    if other_user == user && other_j == j {
                        continue;
                    }
                    let other_file = demand[other_user - 1] - 1;
                    let bytes = cache.packets.get(&(other_file, other_j)).ok_or(
                        SimError::OperandNotCached {
                            user,
                            file: other_file + 1,
                            packet: other_j + 1,
                        },
                    )?;
                    xor_into(&mut packet, bytes);
                }
                packets.push(packet);
                from_transmissions += 1;
            }
        }
    }
    let mut bytes: Vec<u8> = packets.concat();
    bytes.truncate(file_len);
    Ok(DecodeOutcome {
        user,
        file: file + 1,
        bytes,
        packets_from_cache: from_cache,
        packets_from_transmissions: from_transmissions,
        one_shot: true,
    })
}

fn check_demand(dpda: &Dpda, demand: &[usize], library: &FileLibrary) -> Result<(), SimError> {
    let k = dpda.array().num_cols();
    if demand.len() != k {
        return Err(SimError::DemandLength {
            got: demand.len(),
            expected: k,
        });
    }
    for (user, &file) in demand.iter().enumerate() {
        if file == 0 || file > library.num_files() {
            return Err(SimError::DemandOutOfRange {
                user: user + 1,
                file,
                files: library.num_files(),
            });
        }
    }
    Ok(())
}

/// Uniform demand vector over `1..=files`, deterministic in the seed and
/// independent of the synthetic library stream.
pub fn random_demand(users: usize, files: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..users)
        .map(|_| (rng.next_u64() % files as u64) as usize + 1)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub demand: Vec<usize>,
    pub transmissions: Vec<Transmission>,
    pub outcomes: Vec<DecodeOutcome>,
    pub decode_ok: Vec<bool>,
    pub one_shot_verified: bool,
    /// Transmitted packets over subpacketization, exact.
    pub measured_load: BigRational,
    pub feasibility_warning: Option<String>,
    pub packet_len: usize,
}

impl SimulationReport {
    pub fn all_decoded(&self) -> bool {
        self.decode_ok.iter().all(|&ok| ok)
    }

    pub fn to_json(&self, library: &FileLibrary) -> serde_json::Value {
        let transmissions: Vec<serde_json::Value> = self
            .transmissions
            .iter()
            .map(|t| {
                serde_json::json!({
                    "symbol": t.symbol,
                    "sender": t.sender,
                    "operands": t.operands
                        .iter()
                        .map(|&(user, j)| serde_json::json!({"user": user, "packet": j + 1}))
                        .collect::<Vec<_>>(),
                    "payload_sha256": hex_digest(&t.payload),
                })
            })
            .collect();
        let users: Vec<serde_json::Value> = self
            .outcomes
            .iter()
            .zip(&self.decode_ok)
            .map(|(o, &ok)| {
                serde_json::json!({
                    "user": o.user,
                    "demanded_file": o.file,
                    "decoded_ok": ok,
                    "one_shot": o.one_shot,
                    "packets_from_cache": o.packets_from_cache,
                    "packets_from_transmissions": o.packets_from_transmissions,
                    "decoded_sha256": hex_digest(&o.bytes),
                })
            })
            .collect();
        serde_json::json!({
            "demand": self.demand,
            "packet_bytes": self.packet_len,
            "transmissions": transmissions,
            "users": users,
            "one_shot_verified": self.one_shot_verified,
            "measured_load": ratio_string(&self.measured_load),
            "feasibility_warning": self.feasibility_warning,
            "library": {
                "N": library.num_files(),
                "B": library.file_size(),
                "seed": library.seed(),
                "file_sha256s": (0..library.num_files())
                    .map(|n| hex_digest(library.file(n)))
                    .collect::<Vec<_>>(),
            },
        })
    }

    pub fn summary(&self) -> String {
        format!(
            "{} transmissions, load {}, {}/{} users decoded, one-shot {}",
            self.transmissions.len(),
            ratio_string(&self.measured_load),
            self.decode_ok.iter().filter(|&&ok| ok).count(),
            self.decode_ok.len(),
            if self.one_shot_verified {
                "verified"
            } else {
                "FAILED"
            }
        )
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Full pipeline: place, deliver, decode every user, verify byte-exact
/// recovery against the library, and measure the load as transmitted packets
/// over subpacketization.
pub fn run(
    dpda: &Dpda,
    demand: &[usize],
    library: &FileLibrary,
) -> Result<SimulationReport, SimError> {
    check_demand(dpda, demand, library)?;
    let params = dpda.params();
    let feasibility_warning = if params.k * params.z < params.f {
        Some(format!(
            "cache ratio Z/F = {}/{} is below 1/K = 1/{}; some demands cannot be met",
            params.z, params.f, params.k
        ))
    } else {
        None
    };
    let caches = place(dpda, library)?;
    let transmissions = deliver(dpda, &caches, demand, library)?;
    debug_assert_eq!(transmissions.len(), params.s);
    let mut outcomes = Vec::with_capacity(params.k);
    let mut decode_ok = Vec::with_capacity(params.k);
    for user in 1..=params.k {
        let outcome = decode(
            dpda,
            user,
            &caches[user - 1],
            &transmissions,
            demand,
            library.file_size(),
        )?;
        decode_ok.push(outcome.bytes == library.file(outcome.file - 1));
        outcomes.push(outcome);
    }
    let one_shot_verified = outcomes.iter().all(|o| o.one_shot);
    let measured_load = ratio(transmissions.len() as u64, params.f as u64);
    let packet_len = library.file_size().div_ceil(params.f);
    Ok(SimulationReport {
        demand: demand.to_vec(),
        transmissions,
        outcomes,
        decode_ok,
        one_shot_verified,
        measured_load,
        feasibility_warning,
        packet_len,
    })
}

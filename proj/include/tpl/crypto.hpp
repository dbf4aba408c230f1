#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "tpl/serial.hpp"

namespace tpl::crypto {

using serial::Bytes;
using serial::ByteView;

inline constexpr std::size_t kDigestSize = 32;  // kappa = 256 bits

/// Fixed-width 256-bit digest with byte-wise equality.
struct Digest {
    std::array<std::uint8_t, kDigestSize> bytes{};

    auto operator<=>(const Digest&) const = default;

    ByteView view() const { return ByteView(bytes.data(), bytes.size()); }
    std::string hex() const;
    static Digest from_hex(const std::string& hex);
    static Digest zero() { return Digest{}; }
};

/// Single-octet domain-separation prefixes. Each use of H gets a distinct
/// tag prepended to the payload before digesting.
enum class DomainTag : std::uint8_t {
    Ledger = 0x00,
    EventDigest = 0x01,
    PotChain = 0x02,
    MerkleLeaf = 0x03,
    MerkleNode = 0x04,
    AnchorPayload = 0x05,
};

/// Hash backend. Sha256 is the default; TruncatedIdentity copies the first
/// 32 payload octets and ignores the tag — a deliberately broken control
/// used by the experiment harness, never in honest deployments.
struct Hasher {
    enum class Kind { Sha256, TruncatedIdentity };
    Kind kind = Kind::Sha256;

    Digest hash(DomainTag tag, ByteView payload) const;
};

/// Plain SHA-256 with no domain tag; used by the simulated substrate for
/// block and transaction identifiers.
Digest sha256(ByteView payload);

/// Streaming hash over a growing byte sequence, tag-prefixed once at the
/// start. digest() may be called repeatedly as the stream grows, which is
/// what keeps recomputing C_i after each append O(1) amortised.
class HashStream {
public:
    HashStream(DomainTag tag, Hasher hasher);
    HashStream(const HashStream&);
    HashStream& operator=(const HashStream&);
    ~HashStream();

    void update(ByteView data);
    Digest digest() const;

private:
    Hasher hasher_;
    void* sha_state_;  // crypto_hash_sha256_state, kept out of the header
    Bytes prefix_;     // first kDigestSize payload octets (broken backend)
    std::size_t total_ = 0;
};

// --- Signatures (Ed25519) ---

inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSecretKeySize = 64;
inline constexpr std::size_t kSignatureSize = 64;

struct PublicKey {
    std::array<std::uint8_t, kPublicKeySize> bytes{};
    auto operator<=>(const PublicKey&) const = default;
    ByteView view() const { return ByteView(bytes.data(), bytes.size()); }
    std::string hex() const;
    static PublicKey from_hex(const std::string& hex);
};

struct SecretKey {
    std::array<std::uint8_t, kSecretKeySize> bytes{};
    ByteView view() const { return ByteView(bytes.data(), bytes.size()); }
    std::string hex() const;
    static SecretKey from_hex(const std::string& hex);
};

struct Signature {
    std::array<std::uint8_t, kSignatureSize> bytes{};
    auto operator<=>(const Signature&) const = default;
    ByteView view() const { return ByteView(bytes.data(), bytes.size()); }
};

struct KeyPair {
    PublicKey pk;
    SecretKey sk;

    static KeyPair generate();
    /// Deterministic keypair from a 32-octet seed.
    static KeyPair from_seed(ByteView seed32);
};

Signature sign(const SecretKey& sk, ByteView message);
bool verify(const PublicKey& pk, ByteView message, const Signature& sig);

// --- Merkle tree ---

struct MerkleStep {
    Digest sibling;
    bool sibling_on_left = false;
};
using MerkleProof = std::vector<MerkleStep>;

/// Root over an ordered leaf sequence. Leaves are hashed with MerkleLeaf,
/// interior nodes with MerkleNode over left||right; an unpaired node is
/// promoted to the next level unchanged.
Digest merkle_commit(const std::vector<Bytes>& leaves, const Hasher& hasher = {});
MerkleProof merkle_prove(const std::vector<Bytes>& leaves, std::size_t index,
                         const Hasher& hasher = {});
bool merkle_verify(const Digest& root, ByteView leaf, const MerkleProof& proof,
                   const Hasher& hasher = {});

}  // namespace tpl::crypto

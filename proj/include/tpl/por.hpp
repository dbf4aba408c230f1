#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tpl/crypto.hpp"
#include "tpl/treasury.hpp"

namespace tpl::por {

using crypto::Digest;
using crypto::Hasher;
using crypto::MerkleProof;
using crypto::PublicKey;
using serial::Bytes;
using serial::ByteView;

/// UTXO-like reserve position held by some domain.
struct CoinRecord {
    std::string coin_id;
    std::int64_t value = 0;  // satoshis; negative only for derivative/collateral
    PublicKey owner_key;
    std::string domain;

    bool operator==(const CoinRecord&) const = default;

    Bytes serialize() const;
    static CoinRecord deserialize(ByteView in);
};

/// Commitment over a coin multiset: Merkle root of the records sorted by
/// coin_id, plus per-domain value totals. An empty set commits to a single
/// sentinel (empty) leaf.
struct PoRSnapshot {
    std::uint64_t t = 0;
    std::vector<CoinRecord> coins;  // held sorted by coin_id
    Digest commitment;
    std::map<std::string, std::int64_t> domain_totals;

    bool operator==(const PoRSnapshot&) const = default;

    Bytes serialize() const;
    static PoRSnapshot deserialize(ByteView in);
};

PoRSnapshot snapshot(const treasury::DomainRegistry& reg, std::vector<CoinRecord> coins,
                     std::uint64_t t, const Hasher& hasher = {});

struct InclusionProof {
    CoinRecord coin;
    MerkleProof path;
};

InclusionProof prove_inclusion(const PoRSnapshot& snap, const std::string& coin_id,
                               const Hasher& hasher = {});

/// Accepts iff a coin with this id and value is committed under the root.
bool por_verify(const Digest& c_snap, const std::string& coin_id, std::int64_t value,
                const InclusionProof& proof, const Hasher& hasher = {});

/// Ground-truth unspent set of the simulated chain.
struct SimCoinRegistry {
    std::map<std::string, CoinRecord> unspent;

    void credit(CoinRecord coin);
    void spend(const std::string& coin_id);
};

enum class CoinViolationKind { Nonexistent, NotOwned };

struct CoinViolation {
    std::string coin_id;
    CoinViolationKind kind = CoinViolationKind::Nonexistent;

    bool operator==(const CoinViolation&) const = default;
};

/// Every committed coin must exist unspent (same id and value) in the
/// registry and be owned by one of the treasury keys.
std::vector<CoinViolation> check_existence_ownership(
    const PoRSnapshot& snap, const SimCoinRegistry& registry,
    const std::vector<PublicKey>& treasury_keys);

/// One synthetic coin per tracked domain realizing the given balances; used
/// to instantiate honest snapshots from a folded exposure vector.
std::vector<CoinRecord> coins_from_exposures(const treasury::DomainRegistry& reg,
                                             const treasury::ExposureVector& state,
                                             const PublicKey& owner);

}  // namespace tpl::por

#include "tpl/por.hpp"

#include <algorithm>

namespace tpl::por {

Bytes CoinRecord::serialize() const {
    serial::TlvWriter w(serial::RecordTag::CoinRecord);
    w.field_str(1, coin_id);
    w.field_i64(2, value);
    w.field_bytes(3, owner_key.view());
    w.field_str(4, domain);
    return w.finish();
}

CoinRecord CoinRecord::deserialize(ByteView in) {
    serial::TlvRecord r = serial::TlvRecord::parse(in);
    if (r.tag != static_cast<std::uint8_t>(serial::RecordTag::CoinRecord))
        throw UnsupportedRecord("expected a coin record");
    CoinRecord c;
    c.coin_id = r.require_str(1);
    c.value = r.require_i64(2);
    ByteView pk = r.require_bytes(3);
    if (pk.size() != crypto::kPublicKeySize) throw ParseError("bad owner key length");
    std::copy(pk.begin(), pk.end(), c.owner_key.bytes.begin());
    c.domain = r.require_str(4);
    return c;
}

namespace {

std::vector<Bytes> leaves_of(const std::vector<CoinRecord>& coins) {
    if (coins.empty()) return {Bytes{}};  // sentinel leaf for the empty set
    std::vector<Bytes> leaves;
    leaves.reserve(coins.size());
    for (const auto& c : coins) leaves.push_back(c.serialize());
    return leaves;
}

void add_checked(std::int64_t& dst, std::int64_t delta) {
    std::int64_t out;
    if (__builtin_add_overflow(dst, delta, &out))
        throw ValueOverflow("snapshot total overflows i64");
    dst = out;
}

}  // namespace

PoRSnapshot snapshot(const treasury::DomainRegistry& reg, std::vector<CoinRecord> coins,
                     std::uint64_t t, const Hasher& hasher) {
    using treasury::DomainKind;
    PoRSnapshot snap;
    snap.t = t;
    for (const auto& c : coins) {
        const treasury::DomainId* d = reg.find(c.domain);
        if (!d) throw UnknownDomain("coin " + c.coin_id + " names unknown domain " + c.domain);
        if (c.value < 0 && d->kind != DomainKind::Derivative &&
            d->kind != DomainKind::Collateral)
            throw ValueOverflow("negative coin value outside derivative/collateral: " +
                                c.coin_id);
        add_checked(snap.domain_totals[c.domain], c.value);
    }
    std::sort(coins.begin(), coins.end(),
              [](const CoinRecord& a, const CoinRecord& b) { return a.coin_id < b.coin_id; });
    snap.coins = std::move(coins);
    snap.commitment = crypto::merkle_commit(leaves_of(snap.coins), hasher);
    return snap;
}

Bytes PoRSnapshot::serialize() const {
    serial::TlvWriter w(serial::RecordTag::Snapshot);
    w.field_u64(1, t);
    w.field_bytes(2, commitment.view());
    w.field_bytes(3, serial::encode_i64_map(domain_totals));
    std::vector<Bytes> items;
    items.reserve(coins.size());
    for (const auto& c : coins) items.push_back(c.serialize());
    w.field_bytes(4, serial::encode_seq(items));
    return w.finish();
}

PoRSnapshot PoRSnapshot::deserialize(ByteView in) {
    serial::TlvRecord r = serial::TlvRecord::parse(in);
    if (r.tag != static_cast<std::uint8_t>(serial::RecordTag::Snapshot))
        throw UnsupportedRecord("expected a snapshot record");
    PoRSnapshot snap;
    snap.t = r.require_u64(1);
    ByteView c = r.require_bytes(2);
    if (c.size() != crypto::kDigestSize) throw ParseError("bad commitment length");
    std::copy(c.begin(), c.end(), snap.commitment.bytes.begin());
    snap.domain_totals = serial::decode_i64_map(r.require_bytes(3));
    for (const auto& item : serial::decode_seq(r.require_bytes(4)))
        snap.coins.push_back(CoinRecord::deserialize(item));
    return snap;
}

InclusionProof prove_inclusion(const PoRSnapshot& snap, const std::string& coin_id,
                               const Hasher& hasher) {
    for (std::size_t i = 0; i < snap.coins.size(); ++i) {
        if (snap.coins[i].coin_id != coin_id) continue;
        return InclusionProof{snap.coins[i],
                              crypto::merkle_prove(leaves_of(snap.coins), i, hasher)};
    }
    throw CoinNotInSnapshot("coin not committed: " + coin_id);
}

bool por_verify(const Digest& c_snap, const std::string& coin_id, std::int64_t value,
                const InclusionProof& proof, const Hasher& hasher) {
    if (proof.coin.coin_id != coin_id || proof.coin.value != value) return false;
    return crypto::merkle_verify(c_snap, proof.coin.serialize(), proof.path, hasher);
}

void SimCoinRegistry::credit(CoinRecord coin) {
    if (!unspent.emplace(coin.coin_id, coin).second)
        throw Error("coin id already in registry: " + coin.coin_id);
}

void SimCoinRegistry::spend(const std::string& coin_id) {
    if (unspent.erase(coin_id) == 0)
        throw CoinNotInSnapshot("cannot spend unknown coin: " + coin_id);
}

std::vector<CoinViolation> check_existence_ownership(
    const PoRSnapshot& snap, const SimCoinRegistry& registry,
    const std::vector<PublicKey>& treasury_keys) {
    std::vector<CoinViolation> violations;
    for (const auto& c : snap.coins) {
        auto it = registry.unspent.find(c.coin_id);
        if (it == registry.unspent.end() || it->second.value != c.value) {
            violations.push_back({c.coin_id, CoinViolationKind::Nonexistent});
            continue;
        }
        const PublicKey& owner = it->second.owner_key;
        bool owned = std::find(treasury_keys.begin(), treasury_keys.end(), owner) !=
                     treasury_keys.end();
        if (!owned || !(c.owner_key == owner))
            violations.push_back({c.coin_id, CoinViolationKind::NotOwned});
    }
    return violations;
}

std::vector<CoinRecord> coins_from_exposures(const treasury::DomainRegistry& reg,
                                             const treasury::ExposureVector& state,
                                             const PublicKey& owner) {
    std::vector<CoinRecord> coins;
    for (const auto& [domain, balance] : state.balances) {
        if (balance == 0) continue;
        CoinRecord c;
        c.coin_id = "coin-" + std::to_string(state.logical_time) + "-" + domain;
        c.value = balance;
        c.owner_key = owner;
        c.domain = domain;
        coins.push_back(std::move(c));
    }
    return coins;
}

}  // namespace tpl::por

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tpl/crypto.hpp"
#include "tpl/treasury.hpp"

namespace tpl::pot {

using crypto::Digest;
using crypto::Hasher;
using crypto::PublicKey;
using crypto::SecretKey;
using crypto::Signature;
using serial::Bytes;
using serial::ByteView;
using treasury::TreasuryEvent;

/// Per-event digest over (evid, v, m). Timestamp and domain identifiers are
/// deliberately not inputs; they are bound later by the chain value.
Digest event_digest(const TreasuryEvent& e, const Hasher& hasher = {});

/// R_i over the canonical encoding of (R_prev, h, d_src, d_dst, t).
Digest chain_value(const Digest& r_prev, const Digest& h, const std::string& d_src,
                   const std::string& d_dst, std::uint64_t t, const Hasher& hasher = {});

/// Canonical bytes both parties sign: (h, d_src, d_dst, t, R).
Bytes signature_message(const Digest& h, const std::string& d_src,
                        const std::string& d_dst, std::uint64_t t, const Digest& r);

struct PoTRecord {
    std::uint64_t index = 0;  // 1-based position in the chain
    TreasuryEvent event;
    Digest h;
    Digest r;
    Signature sig_treasury;
    Signature sig_provider;

    bool operator==(const PoTRecord&) const = default;

    Bytes serialize() const;
    static PoTRecord deserialize(ByteView in);
};

struct PoTChain {
    Hasher hasher;
    std::vector<PoTRecord> records;

    static Digest seed() { return Digest::zero(); }
    Digest head() const { return records.empty() ? seed() : records.back().r; }
};

const PoTRecord& append_receipt(PoTChain& chain, const TreasuryEvent& e,
                                const SecretKey& treasury_sk,
                                const SecretKey& provider_sk);

enum class DivergenceCause { HashLink, TreasurySig, ProviderSig };

struct Divergence {
    std::uint64_t index = 0;
    DivergenceCause cause = DivergenceCause::HashLink;

    bool operator==(const Divergence&) const = default;
};

/// Recomputes every digest and chain value from the seed and checks both
/// signatures per record. Returns the smallest failing index, or nullopt if
/// the chain is internally consistent.
std::optional<Divergence> verify_chain(const PoTChain& chain, const PublicKey& treasury_pk,
                                       const PublicKey& provider_pk);

/// Smallest 1-based index where the two record sequences differ, by
/// canonical bytes. nullopt iff one chain is a prefix of the other.
std::optional<std::uint64_t> first_divergence(const PoTChain& a, const PoTChain& b);

}  // namespace tpl::pot

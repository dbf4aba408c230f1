#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpl/anchor_sim.hpp"
#include "tpl/crypto.hpp"
#include "tpl/por.hpp"
#include "tpl/pot.hpp"
#include "tpl/treasury.hpp"

namespace tpl::ledger {

using crypto::Digest;
using crypto::Hasher;
using serial::Bytes;
using serial::ByteView;

/// Confirmed anchor: which prefix commitment landed where.
struct AnchorMeta {
    Digest txid;
    std::uint64_t height = 0;
    std::uint64_t anchored_index = 0;  // record count the commitment covers
    Digest commitment;

    bool operator==(const AnchorMeta&) const = default;

    Bytes serialize() const;
    static AnchorMeta deserialize(ByteView in);
};

/// One typed entry of the append-only record sequence. The dense index is
/// implicit in the position, so the canonical bytes carry only kind and
/// payload.
struct LedgerRecord {
    enum class Kind : std::uint8_t { Event = 1, Snapshot = 2, Anchor = 3 };

    Kind kind = Kind::Event;
    Bytes payload;  // canonical bytes of the inner record

    bool operator==(const LedgerRecord&) const = default;

    Bytes serialize() const;
    static LedgerRecord deserialize(ByteView in);

    static LedgerRecord of_event(const pot::PoTRecord& rec);
    static LedgerRecord of_snapshot(const por::PoRSnapshot& snap);
    static LedgerRecord of_anchor(const AnchorMeta& meta);
};

struct Config {
    std::vector<treasury::DomainId> domains;
    Hasher hasher;
    std::uint64_t k = anchor_sim::kDefaultConfirmations;
};

struct Keys {
    crypto::PublicKey treasury_pk;
    crypto::PublicKey provider_pk;
    std::optional<crypto::SecretKey> treasury_sk;
    std::optional<crypto::SecretKey> provider_sk;

    /// Both signing keys derived from one 32-octet seed, or fresh random
    /// pairs when no seed is given.
    static Keys derive(ByteView seed = {});
    bool can_sign() const { return treasury_sk && provider_sk; }
};

/// The append-only state machine. All mutation is funnelled through the
/// append path, which advances a running commitment C_i over the canonical
/// record stream; every cached aggregate (balances, receipt chain, latest
/// snapshot, anchors) is recomputable from the records alone.
class Ledger {
public:
    static Ledger setup(Config cfg, Keys keys);

    /// Rebuild from canonical record bytes (persisted file, view bundle, or
    /// a peer's prefix). Without secret keys the result is sealed read-only.
    static Ledger from_records(Config cfg, Keys keys, std::span<const Bytes> records);

    // --- queries (never mutate) ---
    const Digest& commitment() const { return commitment_; }
    std::uint64_t size() const { return records_.size(); }
    const treasury::DomainRegistry& registry() const { return registry_; }
    const treasury::ExposureVector& balances() const { return balances_; }
    const pot::PoTChain& receipt_chain() const { return chain_; }
    const Keys& keys() const { return keys_; }
    const Config& config() const { return cfg_; }
    const std::vector<Bytes>& record_bytes() const { return records_; }
    const std::optional<por::PoRSnapshot>& latest_snapshot() const { return snapshot_; }
    const std::vector<por::PoRSnapshot>& snapshots() const { return all_snapshots_; }
    const std::vector<AnchorMeta>& anchors() const { return anchors_; }
    std::uint64_t last_anchored_index() const {
        return anchors_.empty() ? 0 : anchors_.back().anchored_index;
    }

    /// Commitment after the first `index` records (C_0 for 0).
    Digest commitment_at(std::uint64_t index) const;

    /// Concatenated length-prefixed canonical bytes of the first `index`
    /// records — exactly the stream the commitment digests.
    Bytes prefix_bytes(std::uint64_t index) const;

    // --- mutations (single writer) ---
    const pot::PoTRecord& append_event(const treasury::TreasuryEvent& e);

    /// Append a snapshot over an explicit coin set. When enforce is set the
    /// per-domain totals must equal the folded balances exactly.
    const por::PoRSnapshot& snapshot_trigger(std::vector<por::CoinRecord> coins,
                                             bool enforce = true);
    /// Honest-mode convenience: synthesize coins realizing current balances.
    const por::PoRSnapshot& snapshot_trigger();

    struct PendingAnchor {
        Digest txid;
        std::uint64_t index = 0;
        Digest commitment;
    };

    /// Submit the current commitment to the substrate; finalization happens
    /// on a later poll once the tx is k blocks deep.
    Digest anchor_trigger(anchor_sim::SimChain& chain);

    /// Check pending anchors: confirmed ones become anchor records, dropped
    /// ones are resubmitted. Returns the number finalized.
    std::size_t poll_anchors(anchor_sim::SimChain& chain);

    const std::vector<PendingAnchor>& pending_anchors() const { return pending_; }

    /// Re-register a submitted-but-unconfirmed anchor after a reload; the
    /// record stream itself never carries pending state.
    void restore_pending(PendingAnchor p) { pending_.push_back(std::move(p)); }

    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_ || !keys_.can_sign(); }

private:
    Ledger(Config cfg, Keys keys);

    void append_record(const LedgerRecord& rec);
    void absorb(const LedgerRecord& rec);  // update aux caches

    Config cfg_;
    Keys keys_;
    treasury::DomainRegistry registry_;
    std::vector<Bytes> records_;
    std::vector<Digest> commitments_;  // C_0 .. C_i
    crypto::HashStream stream_;
    Digest commitment_;
    treasury::ExposureVector balances_;
    pot::PoTChain chain_;
    std::optional<por::PoRSnapshot> snapshot_;
    std::vector<por::PoRSnapshot> all_snapshots_;
    std::vector<AnchorMeta> anchors_;
    std::vector<PendingAnchor> pending_;
    bool sealed_ = false;
};

// --- persistence: one hex record per line plus a commitments sidecar ---

void save_ledger(const Ledger& ledger, const std::string& records_path,
                 const std::string& commitments_path);

Ledger load_ledger(Config cfg, Keys keys, const std::string& records_path,
                   const std::string& commitments_path);

// --- liveness schedule checking ---

struct LivenessConfig {
    std::uint64_t d_event = 1;
    std::uint64_t d_snap = 1;
    std::uint64_t d_anchor = 1;
};

struct TraceEntry {
    enum class Kind { EventInput, EventLogged, Snapshot, Anchor } kind;
    std::uint64_t tick = 0;
};

struct LivenessViolation {
    enum class Kind { EventDelay, SnapshotGap, AnchorGap } kind;
    std::uint64_t tick = 0;  // where the bound was exceeded

    bool operator==(const LivenessViolation&) const = default;
};

/// A schedule is admissible iff the i-th logged event follows the i-th
/// input within d_event ticks, and no gap between consecutive snapshots
/// (resp. anchors), including the leading and trailing gaps, exceeds the
/// bound. Returns the first violation in tick order.
std::optional<LivenessViolation> check_liveness(std::span<const TraceEntry> trace,
                                                const LivenessConfig& cfg);

}  // namespace tpl::ledger

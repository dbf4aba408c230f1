#include "tpl/ledger.hpp"

#include <algorithm>
#include <fstream>

namespace tpl::ledger {

Bytes AnchorMeta::serialize() const {
    serial::TlvWriter w(serial::RecordTag::AnchorMeta);
    w.field_bytes(1, txid.view());
    w.field_u64(2, height);
    w.field_u64(3, anchored_index);
    w.field_bytes(4, commitment.view());
    return w.finish();
}

AnchorMeta AnchorMeta::deserialize(ByteView in) {
    serial::TlvRecord r = serial::TlvRecord::parse(in);
    if (r.tag != static_cast<std::uint8_t>(serial::RecordTag::AnchorMeta))
        throw UnsupportedRecord("expected an anchor record");
    AnchorMeta m;
    auto fixed = [&](std::uint8_t id, Digest& dst) {
        ByteView b = r.require_bytes(id);
        if (b.size() != crypto::kDigestSize) throw ParseError("bad digest length");
        std::copy(b.begin(), b.end(), dst.bytes.begin());
    };
    fixed(1, m.txid);
    m.height = r.require_u64(2);
    m.anchored_index = r.require_u64(3);
    fixed(4, m.commitment);
    return m;
}

Bytes LedgerRecord::serialize() const {
    serial::TlvWriter w(serial::RecordTag::LedgerRecord);
    Bytes k{static_cast<std::uint8_t>(kind)};
    w.field_bytes(1, k);
    w.field_bytes(2, payload);
    return w.finish();
}

LedgerRecord LedgerRecord::deserialize(ByteView in) {
    serial::TlvRecord r = serial::TlvRecord::parse(in);
    if (r.tag != static_cast<std::uint8_t>(serial::RecordTag::LedgerRecord))
        throw UnsupportedRecord("expected a ledger record");
    ByteView k = r.require_bytes(1);
    if (k.size() != 1 || k[0] < 1 || k[0] > 3) throw ParseError("bad record kind");
    LedgerRecord rec;
    rec.kind = static_cast<Kind>(k[0]);
    ByteView p = r.require_bytes(2);
    rec.payload.assign(p.begin(), p.end());
    return rec;
}

LedgerRecord LedgerRecord::of_event(const pot::PoTRecord& rec) {
    return {Kind::Event, rec.serialize()};
}

LedgerRecord LedgerRecord::of_snapshot(const por::PoRSnapshot& snap) {
    return {Kind::Snapshot, snap.serialize()};
}

LedgerRecord LedgerRecord::of_anchor(const AnchorMeta& meta) {
    return {Kind::Anchor, meta.serialize()};
}

Keys Keys::derive(ByteView seed) {
    Keys keys;
    if (seed.empty()) {
        crypto::KeyPair t = crypto::KeyPair::generate();
        crypto::KeyPair p = crypto::KeyPair::generate();
        keys.treasury_pk = t.pk;
        keys.provider_pk = p.pk;
        keys.treasury_sk = t.sk;
        keys.provider_sk = p.sk;
        return keys;
    }
    auto derive_one = [&](char role) {
        Bytes material(seed.begin(), seed.end());
        material.push_back(static_cast<std::uint8_t>(role));
        return crypto::KeyPair::from_seed(crypto::sha256(material).view());
    };
    crypto::KeyPair t = derive_one('t');
    crypto::KeyPair p = derive_one('p');
    keys.treasury_pk = t.pk;
    keys.provider_pk = p.pk;
    keys.treasury_sk = t.sk;
    keys.provider_sk = p.sk;
    return keys;
}

Ledger::Ledger(Config cfg, Keys keys)
    : cfg_(std::move(cfg)),
      keys_(std::move(keys)),
      registry_(cfg_.domains),
      stream_(crypto::DomainTag::Ledger, cfg_.hasher) {
    commitment_ = stream_.digest();
    commitments_.push_back(commitment_);
    balances_ = treasury::initial_state(registry_);
    chain_.hasher = cfg_.hasher;
}

Ledger Ledger::setup(Config cfg, Keys keys) { return Ledger(std::move(cfg), std::move(keys)); }

Ledger Ledger::from_records(Config cfg, Keys keys, std::span<const Bytes> records) {
    Ledger l(std::move(cfg), std::move(keys));
    for (const auto& bytes : records) {
        LedgerRecord rec = LedgerRecord::deserialize(bytes);
        l.absorb(rec);
        l.append_record(rec);
    }
    return l;
}

void Ledger::append_record(const LedgerRecord& rec) {
    Bytes bytes = rec.serialize();
    Bytes frame;
    serial::put_u32(frame, static_cast<std::uint32_t>(bytes.size()));
    stream_.update(frame);
    stream_.update(bytes);
    commitment_ = stream_.digest();
    commitments_.push_back(commitment_);
    records_.push_back(std::move(bytes));
}

void Ledger::absorb(const LedgerRecord& rec) {
    switch (rec.kind) {
        case LedgerRecord::Kind::Event: {
            pot::PoTRecord pr = pot::PoTRecord::deserialize(rec.payload);
            balances_ = treasury::apply_event(registry_, balances_, pr.event);
            chain_.records.push_back(std::move(pr));
            break;
        }
        case LedgerRecord::Kind::Snapshot: {
            por::PoRSnapshot snap = por::PoRSnapshot::deserialize(rec.payload);
            snapshot_ = snap;
            all_snapshots_.push_back(std::move(snap));
            break;
        }
        case LedgerRecord::Kind::Anchor:
            anchors_.push_back(AnchorMeta::deserialize(rec.payload));
            break;
    }
}

Digest Ledger::commitment_at(std::uint64_t index) const {
    if (index >= commitments_.size())
        throw IndexOutOfRange("no commitment for prefix length " + std::to_string(index));
    return commitments_[index];
}

Bytes Ledger::prefix_bytes(std::uint64_t index) const {
    if (index > records_.size())
        throw IndexOutOfRange("prefix length " + std::to_string(index) + " exceeds " +
                              std::to_string(records_.size()));
    Bytes out;
    for (std::uint64_t i = 0; i < index; ++i) {
        serial::put_u32(out, static_cast<std::uint32_t>(records_[i].size()));
        out.insert(out.end(), records_[i].begin(), records_[i].end());
    }
    return out;
}

const pot::PoTRecord& Ledger::append_event(const treasury::TreasuryEvent& e) {
    if (sealed()) throw LedgerSealed();
    // validate first so a rejected event leaves no trace
    treasury::ExposureVector next = treasury::apply_event(registry_, balances_, e);
    const pot::PoTRecord& rec =
        pot::append_receipt(chain_, e, *keys_.treasury_sk, *keys_.provider_sk);
    balances_ = std::move(next);
    append_record(LedgerRecord::of_event(rec));
    return rec;
}

const por::PoRSnapshot& Ledger::snapshot_trigger(std::vector<por::CoinRecord> coins,
                                                 bool enforce) {
    if (sealed()) throw LedgerSealed();
    por::PoRSnapshot snap =
        por::snapshot(registry_, std::move(coins), balances_.logical_time, cfg_.hasher);
    if (enforce) {
        for (const auto& [domain, balance] : balances_.balances) {
            std::int64_t total =
                snap.domain_totals.contains(domain) ? snap.domain_totals.at(domain) : 0;
            if (total != balance)
                throw SnapshotMismatch("snapshot total for " + domain + " is " +
                                       std::to_string(total) + ", ledger holds " +
                                       std::to_string(balance));
        }
    }
    snapshot_ = snap;
    all_snapshots_.push_back(std::move(snap));
    append_record(LedgerRecord::of_snapshot(all_snapshots_.back()));
    return all_snapshots_.back();
}

const por::PoRSnapshot& Ledger::snapshot_trigger() {
    return snapshot_trigger(
        por::coins_from_exposures(registry_, balances_, keys_.treasury_pk), true);
}

Digest Ledger::anchor_trigger(anchor_sim::SimChain& chain) {
    if (sealed()) throw LedgerSealed();
    Digest txid = chain.submit_anchor(commitment_.view());
    pending_.push_back({txid, size(), commitment_});
    return txid;
}

std::size_t Ledger::poll_anchors(anchor_sim::SimChain& chain) {
    if (sealed()) throw LedgerSealed();
    std::size_t finalized = 0;
    std::vector<PendingAnchor> still_pending;
    for (auto& p : pending_) {
        switch (chain.status(p.txid, cfg_.k)) {
            case anchor_sim::TxStatus::ConfirmedAtDepth: {
                auto found = chain.find_tx(p.txid);
                if (!found) throw SubstrateUnavailable("confirmed tx vanished");
                AnchorMeta meta{p.txid, found->second, p.index, p.commitment};
                anchors_.push_back(meta);
                append_record(LedgerRecord::of_anchor(meta));
                ++finalized;
                break;
            }
            case anchor_sim::TxStatus::Absent:
                // dropped by a reorg; resubmit the same commitment
                p.txid = chain.submit_anchor(p.commitment.view());
                still_pending.push_back(p);
                break;
            case anchor_sim::TxStatus::Pending:
                still_pending.push_back(p);
                break;
        }
    }
    pending_ = std::move(still_pending);
    return finalized;
}

void save_ledger(const Ledger& ledger, const std::string& records_path,
                 const std::string& commitments_path) {
    std::ofstream rf(records_path, std::ios::trunc);
    if (!rf) throw Error("cannot write " + records_path);
    for (const auto& rec : ledger.record_bytes()) rf << serial::to_hex(rec) << '\n';
    std::ofstream cf(commitments_path, std::ios::trunc);
    if (!cf) throw Error("cannot write " + commitments_path);
    for (std::uint64_t i = 0; i <= ledger.size(); ++i)
        cf << ledger.commitment_at(i).hex() << '\n';
}

Ledger load_ledger(Config cfg, Keys keys, const std::string& records_path,
                   const std::string& commitments_path) {
    std::ifstream rf(records_path);
    if (!rf) throw Error("cannot read " + records_path);
    std::vector<Bytes> records;
    std::string line;
    while (std::getline(rf, line))
        if (!line.empty()) records.push_back(serial::from_hex(line));
    Ledger l = Ledger::from_records(std::move(cfg), std::move(keys), records);

    // The sidecar may be a strict prefix (crash between the two writes) but
    // must never disagree with the replayed stream.
    std::ifstream cf(commitments_path);
    if (!cf) throw Error("cannot read " + commitments_path);
    std::uint64_t i = 0;
    while (std::getline(cf, line)) {
        if (line.empty()) continue;
        if (i > l.size() || Digest::from_hex(line) != l.commitment_at(i))
            throw Error("commitment sidecar disagrees with the record stream at " +
                        std::to_string(i));
        ++i;
    }
    return l;
}

std::optional<LivenessViolation> check_liveness(std::span<const TraceEntry> trace,
                                                const LivenessConfig& cfg) {
    if (cfg.d_event == 0 || cfg.d_snap == 0 || cfg.d_anchor == 0)
        throw Error("liveness bounds must be positive");
    std::uint64_t end = 0;
    std::vector<std::uint64_t> inputs, logged, snaps, anchors;
    for (const auto& e : trace) {
        end = std::max(end, e.tick);
        switch (e.kind) {
            case TraceEntry::Kind::EventInput: inputs.push_back(e.tick); break;
            case TraceEntry::Kind::EventLogged: logged.push_back(e.tick); break;
            case TraceEntry::Kind::Snapshot: snaps.push_back(e.tick); break;
            case TraceEntry::Kind::Anchor: anchors.push_back(e.tick); break;
        }
    }
    std::vector<LivenessViolation> found;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        bool missing = i >= logged.size();
        if ((missing && end > inputs[i] + cfg.d_event) ||
            (!missing && logged[i] > inputs[i] + cfg.d_event))
            found.push_back({LivenessViolation::Kind::EventDelay,
                             inputs[i] + cfg.d_event});
    }
    auto gaps = [&](const std::vector<std::uint64_t>& ticks, std::uint64_t bound,
                    LivenessViolation::Kind kind) {
        std::uint64_t prev = 0;
        for (std::uint64_t t : ticks) {
            if (t > prev + bound) found.push_back({kind, prev + bound});
            prev = t;
        }
        if (end > prev + bound) found.push_back({kind, prev + bound});
    };
    gaps(snaps, cfg.d_snap, LivenessViolation::Kind::SnapshotGap);
    gaps(anchors, cfg.d_anchor, LivenessViolation::Kind::AnchorGap);
    if (found.empty()) return std::nullopt;
    return *std::min_element(found.begin(), found.end(),
                             [](const LivenessViolation& a, const LivenessViolation& b) {
                                 return a.tick < b.tick;
                             });
}

}  // namespace tpl::ledger

#include "tpl/policy.hpp"

#include <algorithm>
#include <sstream>

namespace tpl::policy {

using treasury::DomainKind;

const char* agg_name(AggMode m) {
    switch (m) {
        case AggMode::Totals: return "TOTALS";
        case AggMode::History: return "HISTORY";
        case AggMode::Flows: return "FLOWS";
    }
    throw Error("unreachable aggregation mode");
}

const char* kind_label(EventKind k) {
    switch (k) {
        case EventKind::Internal: return "INTERNAL";
        case EventKind::External: return "EXTERNAL";
        case EventKind::Fee: return "FEE";
    }
    throw Error("unreachable event kind");
}

namespace {

AggMode agg_from_name(const std::string& s) {
    for (auto m : {AggMode::Totals, AggMode::History, AggMode::Flows})
        if (s == agg_name(m)) return m;
    throw ParseError("unknown aggregation mode: " + s);
}

EventKind kind_from_label(const std::string& s) {
    for (auto k : {EventKind::Internal, EventKind::External, EventKind::Fee})
        if (s == kind_label(k)) return k;
    throw ParseError("unknown event kind: " + s);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

bool encumbered_kind(DomainKind k) {
    return k == DomainKind::Derivative || k == DomainKind::Collateral;
}

std::string relabel(const Policy& p, const std::string& domain) {
    if (auto it = p.label_map.find(domain); it != p.label_map.end()) return it->second;
    if (auto it = p.label_map.find("*"); it != p.label_map.end()) return it->second;
    return domain;
}

/// Balance fold over an arbitrary (possibly filtered) event subsequence.
/// Domains enter the map when first touched; external endpoints never do.
std::map<std::string, std::int64_t> fold_visible(
    const treasury::DomainRegistry& reg, const std::vector<pot::PoTRecord>& receipts) {
    std::map<std::string, std::int64_t> balances;
    auto bump = [&](const std::string& d, std::int64_t delta) {
        const treasury::DomainId* dom = reg.find(d);
        if (!dom) throw UnknownDomain("event names unknown domain " + d);
        if (dom->kind == DomainKind::External) return;
        std::int64_t out;
        if (__builtin_add_overflow(balances[d], delta, &out))
            throw ValueOverflow("policy fold overflows i64");
        balances[d] = out;
    };
    for (const auto& r : receipts) {
        bump(r.event.d_src, -r.event.v);
        bump(r.event.d_dst, r.event.v);
    }
    return balances;
}

std::int64_t nonfee_total(const treasury::DomainRegistry& reg,
                          const std::map<std::string, std::int64_t>& balances) {
    std::int64_t total = 0;
    for (const auto& [d, b] : balances)
        if (d != reg.fee_domain()) total += b;
    return total;
}

}  // namespace

EventKind classify_event(const treasury::DomainRegistry& reg,
                         const treasury::TreasuryEvent& e) {
    const treasury::DomainId* src = reg.find(e.d_src);
    const treasury::DomainId* dst = reg.find(e.d_dst);
    if (!src || !dst) throw UnknownDomain("event names unregistered domains");
    if (src->kind == DomainKind::External || dst->kind == DomainKind::External)
        return EventKind::External;
    if (src->kind == DomainKind::Fee || dst->kind == DomainKind::Fee)
        return EventKind::Fee;
    return EventKind::Internal;
}

std::vector<pot::PoTRecord> visible_events(const treasury::DomainRegistry& reg,
                                           const std::vector<pot::PoTRecord>& receipts,
                                           const Policy& p) {
    // declarative filter: whitelist, event kinds, required metadata
    std::vector<pot::PoTRecord> pass;
    for (const auto& r : receipts) {
        const auto& e = r.event;
        if (!p.domain_whitelist.empty() && !p.domain_whitelist.contains(e.d_src) &&
            !p.domain_whitelist.contains(e.d_dst))
            continue;
        if (!p.kinds.empty() && !p.kinds.contains(classify_event(reg, e))) continue;
        bool meta_ok = true;
        for (const auto& [k, v] : p.required_meta) {
            auto it = e.m.find(k);
            if (it == e.m.end() || it->second != v) {
                meta_ok = false;
                break;
            }
        }
        if (!meta_ok) continue;
        pass.push_back(r);
    }

    // delay: suppress the trailing window, measured from the last visible tick
    if (p.delay > 0 && !pass.empty()) {
        std::uint64_t horizon = pass.back().event.t;
        std::erase_if(pass, [&](const pot::PoTRecord& r) {
            return r.event.t + p.delay > horizon;
        });
    }

    // materiality: absolute floor and/or fraction of the visible total
    std::int64_t theta = p.theta_abs;
    if (p.theta_fraction_ppm > 0) {
        std::int64_t total = nonfee_total(reg, fold_visible(reg, pass));
        std::int64_t frac = static_cast<std::int64_t>(
            (static_cast<__int128>(total < 0 ? -total : total) * p.theta_fraction_ppm) /
            1'000'000);
        theta = std::max(theta, frac);
    }
    if (theta > 0)
        std::erase_if(pass, [&](const pot::PoTRecord& r) {
            std::int64_t mag = r.event.v < 0 ? -r.event.v : r.event.v;
            return mag < theta;
        });
    return pass;
}

std::vector<ViewRow> derive_table(const treasury::DomainRegistry& reg,
                                  const std::vector<pot::PoTRecord>& receipts,
                                  const Policy& p) {
    std::vector<ViewRow> rows;
    auto bucket_of = [&](std::uint64_t t) {
        return p.bucket_width == 0 ? 0 : t / p.bucket_width;
    };
    switch (p.agg) {
        case AggMode::Totals: {
            auto balances = fold_visible(reg, receipts);
            // label -> (sum, all contributors encumbered, has contributors)
            std::map<std::string, std::pair<std::int64_t, bool>> by_label;
            for (const auto& [d, b] : balances) {
                std::string label = relabel(p, d);
                bool enc = encumbered_kind(reg.find(d)->kind);
                auto [it, fresh] = by_label.try_emplace(label, b, enc);
                if (!fresh) {
                    it->second.first += b;
                    it->second.second = it->second.second && enc;
                }
            }
            for (const auto& [label, agg] : by_label)
                rows.push_back({0, label, agg.first, agg.second});
            if (p.report_encumbered) {
                std::int64_t enc_total = 0;
                for (const auto& [d, b] : balances)
                    if (encumbered_kind(reg.find(d)->kind)) enc_total += b;
                rows.push_back({0, "B_enc", enc_total, true});
            }
            break;
        }
        case AggMode::History:
            for (const auto& r : receipts) {
                bool enc = false;
                for (const auto* d : {&r.event.d_src, &r.event.d_dst})
                    if (const auto* dom = reg.find(*d))
                        enc = enc || encumbered_kind(dom->kind);
                rows.push_back({bucket_of(r.event.t),
                                relabel(p, r.event.d_src) + "->" + relabel(p, r.event.d_dst),
                                r.event.v, enc});
            }
            break;
        case AggMode::Flows: {
            std::map<std::pair<std::uint64_t, std::string>, std::int64_t> flows;
            for (const auto& r : receipts)
                flows[{bucket_of(r.event.t),
                       relabel(p, r.event.d_src) + "->" + relabel(p, r.event.d_dst)}] +=
                    r.event.v;
            for (const auto& [key, v] : flows) rows.push_back({key.first, key.second, v, false});
            break;
        }
    }
    return rows;
}

Bytes View::serialize() const {
    serial::TlvWriter w(serial::RecordTag::ViewTable);
    w.field_str(1, policy_id);
    w.field_u64(2, as_of);
    w.field_bytes(3, commitment.view());
    std::vector<Bytes> row_items;
    for (const auto& r : rows) {
        Bytes b;
        serial::put_u64(b, r.bucket);
        serial::put_u32(b, static_cast<std::uint32_t>(r.label.size()));
        b.insert(b.end(), r.label.begin(), r.label.end());
        serial::put_i64(b, r.value);
        b.push_back(r.encumbered ? 1 : 0);
        row_items.push_back(std::move(b));
    }
    w.field_bytes(4, serial::encode_seq(row_items));
    w.field_bytes(5, serial::encode_seq(records));
    std::vector<Bytes> txids;
    for (const auto& t : anchor_txids) txids.emplace_back(t.bytes.begin(), t.bytes.end());
    w.field_bytes(6, serial::encode_seq(txids));
    return w.finish();
}

View View::deserialize(ByteView in) {
    serial::TlvRecord r = serial::TlvRecord::parse(in);
    if (r.tag != static_cast<std::uint8_t>(serial::RecordTag::ViewTable))
        throw UnsupportedRecord("expected a view record");
    View v;
    v.policy_id = r.require_str(1);
    v.as_of = r.require_u64(2);
    ByteView c = r.require_bytes(3);
    if (c.size() != crypto::kDigestSize) throw ParseError("bad commitment length");
    std::copy(c.begin(), c.end(), v.commitment.bytes.begin());
    for (const auto& item : serial::decode_seq(r.require_bytes(4))) {
        if (item.size() < 21) throw ParseError("truncated view row");
        ViewRow row;
        row.bucket = serial::get_u64(item, 0);
        std::uint32_t len = serial::get_u32(item, 8);
        if (item.size() != 12 + len + 9) throw ParseError("bad view row length");
        row.label.assign(item.begin() + 12, item.begin() + 12 + len);
        row.value = serial::get_i64(item, 12 + len);
        row.encumbered = item[12 + len + 8] != 0;
        v.rows.push_back(std::move(row));
    }
    v.records = serial::decode_seq(r.require_bytes(5));
    for (const auto& item : serial::decode_seq(r.require_bytes(6))) {
        if (item.size() != crypto::kDigestSize) throw ParseError("bad txid length");
        Digest d;
        std::copy(item.begin(), item.end(), d.bytes.begin());
        v.anchor_txids.push_back(d);
    }
    return v;
}

View gen_view(const Ledger& l, const Catalogue& catalogue, const std::string& policy_id) {
    auto it = catalogue.find(policy_id);
    if (it == catalogue.end()) throw UnknownPolicy("no such policy: " + policy_id);
    const Policy& p = it->second;

    View v;
    v.policy_id = policy_id;
    v.as_of = l.anchors().empty() ? l.size() : l.last_anchored_index();
    v.commitment = l.commitment_at(v.as_of);
    v.records.assign(l.record_bytes().begin(), l.record_bytes().begin() + v.as_of);
    for (const auto& a : l.anchors())
        if (a.anchored_index == v.as_of) v.anchor_txids.push_back(a.txid);

    std::vector<pot::PoTRecord> receipts;
    for (const auto& bytes : v.records) {
        ledger::LedgerRecord rec = ledger::LedgerRecord::deserialize(bytes);
        if (rec.kind == ledger::LedgerRecord::Kind::Event)
            receipts.push_back(pot::PoTRecord::deserialize(rec.payload));
    }
    v.rows = derive_table(l.registry(), visible_events(l.registry(), receipts, p), p);
    return v;
}

VerifyResult verify_view(const View& view, const Catalogue& catalogue,
                         const ledger::Config& cfg, const ledger::Keys& keys,
                         const anchor_sim::SimChain& oracle) {
    auto reject = [](RejectReason r, std::string detail) {
        return VerifyResult{false, r, std::move(detail)};
    };
    auto it = catalogue.find(view.policy_id);
    if (it == catalogue.end())
        return reject(RejectReason::MalformedArtefacts, "unknown policy " + view.policy_id);
    const Policy& p = it->second;

    // (a) the cited anchors pin exactly this commitment at depth k
    if (view.anchor_txids.empty())
        return reject(RejectReason::AnchorDepth, "view cites no anchor");
    for (const auto& txid : view.anchor_txids) {
        if (oracle.status(txid, cfg.k) != anchor_sim::TxStatus::ConfirmedAtDepth)
            return reject(RejectReason::AnchorDepth,
                          "anchor not confirmed at depth " + std::to_string(cfg.k));
        auto found = oracle.find_tx(txid);
        if (!found || found->first != Bytes(view.commitment.bytes.begin(),
                                            view.commitment.bytes.end()))
            return reject(RejectReason::CommitmentMismatch,
                          "anchored payload is not the view commitment");
    }

    // (b) replay the artefact prefix: commitment, receipt chain, snapshots
    std::vector<pot::PoTRecord> receipts;
    std::vector<Digest> commitments;
    try {
        treasury::DomainRegistry reg(cfg.domains);
        treasury::ExposureVector balances = treasury::initial_state(reg);
        crypto::HashStream stream(crypto::DomainTag::Ledger, cfg.hasher);
        commitments.push_back(stream.digest());
        for (const auto& bytes : view.records) {
            ledger::LedgerRecord rec = ledger::LedgerRecord::deserialize(bytes);
            switch (rec.kind) {
                case ledger::LedgerRecord::Kind::Event: {
                    pot::PoTRecord pr = pot::PoTRecord::deserialize(rec.payload);
                    balances = treasury::apply_event(reg, balances, pr.event);
                    receipts.push_back(std::move(pr));
                    break;
                }
                case ledger::LedgerRecord::Kind::Snapshot: {
                    por::PoRSnapshot snap = por::PoRSnapshot::deserialize(rec.payload);
                    por::PoRSnapshot redone =
                        por::snapshot(reg, snap.coins, snap.t, cfg.hasher);
                    if (redone.commitment != snap.commitment ||
                        redone.domain_totals != snap.domain_totals)
                        return reject(RejectReason::SnapshotMismatch,
                                      "snapshot record does not match its coin set");
                    for (const auto& [d, b] : balances.balances) {
                        std::int64_t total = snap.domain_totals.contains(d)
                                                 ? snap.domain_totals.at(d)
                                                 : 0;
                        if (total != b)
                            return reject(RejectReason::SnapshotMismatch,
                                          "snapshot totals disagree with the event fold");
                    }
                    break;
                }
                case ledger::LedgerRecord::Kind::Anchor: {
                    ledger::AnchorMeta meta = ledger::AnchorMeta::deserialize(rec.payload);
                    if (meta.anchored_index >= commitments.size() ||
                        commitments[meta.anchored_index] != meta.commitment)
                        return reject(RejectReason::CommitmentMismatch,
                                      "anchor record cites a foreign commitment");
                    break;
                }
            }
            Bytes frame;
            serial::put_u32(frame, static_cast<std::uint32_t>(bytes.size()));
            stream.update(frame);
            stream.update(bytes);
            commitments.push_back(stream.digest());
        }
        if (view.as_of != view.records.size())
            return reject(RejectReason::MalformedArtefacts, "record count mismatch");
        if (commitments.back() != view.commitment)
            return reject(RejectReason::CommitmentMismatch,
                          "recomputed commitment differs");
        pot::PoTChain chain{cfg.hasher, receipts};
        if (auto div = pot::verify_chain(chain, keys.treasury_pk, keys.provider_pk))
            return reject(RejectReason::ChainInvalid,
                          "receipt chain diverges at index " + std::to_string(div->index));
        // (c) recompute the table
        treasury::DomainRegistry reg2(cfg.domains);
        auto rows = derive_table(reg2, visible_events(reg2, receipts, p), p);
        if (rows != view.rows)
            return reject(RejectReason::RecomputeMismatch,
                          "derived table differs from the recomputed one");
    } catch (const Error& e) {
        return reject(RejectReason::MalformedArtefacts, e.what());
    }
    return VerifyResult{true, RejectReason::None, ""};
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::None: return "NONE";
        case RejectReason::AnchorDepth: return "ANCHOR_DEPTH";
        case RejectReason::CommitmentMismatch: return "COMMITMENT_MISMATCH";
        case RejectReason::MalformedArtefacts: return "MALFORMED_ARTEFACTS";
        case RejectReason::ChainInvalid: return "CHAIN_INVALID";
        case RejectReason::SnapshotMismatch: return "SNAPSHOT_MISMATCH";
        case RejectReason::RecomputeMismatch: return "RECOMPUTE_MISMATCH";
    }
    throw Error("unreachable reject reason");
}

std::vector<std::pair<std::int64_t, std::int64_t>> leakage_pub(
    const Ledger& l, const std::vector<treasury::Interval>& intervals) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    const auto& receipts = l.receipt_chain().records;
    for (const auto& interval : intervals) {
        std::vector<pot::PoTRecord> upto;
        for (const auto& r : receipts)
            if (r.event.t <= interval.hi) upto.push_back(r);
        auto balances = fold_visible(l.registry(), upto);
        std::int64_t total = nonfee_total(l.registry(), balances);
        std::int64_t enc = 0;
        for (const auto& [d, b] : balances)
            if (encumbered_kind(l.registry().find(d)->kind)) enc += b;
        out.emplace_back(total, enc);
    }
    return out;
}

std::vector<pot::PoTRecord> history_view(const Ledger& l, const Policy& p) {
    return visible_events(l.registry(), l.receipt_chain().records, p);
}

// --- policy text form ---

namespace {

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out.push_back(sep);
        out += s;
    }
    return out;
}

std::string map_to_text(const std::map<std::string, std::string>& m) {
    std::vector<std::string> pairs;
    for (const auto& [k, v] : m) pairs.push_back(k + ":" + v);
    return join(pairs, ',');
}

std::map<std::string, std::string> map_from_text(const std::string& s) {
    std::map<std::string, std::string> out;
    for (const auto& pair : split(s, ',')) {
        auto colon = pair.find(':');
        if (colon == std::string::npos) throw ParseError("expected key:value, got " + pair);
        out[pair.substr(0, colon)] = pair.substr(colon + 1);
    }
    return out;
}

}  // namespace

Policy parse_policy(const std::string& text) {
    Policy p;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_id = false;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("policy line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "id") {
            p.id = value;
            have_id = true;
        } else if (key == "observer") {
            p.observer_class = value;
        } else if (key == "whitelist") {
            for (const auto& d : split(value, ',')) p.domain_whitelist.insert(d);
        } else if (key == "kinds") {
            for (const auto& k : split(value, ',')) p.kinds.insert(kind_from_label(k));
        } else if (key == "require") {
            p.required_meta = map_from_text(value);
        } else if (key == "labels") {
            p.label_map = map_from_text(value);
        } else if (key == "agg") {
            p.agg = agg_from_name(value);
        } else if (key == "bucket_width") {
            p.bucket_width = std::stoull(value);
        } else if (key == "delay") {
            p.delay = std::stoull(value);
        } else if (key == "theta_abs") {
            p.theta_abs = std::stoll(value);
        } else if (key == "theta_fraction_ppm") {
            p.theta_fraction_ppm = std::stoull(value);
        } else if (key == "report_encumbered") {
            p.report_encumbered = value == "1" || value == "true";
        } else {
            throw ParseError("policy line " + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    if (!have_id) throw ParseError("policy file has no id");
    return p;
}

std::string policy_to_text(const Policy& p) {
    std::ostringstream out;
    out << "id=" << p.id << '\n';
    out << "observer=" << p.observer_class << '\n';
    if (!p.domain_whitelist.empty())
        out << "whitelist="
            << join(std::vector<std::string>(p.domain_whitelist.begin(),
                                             p.domain_whitelist.end()),
                    ',')
            << '\n';
    if (!p.kinds.empty()) {
        std::vector<std::string> names;
        for (auto k : p.kinds) names.push_back(kind_label(k));
        out << "kinds=" << join(names, ',') << '\n';
    }
    if (!p.required_meta.empty()) out << "require=" << map_to_text(p.required_meta) << '\n';
    if (!p.label_map.empty()) out << "labels=" << map_to_text(p.label_map) << '\n';
    out << "agg=" << agg_name(p.agg) << '\n';
    out << "bucket_width=" << p.bucket_width << '\n';
    out << "delay=" << p.delay << '\n';
    out << "theta_abs=" << p.theta_abs << '\n';
    out << "theta_fraction_ppm="  << p.theta_fraction_ppm << '\n';
    out << "report_encumbered=" << (p.report_encumbered ? 1 : 0) << '\n';
    return out.str();
}

Policy public_investor_policy() {
    Policy p;
    p.id = "pub";
    p.observer_class = "public";
    p.label_map = {{"*", "B_tot"}};
    p.agg = AggMode::Totals;
    p.report_encumbered = true;
    return p;
}

Policy regulator_policy() {
    Policy p;
    p.id = "reg";
    p.observer_class = "regulator";
    p.agg = AggMode::Totals;
    return p;
}

Policy collateral_history_policy() {
    Policy p;
    p.id = "coll-hist";
    p.observer_class = "exposure";
    p.domain_whitelist = {"coll"};
    p.agg = AggMode::History;
    return p;
}

Catalogue builtin_catalogue() {
    Catalogue c;
    for (const auto& p :
         {public_investor_policy(), regulator_policy(), collateral_history_policy()})
        c[p.id] = p;
    return c;
}

}  // namespace tpl::policy

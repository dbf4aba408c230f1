#include "tpl/experiments.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "tpl/errors.hpp"

namespace tpl::experiments {

namespace {

using ledger::Keys;
using ledger::Ledger;
using ledger::LedgerRecord;
using treasury::TreasuryEvent;

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

std::uint64_t arg_index(const std::vector<std::string>& toks) {
    if (toks.size() != 2) throw MalformedAdversaryOutput("script step needs one index");
    try {
        return std::stoull(toks[1]);
    } catch (const std::exception&) {
        throw MalformedAdversaryOutput("bad script index: " + toks[1]);
    }
}

TreasuryEvent demo_event(std::mt19937_64& rng, std::uint64_t t, const char* src,
                         const char* dst, std::int64_t btc) {
    TreasuryEvent e;
    e.t = t;
    e.d_src = src;
    e.d_dst = dst;
    e.v = btc * kSatPerBtc;
    e.evid = random_bytes(rng, 32);
    e.m = {{"note", "demo"}};
    return e;
}

/// Challenger-run honest execution: five transfers, a mid-stream snapshot,
/// one confirmed anchor over the full prefix.
struct Fixture {
    Keys keys;
    Ledger l;
    anchor_sim::SimChain chain;
};

Fixture make_fixture(const ledger::Config& cfg, std::mt19937_64& rng) {
    Keys keys = Keys::derive(random_bytes(rng, 32));
    Ledger l = Ledger::setup(cfg, keys);
    l.append_event(demo_event(rng, 1, "ext", "cold", 100));
    l.append_event(demo_event(rng, 2, "cold", "exch", 40));
    l.append_event(demo_event(rng, 3, "exch", "coll", 30));
    l.append_event(demo_event(rng, 4, "coll", "exch", 10));
    l.snapshot_trigger();
    l.append_event(demo_event(rng, 5, "cold", "exch", 5));
    anchor_sim::SimChain chain;
    l.anchor_trigger(chain);
    chain.mine(cfg.k);
    l.poll_anchors(chain);
    return {std::move(keys), std::move(l), std::move(chain)};
}

policy::Policy history_all() {
    policy::Policy p;
    p.id = "hist";
    p.observer_class = "auditor";
    p.agg = policy::AggMode::History;
    return p;
}

std::vector<pot::PoTRecord> receipts_of(const std::vector<Bytes>& records) {
    std::vector<pot::PoTRecord> out;
    for (const auto& b : records) {
        LedgerRecord rec = LedgerRecord::deserialize(b);
        if (rec.kind == LedgerRecord::Kind::Event)
            out.push_back(pot::PoTRecord::deserialize(rec.payload));
    }
    return out;
}

pot::PoTRecord event_at(const std::vector<Bytes>& records, std::uint64_t i) {
    if (i >= records.size()) throw MalformedAdversaryOutput("record index out of range");
    LedgerRecord rec = LedgerRecord::deserialize(records[i]);
    if (rec.kind != LedgerRecord::Kind::Event)
        throw MalformedAdversaryOutput("record " + std::to_string(i) + " is not an event");
    return pot::PoTRecord::deserialize(rec.payload);
}

void replace_event(std::vector<Bytes>& records, std::uint64_t i,
                   const pot::PoTRecord& pr) {
    records[i] = LedgerRecord::of_event(pr).serialize();
}

EvidenceClass reject_class(policy::RejectReason r) {
    switch (r) {
        case policy::RejectReason::CommitmentMismatch:
            return EvidenceClass::CommitmentDiscrepancy;
        case policy::RejectReason::ChainInvalid:
            return EvidenceClass::PotDiscrepancy;
        case policy::RejectReason::SnapshotMismatch:
            return EvidenceClass::PorDiscrepancy;
        default:
            return EvidenceClass::None;
    }
}

/// First index where two anchored prefixes disagree, classified as an
/// exhibited digest collision when the differing records collide under the
/// configured hash, else as a receipt divergence.
Evidence classify_equivocation(const crypto::Hasher& hasher, const std::vector<Bytes>& a,
                               const std::vector<Bytes>& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t j = 0;
    while (j < n && a[j] == b[j]) ++j;
    if (j == n)
        return {EvidenceClass::PotDiscrepancy, j, "one prefix truncates the other"};
    if (hasher.hash(crypto::DomainTag::Ledger, a[j]) ==
        hasher.hash(crypto::DomainTag::Ledger, b[j]))
        return {EvidenceClass::HashCollision, j,
                "distinct record bytes share a digest"};
    return {EvidenceClass::PotDiscrepancy, j, "receipt sequences diverge"};
}

const char* divergence_text(pot::DivergenceCause c) {
    switch (c) {
        case pot::DivergenceCause::HashLink: return "chain rule broken";
        case pot::DivergenceCause::TreasurySig: return "treasury signature invalid";
        case pot::DivergenceCause::ProviderSig: return "provider signature invalid";
    }
    return "";
}

}  // namespace

const char* game_name(Game g) {
    switch (g) {
        case Game::Coll: return "COLL";
        case Game::PotForge: return "POT_FORGE";
        case Game::Neq: return "NEQ";
        case Game::ExpSoundRestricted: return "EXP_SOUND_RESTRICTED";
        case Game::PolComp: return "POL_COMP";
    }
    return "";
}

Game game_from_name(const std::string& name) {
    for (Game g : {Game::Coll, Game::PotForge, Game::Neq, Game::ExpSoundRestricted,
                   Game::PolComp})
        if (name == game_name(g)) return g;
    throw ParseError("unknown game: " + name);
}

const char* evidence_name(EvidenceClass c) {
    switch (c) {
        case EvidenceClass::None: return "NONE";
        case EvidenceClass::PorDiscrepancy: return "POR_DISCREPANCY";
        case EvidenceClass::PotDiscrepancy: return "POT_DISCREPANCY";
        case EvidenceClass::HashCollision: return "HASH_COLLISION";
        case EvidenceClass::CommitmentDiscrepancy: return "COMMITMENT_DISCREPANCY";
    }
    return "";
}

treasury::DomainRegistry demo_registry() {
    return treasury::DomainRegistry(demo_config().domains);
}

ledger::Config demo_config(crypto::Hasher hasher) {
    using treasury::DomainKind;
    return ledger::Config{{{"ext", DomainKind::External},
                           {"cold", DomainKind::Custodian},
                           {"exch", DomainKind::Exchange},
                           {"coll", DomainKind::Collateral},
                           {"fee", DomainKind::Fee}},
                          hasher,
                          anchor_sim::kDefaultConfirmations};
}

ExperimentOutcome run_neq(const Adversary& adv, std::uint64_t trials,
                          const ledger::Config& cfg, std::uint64_t seed) {
    ExperimentOutcome out{Game::Neq, adv.id, trials, 0, {}};
    policy::Catalogue cat{{"hist", history_all()}};
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seed + trial);
        Fixture fx = make_fixture(cfg, rng);
        policy::View va = policy::gen_view(fx.l, cat, "hist");
        policy::View vb = va;
        for (const auto& line : adv.script) {
            auto toks = tokens(line);
            if (toks.empty() || toks[0] == "HONEST") continue;
            if (toks[0] == "EDIT-META") {
                std::uint64_t i = arg_index(toks);
                pot::PoTRecord pr = event_at(vb.records, i);
                pr.event.m["note"] = "edited";
                replace_event(vb.records, i, pr);
            } else if (toks[0] == "EDIT-VALUE") {
                std::uint64_t i = arg_index(toks);
                pot::PoTRecord pr = event_at(vb.records, i);
                pr.event.v += kSatPerBtc;
                replace_event(vb.records, i, pr);
            } else {
                throw MalformedAdversaryOutput("unknown script step: " + toks[0]);
            }
        }
        const auto& p = cat.at("hist");
        vb.rows = policy::derive_table(
            fx.l.registry(), policy::visible_events(fx.l.registry(), receipts_of(vb.records), p), p);

        auto ra = policy::verify_view(va, cat, cfg, fx.keys, fx.chain);
        auto rb = policy::verify_view(vb, cat, cfg, fx.keys, fx.chain);
        bool differ = va.records != vb.records;
        if (ra.accepted && rb.accepted && differ) {
            if (out.wins == 0)
                out.evidence = classify_equivocation(cfg.hasher, va.records, vb.records);
            ++out.wins;
        } else {
            out.evidence = {reject_class(rb.reason), 0,
                            differ ? policy::reject_reason_name(rb.reason)
                                   : "identical prefixes"};
        }
    }
    return out;
}

ExperimentOutcome run_pot_forge(const Adversary& adv, std::uint64_t trials,
                                const ledger::Config& cfg, std::uint64_t seed) {
    ExperimentOutcome out{Game::PotForge, adv.id, trials, 0, {}};
    treasury::DomainRegistry reg(cfg.domains);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seed + trial);
        Keys keys = Keys::derive(random_bytes(rng, 32));
        pot::PoTChain oracle{cfg.hasher, {}};
        std::set<crypto::Digest> issued;
        const char* hops[][2] = {
            {"ext", "cold"}, {"cold", "exch"}, {"exch", "coll"},
            {"coll", "exch"}, {"cold", "exch"}};
        for (std::uint64_t i = 0; i < 5; ++i) {
            const auto& r = pot::append_receipt(
                oracle, demo_event(rng, i + 1, hops[i][0], hops[i][1], 1),
                *keys.treasury_sk, *keys.provider_sk);
            issued.insert(r.r);
        }

        pot::PoTChain emitted{cfg.hasher, {}};
        for (const auto& line : adv.script) {
            auto toks = tokens(line);
            if (toks.empty()) continue;
            if (toks[0] == "REPLAY") {
                emitted.records.assign(oracle.records.begin(),
                                       oracle.records.begin() + 3);
            } else if (toks[0] == "SPLICE") {
                emitted.records = {oracle.records[1], oracle.records[0]};
            } else if (toks[0] == "KEYLEAK") {
                emitted = oracle;
                pot::append_receipt(emitted, demo_event(rng, 6, "cold", "exch", 1),
                                    *keys.treasury_sk, *keys.provider_sk);
            } else {
                throw MalformedAdversaryOutput("unknown script step: " + toks[0]);
            }
        }

        auto div = pot::verify_chain(emitted, keys.treasury_pk, keys.provider_pk);
        std::uint64_t fresh = 0;  // 1-based index of a chain value the oracle never issued
        for (const auto& r : emitted.records)
            if (!issued.contains(r.r)) {
                fresh = r.index;
                break;
            }
        if (!div && fresh != 0) {
            if (out.wins == 0)
                out.evidence = {EvidenceClass::PotDiscrepancy, fresh,
                                "accepted receipt outside the oracle transcript"};
            ++out.wins;
        } else if (div) {
            out.evidence = {EvidenceClass::PotDiscrepancy, div->index,
                            divergence_text(div->cause)};
        } else {
            out.evidence = {EvidenceClass::None, 0,
                            "every chain value appears in the oracle transcript"};
        }
    }
    return out;
}

Evidence audit_prefix(const ledger::Config& cfg, const Keys& keys,
                      const std::vector<Bytes>& records, const Digest& anchored) {
    treasury::DomainRegistry reg(cfg.domains);
    treasury::ExposureVector state = treasury::initial_state(reg);
    pot::PoTChain chain{cfg.hasher, {}};
    std::vector<std::uint64_t> receipt_pos;  // receipt -> record position

    for (std::size_t i = 0; i < records.size(); ++i) {
        LedgerRecord rec;
        try {
            rec = LedgerRecord::deserialize(records[i]);
            switch (rec.kind) {
                case LedgerRecord::Kind::Event: {
                    pot::PoTRecord pr = pot::PoTRecord::deserialize(rec.payload);
                    state = treasury::apply_event(reg, state, pr.event);
                    chain.records.push_back(std::move(pr));
                    receipt_pos.push_back(i);
                    break;
                }
                case LedgerRecord::Kind::Snapshot: {
                    por::PoRSnapshot snap = por::PoRSnapshot::deserialize(rec.payload);
                    por::PoRSnapshot redo =
                        por::snapshot(reg, snap.coins, snap.t, cfg.hasher);
                    bool matches_fold = true;
                    for (const auto& [domain, balance] : state.balances) {
                        std::int64_t committed = snap.domain_totals.contains(domain)
                                                     ? snap.domain_totals.at(domain)
                                                     : 0;
                        if (committed != balance) matches_fold = false;
                    }
                    for (const auto& [domain, total] : snap.domain_totals)
                        if (!state.balances.contains(domain)) matches_fold = false;
                    if (redo.commitment != snap.commitment ||
                        redo.domain_totals != snap.domain_totals || !matches_fold)
                        return {EvidenceClass::PorDiscrepancy, i,
                                "snapshot disagrees with its coins or the fold"};
                    break;
                }
                case LedgerRecord::Kind::Anchor:
                    ledger::AnchorMeta::deserialize(rec.payload);
                    break;
            }
        } catch (const Error& e) {
            throw MalformedAdversaryOutput("record " + std::to_string(i) + ": " +
                                           e.what());
        }
    }

    if (auto div = pot::verify_chain(chain, keys.treasury_pk, keys.provider_pk))
        return {EvidenceClass::PotDiscrepancy, receipt_pos[div->index - 1],
                divergence_text(div->cause)};

    crypto::HashStream stream(crypto::DomainTag::Ledger, cfg.hasher);
    for (const auto& b : records) {
        Bytes frame;
        serial::put_u32(frame, static_cast<std::uint32_t>(b.size()));
        stream.update(frame);
        stream.update(b);
    }
    if (stream.digest() != anchored)
        return {EvidenceClass::CommitmentDiscrepancy, records.size(),
                "prefix stream disagrees with the anchored commitment"};
    return {};
}

ExperimentOutcome run_exp_sound_restricted(const Adversary& adv, std::uint64_t trials,
                                           const ledger::Config& cfg,
                                           std::uint64_t seed) {
    ExperimentOutcome out{Game::ExpSoundRestricted, adv.id, trials, 0, {}};
    const std::set<std::string> d0{"cold", "exch", "coll"};
    auto d0_sum = [&](const treasury::ExposureVector& v) {
        std::int64_t s = 0;
        for (const auto& d : d0) s += v.balances.at(d);
        return s;
    };
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seed + trial);
        Fixture fx = make_fixture(cfg, rng);
        const auto& reg = fx.l.registry();

        std::vector<TreasuryEvent> honest_events;
        for (const auto& r : fx.l.receipt_chain().records)
            honest_events.push_back(r.event);
        auto cl = treasury::is_closed(reg, d0, honest_events, {1, 5, true});
        if (!cl.closed) throw Error("challenge set is not closed over the window");
        std::int64_t honest = d0_sum(fx.l.balances());

        std::uint64_t as_of = fx.l.last_anchored_index();
        std::vector<Bytes> alt(fx.l.record_bytes().begin(),
                               fx.l.record_bytes().begin() + as_of);
        Digest anchored = fx.l.anchors().back().commitment;
        bool route_outside = false;

        for (const auto& line : adv.script) {
            auto toks = tokens(line);
            if (toks.empty()) continue;
            if (toks[0] == "INFLATE-SNAPSHOT") {
                LedgerRecord rec = LedgerRecord::deserialize(alt[4]);
                por::PoRSnapshot snap = por::PoRSnapshot::deserialize(rec.payload);
                snap.domain_totals["cold"] += kSatPerBtc;
                alt[4] = LedgerRecord::of_snapshot(snap).serialize();
            } else if (toks[0] == "INSERT-EVENT") {
                TreasuryEvent e = demo_event(rng, 6, "ext", "cold", 1);
                pot::PoTRecord pr;
                pr.index = fx.l.receipt_chain().records.size() + 1;
                pr.event = e;
                pr.h = pot::event_digest(e, cfg.hasher);
                pr.r = pot::chain_value(fx.l.receipt_chain().head(), pr.h, e.d_src,
                                        e.d_dst, e.t, cfg.hasher);
                alt.push_back(LedgerRecord::of_event(pr).serialize());
            } else if (toks[0] == "REBUILD-KEYLEAK") {
                Ledger forged = Ledger::setup(cfg, fx.keys);
                forged.append_event(demo_event(rng, 1, "ext", "cold", 200));
                forged.append_event(demo_event(rng, 2, "cold", "exch", 40));
                forged.append_event(demo_event(rng, 3, "exch", "coll", 30));
                forged.append_event(demo_event(rng, 4, "coll", "exch", 10));
                forged.snapshot_trigger();
                forged.append_event(demo_event(rng, 5, "cold", "exch", 5));
                alt = forged.record_bytes();
            } else if (toks[0] == "ROUTE-OUTSIDE") {
                fx.l.append_event(demo_event(rng, 6, "exch", "ext", 5));
                fx.l.anchor_trigger(fx.chain);
                fx.chain.mine(cfg.k);
                fx.l.poll_anchors(fx.chain);
                as_of = fx.l.last_anchored_index();
                alt.assign(fx.l.record_bytes().begin(),
                           fx.l.record_bytes().begin() + as_of);
                anchored = fx.l.anchors().back().commitment;
                route_outside = true;
            } else {
                throw MalformedAdversaryOutput("unknown script step: " + toks[0]);
            }
        }

        Evidence caught = audit_prefix(cfg, fx.keys, alt, anchored);
        treasury::ExposureVector claimed = treasury::fold_events(
            reg, treasury::initial_state(reg),
            [&] {
                std::vector<TreasuryEvent> es;
                for (const auto& r : receipts_of(alt)) es.push_back(r.event);
                return es;
            }());
        bool inflated = d0_sum(claimed) > honest;
        if (caught.cls == EvidenceClass::None && inflated) {
            if (out.wins == 0)
                out.evidence = {EvidenceClass::None, 0, "uncaught inflation"};
            ++out.wins;
        } else if (caught.cls != EvidenceClass::None) {
            out.evidence = caught;
        } else {
            out.evidence = {EvidenceClass::None, 0,
                            route_outside
                                ? "exposure routed outside the declared closed set; "
                                  "all checks pass and the game cannot flag it"
                                : "no inflation over the declared set"};
        }
    }
    return out;
}

ExperimentOutcome run_pol_comp(const Adversary& adv, std::uint64_t trials,
                               const ledger::Config& cfg, std::uint64_t seed) {
    ExperimentOutcome out{Game::PolComp, adv.id, trials, 0, {}};
    policy::Catalogue cat{{"hist", history_all()}};
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seed + trial);
        Fixture fx = make_fixture(cfg, rng);
        const auto& p = cat.at("hist");
        policy::View honest = policy::gen_view(fx.l, cat, "hist");
        policy::View v = honest;
        for (const auto& line : adv.script) {
            auto toks = tokens(line);
            if (toks.empty() || toks[0] == "HONEST") continue;
            if (toks[0] == "OMIT") {
                std::uint64_t i = arg_index(toks);
                event_at(v.records, i);  // must target an event record
                v.records.erase(v.records.begin() + static_cast<std::ptrdiff_t>(i));
                v.as_of -= 1;
            } else {
                throw MalformedAdversaryOutput("unknown script step: " + toks[0]);
            }
        }
        v.rows = policy::derive_table(
            fx.l.registry(), policy::visible_events(fx.l.registry(), receipts_of(v.records), p), p);

        auto res = policy::verify_view(v, cat, cfg, fx.keys, fx.chain);
        std::set<Bytes> present;
        for (const auto& r : receipts_of(v.records)) present.insert(r.serialize());
        std::uint64_t omitted = 0;
        for (const auto& r :
             policy::visible_events(fx.l.registry(),
                                    receipts_of(honest.records), p))
            if (!present.contains(r.serialize())) {
                omitted = r.index;
                break;
            }
        if (res.accepted && omitted != 0) {
            if (out.wins == 0)
                out.evidence = {EvidenceClass::None, omitted,
                                "accepted view omits a visible event"};
            ++out.wins;
        } else if (!res.accepted) {
            out.evidence = {reject_class(res.reason), omitted,
                            policy::reject_reason_name(res.reason)};
        } else {
            out.evidence = {EvidenceClass::None, 0, "nothing omitted"};
        }
    }
    return out;
}

ExperimentOutcome run_coll(const Adversary& adv, std::uint64_t trials,
                           const ledger::Config& cfg, std::uint64_t seed) {
    ExperimentOutcome out{Game::Coll, adv.id, trials, 0, {}};
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seed + trial);
        Bytes m1 = random_bytes(rng, 64);
        Bytes m2 = m1;
        for (const auto& line : adv.script) {
            auto toks = tokens(line);
            if (toks.empty() || toks[0] == "SAME") continue;
            if (toks[0] == "TWEAK-TAIL")
                m2[40] ^= 1;
            else
                throw MalformedAdversaryOutput("unknown script step: " + toks[0]);
        }
        bool win = m1 != m2 && cfg.hasher.hash(crypto::DomainTag::EventDigest, m1) ==
                                   cfg.hasher.hash(crypto::DomainTag::EventDigest, m2);
        if (win) {
            if (out.wins == 0)
                out.evidence = {EvidenceClass::HashCollision, 0,
                                "distinct inputs share a digest"};
            ++out.wins;
        } else {
            out.evidence = {EvidenceClass::None, 0,
                            m1 == m2 ? "inputs identical" : "digests differ"};
        }
    }
    return out;
}

bool aggregate_supply_check(const std::vector<std::int64_t>& exposures,
                            std::int64_t circulating, std::int64_t epsilon) {
    __int128 sum = 0;
    for (std::int64_t e : exposures) sum += e;
    if (sum > static_cast<__int128>(circulating) + epsilon) return false;
    return sum <= kMaxSupplySat;
}

Manifest parse_manifest(const std::string& text) {
    Manifest m;
    bool have_game = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                                 line.back() == '\r'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line.erase(0, start);
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("manifest line needs key=value: " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "game") {
            m.game = game_from_name(value);
            have_game = true;
        } else if (key == "adversary") {
            m.adversary.id = value;
        } else if (key == "trials") {
            m.trials = std::stoull(value);
        } else if (key == "seed") {
            m.seed = std::stoull(value);
        } else if (key == "hash") {
            if (value == "intact")
                m.broken_hash = false;
            else if (value == "broken")
                m.broken_hash = true;
            else
                throw ParseError("hash must be intact or broken");
        } else if (key == "script") {
            m.adversary.script.push_back(value);
        } else {
            throw ParseError("unknown manifest key: " + key);
        }
    }
    if (!have_game) throw ParseError("manifest missing game");
    if (m.adversary.id.empty() && m.adversary.script.empty())
        throw ParseError("manifest needs an adversary id or script lines");
    if (m.adversary.id.empty()) m.adversary.id = "scripted";
    return m;
}

std::vector<Adversary> shipped_adversaries(Game g) {
    switch (g) {
        case Game::Coll:
            return {{"identical", {"SAME"}}, {"tail-tweak", {"TWEAK-TAIL"}}};
        case Game::Neq:
            return {{"honest-replay", {"HONEST"}},
                    {"meta-edit", {"EDIT-META 2"}},
                    {"value-edit", {"EDIT-VALUE 5"}}};
        case Game::PotForge:
            return {{"replay", {"REPLAY"}},
                    {"splice", {"SPLICE"}},
                    {"key-leak", {"KEYLEAK"}}};
        case Game::ExpSoundRestricted:
            return {{"snapshot-inflate", {"INFLATE-SNAPSHOT"}},
                    {"unbacked-inbound", {"INSERT-EVENT"}},
                    {"rebuild-key-leak", {"REBUILD-KEYLEAK"}},
                    {"route-outside", {"ROUTE-OUTSIDE"}}};
        case Game::PolComp: {
            std::vector<Adversary> out{{"honest", {"HONEST"}}};
            for (std::uint64_t i : {0, 1, 2, 3, 5})
                out.push_back({"omit-" + std::to_string(i),
                               {"OMIT " + std::to_string(i)}});
            return out;
        }
    }
    return {};
}

ExperimentOutcome run_manifest(const Manifest& m) {
    crypto::Hasher hasher;
    if (m.broken_hash) hasher.kind = crypto::Hasher::Kind::TruncatedIdentity;
    ledger::Config cfg = demo_config(hasher);

    Adversary adv = m.adversary;
    if (adv.script.empty()) {
        bool found = false;
        for (const auto& shipped : shipped_adversaries(m.game))
            if (shipped.id == adv.id) {
                adv = shipped;
                found = true;
                break;
            }
        if (!found) throw ParseError("no shipped adversary named " + adv.id);
    }

    switch (m.game) {
        case Game::Coll: return run_coll(adv, m.trials, cfg, m.seed);
        case Game::Neq: return run_neq(adv, m.trials, cfg, m.seed);
        case Game::PotForge: return run_pot_forge(adv, m.trials, cfg, m.seed);
        case Game::ExpSoundRestricted:
            return run_exp_sound_restricted(adv, m.trials, cfg, m.seed);
        case Game::PolComp: return run_pol_comp(adv, m.trials, cfg, m.seed);
    }
    throw Error("unreachable game dispatch");
}

std::string format_outcome(const ExperimentOutcome& o) {
    std::ostringstream out;
    out << "game=" << game_name(o.game) << '\n'
        << "adversary=" << o.adversary << '\n'
        << "trials=" << o.trials << '\n'
        << "wins=" << o.wins << '\n'
        << "evidence=" << evidence_name(o.evidence.cls) << '\n'
        << "locus=" << o.evidence.locus << '\n'
        << "detail=" << o.evidence.detail << '\n';
    return out.str();
}

}  // namespace tpl::experiments

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpl/ledger.hpp"

namespace tpl::policy {

using crypto::Digest;
using ledger::Ledger;
using serial::Bytes;
using serial::ByteView;

enum class AggMode { Totals, History, Flows };

enum class EventKind { Internal, External, Fee };

const char* agg_name(AggMode m);
const char* kind_label(EventKind k);

/// Declarative observer policy: every field is plain data, so applying a
/// policy is a pure function of the ledger prefix by construction.
struct Policy {
    std::string id;
    std::string observer_class;

    // filter
    std::set<std::string> domain_whitelist;       // empty = all domains
    std::set<EventKind> kinds;                    // empty = all kinds
    std::map<std::string, std::string> required_meta;

    std::map<std::string, std::string> label_map;  // domain -> label; else identity

    AggMode agg = AggMode::Totals;
    std::uint64_t bucket_width = 0;  // 0 = one bucket
    std::uint64_t delay = 0;         // logical ticks suppressed at the tail
    std::int64_t theta_abs = 0;      // drop events with |v| below this
    std::uint64_t theta_fraction_ppm = 0;  // …or below this fraction of the total
    bool report_encumbered = false;  // add a B_enc row over encumbered kinds

    bool operator==(const Policy&) const = default;
};

/// key=value text form; unknown keys are rejected. Round-trips exactly.
Policy parse_policy(const std::string& text);
std::string policy_to_text(const Policy& p);

// The three stylised observer classes.
Policy public_investor_policy();
Policy regulator_policy();
Policy collateral_history_policy();

using Catalogue = std::map<std::string, Policy>;
Catalogue builtin_catalogue();

struct ViewRow {
    std::uint64_t bucket = 0;
    std::string label;
    std::int64_t value = 0;
    bool encumbered = false;

    bool operator==(const ViewRow&) const = default;
};

/// Derived table plus everything needed to re-derive it: the full canonical
/// prefix and the anchor transactions that pin its commitment.
struct View {
    std::string policy_id;
    std::uint64_t as_of = 0;  // record count the view covers
    Digest commitment;        // C at as_of
    std::vector<ViewRow> rows;
    std::vector<Bytes> records;        // canonical prefix records
    std::vector<Digest> anchor_txids;  // anchors carrying `commitment`

    bool operator==(const View&) const = default;

    Bytes serialize() const;
    static View deserialize(ByteView in);
};

EventKind classify_event(const treasury::DomainRegistry& reg,
                         const treasury::TreasuryEvent& e);

/// Filter, delay and materiality applied to a decoded prefix; returns the
/// visible receipts in ledger order (the V_hist subsequence).
std::vector<pot::PoTRecord> visible_events(const treasury::DomainRegistry& reg,
                                           const std::vector<pot::PoTRecord>& receipts,
                                           const Policy& p);

/// Pure table derivation from visible events (filter → relabel → bucket →
/// aggregate), shared by generation and verification.
std::vector<ViewRow> derive_table(const treasury::DomainRegistry& reg,
                                  const std::vector<pot::PoTRecord>& receipts,
                                  const Policy& p);

/// Builds the view as of the last anchored prefix (or the full prefix when
/// nothing is anchored yet, leaving the anchor citation empty).
View gen_view(const Ledger& l, const Catalogue& catalogue, const std::string& policy_id);

enum class RejectReason {
    None,
    AnchorDepth,          // missing, unconfirmed or shallow anchor
    CommitmentMismatch,   // anchored payload or recomputed C disagrees
    MalformedArtefacts,
    ChainInvalid,         // receipt chain fails recomputation or signatures
    SnapshotMismatch,     // committed snapshot disagrees with the fold
    RecomputeMismatch,    // table does not match the recomputed policy output
};

const char* reject_reason_name(RejectReason r);

struct VerifyResult {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
    std::string detail;
};

VerifyResult verify_view(const View& view, const Catalogue& catalogue,
                         const ledger::Config& cfg, const ledger::Keys& keys,
                         const anchor_sim::SimChain& oracle);

/// Per-interval (B_tot, B_enc) pairs: total exposure and the slice held in
/// encumbered (derivative/collateral) domains at each interval's end.
std::vector<std::pair<std::int64_t, std::int64_t>> leakage_pub(
    const Ledger& l, const std::vector<treasury::Interval>& intervals);

/// The visible-event subsequence for a history policy.
std::vector<pot::PoTRecord> history_view(const Ledger& l, const Policy& p);

}  // namespace tpl::policy

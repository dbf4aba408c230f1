#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tpl/serial.hpp"

namespace tpl::treasury {

using serial::Bytes;
using serial::ByteView;

enum class DomainKind : std::uint8_t {
    Onchain,
    Custodian,
    Exchange,
    Derivative,
    Collateral,
    External,  // pseudo-domain for acquisitions/disposals; never tracked
    Fee,       // the sink d_fee; exactly one per registry
};

const char* kind_name(DomainKind k);
DomainKind kind_from_name(const std::string& name);

struct DomainId {
    std::string id;
    DomainKind kind = DomainKind::Onchain;
};

/// Validated set of domains: unique ids, exactly one fee sink. External
/// domains are registered so events can name them, but they carry no balance.
class DomainRegistry {
public:
    explicit DomainRegistry(std::vector<DomainId> domains);

    const std::vector<DomainId>& domains() const { return domains_; }
    const DomainId* find(const std::string& id) const;
    const std::string& fee_domain() const { return fee_id_; }

    /// Tracked in the exposure vector: everything except External.
    bool is_modelled(const std::string& id) const;

private:
    std::vector<DomainId> domains_;
    std::string fee_id_;
};

struct ExposureVector {
    std::map<std::string, std::int64_t> balances;
    std::uint64_t logical_time = 0;

    bool operator==(const ExposureVector&) const = default;
};

/// Zero balances over every modelled domain (including the fee sink).
ExposureVector initial_state(const DomainRegistry& reg);

struct TreasuryEvent {
    std::uint64_t t = 0;
    std::string d_src;
    std::string d_dst;
    std::int64_t v = 0;  // satoshis, >= 0; direction is (d_src, d_dst)
    Bytes evid;
    std::map<std::string, std::string> m;

    bool operator==(const TreasuryEvent&) const = default;

    /// (evid, v, m) — the input of the per-event digest.
    Bytes body_bytes() const;
    Bytes serialize() const;
    static TreasuryEvent deserialize(ByteView in);
};

/// Move v from d_src to d_dst. Balances of external endpoints are not
/// tracked, so an inflow from outside simply credits the destination.
ExposureVector apply_event(const DomainRegistry& reg, const ExposureVector& state,
                           const TreasuryEvent& e);

ExposureVector fold_events(const DomainRegistry& reg, const ExposureVector& initial,
                           std::span<const TreasuryEvent> events);

/// Sum of tracked balances, optionally without the fee sink. External
/// domains never contribute (they have no entry).
std::int64_t total_exposure(const ExposureVector& state, const DomainRegistry& reg,
                            bool exclude_fee);

/// Logical-time window. The lower bound may be open or closed; the upper
/// bound is always inclusive.
struct Interval {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool lo_open = false;

    bool contains(std::uint64_t t) const {
        return (lo_open ? t > lo : t >= lo) && t <= hi;
    }
};

struct ClosednessResult {
    bool closed = true;
    std::optional<TreasuryEvent> violator;
};

/// A domain set d0 is closed over the interval iff every event in it that
/// touches d0 keeps both endpoints inside d0 plus the fee sink.
ClosednessResult is_closed(const DomainRegistry& reg, const std::set<std::string>& d0,
                           std::span<const TreasuryEvent> events, Interval interval);

}  // namespace tpl::treasury

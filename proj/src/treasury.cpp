#include "tpl/treasury.hpp"

#include <set>

namespace tpl::treasury {

const char* kind_name(DomainKind k) {
    switch (k) {
        case DomainKind::Onchain: return "ONCHAIN";
        case DomainKind::Custodian: return "CUSTODIAN";
        case DomainKind::Exchange: return "EXCHANGE";
        case DomainKind::Derivative: return "DERIVATIVE";
        case DomainKind::Collateral: return "COLLATERAL";
        case DomainKind::External: return "EXTERNAL";
        case DomainKind::Fee: return "FEE";
    }
    throw Error("unreachable domain kind");
}

DomainKind kind_from_name(const std::string& name) {
    for (auto k : {DomainKind::Onchain, DomainKind::Custodian, DomainKind::Exchange,
                   DomainKind::Derivative, DomainKind::Collateral, DomainKind::External,
                   DomainKind::Fee})
        if (name == kind_name(k)) return k;
    throw ParseError("unknown domain kind: " + name);
}

DomainRegistry::DomainRegistry(std::vector<DomainId> domains)
    : domains_(std::move(domains)) {
    std::set<std::string> seen;
    for (const auto& d : domains_) {
        if (d.id.empty())
            throw InvalidDomainRegistry("domain id must be non-empty");
        if (!seen.insert(d.id).second)
            throw InvalidDomainRegistry("duplicate domain id: " + d.id);
        if (d.kind == DomainKind::Fee) {
            if (!fee_id_.empty())
                throw InvalidDomainRegistry("more than one fee domain");
            fee_id_ = d.id;
        }
    }
    if (fee_id_.empty())
        throw InvalidDomainRegistry("registry needs exactly one fee domain");
}

const DomainId* DomainRegistry::find(const std::string& id) const {
    for (const auto& d : domains_)
        if (d.id == id) return &d;
    return nullptr;
}

bool DomainRegistry::is_modelled(const std::string& id) const {
    const DomainId* d = find(id);
    return d != nullptr && d->kind != DomainKind::External;
}

ExposureVector initial_state(const DomainRegistry& reg) {
    ExposureVector state;
    for (const auto& d : reg.domains())
        if (d.kind != DomainKind::External) state.balances[d.id] = 0;
    return state;
}

Bytes TreasuryEvent::body_bytes() const {
    serial::TlvWriter w(serial::RecordTag::EventBody);
    w.field_bytes(1, evid);
    w.field_i64(2, v);
    w.field_bytes(3, serial::encode_str_map(m));
    return w.finish();
}

Bytes TreasuryEvent::serialize() const {
    serial::TlvWriter w(serial::RecordTag::TreasuryEvent);
    w.field_u64(1, t);
    w.field_str(2, d_src);
    w.field_str(3, d_dst);
    w.field_i64(4, v);
    w.field_bytes(5, evid);
    w.field_bytes(6, serial::encode_str_map(m));
    return w.finish();
}

TreasuryEvent TreasuryEvent::deserialize(ByteView in) {
    serial::TlvRecord r = serial::TlvRecord::parse(in);
    if (r.tag != static_cast<std::uint8_t>(serial::RecordTag::TreasuryEvent))
        throw UnsupportedRecord("expected a treasury event record");
    TreasuryEvent e;
    e.t = r.require_u64(1);
    e.d_src = r.require_str(2);
    e.d_dst = r.require_str(3);
    e.v = r.require_i64(4);
    ByteView evid = r.require_bytes(5);
    e.evid.assign(evid.begin(), evid.end());
    e.m = serial::decode_str_map(r.require_bytes(6));
    return e;
}

namespace {

void add_checked(std::int64_t& dst, std::int64_t delta) {
    std::int64_t out;
    if (__builtin_add_overflow(dst, delta, &out))
        throw ValueOverflow("balance update overflows i64");
    dst = out;
}

}  // namespace

ExposureVector apply_event(const DomainRegistry& reg, const ExposureVector& state,
                           const TreasuryEvent& e) {
    if (e.v < 0) throw ValueOverflow("event value must be non-negative");
    if (e.d_src == e.d_dst) throw SelfTransfer("self transfer on " + e.d_src);
    const DomainId* src = reg.find(e.d_src);
    const DomainId* dst = reg.find(e.d_dst);
    if (!src) throw UnknownDomain("unknown source domain: " + e.d_src);
    if (!dst) throw UnknownDomain("unknown destination domain: " + e.d_dst);
    if (e.t <= state.logical_time)
        throw NonMonotoneTimestamp("event time " + std::to_string(e.t) +
                                   " not after " + std::to_string(state.logical_time));
    ExposureVector next = state;
    next.logical_time = e.t;
    if (src->kind != DomainKind::External) add_checked(next.balances.at(e.d_src), -e.v);
    if (dst->kind != DomainKind::External) add_checked(next.balances.at(e.d_dst), e.v);
    return next;
}

ExposureVector fold_events(const DomainRegistry& reg, const ExposureVector& initial,
                           std::span<const TreasuryEvent> events) {
    ExposureVector state = initial;
    for (const auto& e : events) state = apply_event(reg, state, e);
    return state;
}

std::int64_t total_exposure(const ExposureVector& state, const DomainRegistry& reg,
                            bool exclude_fee) {
    std::int64_t sum = 0;
    for (const auto& [id, balance] : state.balances) {
        if (exclude_fee && id == reg.fee_domain()) continue;
        add_checked(sum, balance);
    }
    return sum;
}

ClosednessResult is_closed(const DomainRegistry& reg, const std::set<std::string>& d0,
                           std::span<const TreasuryEvent> events, Interval interval) {
    for (const auto& id : d0) {
        const DomainId* d = reg.find(id);
        if (!d) throw UnknownDomain("unknown domain in candidate set: " + id);
        if (d->kind == DomainKind::External || d->kind == DomainKind::Fee)
            throw Error("candidate set may only contain modelled non-fee domains");
    }
    auto inside = [&](const std::string& id) {
        return d0.contains(id) || id == reg.fee_domain();
    };
    for (const auto& e : events) {
        if (!interval.contains(e.t)) continue;
        bool touches = d0.contains(e.d_src) || d0.contains(e.d_dst);
        if (touches && !(inside(e.d_src) && inside(e.d_dst)))
            return ClosednessResult{false, e};
    }
    return ClosednessResult{true, std::nullopt};
}

}  // namespace tpl::treasury

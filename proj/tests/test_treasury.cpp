#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "toy_fixture.hpp"
#include "tpl/treasury.hpp"

using namespace tpl;
using namespace tpl::treasury;

TEST_CASE("registry validation") {
    CHECK_THROWS_AS(DomainRegistry({{"a", DomainKind::Onchain}}), InvalidDomainRegistry);
    CHECK_THROWS_AS(DomainRegistry({{"a", DomainKind::Fee}, {"b", DomainKind::Fee}}),
                    InvalidDomainRegistry);
    CHECK_THROWS_AS(DomainRegistry({{"a", DomainKind::Fee}, {"a", DomainKind::Onchain}}),
                    InvalidDomainRegistry);
    DomainRegistry reg = toy::registry();
    CHECK(reg.fee_domain() == "fee");
    CHECK(reg.is_modelled("cold"));
    CHECK_FALSE(reg.is_modelled("ext"));
    CHECK_FALSE(reg.is_modelled("nope"));
}

TEST_CASE("initial state covers every modelled domain with zero") {
    ExposureVector s = initial_state(toy::registry());
    CHECK(s.balances == std::map<std::string, std::int64_t>{
                            {"cold", 0}, {"exch", 0}, {"coll", 0}, {"fee", 0}});
    CHECK(s.logical_time == 0);
}

TEST_CASE("transfer then fee payment") {
    DomainRegistry reg({{"cust", DomainKind::Custodian},
                        {"exch", DomainKind::Exchange},
                        {"fee", DomainKind::Fee}});
    ExposureVector s = initial_state(reg);
    s.balances["cust"] = 100 * toy::kSat;

    s = apply_event(reg, s, toy::event(1, "cust", "exch", 10));
    CHECK(s.balances.at("cust") == 90 * toy::kSat);
    CHECK(s.balances.at("exch") == 10 * toy::kSat);
    CHECK(total_exposure(s, reg, /*exclude_fee=*/true) == 100 * toy::kSat);

    TreasuryEvent fee_event;
    fee_event.t = 2;
    fee_event.d_src = "exch";
    fee_event.d_dst = "fee";
    fee_event.v = 5'000;  // 0.00005 BTC
    s = apply_event(reg, s, fee_event);
    CHECK(s.balances.at("exch") == 999'995'000);
    CHECK(s.balances.at("fee") == 5'000);
    CHECK(total_exposure(s, reg, true) == 100 * toy::kSat - 5'000);
    CHECK(total_exposure(s, reg, false) == 100 * toy::kSat);
}

TEST_CASE("zero-value transfer advances time only") {
    DomainRegistry reg = toy::registry();
    ExposureVector s = initial_state(reg);
    ExposureVector next = apply_event(reg, s, toy::event(3, "cold", "exch", 0));
    CHECK(next.balances == s.balances);
    CHECK(next.logical_time == 3);
}

TEST_CASE("apply_event error cases") {
    DomainRegistry reg = toy::registry();
    ExposureVector s = initial_state(reg);
    CHECK_THROWS_AS(apply_event(reg, s, toy::event(1, "cold", "cold", 1)), SelfTransfer);
    CHECK_THROWS_AS(apply_event(reg, s, toy::event(1, "nope", "cold", 1)), UnknownDomain);
    CHECK_THROWS_AS(apply_event(reg, s, toy::event(1, "cold", "nope", 1)), UnknownDomain);

    TreasuryEvent neg = toy::event(1, "cold", "exch", 1);
    neg.v = -1;
    CHECK_THROWS_AS(apply_event(reg, s, neg), ValueOverflow);

    s = apply_event(reg, s, toy::event(5, "cold", "exch", 1));
    CHECK_THROWS_AS(apply_event(reg, s, toy::event(5, "exch", "cold", 1)),
                    NonMonotoneTimestamp);
    CHECK_THROWS_AS(apply_event(reg, s, toy::event(4, "exch", "cold", 1)),
                    NonMonotoneTimestamp);
}

TEST_CASE("overflow is a hard error") {
    DomainRegistry reg = toy::registry();
    ExposureVector s = initial_state(reg);
    s.balances["exch"] = std::numeric_limits<std::int64_t>::max();
    TreasuryEvent e = toy::event(1, "cold", "exch", 0);
    e.v = 1;
    CHECK_THROWS_AS(apply_event(reg, s, e), ValueOverflow);
}

TEST_CASE("folding the toy prefix gives (60, 20, 20)") {
    DomainRegistry reg = toy::registry();
    auto events = toy::events();
    ExposureVector s = fold_events(reg, initial_state(reg), events);
    CHECK(s.balances.at("cold") == 60 * toy::kSat);
    CHECK(s.balances.at("exch") == 20 * toy::kSat);
    CHECK(s.balances.at("coll") == 20 * toy::kSat);
    CHECK(s.balances.at("fee") == 0);
    CHECK(total_exposure(s, reg, true) == 100 * toy::kSat);
    CHECK(s.logical_time == 4);

    // identity on empty input
    CHECK(fold_events(reg, s, {}) == s);

    // out-of-order input is rejected
    std::swap(events[1], events[2]);
    CHECK_THROWS_AS(fold_events(reg, initial_state(reg), events),
                    NonMonotoneTimestamp);
}

TEST_CASE("internal transfers conserve the non-fee total") {
    DomainRegistry reg = toy::registry();
    std::vector<std::string> internal{"cold", "exch", "coll"};
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        ExposureVector s = initial_state(reg);
        for (auto& [id, b] : s.balances) b = static_cast<std::int64_t>(rng() % 1000) * toy::kSat;
        std::int64_t before = total_exposure(s, reg, true);
        for (std::uint64_t t = 1; t <= 40; ++t) {
            std::size_t a = rng() % internal.size();
            std::size_t b = rng() % (internal.size() - 1);
            if (b >= a) ++b;
            s = apply_event(reg, s, toy::event(t, internal[a], internal[b],
                                              static_cast<std::int64_t>(rng() % 50)));
        }
        CHECK(total_exposure(s, reg, true) == before);
    }
}

TEST_CASE("fold depends only on the event records") {
    DomainRegistry reg = toy::registry();
    auto a = toy::events();
    auto b = toy::events();  // built independently, same records
    CHECK(fold_events(reg, initial_state(reg), a) ==
          fold_events(reg, initial_state(reg), b));
}

TEST_CASE("signed totals") {
    DomainRegistry reg({{"a", DomainKind::Onchain},
                        {"b", DomainKind::Derivative},
                        {"fee", DomainKind::Fee}});
    ExposureVector s = initial_state(reg);
    s.balances["a"] = 5;
    s.balances["b"] = -3;
    CHECK(total_exposure(s, reg, true) == 2);
}

TEST_CASE("closedness over intervals") {
    DomainRegistry reg = toy::registry();
    auto events = toy::events();
    std::set<std::string> d0{"cold", "exch", "coll"};

    // events 2..4 stay inside d0
    auto after_first = is_closed(reg, d0, events, {1, 5, /*lo_open=*/true});
    CHECK(after_first.closed);

    // including event 1 exposes the external source
    auto from_zero = is_closed(reg, d0, events, {0, 5, /*lo_open=*/false});
    CHECK_FALSE(from_zero.closed);
    REQUIRE(from_zero.violator.has_value());
    CHECK(from_zero.violator->t == 1);
    CHECK(from_zero.violator->d_src == "ext");

    // empty candidate set is vacuously closed
    CHECK(is_closed(reg, {}, events, {0, 5, false}).closed);

    // flows into the fee sink do not break closedness
    auto with_fee = events;
    with_fee.push_back(toy::event(5, "exch", "fee", 1));
    CHECK(is_closed(reg, d0, with_fee, {1, 5, true}).closed);

    CHECK_THROWS_AS(is_closed(reg, {"nope"}, events, {0, 5, false}), UnknownDomain);
    CHECK_THROWS_AS(is_closed(reg, {"fee"}, events, {0, 5, false}), Error);
}

TEST_CASE("event serialization round trips") {
    TreasuryEvent e = toy::event(7, "cold", "exch", 12);
    e.m = {{"enc", "1"}, {"class", "material"}};
    TreasuryEvent back = TreasuryEvent::deserialize(e.serialize());
    CHECK(back == e);

    // body bytes differ whenever v differs
    TreasuryEvent e2 = e;
    e2.v += 1;
    CHECK(e.body_bytes() != e2.body_bytes());
}

#include <doctest.h>

#include "tpl/anchor_sim.hpp"

using namespace tpl;
using namespace tpl::anchor_sim;

namespace {
Bytes payload32(std::uint8_t fill) { return Bytes(32, fill); }
}  // namespace

TEST_CASE("submit and confirm at depth k") {
    SimChain chain;
    Digest txid = chain.submit_anchor(payload32(0xAA));
    CHECK(chain.status(txid, 6) == TxStatus::Pending);  // still in mempool
    chain.mine(1);
    CHECK(chain.status(txid, 6) == TxStatus::Pending);
    chain.mine(4);  // 5 confirmations total
    CHECK(chain.status(txid, 6) == TxStatus::Pending);
    chain.mine(1);
    CHECK(chain.status(txid, 6) == TxStatus::ConfirmedAtDepth);
    CHECK(chain.status(txid, 7) == TxStatus::Pending);

    auto found = chain.find_tx(txid);
    REQUIRE(found.has_value());
    CHECK(found->first == payload32(0xAA));
    CHECK(found->second == 1);
}

TEST_CASE("oracle statuses") {
    SimChain chain;
    Digest confirmed = chain.submit_anchor(payload32(1));
    chain.mine(6);
    Digest shallow = chain.submit_anchor(payload32(2));
    chain.mine(5);  // shallow has 5 confirmations
    Digest unknown = crypto::sha256(payload32(9));
    auto statuses = chain.btc_oracle({confirmed, shallow, unknown}, 6);
    CHECK(statuses.at(confirmed) == TxStatus::ConfirmedAtDepth);
    CHECK(statuses.at(shallow) == TxStatus::Pending);
    CHECK(statuses.at(unknown) == TxStatus::Absent);
}

TEST_CASE("payload slot bound") {
    SimChain chain;
    CHECK_NOTHROW(chain.submit_anchor(Bytes(80, 0)));
    CHECK_THROWS_AS(chain.submit_anchor(Bytes(100, 0)), PayloadTooLarge);
}

TEST_CASE("duplicate payloads get distinct txids") {
    SimChain chain;
    Digest a = chain.submit_anchor(payload32(7));
    Digest b = chain.submit_anchor(payload32(7));
    CHECK(a != b);
}

TEST_CASE("identical scripts give identical chains") {
    auto build = [] {
        SimChain chain(42);
        chain.submit_anchor(payload32(3));
        chain.mine(4);
        chain.submit_anchor(payload32(4));
        chain.mine(2);
        return chain;
    };
    SimChain a = build();
    SimChain b = build();
    REQUIRE(a.blocks().size() == b.blocks().size());
    for (std::size_t i = 0; i < a.blocks().size(); ++i)
        CHECK(a.blocks()[i].digest == b.blocks()[i].digest);

    SimChain c(43);
    c.mine(6);
    CHECK(c.blocks().back().digest != a.blocks().back().digest);
}

TEST_CASE("shallow reorg drops a transaction until resubmission") {
    SimChain chain;
    chain.mine(3);
    Digest txid = chain.submit_anchor(payload32(5));
    chain.mine(2);  // tx at height 4, tip 5
    CHECK(chain.status(txid, 2) == TxStatus::ConfirmedAtDepth);

    chain.reorg(3, 3);  // drop heights 4..5, mine 3 replacements
    CHECK(chain.tip_height() == 6);
    CHECK(chain.status(txid, 2) == TxStatus::Absent);

    Digest again = chain.submit_anchor(payload32(5));
    chain.mine(2);
    CHECK(chain.status(again, 2) == TxStatus::ConfirmedAtDepth);
}

TEST_CASE("deep reorg is the modelled failure") {
    SimChain chain(0, 6);
    chain.mine(10);
    CHECK_THROWS_AS(chain.reorg(4, 10), PlatformAssumptionViolated);
    // depth 5 < k = 6 is still tolerated
    CHECK_NOTHROW(chain.reorg(5, 6));
}

TEST_CASE("reorg argument validation") {
    SimChain chain;
    chain.mine(4);
    CHECK_THROWS_AS(chain.reorg(4, 2), InvalidForkPoint);   // fork at tip
    CHECK_THROWS_AS(chain.reorg(9, 2), InvalidForkPoint);   // fork above tip
    CHECK_THROWS_AS(chain.reorg(3, 1), InvalidForkPoint);   // not longer
}

TEST_CASE("confirmed status never downgrades without a deep reorg") {
    SimChain chain(0, 3);
    Digest txid = chain.submit_anchor(payload32(6));
    chain.mine(3);
    CHECK(chain.status(txid, 3) == TxStatus::ConfirmedAtDepth);
    for (int i = 0; i < 20; ++i) {
        chain.mine(1);
        CHECK(chain.status(txid, 3) == TxStatus::ConfirmedAtDepth);
    }
    chain.reorg(chain.tip_height() - 2, 3);  // shallow: cannot reach the tx
    CHECK(chain.status(txid, 3) == TxStatus::ConfirmedAtDepth);
}

TEST_CASE("scenario scripts parse and run") {
    std::string script =
        "# exercise all three verbs\n"
        "MINE 2\n"
        "SUBMIT aabb\n"
        "MINE 3\n"
        "REORG 4 2  # shallow\n";
    auto actions = parse_scenario(script);
    REQUIRE(actions.size() == 4);
    CHECK(actions[0] == ScenarioAction{ScenarioAction::Kind::Mine, 2, 0, {}});
    CHECK(actions[1].payload == Bytes{0xAA, 0xBB});
    CHECK(actions[3] == ScenarioAction{ScenarioAction::Kind::Reorg, 4, 2, {}});

    SimChain chain;
    auto txids = run_scenario(chain, actions);
    REQUIRE(txids.size() == 1);
    CHECK(chain.tip_height() == 6);
    // the submitted tx was mined at height 3, below the fork, so it survives
    CHECK(chain.status(txids[0], 4) == TxStatus::ConfirmedAtDepth);

    CHECK_THROWS_AS(parse_scenario("MINE"), ParseError);
    CHECK_THROWS_AS(parse_scenario("JUMP 3"), ParseError);
    CHECK_THROWS_AS(parse_scenario("MINE 1 2"), ParseError);
    CHECK_THROWS_AS(parse_scenario("SUBMIT zz"), ParseError);
}

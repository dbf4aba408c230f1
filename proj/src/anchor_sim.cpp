#include "tpl/anchor_sim.hpp"

#include <sstream>

namespace tpl::anchor_sim {

SimChain::SimChain(std::uint64_t genesis_seed, std::uint64_t k) : k_(k) {
    if (k_ == 0) throw Error("confirmation depth must be positive");
    SimBlock genesis;
    genesis.height = 0;
    Bytes seed;
    serial::put_u64(seed, genesis_seed);
    genesis.parent = crypto::sha256(seed);
    genesis.digest = block_digest(genesis);
    blocks_.push_back(std::move(genesis));
}

Digest SimChain::block_digest(const SimBlock& b) const {
    serial::TlvWriter w(serial::RecordTag::SimBlock);
    w.field_u64(1, b.height);
    w.field_bytes(2, b.parent.view());
    std::vector<Bytes> txs;
    txs.reserve(b.txs.size());
    for (const auto& tx : b.txs) {
        Bytes t(tx.txid.bytes.begin(), tx.txid.bytes.end());
        t.insert(t.end(), tx.payload.begin(), tx.payload.end());
        txs.push_back(std::move(t));
    }
    w.field_bytes(3, serial::encode_seq(txs));
    return crypto::sha256(w.finish());
}

Digest SimChain::submit_anchor(ByteView payload) {
    if (payload.size() > kPayloadSlot)
        throw PayloadTooLarge("payload of " + std::to_string(payload.size()) +
                              " octets exceeds the " + std::to_string(kPayloadSlot) +
                              "-octet slot");
    Bytes preimage;
    serial::put_u64(preimage, tx_counter_++);
    preimage.insert(preimage.end(), payload.begin(), payload.end());
    SimTx tx{crypto::sha256(preimage), Bytes(payload.begin(), payload.end())};
    Digest txid = tx.txid;
    mempool_.push_back(std::move(tx));
    return txid;
}

void SimChain::mine(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
        SimBlock b;
        b.height = tip_height() + 1;
        b.parent = blocks_.back().digest;
        b.txs = std::move(mempool_);
        mempool_.clear();
        b.digest = block_digest(b);
        blocks_.push_back(std::move(b));
    }
}

void SimChain::reorg(std::uint64_t fork_height, std::uint64_t new_blocks) {
    if (fork_height >= tip_height())
        throw InvalidForkPoint("fork height " + std::to_string(fork_height) +
                               " is not below the tip at " + std::to_string(tip_height()));
    std::uint64_t depth = tip_height() - fork_height;
    if (depth >= k_)
        throw PlatformAssumptionViolated(
            "reorg of depth " + std::to_string(depth) +
            " reaches the confirmation depth " + std::to_string(k_));
    if (new_blocks <= depth)
        throw InvalidForkPoint("replacement branch must be longer than the one it drops");
    // transactions in the dropped suffix are gone; they need resubmission
    blocks_.resize(fork_height + 1);
    mine(new_blocks);
}

TxStatus SimChain::status(const Digest& txid, std::uint64_t k) const {
    if (auto found = find_tx(txid)) {
        std::uint64_t confirmations = tip_height() - found->second + 1;
        return confirmations >= k ? TxStatus::ConfirmedAtDepth : TxStatus::Pending;
    }
    for (const auto& tx : mempool_)
        if (tx.txid == txid) return TxStatus::Pending;
    return TxStatus::Absent;
}

std::map<Digest, TxStatus> SimChain::btc_oracle(const std::set<Digest>& txids,
                                                std::uint64_t k) const {
    std::map<Digest, TxStatus> out;
    for (const auto& id : txids) out[id] = status(id, k);
    return out;
}

std::optional<std::pair<Bytes, std::uint64_t>> SimChain::find_tx(
    const Digest& txid) const {
    for (const auto& b : blocks_)
        for (const auto& tx : b.txs)
            if (tx.txid == txid) return std::make_pair(tx.payload, b.height);
    return std::nullopt;
}

std::vector<ScenarioAction> parse_scenario(const std::string& text) {
    std::vector<ScenarioAction> actions;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream words(line);
        std::string verb;
        if (!(words >> verb)) continue;
        ScenarioAction a;
        auto fail = [&](const std::string& why) {
            throw ParseError("scenario line " + std::to_string(lineno) + ": " + why);
        };
        if (verb == "MINE") {
            a.kind = ScenarioAction::Kind::Mine;
            if (!(words >> a.a)) fail("MINE needs a block count");
        } else if (verb == "REORG") {
            a.kind = ScenarioAction::Kind::Reorg;
            if (!(words >> a.a >> a.b)) fail("REORG needs fork height and block count");
        } else if (verb == "SUBMIT") {
            a.kind = ScenarioAction::Kind::Submit;
            std::string hex;
            if (!(words >> hex)) fail("SUBMIT needs a hex payload");
            a.payload = serial::from_hex(hex);
        } else {
            fail("unknown action " + verb);
        }
        std::string extra;
        if (words >> extra) fail("trailing tokens");
        actions.push_back(std::move(a));
    }
    return actions;
}

std::vector<Digest> run_scenario(SimChain& chain,
                                 const std::vector<ScenarioAction>& actions) {
    std::vector<Digest> txids;
    for (const auto& a : actions) {
        switch (a.kind) {
            case ScenarioAction::Kind::Mine: chain.mine(a.a); break;
            case ScenarioAction::Kind::Reorg: chain.reorg(a.a, a.b); break;
            case ScenarioAction::Kind::Submit:
                txids.push_back(chain.submit_anchor(a.payload));
                break;
        }
    }
    return txids;
}

}  // namespace tpl::anchor_sim

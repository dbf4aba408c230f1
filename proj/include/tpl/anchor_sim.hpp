#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tpl/crypto.hpp"

namespace tpl::anchor_sim {

using crypto::Digest;
using serial::Bytes;
using serial::ByteView;

/// OP_RETURN-style commitment slot size.
inline constexpr std::size_t kPayloadSlot = 80;
inline constexpr std::uint64_t kDefaultConfirmations = 6;

struct SimTx {
    Digest txid;
    Bytes payload;

    bool operator==(const SimTx&) const = default;
};

struct SimBlock {
    std::uint64_t height = 0;
    Digest parent;
    std::vector<SimTx> txs;
    Digest digest;  // links the chain; recomputed from (height, parent, txs)
};

enum class TxStatus { ConfirmedAtDepth, Pending, Absent };

/// Deterministic block-by-block substrate. Blocks are produced on demand
/// (no proof of work); a reorg replaces the suffix above a fork height with
/// a strictly longer branch. A reorg at or beyond the configured
/// confirmation depth is the modelled out-of-scope failure and throws.
class SimChain {
public:
    explicit SimChain(std::uint64_t genesis_seed = 0,
                      std::uint64_t k = kDefaultConfirmations);

    Digest submit_anchor(ByteView payload);
    void mine(std::uint64_t n = 1);
    void reorg(std::uint64_t fork_height, std::uint64_t new_blocks);

    TxStatus status(const Digest& txid, std::uint64_t k) const;
    std::map<Digest, TxStatus> btc_oracle(const std::set<Digest>& txids,
                                          std::uint64_t k) const;

    /// Payload and height of a tx on the best chain, if present.
    std::optional<std::pair<Bytes, std::uint64_t>> find_tx(const Digest& txid) const;

    std::uint64_t tip_height() const { return blocks_.back().height; }
    std::uint64_t confirmation_depth() const { return k_; }
    const std::vector<SimBlock>& blocks() const { return blocks_; }

private:
    Digest block_digest(const SimBlock& b) const;

    std::vector<SimBlock> blocks_;  // index 0 is genesis at height 0
    std::vector<SimTx> mempool_;
    std::uint64_t k_;
    std::uint64_t tx_counter_ = 0;
};

// --- scenario scripts ---
// Plain text, one action per line, '#' comments:
//   MINE <n>
//   REORG <fork_height> <new_blocks>
//   SUBMIT <payload hex>

struct ScenarioAction {
    enum class Kind { Mine, Reorg, Submit } kind = Kind::Mine;
    std::uint64_t a = 0;  // MINE n / REORG fork_height
    std::uint64_t b = 0;  // REORG new_blocks
    Bytes payload;        // SUBMIT

    bool operator==(const ScenarioAction&) const = default;
};

std::vector<ScenarioAction> parse_scenario(const std::string& text);

/// Returns the txids produced by SUBMIT actions, in order.
std::vector<Digest> run_scenario(SimChain& chain,
                                 const std::vector<ScenarioAction>& actions);

}  // namespace tpl::anchor_sim

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpl/ledger.hpp"
#include "tpl/policy.hpp"

namespace tpl::experiments {

using crypto::Digest;
using serial::Bytes;

enum class Game { Coll, PotForge, Neq, ExpSoundRestricted, PolComp };

const char* game_name(Game g);
Game game_from_name(const std::string& name);

/// How a win was achieved, or how a losing attempt was caught.
enum class EvidenceClass {
    None,
    PorDiscrepancy,         // snapshot disagrees with its own coins or the fold
    PotDiscrepancy,         // receipt chain or signature check fails
    HashCollision,          // two distinct inputs with equal digest exhibited
    CommitmentDiscrepancy,  // prefix stream disagrees with the anchored value
};

const char* evidence_name(EvidenceClass c);

struct Evidence {
    EvidenceClass cls = EvidenceClass::None;
    std::uint64_t locus = 0;  // record or receipt position the evidence points at
    std::string detail;

    bool operator==(const Evidence&) const = default;
};

/// Data-driven strategy: a named script of mutation/forgery steps executed
/// against a challenger-run honest execution. Scripts keep runs reproducible
/// and let the harness enumerate families exhaustively.
struct Adversary {
    std::string id;
    std::vector<std::string> script;
};

struct ExperimentOutcome {
    Game game = Game::Neq;
    std::string adversary;
    std::uint64_t trials = 0;
    std::uint64_t wins = 0;
    /// For a winning run: evidence from the first win. Otherwise: how the
    /// last losing attempt was caught.
    Evidence evidence;
};

/// Shared challenge fixture: the five-domain desk every game runs against.
treasury::DomainRegistry demo_registry();
ledger::Config demo_config(crypto::Hasher hasher = {});

// --- the games ---

/// Equivocation: the adversary emits two anchored prefixes with views; a win
/// needs both to verify while differing. Classifies any win as a receipt
/// divergence or an exhibited digest collision.
ExperimentOutcome run_neq(const Adversary& adv, std::uint64_t trials,
                          const ledger::Config& cfg, std::uint64_t seed = 1);

/// Receipt forgery: append-oracle access only; a win is a chain that passes
/// all checks yet contains a chain value the oracle never produced.
ExperimentOutcome run_pot_forge(const Adversary& adv, std::uint64_t trials,
                                const ledger::Config& cfg, std::uint64_t seed = 1);

/// Exposure inflation over a closed domain set: a win is an alternative
/// anchored prefix passing every check while claiming a strictly larger
/// exposure sum over the set. Losses carry the catching check as evidence.
ExperimentOutcome run_exp_sound_restricted(const Adversary& adv, std::uint64_t trials,
                                           const ledger::Config& cfg,
                                           std::uint64_t seed = 1);

/// Omission against a history policy: a win is an accepted view missing a
/// policy-visible event.
ExperimentOutcome run_pol_comp(const Adversary& adv, std::uint64_t trials,
                               const ledger::Config& cfg, std::uint64_t seed = 1);

/// Bare collision exhibition (positive control for the broken hash).
ExperimentOutcome run_coll(const Adversary& adv, std::uint64_t trials,
                           const ledger::Config& cfg, std::uint64_t seed = 1);

/// Checks an alternative prefix against an anchored commitment in case
/// order: snapshot consistency, receipt chain, stream commitment. Returns
/// the first failure, or a None-class result when everything holds.
Evidence audit_prefix(const ledger::Config& cfg, const ledger::Keys& keys,
                      const std::vector<Bytes>& records, const Digest& anchored);

// --- cross-institution aggregate ---

inline constexpr std::int64_t kSatPerBtc = 100'000'000;
inline constexpr std::int64_t kMaxSupplySat = 21'000'000 * kSatPerBtc;

/// True iff the exposure sums stay within circulating + epsilon and below
/// the hard supply cap. Coverage / no-double-counting across institutions is
/// the caller's assertion; it cannot be checked here.
bool aggregate_supply_check(const std::vector<std::int64_t>& exposures,
                            std::int64_t circulating, std::int64_t epsilon);

// --- manifests and reporting ---

struct Manifest {
    Game game = Game::Neq;
    Adversary adversary;
    std::uint64_t trials = 1;
    std::uint64_t seed = 1;
    bool broken_hash = false;
};

/// key=value lines: game, adversary, trials, seed, hash=intact|broken, and
/// repeatable script lines. An empty script falls back to the shipped
/// adversary of that name.
Manifest parse_manifest(const std::string& text);

/// The scripted families exercised by the shipped suite.
std::vector<Adversary> shipped_adversaries(Game g);

ExperimentOutcome run_manifest(const Manifest& m);

/// Line-oriented key=value report for one outcome.
std::string format_outcome(const ExperimentOutcome& o);

}  // namespace tpl::experiments

// Operator front end: ledger lifecycle, event ingestion, view generation
// and verification, experiment runs, aggregate checks, cost statistics.
//
// Exit codes: 0 ok, 2 verification reject, 3 input error, 4 internal
// invariant violation.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "tpl/experiments.hpp"
#include "tpl/ledger.hpp"
#include "tpl/policy.hpp"

namespace fs = std::filesystem;
using namespace tpl;
using ledger::Keys;
using ledger::Ledger;
using serial::Bytes;

namespace {

constexpr int kOk = 0;
constexpr int kReject = 2;
constexpr int kInputError = 3;
constexpr int kInternalError = 4;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path home_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("TPL_HOME")) return env;
    throw InputError("no ledger home: pass --home or set TPL_HOME");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + p.string());
    out << content;
}

void append_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::app);
    if (!out) throw InputError("cannot write " + p.string());
    out << content;
}

/// Held for the lifetime of a mutating command; read-only commands never
/// take it.
struct HomeLock {
    int fd = -1;
    explicit HomeLock(const fs::path& home) {
        fd = ::open((home / "lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd < 0) throw InputError("cannot open lock file in " + home.string());
        if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd);
            throw InputError("ledger home is locked by another process");
        }
    }
    ~HomeLock() {
        if (fd >= 0) ::close(fd);  // releases the lock
    }
};

// --- on-disk layout under the home directory ---
// config.txt   domains, confirmation depth, hash selection
// keys.txt     signing seed, or public keys only (sealed homes)
// records.tpl  canonical record stream, one hex record per line
// commits.tpl  commitment sidecar
// chain.log    substrate scenario replayed to rebuild the simulated chain
// pending.txt  submitted-but-unconfirmed anchors

ledger::Config load_config(const fs::path& home) {
    ledger::Config cfg;
    std::istringstream in(read_file(home / "config.txt"));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("bad config line: " + line);
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "k") {
            cfg.k = std::stoull(value);
        } else if (key == "hash") {
            cfg.hasher.kind = value == "broken" ? crypto::Hasher::Kind::TruncatedIdentity
                                                : crypto::Hasher::Kind::Sha256;
        } else if (key == "domain") {
            std::istringstream f(value);
            std::string id, kind;
            if (!(f >> id >> kind)) throw InputError("bad domain line: " + line);
            cfg.domains.push_back({id, treasury::kind_from_name(kind)});
        } else {
            throw InputError("unknown config key: " + key);
        }
    }
    return cfg;
}

Keys load_keys(const fs::path& home) {
    std::istringstream in(read_file(home / "keys.txt"));
    std::string line;
    std::string seed_hex, t_hex, p_hex;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("bad keys line: " + line);
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "seed")
            seed_hex = value;
        else if (key == "treasury_pk")
            t_hex = value;
        else if (key == "provider_pk")
            p_hex = value;
        else
            throw InputError("unknown keys entry: " + key);
    }
    if (!seed_hex.empty()) return Keys::derive(serial::from_hex(seed_hex));
    if (t_hex.empty() || p_hex.empty())
        throw InputError("keys.txt needs a seed or both public keys");
    Keys keys;
    keys.treasury_pk = crypto::PublicKey::from_hex(t_hex);
    keys.provider_pk = crypto::PublicKey::from_hex(p_hex);
    return keys;
}

anchor_sim::SimChain load_chain(const fs::path& home, std::uint64_t k) {
    anchor_sim::SimChain chain(0, k);
    fs::path log = home / "chain.log";
    if (fs::exists(log))
        anchor_sim::run_scenario(chain, anchor_sim::parse_scenario(read_file(log)));
    return chain;
}

struct App {
    ledger::Config cfg;
    Ledger l;
    anchor_sim::SimChain chain;
};

App load_app(const fs::path& home) {
    ledger::Config cfg = load_config(home);
    Keys keys = load_keys(home);
    Ledger l = ledger::load_ledger(cfg, keys, (home / "records.tpl").string(),
                                   (home / "commits.tpl").string());
    anchor_sim::SimChain chain = load_chain(home, cfg.k);
    fs::path pending = home / "pending.txt";
    if (fs::exists(pending)) {
        std::istringstream in(read_file(pending));
        std::string txid_hex, commit_hex;
        std::uint64_t index;
        while (in >> txid_hex >> index >> commit_hex)
            l.restore_pending({crypto::Digest::from_hex(txid_hex), index,
                               crypto::Digest::from_hex(commit_hex)});
    }
    return {std::move(cfg), std::move(l), std::move(chain)};
}

void save_app(const fs::path& home, const Ledger& l) {
    ledger::save_ledger(l, (home / "records.tpl").string(),
                        (home / "commits.tpl").string());
    std::ostringstream out;
    for (const auto& p : l.pending_anchors())
        out << p.txid.hex() << ' ' << p.index << ' ' << p.commitment.hex() << '\n';
    write_file(home / "pending.txt", out.str());
}

/// Decimal BTC ("1.5", exact to the satoshi) or integer satoshis ("150sat").
std::int64_t parse_value(const std::string& s) {
    try {
        if (s.size() > 3 && s.ends_with("sat")) {
            std::size_t used = 0;
            std::int64_t v = std::stoll(s.substr(0, s.size() - 3), &used);
            if (used != s.size() - 3) throw InputError("bad value: " + s);
            return v;
        }
        std::string whole = s, frac;
        if (auto dot = s.find('.'); dot != std::string::npos) {
            whole = s.substr(0, dot);
            frac = s.substr(dot + 1);
        }
        if (whole.empty() || frac.size() > 8)
            throw InputError("value must be a whole number of satoshis: " + s);
        frac.resize(8, '0');
        std::size_t used = 0;
        std::int64_t btc = std::stoll(whole, &used);
        if (used != whole.size()) throw InputError("bad value: " + s);
        std::int64_t sat = std::stoll(frac.empty() ? "0" : frac);
        return btc * 100'000'000 + (btc < 0 ? -sat : sat);
    } catch (const std::invalid_argument&) {
        throw InputError("bad value: " + s);
    } catch (const std::out_of_range&) {
        throw InputError("value out of range: " + s);
    }
}

/// One event per line: t src dst value evid_hex [key=value ...]
std::vector<treasury::TreasuryEvent> parse_event_file(const std::string& text) {
    std::vector<treasury::TreasuryEvent> events;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream f(line);
        std::string t_tok, src, dst, value_tok, evid_hex;
        if (!(f >> t_tok)) continue;  // blank line
        try {
            if (!(f >> src >> dst >> value_tok >> evid_hex))
                throw InputError("expected: t src dst value evid [k=v ...]");
            treasury::TreasuryEvent e;
            e.t = std::stoull(t_tok);
            e.d_src = src;
            e.d_dst = dst;
            e.v = parse_value(value_tok);
            e.evid = serial::from_hex(evid_hex);
            std::string kv;
            while (f >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw InputError("metadata needs key=value: " + kv);
                e.m[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            events.push_back(std::move(e));
        } catch (const std::exception& ex) {
            throw InputError("line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return events;
}

policy::Catalogue load_catalogue(const std::vector<std::string>& policy_files) {
    policy::Catalogue cat = policy::builtin_catalogue();
    for (const auto& f : policy_files) {
        policy::Policy p = policy::parse_policy(read_file(f));
        cat[p.id] = p;
    }
    return cat;
}

void print_balances(const Ledger& l) {
    for (const auto& [domain, balance] : l.balances().balances)
        std::cout << "balance=" << domain << ' ' << balance << '\n';
}

// --- subcommands ---

int cmd_init(const std::string& home_flag, const std::vector<std::string>& domains,
             const std::string& seed_hex, std::uint64_t k, bool broken_hash) {
    fs::path home = home_dir(home_flag);
    fs::create_directories(home);
    if (fs::exists(home / "records.tpl"))
        throw InputError("ledger already initialised in " + home.string());
    HomeLock lock(home);

    std::vector<std::string> decls = domains;
    if (decls.empty())
        decls = {"ext EXTERNAL", "cold CUSTODIAN", "exch EXCHANGE", "coll COLLATERAL",
                 "fee FEE"};
    std::ostringstream cfg_text;
    cfg_text << "k=" << k << '\n' << "hash=" << (broken_hash ? "broken" : "intact") << '\n';
    for (const auto& d : decls) cfg_text << "domain=" << d << '\n';
    write_file(home / "config.txt", cfg_text.str());

    Bytes seed;
    if (seed_hex.empty()) {
        seed.resize(32);
        std::random_device rd;
        for (auto& b : seed) b = static_cast<std::uint8_t>(rd());
    } else {
        seed = serial::from_hex(seed_hex);
    }
    write_file(home / "keys.txt", "seed=" + serial::to_hex(seed) + "\n");
    write_file(home / "chain.log", "");
    write_file(home / "pending.txt", "");

    ledger::Config cfg = load_config(home);
    Ledger l = Ledger::setup(cfg, Keys::derive(seed));
    save_app(home, l);
    std::cout << "initialised=" << home.string() << '\n'
              << "commitment=" << l.commitment().hex() << '\n';
    return kOk;
}

int cmd_append(const std::string& home_flag, const std::string& events_path) {
    fs::path home = home_dir(home_flag);
    HomeLock lock(home);
    auto events = parse_event_file(read_file(events_path));
    if (events.empty()) throw InputError("no events in " + events_path);
    App app = load_app(home);
    for (const auto& e : events) {
        const auto& rec = app.l.append_event(e);
        std::cout << "event=" << rec.index << " t=" << e.t << " h=" << rec.h.hex()
                  << " r=" << rec.r.hex() << '\n';
    }
    save_app(home, app.l);
    std::cout << "records=" << app.l.size() << '\n'
              << "commitment=" << app.l.commitment().hex() << '\n';
    return kOk;
}

int cmd_snapshot(const std::string& home_flag) {
    fs::path home = home_dir(home_flag);
    HomeLock lock(home);
    App app = load_app(home);
    const auto& snap = app.l.snapshot_trigger();
    save_app(home, app.l);
    std::cout << "snapshot_t=" << snap.t << '\n'
              << "snapshot_commitment=" << snap.commitment.hex() << '\n';
    for (const auto& [domain, total] : snap.domain_totals)
        std::cout << "total=" << domain << ' ' << total << '\n';
    std::cout << "commitment=" << app.l.commitment().hex() << '\n';
    return kOk;
}

int cmd_anchor(const std::string& home_flag) {
    fs::path home = home_dir(home_flag);
    HomeLock lock(home);
    App app = load_app(home);
    crypto::Digest txid = app.chain.submit_anchor(app.l.commitment().view());
    // the substrate log must replay to the same counter state, so record the
    // submission before registering it
    append_file(home / "chain.log",
                "SUBMIT " + serial::to_hex(app.l.commitment().view()) + '\n');
    app.l.restore_pending({txid, app.l.size(), app.l.commitment()});
    save_app(home, app.l);
    std::cout << "txid=" << txid.hex() << '\n'
              << "anchored_index=" << app.l.size() << '\n'
              << "commitment=" << app.l.commitment().hex() << '\n';
    return kOk;
}

int cmd_mine(const std::string& home_flag, std::uint64_t n) {
    fs::path home = home_dir(home_flag);
    HomeLock lock(home);
    App app = load_app(home);
    app.chain.mine(n);
    append_file(home / "chain.log", "MINE " + std::to_string(n) + '\n');
    std::set<crypto::Digest> before;
    for (const auto& p : app.l.pending_anchors()) before.insert(p.txid);
    std::size_t finalized = app.l.poll_anchors(app.chain);
    for (const auto& p : app.l.pending_anchors())
        if (!before.contains(p.txid))  // resubmitted after a reorg drop
            append_file(home / "chain.log",
                        "SUBMIT " + serial::to_hex(p.commitment.view()) + '\n');
    save_app(home, app.l);
    std::cout << "height=" << app.chain.tip_height() << '\n'
              << "finalized=" << finalized << '\n'
              << "pending=" << app.l.pending_anchors().size() << '\n';
    return kOk;
}

int cmd_view(const std::string& home_flag, const std::string& policy_id,
             const std::vector<std::string>& policy_files, const std::string& out_path) {
    fs::path home = home_dir(home_flag);
    App app = load_app(home);
    policy::View v = policy::gen_view(app.l, load_catalogue(policy_files), policy_id);
    if (!out_path.empty()) write_file(out_path, serial::to_hex(v.serialize()) + "\n");
    std::cout << "policy=" << v.policy_id << '\n'
              << "as_of=" << v.as_of << '\n'
              << "commitment=" << v.commitment.hex() << '\n'
              << "anchors=" << v.anchor_txids.size() << '\n';
    for (const auto& row : v.rows)
        std::cout << "row=" << row.bucket << ' ' << row.label << ' ' << row.value << ' '
                  << (row.encumbered ? 1 : 0) << '\n';
    return kOk;
}

int cmd_verify_view(const std::string& home_flag, const std::string& bundle_path,
                    const std::vector<std::string>& policy_files) {
    fs::path home = home_dir(home_flag);
    ledger::Config cfg = load_config(home);
    Keys keys = load_keys(home);
    anchor_sim::SimChain chain = load_chain(home, cfg.k);
    std::string hex = read_file(bundle_path);
    while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r')) hex.pop_back();
    policy::View v = policy::View::deserialize(serial::from_hex(hex));
    auto res = policy::verify_view(v, load_catalogue(policy_files), cfg, keys, chain);
    std::cout << "accepted=" << (res.accepted ? "true" : "false") << '\n'
              << "reason=" << policy::reject_reason_name(res.reason) << '\n';
    if (!res.detail.empty()) std::cout << "detail=" << res.detail << '\n';
    return res.accepted ? kOk : kReject;
}

int cmd_stats(const std::string& home_flag, std::uint64_t horizon_years) {
    fs::path home = home_dir(home_flag);
    App app = load_app(home);
    std::uint64_t events = app.l.receipt_chain().records.size();
    std::uint64_t bytes = fs::exists(home / "records.tpl")
                              ? fs::file_size(home / "records.tpl")
                              : 0;
    std::uint64_t projected_anchors = 12 * horizon_years;  // monthly cadence
    std::cout << "records=" << app.l.size() << '\n'
              << "events=" << events << '\n'
              << "snapshots=" << app.l.snapshots().size() << '\n'
              << "anchors=" << app.l.anchors().size() << '\n'
              << "bytes=" << bytes << '\n'
              << "bytes_per_event=" << (events ? bytes / events : 0) << '\n'
              << "payload_slot=" << anchor_sim::kPayloadSlot << '\n'
              << "projected_anchors=" << projected_anchors << '\n'
              << "projected_payload_bytes="
              << projected_anchors * anchor_sim::kPayloadSlot << '\n';
    return kOk;
}

int cmd_replay(const std::string& home_flag) {
    fs::path home = home_dir(home_flag);
    App app = load_app(home);  // replays records and checks the sidecar
    auto div = pot::verify_chain(app.l.receipt_chain(), app.l.keys().treasury_pk,
                                 app.l.keys().provider_pk);
    print_balances(app.l);
    std::cout << "records=" << app.l.size() << '\n'
              << "commitment=" << app.l.commitment().hex() << '\n';
    if (div) {
        std::cout << "receipt_chain=diverged index=" << div->index << '\n';
        return kReject;
    }
    std::cout << "receipt_chain=ok\n";
    return kOk;
}

int cmd_experiment(const std::string& manifest_path) {
    auto manifest = experiments::parse_manifest(read_file(manifest_path));
    std::cout << experiments::format_outcome(experiments::run_manifest(manifest));
    return kOk;
}

int cmd_aggregate(const std::string& home_flag, const std::string& circulating,
                  const std::string& epsilon, const std::vector<std::string>& exposures,
                  const std::vector<std::string>& bundles) {
    std::vector<std::int64_t> sums;
    for (const auto& e : exposures) sums.push_back(parse_value(e));
    for (const auto& path : bundles) {
        // the exposure claimed by a bundle is the non-fee total of its prefix
        fs::path home = home_dir(home_flag);
        ledger::Config cfg = load_config(home);
        std::string hex = read_file(path);
        while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r'))
            hex.pop_back();
        policy::View v = policy::View::deserialize(serial::from_hex(hex));
        Keys pk_only = load_keys(home);
        pk_only.treasury_sk.reset();
        pk_only.provider_sk.reset();
        Ledger replay = Ledger::from_records(cfg, pk_only, v.records);
        sums.push_back(
            treasury::total_exposure(replay.balances(), replay.registry(), true));
    }
    std::int64_t sum = 0;
    for (auto s : sums) sum += s;
    bool ok = experiments::aggregate_supply_check(sums, parse_value(circulating),
                                                  epsilon.empty() ? 0
                                                                  : parse_value(epsilon));
    std::cout << "institutions=" << sums.size() << '\n'
              << "sum=" << sum << '\n'
              << "consistent=" << (ok ? "true" : "false") << '\n';
    return ok ? kOk : kReject;
}

int classify_failure(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const UnknownDomain*>(&e) ||
        dynamic_cast<const NonMonotoneTimestamp*>(&e) ||
        dynamic_cast<const SelfTransfer*>(&e) || dynamic_cast<const ValueOverflow*>(&e) ||
        dynamic_cast<const InvalidDomainRegistry*>(&e) ||
        dynamic_cast<const PayloadTooLarge*>(&e) ||
        dynamic_cast<const InvalidForkPoint*>(&e) ||
        dynamic_cast<const UnknownPolicy*>(&e) ||
        dynamic_cast<const MalformedAdversaryOutput*>(&e))
        return kInputError;
    if (dynamic_cast<const SnapshotMismatch*>(&e)) return kReject;
    return kInternalError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"treasury proof ledger"};
    app.require_subcommand(1);

    std::string home;
    app.add_option("--home", home, "ledger home directory (default: $TPL_HOME)");

    std::vector<std::string> init_domains;
    std::string init_seed;
    std::uint64_t init_k = anchor_sim::kDefaultConfirmations;
    bool init_broken = false;
    auto* init = app.add_subcommand("init", "create a ledger home");
    init->add_option("--domain", init_domains, "domain declaration: 'id KIND'");
    init->add_option("--seed", init_seed, "32-octet signing seed (hex)");
    init->add_option("--k", init_k, "confirmation depth");
    init->add_flag("--broken-hash", init_broken, "weakened digest (testing only)");

    std::string append_file_path;
    auto* append = app.add_subcommand("append", "append events from a file");
    append->add_option("file", append_file_path, "event file")->required();

    app.add_subcommand("snapshot", "record a reserves snapshot");
    app.add_subcommand("anchor", "submit the current commitment to the substrate");

    std::uint64_t mine_n = 1;
    auto* mine = app.add_subcommand("mine", "advance the simulated substrate");
    mine->add_option("n", mine_n, "blocks to mine");

    std::string view_policy, view_out;
    std::vector<std::string> view_policy_files;
    auto* view = app.add_subcommand("view", "derive an observer view");
    view->add_option("policy", view_policy, "policy id")->required();
    view->add_option("--policy-file", view_policy_files, "extra policy definitions");
    view->add_option("--out", view_out, "write the view bundle here");

    std::string verify_bundle;
    std::vector<std::string> verify_policy_files;
    auto* verify = app.add_subcommand("verify-view", "check a view bundle");
    verify->add_option("bundle", verify_bundle, "view bundle file")->required();
    verify->add_option("--policy-file", verify_policy_files, "extra policy definitions");

    std::uint64_t stats_years = 1;
    auto* stats = app.add_subcommand("stats", "cost and size report");
    stats->add_option("--years", stats_years, "projection horizon in years");

    std::string manifest_path;
    auto* experiment = app.add_subcommand("experiment", "run a scripted game");
    experiment->add_option("manifest", manifest_path, "experiment manifest")->required();

    std::string agg_circulating, agg_epsilon;
    std::vector<std::string> agg_exposures, agg_bundles;
    auto* aggregate = app.add_subcommand("aggregate", "cross-institution supply check");
    aggregate->add_option("--circulating", agg_circulating, "circulating supply (BTC)")
        ->required();
    aggregate->add_option("--epsilon", agg_epsilon, "tolerance (BTC)");
    aggregate->add_option("--exposure", agg_exposures, "stated exposure (BTC)");
    aggregate->add_option("bundles", agg_bundles, "view bundle files");

    app.add_subcommand("replay", "reload and re-verify the ledger");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (init->parsed())
            return cmd_init(home, init_domains, init_seed, init_k, init_broken);
        if (append->parsed()) return cmd_append(home, append_file_path);
        if (app.get_subcommand("snapshot")->parsed()) return cmd_snapshot(home);
        if (app.get_subcommand("anchor")->parsed()) return cmd_anchor(home);
        if (mine->parsed()) return cmd_mine(home, mine_n);
        if (view->parsed())
            return cmd_view(home, view_policy, view_policy_files, view_out);
        if (verify->parsed())
            return cmd_verify_view(home, verify_bundle, verify_policy_files);
        if (stats->parsed()) return cmd_stats(home, stats_years);
        if (experiment->parsed()) return cmd_experiment(manifest_path);
        if (aggregate->parsed())
            return cmd_aggregate(home, agg_circulating, agg_epsilon, agg_exposures,
                                 agg_bundles);
        if (app.get_subcommand("replay")->parsed()) return cmd_replay(home);
        return kInputError;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify_failure(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

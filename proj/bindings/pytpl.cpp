#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpl/experiments.hpp"
#include "tpl/ledger.hpp"
#include "tpl/policy.hpp"

namespace py = pybind11;
using namespace tpl;

namespace {

serial::Bytes to_bytes(const py::bytes& b) {
    std::string s = b;
    return serial::Bytes(s.begin(), s.end());
}

py::bytes from_bytes(const serial::Bytes& b) {
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

ledger::Config make_config(const std::vector<std::pair<std::string, std::string>>& domains,
                           std::uint64_t k, bool broken_hash) {
    ledger::Config cfg;
    for (const auto& [id, kind] : domains)
        cfg.domains.push_back({id, treasury::kind_from_name(kind)});
    cfg.k = k;
    if (broken_hash) cfg.hasher.kind = crypto::Hasher::Kind::TruncatedIdentity;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_tpl, m) {
    m.doc() = "treasury proof ledger core";

    py::register_exception<Error>(m, "TplError");

    py::class_<treasury::TreasuryEvent>(m, "Event")
        .def(py::init([](std::uint64_t t, const std::string& src, const std::string& dst,
                         std::int64_t v, const py::bytes& evid,
                         const std::map<std::string, std::string>& meta) {
                 treasury::TreasuryEvent e;
                 e.t = t;
                 e.d_src = src;
                 e.d_dst = dst;
                 e.v = v;
                 e.evid = to_bytes(evid);
                 e.m = meta;
                 return e;
             }),
             py::arg("t"), py::arg("src"), py::arg("dst"), py::arg("value_sat"),
             py::arg("evid"), py::arg("meta") = std::map<std::string, std::string>{})
        .def_readonly("t", &treasury::TreasuryEvent::t)
        .def_readonly("src", &treasury::TreasuryEvent::d_src)
        .def_readonly("dst", &treasury::TreasuryEvent::d_dst)
        .def_readonly("value_sat", &treasury::TreasuryEvent::v);

    py::class_<pot::PoTRecord>(m, "Receipt")
        .def_readonly("index", &pot::PoTRecord::index)
        .def_readonly("event", &pot::PoTRecord::event)
        .def_property_readonly("h", [](const pot::PoTRecord& r) { return r.h.hex(); })
        .def_property_readonly("r", [](const pot::PoTRecord& r) { return r.r.hex(); });

    py::class_<ledger::Config>(m, "Config")
        .def(py::init(&make_config), py::arg("domains"),
             py::arg("k") = anchor_sim::kDefaultConfirmations,
             py::arg("broken_hash") = false);

    py::class_<ledger::Keys>(m, "Keys")
        .def_static(
            "derive",
            [](const py::bytes& seed) { return ledger::Keys::derive(to_bytes(seed)); },
            py::arg("seed"))
        .def_static("generate", [] { return ledger::Keys::derive(); })
        .def_property_readonly("can_sign", &ledger::Keys::can_sign)
        .def("public_only", [](const ledger::Keys& k) {
            ledger::Keys out = k;
            out.treasury_sk.reset();
            out.provider_sk.reset();
            return out;
        });

    py::class_<anchor_sim::SimChain>(m, "SimChain")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("genesis_seed") = 0,
             py::arg("k") = anchor_sim::kDefaultConfirmations)
        .def("mine", &anchor_sim::SimChain::mine, py::arg("n") = 1)
        .def_property_readonly("tip_height", &anchor_sim::SimChain::tip_height);

    py::class_<ledger::Ledger>(m, "Ledger")
        .def_static("setup", &ledger::Ledger::setup, py::arg("config"), py::arg("keys"))
        .def_static(
            "from_records",
            [](ledger::Config cfg, ledger::Keys keys, const std::vector<py::bytes>& recs) {
                std::vector<serial::Bytes> records;
                for (const auto& r : recs) records.push_back(to_bytes(r));
                return ledger::Ledger::from_records(std::move(cfg), std::move(keys),
                                                    records);
            },
            py::arg("config"), py::arg("keys"), py::arg("records"))
        .def("append_event", &ledger::Ledger::append_event, py::arg("event"),
             py::return_value_policy::copy)
        .def("snapshot", [](ledger::Ledger& l) { return l.snapshot_trigger(); },
             py::return_value_policy::copy)
        .def("anchor",
             [](ledger::Ledger& l, anchor_sim::SimChain& c) {
                 return l.anchor_trigger(c).hex();
             })
        .def("poll_anchors", &ledger::Ledger::poll_anchors)
        .def_property_readonly("size", &ledger::Ledger::size)
        .def_property_readonly("sealed", &ledger::Ledger::sealed)
        .def_property_readonly(
            "commitment", [](const ledger::Ledger& l) { return l.commitment().hex(); })
        .def_property_readonly(
            "balances",
            [](const ledger::Ledger& l) { return l.balances().balances; })
        .def_property_readonly("records",
                               [](const ledger::Ledger& l) {
                                   std::vector<py::bytes> out;
                                   for (const auto& r : l.record_bytes())
                                       out.push_back(from_bytes(r));
                                   return out;
                               })
        .def_property_readonly("receipts", [](const ledger::Ledger& l) {
            return l.receipt_chain().records;
        });

    py::class_<por::PoRSnapshot>(m, "Snapshot")
        .def_readonly("t", &por::PoRSnapshot::t)
        .def_readonly("domain_totals", &por::PoRSnapshot::domain_totals)
        .def_property_readonly(
            "commitment", [](const por::PoRSnapshot& s) { return s.commitment.hex(); });

    py::class_<policy::ViewRow>(m, "ViewRow")
        .def_readonly("bucket", &policy::ViewRow::bucket)
        .def_readonly("label", &policy::ViewRow::label)
        .def_readonly("value_sat", &policy::ViewRow::value)
        .def_readonly("encumbered", &policy::ViewRow::encumbered);

    py::class_<policy::View>(m, "View")
        .def_readonly("policy_id", &policy::View::policy_id)
        .def_readonly("as_of", &policy::View::as_of)
        .def_readonly("rows", &policy::View::rows)
        .def_property_readonly(
            "commitment", [](const policy::View& v) { return v.commitment.hex(); })
        .def("serialize", [](const policy::View& v) { return from_bytes(v.serialize()); })
        .def_static("deserialize", [](const py::bytes& b) {
            return policy::View::deserialize(to_bytes(b));
        });

    m.def(
        "gen_view",
        [](const ledger::Ledger& l, const std::string& policy_id,
           const std::optional<std::string>& policy_text) {
            policy::Catalogue cat = policy::builtin_catalogue();
            if (policy_text) {
                policy::Policy p = policy::parse_policy(*policy_text);
                cat[p.id] = p;
            }
            return policy::gen_view(l, cat, policy_id);
        },
        py::arg("ledger"), py::arg("policy_id"), py::arg("policy_text") = std::nullopt);

    m.def(
        "verify_view",
        [](const policy::View& v, const ledger::Config& cfg, const ledger::Keys& keys,
           const anchor_sim::SimChain& chain,
           const std::optional<std::string>& policy_text) {
            policy::Catalogue cat = policy::builtin_catalogue();
            if (policy_text) {
                policy::Policy p = policy::parse_policy(*policy_text);
                cat[p.id] = p;
            }
            auto res = policy::verify_view(v, cat, cfg, keys, chain);
            return py::make_tuple(res.accepted,
                                  std::string(policy::reject_reason_name(res.reason)));
        },
        py::arg("view"), py::arg("config"), py::arg("keys"), py::arg("chain"),
        py::arg("policy_text") = std::nullopt);

    m.def("run_experiment", [](const std::string& manifest_text) {
        return experiments::format_outcome(
            experiments::run_manifest(experiments::parse_manifest(manifest_text)));
    });

    m.def("aggregate_supply_check", &experiments::aggregate_supply_check,
          py::arg("exposures"), py::arg("circulating"), py::arg("epsilon") = 0);

    m.attr("SAT_PER_BTC") = experiments::kSatPerBtc;
    m.attr("DEFAULT_CONFIRMATIONS") = anchor_sim::kDefaultConfirmations;
}

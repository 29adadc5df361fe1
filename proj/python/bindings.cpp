#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "atch/causal.hpp"
#include "atch/cli.hpp"
#include "atch/conflict.hpp"
#include "atch/fixtures.hpp"
#include "atch/projection.hpp"
#include "atch/query.hpp"
#include "atch/store.hpp"
#include "atch/temporal.hpp"

namespace py = pybind11;
using namespace atch;

namespace {

// Timestamps cross the boundary as RFC 3339 strings.
Timestamp to_ts(const std::string& text) { return Timestamp::parse_or_throw(text); }

std::optional<Timestamp> to_ts(const std::optional<std::string>& text) {
    if (!text) return std::nullopt;
    return to_ts(*text);
}

Attributes to_attributes(const py::dict& d) {
    Attributes out;
    for (auto [k, v] : d) {
        auto key = py::cast<std::string>(k);
        // bool before int: Python bools are ints too.
        if (py::isinstance<py::bool_>(v)) out[key] = v.cast<bool>();
        else if (py::isinstance<py::int_>(v)) out[key] = v.cast<std::int64_t>();
        else if (py::isinstance<py::float_>(v)) out[key] = v.cast<double>();
        else if (py::isinstance<py::str>(v)) out[key] = v.cast<std::string>();
        else throw py::type_error("attribute '" + key + "' must be str, int, float or bool");
    }
    return out;
}

py::object from_value(const AttrValue& v) {
    return std::visit(
        [](const auto& x) -> py::object {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Timestamp>) return py::str(x.to_string());
            else return py::cast(x);
        },
        v);
}

py::dict edge_dict(const Hyperedge& e) {
    py::dict d;
    d["id"] = e.id;
    py::list parts;
    for (const auto& p : e.participants) {
        if (p.role) parts.append(py::make_tuple(p.ref, *p.role));
        else parts.append(py::make_tuple(p.ref, py::none()));
    }
    d["participants"] = parts;
    py::dict attrs;
    for (const auto& [k, v] : e.attributes) attrs[py::str(k)] = from_value(v);
    d["attributes"] = attrs;
    d["valid_from"] = e.valid_time.start.to_string();
    d["valid_to"] = e.valid_time.end.to_string();
    d["confidence"] = e.confidence;
    if (e.claim) {
        d["claim"] = py::make_tuple(e.claim->proposition, std::string(to_string(e.claim->polarity)));
    }
    return d;
}

py::dict chain_dict(const CausalChain& c) {
    py::dict d;
    py::list nodes, links;
    for (const auto& n : c.nodes) nodes.append(n.edge);
    for (const auto& l : c.links) links.append(l.effective());
    d["nodes"] = nodes;
    d["links"] = links;
    d["confidence"] = c.chain_confidence;
    return d;
}

Participant to_participant(const py::handle& h) {
    if (py::isinstance<py::str>(h)) return {h.cast<std::string>(), std::nullopt};
    auto t = h.cast<py::tuple>();
    if (t.size() != 2) throw py::value_error("participant must be a name or a (name, role) pair");
    std::optional<std::string> role;
    if (!t[1].is_none()) role = t[1].cast<std::string>();
    return {t[0].cast<std::string>(), role};
}

}  // namespace

PYBIND11_MODULE(_atch, m) {
    m.doc() = "Temporal causal hypergraph store and query engine";

    // Messages lead with the error code, e.g. "UnknownEdge: ...".
    py::register_exception<Error>(m, "AtchError", PyExc_RuntimeError);

    py::class_<Snapshot>(m, "Snapshot")
        .def_property_readonly("seq", &Snapshot::as_of_seq)
        .def("edge_ids",
             [](const Snapshot& s) {
                 std::vector<EdgeId> ids;
                 for (const auto& [id, st] : s.edges()) ids.push_back(id);
                 return ids;
             })
        .def("edge", [](const Snapshot& s, const std::string& id) { return edge_dict(s.edge(id)); })
        .def("links",
             [](const Snapshot& s) {
                 py::list out;
                 for (const auto& l : s.links())
                     out.append(py::make_tuple(l.cause, l.effect, l.mechanism, l.link_confidence,
                                               std::string(to_string(l.kind))));
                 return out;
             })
        .def("canonical", [](const Snapshot& s) { return canonical::dump(s.to_canonical()); });

    py::class_<Store>(m, "Store")
        .def(py::init<>())
        .def_static("open", [](const std::string& path) { return Store::open(path); })
        .def_static("from_log",
                    [](const std::string& text) {
                        std::istringstream in(text);
                        return Store::replay(read_log(in));
                    })
        .def("add_vertex",
             [](Store& s, const std::string& id, const py::dict& attrs) { return s.add_vertex({id, to_attributes(attrs)}); },
             py::arg("id"), py::arg("attributes") = py::dict())
        .def(
            "add_edge",
            [](Store& s, const std::string& id, const py::list& participants, const std::string& valid_from,
               const std::optional<std::string>& valid_to, double confidence, const py::dict& attrs,
               const std::optional<std::pair<std::string, bool>>& claim) {
                Hyperedge e;
                e.id = id;
                for (auto p : participants) e.participants.push_back(to_participant(p));
                e.valid_time = {to_ts(valid_from), valid_to ? to_ts(*valid_to) : Timestamp::infinity()};
                e.confidence = confidence;
                e.attributes = to_attributes(attrs);
                if (claim) e.claim = ClaimTag{claim->first, claim->second ? Polarity::Supports : Polarity::Refutes};
                return s.add_edge(std::move(e));
            },
            py::arg("id"), py::arg("participants"), py::arg("valid_from"), py::arg("valid_to") = py::none(),
            py::arg("confidence") = 1.0, py::arg("attributes") = py::dict(), py::arg("claim") = py::none())
        .def(
            "add_link",
            [](Store& s, const std::string& cause, const std::string& effect, const std::string& mechanism,
               double confidence, bool inhibits) {
                CausalLink l;
                l.cause = cause;
                l.effect = effect;
                l.mechanism = mechanism;
                l.link_confidence = confidence;
                l.kind = inhibits ? LinkKind::Inhibits : LinkKind::Causes;
                return s.add_link(std::move(l));
            },
            py::arg("cause"), py::arg("effect"), py::arg("mechanism") = "", py::arg("confidence") = 1.0,
            py::arg("inhibits") = false)
        .def("terminate", [](Store& s, const std::string& id, const std::string& end) { return s.terminate(id, to_ts(end)); })
        .def("snapshot", [](const Store& s) { return s.snapshot(); })
        .def("snapshot_at", [](const Store& s, std::uint64_t seq) { return s.snapshot(seq); })
        .def_property_readonly("last_seq", &Store::last_seq)
        .def("serialize", &Store::serialize);

    m.def("at_time",
          [](const Snapshot& s, const std::string& t, std::optional<double> floor) { return at_time(s, to_ts(t), floor).edges; },
          py::arg("snapshot"), py::arg("t"), py::arg("min_confidence") = py::none());
    m.def("during", [](const Snapshot& s, const std::string& a, const std::string& b) {
        return valid_in_interval(s, {to_ts(a), to_ts(b)});
    });
    m.def("blast_radius", &blast_radius);
    m.def("active_defaults", [](const Snapshot& s, const std::string& t) { return active_defaults(s, to_ts(t)); });

    m.def("build_chain", [](const Snapshot& s, const std::vector<EdgeId>& path) { return chain_dict(build_chain(s, path)); });
    m.def(
        "trace",
        [](const Snapshot& s, const std::string& target, int depth, const std::optional<std::string>& as_of,
           std::optional<double> threshold) {
            TraceOptions o;
            o.depth = depth;
            o.as_of = to_ts(as_of);
            o.threshold = threshold;
            py::list out;
            for (const auto& c : trace_causal_chain(s, target, o).chains()) out.append(chain_dict(c));
            return out;
        },
        py::arg("snapshot"), py::arg("target"), py::arg("depth") = 3, py::arg("as_of") = py::none(),
        py::arg("threshold") = py::none());
    m.def("noisy_or", [](const std::vector<double>& xs) { return combine_paths(xs, CombineMode::NoisyOr); });
    m.def("effective_depth", &effective_depth);

    m.def(
        "discover",
        [](const Snapshot& s, const std::string& proposition, double theta) -> py::object {
            auto sig = detect_contradiction(s, proposition, theta);
            if (!sig) return py::none();
            DiscoveryResult d = discover_hidden_context(s, *sig);
            py::dict out;
            out["attribute"] = d.best_attribute;
            out["gain"] = d.gain;
            out["no_separator"] = d.no_separator;
            py::list branches;
            for (const auto& b : d.partition) branches.append(py::make_tuple(b.label, b.counts.positive, b.counts.negative));
            out["partition"] = branches;
            return out;
        },
        py::arg("snapshot"), py::arg("proposition"), py::arg("theta") = 0.9);
    m.def("resolve", [](const Snapshot& s, const std::string& a, const std::string& b) {
        Verdict v = resolve(s, a, b);
        return py::make_tuple(std::string(to_string(v.decision)), std::string(to_string(v.tier)));
    });

    m.def(
        "query",
        [](const Snapshot& s, const std::string& text, bool force) {
            EvaluateOptions o;
            o.allow_cyclic = force;
            py::list out;
            for (const auto& b : evaluate(s, parse_query(text), o).bindings) {
                py::dict row;
                for (const auto& [k, v] : b.values) row[py::str(k)] = v;
                out.append(py::make_tuple(row, b.edges));
            }
            return out;
        },
        py::arg("snapshot"), py::arg("text"), py::arg("force_bruteforce") = false);
    m.def("is_acyclic", [](const std::string& text) { return is_alpha_acyclic(parse_query(text)).acyclic; });

    m.def("ambiguity_bits", [](const Snapshot& s) { return ambiguity_bound(s).total_bits; });
    m.def("count_preimages", [](const Snapshot& s) { return count_preimages(project_binary(s)); });

    m.def("fixture", [](const std::string& name) {
        for (const auto& f : fixtures::all())
            if (f.name == name) return f.build();
        throw Error(ErrorCode::FixtureMissing, "no fixture named '" + name + "'");
    });

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });
}

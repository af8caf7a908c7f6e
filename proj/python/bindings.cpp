#include "tga/attack.hpp"
#include "tga/countermeasure.hpp"
#include "tga/experiment.hpp"
#include "tga/locker.hpp"
#include "tga/netlist.hpp"
#include "tga/report.hpp"
#include "tga/verify.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tga;

namespace {

std::string value_str(KeyValue v) { return std::string(1, to_char(v)); }

}  // namespace

PYBIND11_MODULE(_tga, m) {
    m.doc() = "XOR/XNOR logic locking and the topology-guided attack";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<NetlistError>(m, "NetlistError", PyExc_ValueError);

    py::class_<Netlist>(m, "Netlist")
        .def_static("from_bench", &parse_bench, py::arg("text"))
        .def_static("read", &read_bench_file, py::arg("path"))
        .def("to_bench", &write_bench)
        .def("write", [](const Netlist& n, const std::string& path) { write_bench_file(n, path); }, py::arg("path"))
        .def_property_readonly("gate_count", &Netlist::logic_gate_count)
        .def_property_readonly("inputs", [](const Netlist& n) {
            std::vector<std::string> names;
            for (auto id : n.data_inputs()) names.push_back(n.name(id));
            return names;
        })
        .def_property_readonly("outputs", [](const Netlist& n) {
            std::vector<std::string> names;
            for (auto id : n.primary_outputs()) names.push_back(n.name(id));
            return names;
        })
        .def_property_readonly("key_inputs", [](const Netlist& n) {
            std::vector<std::string> names;
            for (auto id : n.key_inputs()) names.push_back(n.name(id));
            return names;
        })
        .def(
            "simulate",
            [](const Netlist& n, const std::map<std::string, bool>& inputs, const std::map<std::string, bool>& key) {
                return simulate(n, SimVector{inputs, key});
            },
            py::arg("inputs"), py::arg("key") = std::map<std::string, bool>{})
        .def("__len__", &Netlist::size);

    py::class_<LockedCircuit>(m, "LockedCircuit")
        .def_readonly("netlist", &LockedCircuit::netlist)
        .def_readonly("key", &LockedCircuit::key)
        .def_property_readonly("scheme", [](const LockedCircuit& c) { return std::string(to_string(c.scheme)); })
        .def("key_file", &format_key_file)
        .def("record_json", &locked_record_json);

    m.def("lock_rll", &lock_rll, py::arg("netlist"), py::arg("key_size"), py::arg("seed") = 1);
    m.def("lock_sll", &lock_sll, py::arg("netlist"), py::arg("key_size"), py::arg("cluster") = 3,
          py::arg("seed") = 1);
    m.def(
        "lock_cm",
        [](const Netlist& n, std::size_t k_min, std::size_t k_max, bool shared_key, std::uint64_t seed) {
            CmOptions o;
            o.shared_key = shared_key;
            return lock_cm(n, {k_min, k_max}, o, seed);
        },
        py::arg("netlist"), py::arg("k_min"), py::arg("k_max"), py::arg("shared_key") = true, py::arg("seed") = 1);
    m.def("parse_key_file", &parse_key_file, py::arg("text"));

    py::class_<KeyPrediction>(m, "KeyPrediction")
        .def_readonly("key_input", &KeyPrediction::key_input)
        .def_property_readonly("value", [](const KeyPrediction& p) { return value_str(p.value); })
        .def_readonly("layers_used", &KeyPrediction::layers_used)
        .def_readonly("match_counts", &KeyPrediction::match_counts)
        .def_readonly("via_fv", &KeyPrediction::via_fv)
        .def_readonly("decided_by", &KeyPrediction::decided_by)
        .def_readonly("reason", &KeyPrediction::reason);

    py::class_<AttackReport>(m, "AttackReport")
        .def_readonly("predictions", &AttackReport::predictions)
        .def_readonly("sr", &AttackReport::sr)
        .def_readonly("wall_time", &AttackReport::wall_time)
        .def_readonly("log", &AttackReport::log)
        .def("predictions_text", &format_predictions)
        .def("to_json", &attack_report_json, py::arg("with_timing") = false);

    m.def(
        "attack",
        [](const Netlist& locked, int max_layers, unsigned workers, std::size_t max_uf_keys) {
            AttackOptions o;
            o.max_layers = max_layers;
            o.workers = workers == 0 ? workers_from_env() : workers;
            o.max_uf_keys = max_uf_keys;
            py::gil_scoped_release release;
            return tga::tga(locked, o);
        },
        py::arg("locked"), py::arg("max_layers") = 4, py::arg("workers") = 0, py::arg("max_uf_keys") = kMaxUfKeys);

    m.def(
        "score",
        [](const AttackReport& r, const std::vector<bool>& truth) {
            const auto s = score(r, truth);
            return py::dict(py::arg("sr") = s.sr, py::arg("mr") = s.mr, py::arg("x_rate") = s.x_rate);
        },
        py::arg("report"), py::arg("truth"));

    m.def(
        "check_equivalence",
        [](const Netlist& original, const Netlist& locked, const std::map<std::string, bool>& key,
           std::size_t vectors, std::uint64_t seed) {
            const auto r = check_equivalence(original, locked, key, vectors, seed);
            return py::dict(py::arg("equivalent") = r.equivalent, py::arg("exhaustive") = r.exhaustive,
                            py::arg("vectors") = r.vectors);
        },
        py::arg("original"), py::arg("locked"), py::arg("key"), py::arg("vectors") = kDefaultVectors,
        py::arg("seed") = 1);

    m.def(
        "complete_with_oracle",
        [](const Netlist& locked, const AttackReport& r, const Netlist& oracle, std::size_t vectors) {
            return complete_with_oracle(locked, r, oracle, vectors).survivors;
        },
        py::arg("locked"), py::arg("report"), py::arg("oracle"), py::arg("vectors") = kDefaultVectors);
}

#include "tga/report.hpp"

#include <json.hpp>

#include <cctype>
#include <sstream>

namespace tga {

using nlohmann::ordered_json;

std::string locked_record_json(const LockedCircuit& c) {
    ordered_json j;
    j["scheme"] = std::string(to_string(c.scheme));
    j["key_inputs"] = ordered_json::array();
    for (auto k : c.netlist.key_inputs()) j["key_inputs"].push_back(c.netlist.name(k));
    j["key_gates"] = ordered_json::array();
    for (const auto& r : c.records) {
        j["key_gates"].push_back({
            {"key_input", r.key_input},
            {"gate_id", r.gate_id},
            {"gate_type", std::string(to_string(r.gate_type))},
            {"locked_net", r.locked_net},
            {"variant", std::string(to_string(r.variant))},
            {"truth_bit", r.truth_bit ? 1 : 0},
        });
    }
    if (c.scheme == Scheme::Cm) {
        j["families"] = ordered_json::array();
        for (const auto& f : c.families) {
            ordered_json fj{
                {"fingerprint", f.fingerprint},
                {"pattern_gates", f.pattern.gate_count()},
                {"instance_roots", f.instance_roots},
                {"key_inputs", f.key_inputs},
                {"key_gates", f.key_gates},
                {"shared_key", f.shared_key},
            };
            if (!f.shared_key && f.instance_roots.size() > 1) {
                fj["note"] = "independent per-instance keys; a functional comparison of instances can separate them";
            }
            j["families"].push_back(std::move(fj));
        }
    }
    return j.dump(2) + "\n";
}

std::string format_predictions(const AttackReport& r) {
    std::ostringstream out;
    for (const auto& p : r.predictions) out << p.key_input << "=" << to_char(p.value) << "\n";
    return out.str();
}

std::vector<std::pair<std::string, KeyValue>> parse_predictions(std::string_view text) {
    std::vector<std::pair<std::string, KeyValue>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::erase_if(line, [](unsigned char ch) { return std::isspace(ch); });
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq + 2 != line.size()) throw ParseError(line_no, "expected keyinput<i>=<0|1|X>");
        const char v = line[eq + 1];
        KeyValue kv;
        if (v == '0') {
            kv = KeyValue::Zero;
        } else if (v == '1') {
            kv = KeyValue::One;
        } else if (v == 'X' || v == 'x') {
            kv = KeyValue::X;
        } else {
            throw ParseError(line_no, "expected keyinput<i>=<0|1|X>");
        }
        out.emplace_back(line.substr(0, eq), kv);
    }
    return out;
}

std::string attack_report_json(const AttackReport& r, bool with_timing) {
    ordered_json j;
    j["key_size"] = r.predictions.size();
    j["sr"] = round2(r.sr);
    j["mr"] = r.mr ? ordered_json(round2(*r.mr)) : ordered_json(nullptr);
    j["predictions"] = ordered_json::array();
    for (std::size_t i = 0; i < r.predictions.size(); ++i) {
        const auto& p = r.predictions[i];
        ordered_json pj{
            {"key_input", p.key_input},
            {"value", std::string(1, to_char(p.value))},
            {"layers_used", p.layers_used},
            {"match_counts", p.match_counts},
            {"via_fv", p.via_fv},
        };
        if (!p.decided_by.empty()) pj["decided_by"] = p.decided_by;
        if (!p.reason.empty()) pj["reason"] = p.reason;
        if (with_timing && i < r.per_key_time.size()) pj["seconds"] = r.per_key_time[i];
        j["predictions"].push_back(std::move(pj));
    }
    j["log"] = r.log;
    if (with_timing) j["wall_time"] = r.wall_time;
    return j.dump(2) + "\n";
}

AttackReport attack_report_from_json(std::string_view text) {
    const auto j = ordered_json::parse(text);
    AttackReport r;
    r.sr = j.at("sr").get<double>();
    if (!j.at("mr").is_null()) r.mr = j.at("mr").get<double>();
    for (const auto& pj : j.at("predictions")) {
        KeyPrediction p;
        p.key_input = pj.at("key_input").get<std::string>();
        const auto v = pj.at("value").get<std::string>();
        p.value = v == "0" ? KeyValue::Zero : v == "1" ? KeyValue::One : KeyValue::X;
        p.layers_used = pj.at("layers_used").get<int>();
        p.match_counts = pj.at("match_counts").get<std::vector<std::uint64_t>>();
        p.via_fv = pj.at("via_fv").get<bool>();
        p.decided_by = pj.value("decided_by", "");
        p.reason = pj.value("reason", "");
        r.predictions.push_back(std::move(p));
    }
    if (j.contains("log")) r.log = j.at("log").get<std::vector<std::string>>();
    return r;
}

}  // namespace tga

#include "tga/attack.hpp"

#include "tga/matcher.hpp"
#include "tga/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace tga {

char to_char(KeyValue v) {
    switch (v) {
        case KeyValue::Zero: return '0';
        case KeyValue::One: return '1';
        case KeyValue::X: return 'X';
    }
    return '?';
}

KeyValue key_value(bool bit) { return bit ? KeyValue::One : KeyValue::Zero; }

RuleOutcome decide_rule(const HypothesisTable& r) {
    const auto nz = r.nonzero();
    if (nz == 0) return {RuleKind::Unknown, 0};
    if (nz > 1) return {RuleKind::Escalate, 0};
    const auto it = std::find_if(r.counts.begin(), r.counts.end(), [](auto c) { return c != 0; });
    return {RuleKind::Decide, static_cast<std::size_t>(it - r.counts.begin())};
}

namespace {

// A key gate whose driver was cut off at the cone boundary looks the same
// whether or not the driver was inverted, so the cone says nothing about its bit.
bool driver_visible(const Netlist& n, const Pattern& p, NodeId slot) {
    for (auto in : p.nodes[slot].inputs) {
        const auto& d = p.nodes[in];
        if (d.key_leaf) continue;
        return !d.free || d.origin == kNoGate || !is_logic(n.gate(d.origin).type);
    }
    return false;
}

}  // namespace

PathOutcome attack_path(const Netlist& n, GateId key_gate, GateId root, int max_layers,
                        const std::vector<GateId>& exclude, std::size_t max_uf_keys) {
    PathOutcome out;
    out.key_gate = key_gate;
    out.root = root;
    std::size_t previous_size = 0;
    for (int l = 1; l <= max_layers; ++l) {
        const auto uf = unit_function_at(n, root, l);
        if (l > 1 && uf.pattern.nodes.size() == previous_size) {
            out.note = "cone stopped growing at layer " + std::to_string(l - 1) + " while ambiguous";
            return out;
        }
        previous_size = uf.pattern.nodes.size();
        if (uf.key_gates.size() > max_uf_keys) {
            out.note = "unit function at layer " + std::to_string(l) + " holds " + std::to_string(uf.key_gates.size()) +
                       " key gates, above the limit of " + std::to_string(max_uf_keys);
            return out;
        }
        const auto set = gen_eufs(n, uf);
        HypothesisTable table(uf.key_gates.size());
        for (const auto& e : set.eufs) {
            table.counts[HypothesisTable::index_of(e.hypothesis)] += fs(n, e.pattern, exclude).size();
        }
        out.layers_used = l;
        out.counts = table;
        const auto rule = decide_rule(table);
        if (rule.kind == RuleKind::Decide) {
            out.decided = true;
            const auto bits = table.combo(rule.hypothesis);
            const auto target = n.key_input_of(key_gate);
            for (std::size_t i = 0; i < uf.key_gates.size(); ++i) {
                const auto k = n.key_input_of(uf.key_gates[i]);
                if (k != target && !driver_visible(n, uf.pattern, uf.pattern.key_slots[i])) continue;
                if (std::none_of(out.implied.begin(), out.implied.end(), [&](const auto& p) { return p.first == k; })) {
                    out.implied.emplace_back(k, bits[i]);
                }
            }
            return out;
        }
        if (rule.kind == RuleKind::Unknown) {
            out.note = "no equivalent unit function found at layer " + std::to_string(l);
            return out;
        }
    }
    out.note = "several hypotheses matched up to layer " + std::to_string(max_layers);
    return out;
}

namespace {

std::vector<GateId> key_gates_of(const Netlist& n, GateId key_input) {
    std::vector<GateId> out;
    for (auto g : n.gate(key_input).fanouts) {
        if (n.is_key_gate(g)) out.push_back(g);
    }
    std::sort(out.begin(), out.end(), [&](GateId a, GateId b) { return n.name(a) < n.name(b); });
    return out;
}

// Merges decided paths: the target bit must agree, and implied bits of other
// keys survive only where every decided path that mentions them agrees.
struct Merge {
    std::optional<bool> value;
    bool conflict = false;
    std::map<GateId, std::optional<bool>> others;
};

Merge merge_paths(const std::vector<PathOutcome>& paths, GateId key_input) {
    Merge m;
    for (const auto& p : paths) {
        if (!p.decided) continue;
        for (const auto& [k, bit] : p.implied) {
            if (k == key_input) {
                if (m.value && *m.value != bit) m.conflict = true;
                m.value = bit;
            } else {
                auto [it, fresh] = m.others.emplace(k, bit);
                if (!fresh && it->second && *it->second != bit) it->second.reset();
            }
        }
    }
    return m;
}

}  // namespace

KeyAnalysis analyze_key(const Netlist& n, GateId key_input, int max_layers, std::size_t max_uf_keys) {
    const auto start = std::chrono::steady_clock::now();
    KeyAnalysis a;
    a.key_input = key_input;
    a.prediction.key_input = n.name(key_input);

    const auto gates = key_gates_of(n, key_input);
    std::vector<std::pair<GateId, GateId>> paths;
    std::vector<GateId> exclude;
    for (auto g : gates) {
        for (auto r : uf_roots(n, g)) {
            paths.emplace_back(g, r);
            exclude.push_back(r);
        }
    }
    std::sort(exclude.begin(), exclude.end());
    exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());

    if (gates.empty()) {
        a.prediction.reason = "key input drives no key gate";
    } else if (paths.empty()) {
        a.prediction.reason = "key gate feeds no logic gate";
    } else {
        std::vector<PathOutcome> outcomes;
        for (const auto& [g, r] : paths) outcomes.push_back(attack_path(n, g, r, max_layers, exclude, max_uf_keys));
        const auto m = merge_paths(outcomes, key_input);
        const PathOutcome* shown = &outcomes.back();
        for (const auto& o : outcomes) {
            if (o.decided) {
                shown = &o;
                break;
            }
        }
        a.prediction.layers_used = shown->layers_used;
        a.prediction.match_counts = shown->counts.counts;
        a.prediction.via_fv = outcomes.size() > 1;
        if (m.conflict) {
            a.prediction.reason = "paths disagree";
        } else if (m.value) {
            a.prediction.value = key_value(*m.value);
            for (const auto& [k, bit] : m.others) {
                if (bit) a.implied.emplace_back(k, *bit);
            }
        } else {
            a.prediction.reason = shown->note;
        }
    }
    a.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return a;
}

std::optional<bool> fv(const Netlist& n, GateId key_gate, int max_layers, std::size_t max_uf_keys) {
    const auto roots = uf_roots(n, key_gate);
    std::vector<PathOutcome> outcomes;
    for (auto r : roots) outcomes.push_back(attack_path(n, key_gate, r, max_layers, roots, max_uf_keys));
    const auto m = merge_paths(outcomes, n.key_input_of(key_gate));
    if (m.conflict) return std::nullopt;
    return m.value;
}

AttackReport tga(const Netlist& locked, const AttackOptions& options) {
    if (options.max_layers < 1) throw std::invalid_argument("max_layers must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const auto& keys = locked.key_inputs();
    AttackReport report;
    report.predictions.resize(keys.size());
    report.per_key_time.assign(keys.size(), 0.0);
    std::map<GateId, std::size_t> index_of;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        index_of[keys[i]] = i;
        report.predictions[i].key_input = locked.name(keys[i]);
    }

    std::vector<std::optional<KeyAnalysis>> analyses(keys.size());
    if (options.workers > 1 && keys.size() > 1) {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const auto count = std::min<std::size_t>(options.workers, keys.size());
        for (std::size_t w = 0; w < count; ++w) {
            pool.emplace_back([&] {
                for (auto i = next.fetch_add(1); i < keys.size(); i = next.fetch_add(1)) {
                    analyses[i] = analyze_key(locked, keys[i], options.max_layers, options.max_uf_keys);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<char> final_value(keys.size(), 0);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (final_value[i]) continue;
        if (!analyses[i]) analyses[i] = analyze_key(locked, keys[i], options.max_layers, options.max_uf_keys);
        const auto& a = *analyses[i];
        report.per_key_time[i] = a.seconds;
        report.predictions[i] = a.prediction;
        if (a.prediction.value == KeyValue::X) continue;
        final_value[i] = 1;
        for (const auto& [k, bit] : a.implied) {
            const auto j = index_of.at(k);
            auto& p = report.predictions[j];
            if (final_value[j]) {
                if (p.value != key_value(bit)) {
                    report.log.push_back(p.key_input + ": value implied by " + a.prediction.key_input +
                                         " conflicts with an earlier decision; kept the earlier one");
                }
                continue;
            }
            p = KeyPrediction{};
            p.key_input = locked.name(k);
            p.value = key_value(bit);
            p.layers_used = a.prediction.layers_used;
            p.match_counts = a.prediction.match_counts;
            p.via_fv = a.prediction.via_fv;
            p.decided_by = a.prediction.key_input;
            final_value[j] = 1;
        }
    }

    std::size_t definite = 0;
    for (const auto& p : report.predictions) definite += p.value != KeyValue::X;
    report.sr = keys.empty() ? 0.0 : 100.0 * static_cast<double>(definite) / static_cast<double>(keys.size());
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Score score(const AttackReport& report, const std::vector<bool>& truth) {
    if (truth.size() != report.predictions.size()) {
        throw std::invalid_argument("truth has " + std::to_string(truth.size()) + " bits, report has " +
                                    std::to_string(report.predictions.size()) + " predictions");
    }
    Score s;
    if (truth.empty()) {
        s.x_rate = 100.0;
        return s;
    }
    std::size_t definite = 0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto v = report.predictions[i].value;
        if (v == KeyValue::X) continue;
        ++definite;
        if (v != key_value(truth[i])) ++wrong;
    }
    const auto k = static_cast<double>(truth.size());
    s.sr = round2(100.0 * static_cast<double>(definite) / k);
    s.mr = round2(100.0 * static_cast<double>(wrong) / k);
    s.x_rate = round2(100.0 - s.sr);
    return s;
}

Completion complete_with_oracle(const Netlist& locked, const AttackReport& report, const Netlist& oracle,
                                std::size_t vectors, std::uint64_t seed) {
    const auto& keys = locked.key_inputs();
    if (report.predictions.size() != keys.size()) throw std::invalid_argument("report does not match the netlist");
    std::vector<std::size_t> unknown;
    std::vector<bool> base(keys.size(), false);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto v = report.predictions[i].value;
        if (v == KeyValue::X) {
            unknown.push_back(i);
        } else {
            base[i] = v == KeyValue::One;
        }
    }
    if (unknown.size() > kMaxOracleUnknowns) {
        throw std::invalid_argument(std::to_string(unknown.size()) + " unknown key bits exceed the limit of " +
                                    std::to_string(kMaxOracleUnknowns));
    }
    Completion c;
    c.unknown_bits = unknown.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << unknown.size()); ++mask) {
        auto key = base;
        for (std::size_t b = 0; b < unknown.size(); ++b) key[unknown[b]] = (mask >> b) & 1u;
        ++c.simulations;
        if (check_equivalence(oracle, locked, key_map(locked, key), vectors, seed).equivalent) {
            c.survivors.push_back(std::move(key));
        }
    }
    return c;
}

}  // namespace tga

#include "tga/countermeasure.hpp"

#include "tga/attack.hpp"
#include "tga/matcher.hpp"
#include "tga/random.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <stdexcept>

namespace tga {

KeyBudget parse_budget(std::string_view text) {
    const auto colon = text.find(':');
    auto parse = [&](std::string_view s) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
            throw std::invalid_argument("budget must look like <min>:<max>, got '" + std::string(text) + "'");
        }
        return v;
    };
    if (colon == std::string_view::npos) throw std::invalid_argument("budget must look like <min>:<max>");
    KeyBudget b{parse(text.substr(0, colon)), parse(text.substr(colon + 1))};
    if (b.k_min == 0 || b.k_min > b.k_max) throw std::invalid_argument("budget needs 0 < min <= max");
    return b;
}

FamilyKeys assign_family_keys(const UFFamily& fam, std::size_t slots, std::uint64_t seed) {
    if (fam.instance_roots.empty()) throw NetlistError("family without instances");
    Rng rng(seed);
    FamilyKeys k;
    const auto r = fam.instance_roots.size();
    k.key_inputs = fam.shared_key ? slots : r * slots;
    k.input_of.assign(r, std::vector<std::size_t>(slots));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t s = 0; s < slots; ++s) k.input_of[i][s] = fam.shared_key ? s : i * slots + s;
    }
    for (std::size_t i = 0; i < k.key_inputs; ++i) k.bits.push_back(rng.coin());
    return k;
}

bool families_covered(const LockedCircuit& locked) {
    return std::all_of(locked.families.begin(), locked.families.end(),
                       [&](const FamilyRecord& f) { return fs(locked.netlist, f.pattern).empty(); });
}

namespace {

struct Slot {
    NodeId net;
    NodeId consumer;
};

// Pins to lock inside one instance: a gate-node input of the root, plus (for
// clusters) further gate nodes up to two levels below it.
std::optional<std::vector<Slot>> choose_slots(const Pattern& p, std::size_t want, Rng& rng) {
    std::vector<Slot> direct;
    std::vector<Slot> deeper;
    std::set<NodeId> seen;
    for (auto c : p.nodes[p.root].inputs) {
        if (!p.nodes[c].free && seen.insert(c).second) direct.push_back({c, p.root});
    }
    if (direct.empty()) return std::nullopt;
    for (const auto& d : direct) {
        for (auto g : p.nodes[d.net].inputs) {
            if (!p.nodes[g].free && seen.insert(g).second) deeper.push_back({g, d.net});
        }
    }
    rng.shuffle(direct);
    std::vector<Slot> chosen{direct.front()};
    std::vector<Slot> rest(direct.begin() + 1, direct.end());
    rest.insert(rest.end(), deeper.begin(), deeper.end());
    if (want > 1) {
        if (rest.size() + 1 < want) return std::nullopt;
        rng.shuffle(rest);
        chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(want - 1));
    }
    return chosen;
}

std::vector<bool> key_from_records(const Netlist& n, const std::vector<KeyGateRecord>& records) {
    std::vector<bool> key(n.key_inputs().size(), false);
    const auto& keys = n.key_inputs();
    for (const auto& r : records) {
        const auto it = std::find(keys.begin(), keys.end(), n.id(r.key_input));
        key[static_cast<std::size_t>(it - keys.begin())] = r.truth_bit;
    }
    return key;
}

struct Attempt {
    LockedCircuit result;
    std::set<GateId> newly_banned;
    bool ok = false;
    std::string failure;
};

Attempt attempt_cm(const Netlist& original, KeyBudget budget, const CmOptions& opt, std::uint64_t seed,
                   const std::set<GateId>& banned_in) {
    Attempt a;
    auto& c = a.result;
    c.scheme = Scheme::Cm;
    c.netlist = original;
    Rng rng(seed);
    std::set<GateId> banned = banned_in;
    std::set<GateId> in_family;
    std::map<GateId, GateId> family_root_of_key;
    const std::size_t per_instance = opt.scheme == Scheme::Sll ? opt.cluster : 1;

    std::vector<GateId> roots;
    for (GateId g = 0; g < original.size(); ++g) {
        const auto& gate = original.gate(g);
        if (!is_logic(gate.type) || original.is_key_gate(g)) continue;
        if (std::any_of(gate.inputs.begin(), gate.inputs.end(),
                        [&](GateId in) { return is_logic(original.gate(in).type) && !original.is_key_gate(in); })) {
            roots.push_back(g);
        }
    }

    std::size_t inserted = 0;
    const std::size_t max_resamples = 200 + 20 * budget.k_max;
    std::size_t resamples = 0;
    while (inserted < budget.k_min) {
        std::vector<GateId> open;
        for (auto g : roots) {
            if (!banned.contains(g) && !in_family.contains(g)) open.push_back(g);
        }
        if (open.empty() || resamples++ > max_resamples) {
            a.failure = "budget infeasible: " + std::to_string(inserted) + " of " + std::to_string(budget.k_min) +
                        " key gates inserted";
            return a;
        }
        const auto root = rng.pick(open);
        const auto pattern = fanin_cone(c.netlist, root, opt.uf_layers);
        if (!pattern.key_slots.empty()) {
            banned.insert(root);
            continue;
        }
        const auto instances = fs(c.netlist, pattern).matched_roots;
        const auto cost = instances.size() * per_instance;
        if (cost > budget.k_max - inserted) continue;
        const auto slots = choose_slots(pattern, per_instance, rng);
        if (!slots) {
            banned.insert(root);
            continue;
        }

        UFFamily fam{pattern, instances, opt.shared_key};
        const auto keys = assign_family_keys(fam, per_instance, rng.next());

        Netlist trial = c.netlist;
        KeyInserter ins(trial, rng);
        std::vector<GateId> key_inputs;
        for (std::size_t i = 0; i < keys.key_inputs; ++i) key_inputs.push_back(ins.new_key_input());
        std::vector<KeyGateRecord> records;
        std::set<std::pair<GateId, GateId>> pins;
        std::set<GateId> covered;
        bool ok = true;
        for (std::size_t inst = 0; inst < instances.size() && ok; ++inst) {
            const auto e = find_embedding(c.netlist, pattern, instances[inst]);
            if (!e) {
                ok = false;
                break;
            }
            for (NodeId v = 0; v < pattern.nodes.size(); ++v) {
                if (pattern.nodes[v].free) continue;
                if (in_family.contains((*e)[v])) ok = false;
                covered.insert((*e)[v]);
            }
            if (!ok) break;
            for (std::size_t s = 0; s < slots->size(); ++s) {
                const auto net = (*e)[(*slots)[s].net];
                const auto consumer = (*e)[(*slots)[s].consumer];
                if (!pins.insert({net, consumer}).second) continue;
                const auto& in = trial.gate(consumer).inputs;
                if (std::find(in.begin(), in.end(), net) == in.end()) {
                    ok = false;
                    break;
                }
                const bool bit = keys.bits[keys.input_of[inst][s]];
                auto type = rng.coin() ? GateType::Xnor : GateType::Xor;
                if (bit != transparent_bit(type) && !ins.can_invert_driver(net, consumer)) {
                    type = type == GateType::Xor ? GateType::Xnor : GateType::Xor;
                }
                auto rec = ins.insert_as(net, key_inputs[keys.input_of[inst][s]], bit, type,
                                         Variant::PrecedingInvert1, consumer);
                if (!rec) {
                    ok = false;
                    break;
                }
                records.push_back(*rec);
            }
        }
        if (!ok || records.size() + inserted > budget.k_max) {
            banned.insert(root);
            continue;
        }
        if (!fs(trial, pattern).empty()) {
            banned.insert(root);
            continue;
        }
        const bool blind = std::all_of(key_inputs.begin(), key_inputs.end(), [&](GateId k) {
            return analyze_key(trial, k, opt.check_layers).prediction.value == KeyValue::X;
        });
        if (!blind) {
            banned.insert(root);
            continue;
        }

        c.netlist = std::move(trial);
        FamilyRecord fr;
        fr.fingerprint = pattern.fingerprint();
        fr.pattern = pattern;
        fr.shared_key = opt.shared_key;
        for (auto g : instances) fr.instance_roots.push_back(c.netlist.name(g));
        for (auto k : key_inputs) {
            fr.key_inputs.push_back(c.netlist.name(k));
            family_root_of_key[k] = root;
        }
        for (const auto& r : records) fr.key_gates.push_back(r.gate_id);
        c.families.push_back(std::move(fr));
        c.records.insert(c.records.end(), records.begin(), records.end());
        in_family.insert(covered.begin(), covered.end());
        inserted += records.size();
    }
    c.key = key_from_records(c.netlist, c.records);

    // Later families can disturb earlier ones, so the whole result is rechecked.
    if (!families_covered(c)) {
        a.failure = "a family pattern regained an unlocked instance";
        for (const auto& [k, root] : family_root_of_key) a.newly_banned.insert(root);
        return a;
    }
    AttackOptions ao;
    ao.max_layers = opt.check_layers;
    ao.workers = opt.workers;
    const auto report = tga(c.netlist, ao);
    const auto& all_keys = c.netlist.key_inputs();
    for (std::size_t i = 0; i < all_keys.size(); ++i) {
        if (report.predictions[i].value != KeyValue::X) a.newly_banned.insert(family_root_of_key.at(all_keys[i]));
    }
    if (!a.newly_banned.empty()) {
        a.failure = "the attack decided countermeasure keys";
        return a;
    }
    a.ok = true;
    return a;
}

}  // namespace

LockedCircuit lock_cm(const Netlist& n, KeyBudget budget, const CmOptions& options, std::uint64_t seed) {
    if (budget.k_min == 0 || budget.k_min > budget.k_max) throw NetlistError("budget needs 0 < k_min <= k_max");
    if (options.scheme == Scheme::Cm) throw NetlistError("countermeasure scheme must be RLL or SLL");
    if (options.scheme == Scheme::Sll && options.cluster == 0) throw NetlistError("cluster size must be positive");
    if (!n.key_inputs().empty()) throw NetlistError("netlist is already locked");
    std::set<GateId> banned;
    std::string last;
    for (int attempt = 0; attempt < std::max(1, options.max_attempts); ++attempt) {
        const auto s = seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL;
        auto a = attempt_cm(n, budget, options, s, banned);
        if (a.ok) return std::move(a.result);
        last = a.failure;
        banned.insert(a.newly_banned.begin(), a.newly_banned.end());
    }
    throw NetlistError("countermeasure failed: " + last);
}

}  // namespace tga

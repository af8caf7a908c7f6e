#include "tga/locker.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tga {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::Rll: return "RLL";
        case Scheme::Sll: return "SLL";
        case Scheme::Cm: return "CM";
    }
    return "?";
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::Passthrough0: return "PASSTHROUGH_0";
        case Variant::PrecedingInvert1: return "PRECEDING_INVERT_1";
        case Variant::Demorgan1: return "DEMORGAN_1";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view s) {
    std::string u(s);
    for (auto& c : u) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (u == "rll") return Scheme::Rll;
    if (u == "sll") return Scheme::Sll;
    if (u == "cm") return Scheme::Cm;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

void apply_demorgan_in_place(Netlist& n, GateId at, GateId key_gate, const std::function<std::string()>& fresh_name) {
    const auto dual = demorgan_dual(n.gate(at).type);
    if (!dual) {
        throw NetlistError("'" + n.name(at) + "' (" + std::string(to_string(n.gate(at).type)) +
                           ") has no DeMorgan dual");
    }
    const auto inputs = n.gate(at).inputs;
    if (std::find(inputs.begin(), inputs.end(), key_gate) == inputs.end()) {
        throw NetlistError("'" + n.name(at) + "' does not read key gate '" + n.name(key_gate) + "'");
    }
    std::set<GateId> handled;
    for (auto other : inputs) {
        if (other == key_gate || handled.contains(other)) continue;
        handled.insert(other);
        const auto& g = n.gate(other);
        const bool sole_consumer = g.fanouts.size() == 1 && g.fanouts[0] == at;
        if (sole_consumer && has_complement(g.type) && !n.is_key_gate(other) && !n.is_primary_output(other)) {
            n.set_type(other, complement(g.type));
        } else {
            const auto inv = n.add_gate(fresh_name(), GateType::Not, {other});
            n.replace_input(at, other, inv);
        }
    }
    n.set_type(at, *dual);
}

Netlist apply_demorgan(const Netlist& n, GateId at) {
    GateId key_gate = kNoGate;
    for (auto in : n.gate(at).inputs) {
        if (n.is_key_gate(in)) {
            if (key_gate != kNoGate && key_gate != in) {
                throw NetlistError("'" + n.name(at) + "' reads more than one key gate");
            }
            key_gate = in;
        }
    }
    if (key_gate == kNoGate) throw NetlistError("'" + n.name(at) + "' reads no key gate");
    Netlist out = n;
    apply_demorgan_in_place(out, at, key_gate, [&out] { return out.fresh_name("lock_g"); });
    return out;
}

std::vector<GateId> lockable_nets(const Netlist& n) {
    std::vector<GateId> out;
    for (GateId g = 0; g < n.size(); ++g) {
        const auto& gate = n.gate(g);
        if (!is_logic(gate.type) || n.is_primary_output(g) || n.is_key_gate(g) || gate.fanouts.empty()) continue;
        out.push_back(g);
    }
    return out;
}

// ---------------------------------------------------------------------------

GateId KeyInserter::new_key_input() {
    auto k = n_.key_inputs().size();
    std::string name;
    do {
        name = std::string(kKeyInputPrefix) + std::to_string(k++);
    } while (n_.find(name));
    return n_.add_input(std::move(name));
}

std::string KeyInserter::fresh_lock_name() { return n_.fresh_name("lock_g"); }

bool KeyInserter::can_invert_driver(GateId net, GateId consumer) const {
    const auto& g = n_.gate(net);
    if (!has_complement(g.type) || n_.is_key_gate(net) || n_.is_primary_output(net)) return false;
    if (consumer == kNoGate) return true;
    return g.fanouts.size() == 1 && g.fanouts[0] == consumer;
}

bool KeyInserter::can_demorgan(GateId net, GateId consumer) const {
    GateId succ = consumer;
    if (succ == kNoGate) {
        const auto& fo = n_.gate(net).fanouts;
        if (fo.size() != 1) return false;
        succ = fo[0];
    }
    const auto& s = n_.gate(succ);
    if (!demorgan_dual(s.type)) return false;
    if (std::count(s.inputs.begin(), s.inputs.end(), net) != 1) return false;
    return std::none_of(s.inputs.begin(), s.inputs.end(),
                        [&](GateId in) { return in != net && n_.is_key_gate(in); });
}

std::optional<KeyGateRecord> KeyInserter::insert(GateId net, GateId key_input, bool bit, GateId consumer) {
    const auto type = rng_.coin() ? GateType::Xnor : GateType::Xor;
    const auto preferred = rng_.coin() ? Variant::Demorgan1 : Variant::PrecedingInvert1;
    return insert_as(net, key_input, bit, type, preferred, consumer);
}

std::optional<KeyGateRecord> KeyInserter::insert_as(GateId net, GateId key_input, bool bit, GateType type,
                                                    Variant preferred, GateId consumer) {
    if (!is_xor_family(type)) throw NetlistError("key gates are XOR or XNOR");
    if (consumer != kNoGate) {
        const auto& fo = n_.gate(net).fanouts;
        if (std::find(fo.begin(), fo.end(), consumer) == fo.end()) {
            throw NetlistError("'" + n_.name(consumer) + "' does not read '" + n_.name(net) + "'");
        }
    }
    Variant variant = Variant::Passthrough0;
    if (bit != transparent_bit(type)) {
        const bool invert_ok = can_invert_driver(net, consumer);
        const bool demorgan_ok = can_demorgan(net, consumer);
        if (!invert_ok && !demorgan_ok) return std::nullopt;
        if (preferred == Variant::Demorgan1) {
            variant = demorgan_ok ? Variant::Demorgan1 : Variant::PrecedingInvert1;
        } else {
            variant = invert_ok ? Variant::PrecedingInvert1 : Variant::Demorgan1;
        }
    }

    const auto successor = consumer != kNoGate ? consumer : n_.gate(net).fanouts.front();
    const auto kg = n_.add_gate(fresh_lock_name(), type, {net, key_input});
    if (consumer != kNoGate) {
        n_.replace_input(consumer, net, kg);
    } else {
        n_.move_fanouts(net, kg, kg);
    }

    if (variant == Variant::PrecedingInvert1) {
        n_.set_type(net, complement(n_.gate(net).type));
    } else if (variant == Variant::Demorgan1) {
        apply_demorgan_in_place(n_, successor, kg, [this] { return fresh_lock_name(); });
    }

    KeyGateRecord rec;
    rec.key_input = n_.name(key_input);
    rec.gate_id = n_.name(kg);
    rec.gate_type = type;
    rec.locked_net = n_.name(net);
    rec.variant = variant;
    rec.truth_bit = bit;
    return rec;
}

// ---------------------------------------------------------------------------

namespace {

void finish(LockedCircuit& c, const std::vector<KeyGateRecord>& records) {
    c.records = records;
    c.key.assign(c.netlist.key_inputs().size(), false);
    for (const auto& r : records) {
        const auto& keys = c.netlist.key_inputs();
        auto it = std::find(keys.begin(), keys.end(), c.netlist.id(r.key_input));
        c.key[static_cast<std::size_t>(it - keys.begin())] = r.truth_bit;
    }
}

// Places one key gate on a net from `pool`, trying nets in random order.
bool place_one(KeyInserter& ins, Rng& rng, std::vector<GateId>& pool, std::set<GateId>& used, Netlist& n,
               std::vector<KeyGateRecord>& records) {
    while (!pool.empty()) {
        const auto idx = rng.below(pool.size());
        const auto net = pool[idx];
        pool[idx] = pool.back();
        pool.pop_back();
        if (used.contains(net)) continue;
        const bool bit = rng.coin();
        const auto key = ins.new_key_input();
        auto rec = ins.insert(net, key, bit);
        if (!rec) {
            throw NetlistError("no legal variant for net '" + n.name(net) + "'");
        }
        used.insert(net);
        records.push_back(*rec);
        return true;
    }
    return false;
}

}  // namespace

LockedCircuit lock_rll(const Netlist& original, std::size_t key_size, std::uint64_t seed) {
    LockedCircuit c;
    c.scheme = Scheme::Rll;
    c.netlist = original;
    auto pool = lockable_nets(original);
    if (key_size > pool.size()) {
        throw NetlistError("key size " + std::to_string(key_size) + " exceeds the " + std::to_string(pool.size()) +
                           " lockable nets");
    }
    Rng rng(seed);
    KeyInserter ins(c.netlist, rng);
    std::set<GateId> used;
    std::vector<KeyGateRecord> records;
    for (std::size_t i = 0; i < key_size; ++i) place_one(ins, rng, pool, used, c.netlist, records);
    finish(c, records);
    return c;
}

LockedCircuit lock_sll(const Netlist& original, std::size_t key_size, std::size_t cluster, std::uint64_t seed) {
    if (cluster == 0) throw NetlistError("cluster size must be positive");
    if (cluster == 1) {
        auto c = lock_rll(original, key_size, seed);
        c.scheme = Scheme::Sll;
        return c;
    }
    LockedCircuit c;
    c.scheme = Scheme::Sll;
    c.netlist = original;
    const auto lockable = lockable_nets(original);
    if (key_size > lockable.size()) {
        throw NetlistError("key size " + std::to_string(key_size) + " exceeds the " +
                           std::to_string(lockable.size()) + " lockable nets");
    }
    const std::set<GateId> lockable_set(lockable.begin(), lockable.end());
    std::vector<GateId> sinks;
    for (GateId g = 0; g < original.size(); ++g) {
        if (is_logic(original.gate(g).type) && original.gate(g).inputs.size() >= 2) sinks.push_back(g);
    }
    if (sinks.empty()) throw NetlistError("no multi-input gate to cluster key gates around");

    Rng rng(seed);
    KeyInserter ins(c.netlist, rng);
    std::set<GateId> used;
    std::vector<KeyGateRecord> records;
    constexpr std::size_t kMaxRetries = 10000;

    std::size_t remaining = key_size;
    while (remaining > 0) {
        const auto want = std::min(cluster, remaining);
        bool placed = false;
        for (std::size_t attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
            // Candidate nets converge on `sink` within two levels of the
            // original netlist: its direct fanins, then theirs.
            const auto sink = rng.pick(sinks);
            std::vector<GateId> near;
            auto consider = [&](GateId g) {
                if (lockable_set.contains(g) && !used.contains(g) &&
                    std::find(near.begin(), near.end(), g) == near.end()) {
                    near.push_back(g);
                }
            };
            for (auto a : original.gate(sink).inputs) consider(a);
            if (near.empty()) continue;  // the first stage must feed the sink directly
            for (auto a : original.gate(sink).inputs) {
                if (!is_logic(original.gate(a).type)) continue;
                for (auto b : original.gate(a).inputs) consider(b);
            }
            if (near.size() < want) continue;
            // Always include one direct fanin so the cluster reaches the sink.
            std::vector<GateId> direct, rest;
            for (auto g : near) {
                const auto& in = original.gate(sink).inputs;
                (std::find(in.begin(), in.end(), g) != in.end() ? direct : rest).push_back(g);
            }
            rng.shuffle(direct);
            rng.shuffle(rest);
            std::vector<GateId> chosen{direct.front()};
            direct.erase(direct.begin());
            direct.insert(direct.end(), rest.begin(), rest.end());
            rng.shuffle(direct);
            for (std::size_t i = 0; chosen.size() < want; ++i) chosen.push_back(direct[i]);
            for (auto net : chosen) {
                const bool bit = rng.coin();
                const auto key = ins.new_key_input();
                auto rec = ins.insert(net, key, bit);
                if (!rec) throw NetlistError("no legal variant for net '" + c.netlist.name(net) + "'");
                used.insert(net);
                records.push_back(*rec);
            }
            placed = true;
        }
        if (!placed) {
            throw NetlistError("no convergent site for a cluster of " + std::to_string(want) + " after " +
                               std::to_string(kMaxRetries) + " retries");
        }
        remaining -= want;
    }
    finish(c, records);
    return c;
}

// ---------------------------------------------------------------------------

std::string format_key_file(const LockedCircuit& c) {
    std::ostringstream out;
    const auto& keys = c.netlist.key_inputs();
    for (std::size_t i = 0; i < keys.size(); ++i) out << c.netlist.name(keys[i]) << "=" << (c.key[i] ? 1 : 0) << "\n";
    return out.str();
}

std::vector<std::pair<std::string, bool>> parse_key_file(std::string_view text) {
    std::vector<std::pair<std::string, bool>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); }),
                   line.end());
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq + 2 != line.size() || (line[eq + 1] != '0' && line[eq + 1] != '1')) {
            throw ParseError(line_no, "expected keyinput<i>=<0|1>");
        }
        out.emplace_back(line.substr(0, eq), line[eq + 1] == '1');
    }
    return out;
}

}  // namespace tga

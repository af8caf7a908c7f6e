#include "tga/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

namespace tga {

namespace {

constexpr std::array<std::string_view, kGateTypeCount> kNames = {
    "INPUT", "AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUFF", "DFF",
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(GateType type) { return kNames[static_cast<std::size_t>(type)]; }

std::optional<GateType> gate_type_from_keyword(std::string_view keyword) {
    const auto k = upper(keyword);
    if (k == "BUF") return GateType::Buf;
    if (k == "NXOR") return GateType::Xnor;
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (k == kNames[i] && i != static_cast<std::size_t>(GateType::Input)) {
            return static_cast<GateType>(i);
        }
    }
    return std::nullopt;
}

GateType complement(GateType t) {
    switch (t) {
        case GateType::And: return GateType::Nand;
        case GateType::Nand: return GateType::And;
        case GateType::Or: return GateType::Nor;
        case GateType::Nor: return GateType::Or;
        case GateType::Xor: return GateType::Xnor;
        case GateType::Xnor: return GateType::Xor;
        case GateType::Not: return GateType::Buf;
        case GateType::Buf: return GateType::Not;
        default: throw NetlistError("gate type " + std::string(to_string(t)) + " has no complement");
    }
}

std::optional<GateType> demorgan_dual(GateType t) {
    switch (t) {
        case GateType::And: return GateType::Nor;
        case GateType::Nand: return GateType::Or;
        case GateType::Or: return GateType::Nand;
        case GateType::Nor: return GateType::And;
        default: return std::nullopt;
    }
}

bool arity_ok(GateType t, std::size_t n) {
    if (t == GateType::Input) return n == 0;
    if (is_unary(t)) return n == 1;
    return n >= 2;
}

std::uint64_t evaluate(GateType t, std::span<const std::uint64_t> in) {
    std::uint64_t acc = 0;
    switch (t) {
        case GateType::And:
        case GateType::Nand:
            acc = ~std::uint64_t{0};
            for (auto w : in) acc &= w;
            return t == GateType::And ? acc : ~acc;
        case GateType::Or:
        case GateType::Nor:
            for (auto w : in) acc |= w;
            return t == GateType::Or ? acc : ~acc;
        case GateType::Xor:
        case GateType::Xnor:
            for (auto w : in) acc ^= w;
            return t == GateType::Xor ? acc : ~acc;
        case GateType::Not: return ~in[0];
        case GateType::Buf:
        case GateType::Dff: return in[0];
        case GateType::Input: break;
    }
    throw NetlistError("cannot evaluate an INPUT");
}

bool is_key_input_name(std::string_view name) { return name.starts_with(kKeyInputPrefix); }

// ---------------------------------------------------------------------------
// Netlist

GateId Netlist::push(std::string name, GateType type) {
    if (by_name_.contains(name)) throw NetlistError("duplicate definition of signal '" + name + "'");
    const auto id = static_cast<GateId>(gates_.size());
    by_name_.emplace(name, id);
    gates_.push_back(Gate{std::move(name), type, {}, {}});
    po_flag_.push_back(0);
    key_flag_.push_back(0);
    type_index_[static_cast<std::size_t>(type)].push_back(id);
    return id;
}

GateId Netlist::add_input(std::string name) {
    const bool key = is_key_input_name(name);
    const auto id = push(std::move(name), GateType::Input);
    primary_inputs_.push_back(id);
    if (key) {
        key_inputs_.push_back(id);
        key_flag_[id] = 1;
    }
    return id;
}

GateId Netlist::add_gate(std::string name, GateType type, std::vector<GateId> inputs) {
    if (type == GateType::Input) throw NetlistError("use add_input for primary inputs");
    if (!arity_ok(type, inputs.size())) {
        throw NetlistError("arity violation: " + std::string(to_string(type)) + " '" + name +
                           "' with " + std::to_string(inputs.size()) + " input(s)");
    }
    for (auto in : inputs) {
        if (in >= gates_.size()) throw NetlistError("gate '" + name + "' references an undefined signal");
    }
    const auto id = push(std::move(name), type);
    for (auto in : inputs) {
        auto& fo = gates_[in].fanouts;
        if (std::find(fo.begin(), fo.end(), id) == fo.end()) fo.push_back(id);
    }
    gates_[id].inputs = std::move(inputs);
    return id;
}

void Netlist::add_output(GateId id) {
    if (id >= gates_.size()) throw NetlistError("output references an undefined signal");
    if (po_flag_[id]) return;
    po_flag_[id] = 1;
    primary_outputs_.push_back(id);
}

void Netlist::index_remove(GateType t, GateId id) {
    auto& v = type_index_[static_cast<std::size_t>(t)];
    v.erase(std::find(v.begin(), v.end(), id));
}

void Netlist::set_type(GateId id, GateType type) {
    auto& g = gates_.at(id);
    if (g.type == GateType::Input || type == GateType::Input) {
        throw NetlistError("cannot retype primary input '" + g.name + "'");
    }
    if (!arity_ok(type, g.inputs.size())) {
        throw NetlistError("arity violation retyping '" + g.name + "' to " + std::string(to_string(type)));
    }
    if (g.type == type) return;
    index_remove(g.type, id);
    g.type = type;
    type_index_[static_cast<std::size_t>(type)].push_back(id);
}

void Netlist::replace_input(GateId gate, GateId from, GateId to) {
    auto& g = gates_.at(gate);
    bool hit = false;
    for (auto& in : g.inputs) {
        if (in == from) {
            in = to;
            hit = true;
        }
    }
    if (!hit) return;
    auto& old_fo = gates_[from].fanouts;
    old_fo.erase(std::remove(old_fo.begin(), old_fo.end(), gate), old_fo.end());
    auto& new_fo = gates_.at(to).fanouts;
    if (std::find(new_fo.begin(), new_fo.end(), gate) == new_fo.end()) new_fo.push_back(gate);
}

void Netlist::move_fanouts(GateId from, GateId to, GateId keep) {
    const auto consumers = gates_.at(from).fanouts;
    for (auto c : consumers) {
        if (c != keep) replace_input(c, from, to);
    }
}

std::optional<GateId> Netlist::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

GateId Netlist::id(std::string_view name) const {
    auto found = find(name);
    if (!found) throw NetlistError("unknown signal '" + std::string(name) + "'");
    return *found;
}

std::vector<GateId> Netlist::data_inputs() const {
    std::vector<GateId> out;
    for (auto pi : primary_inputs_) {
        if (!key_flag_[pi]) out.push_back(pi);
    }
    return out;
}

GateId Netlist::key_input_of(GateId g) const {
    const auto& gate = gates_.at(g);
    if (!is_xor_family(gate.type) || gate.inputs.size() != 2) return kNoGate;
    const bool k0 = key_flag_[gate.inputs[0]];
    const bool k1 = key_flag_[gate.inputs[1]];
    if (k0 == k1) return kNoGate;
    return k0 ? gate.inputs[0] : gate.inputs[1];
}

bool Netlist::is_key_gate(GateId g) const { return key_input_of(g) != kNoGate; }

GateId Netlist::locked_net_of(GateId g) const {
    const auto key = key_input_of(g);
    if (key == kNoGate) return kNoGate;
    const auto& in = gates_[g].inputs;
    return in[0] == key ? in[1] : in[0];
}

std::vector<GateId> Netlist::key_gates() const {
    std::vector<GateId> out;
    for (GateId g = 0; g < gates_.size(); ++g) {
        if (is_key_gate(g)) out.push_back(g);
    }
    return out;
}

std::vector<GateId> Netlist::combinational_inputs() const {
    std::vector<GateId> out = primary_inputs_;
    const auto& dffs = gates_of_type(GateType::Dff);
    std::vector<GateId> sorted(dffs.begin(), dffs.end());
    std::sort(sorted.begin(), sorted.end());
    out.insert(out.end(), sorted.begin(), sorted.end());
    return out;
}

std::vector<GateId> Netlist::combinational_outputs() const {
    std::vector<GateId> out = primary_outputs_;
    const auto& dffs = gates_of_type(GateType::Dff);
    std::vector<GateId> sorted(dffs.begin(), dffs.end());
    std::sort(sorted.begin(), sorted.end());
    for (auto d : sorted) out.push_back(gates_[d].inputs[0]);
    return out;
}

std::vector<GateId> Netlist::topological_order() const {
    const auto n = gates_.size();
    std::vector<std::size_t> pending(n, 0);
    auto cmp = [this](GateId a, GateId b) { return gates_[a].name > gates_[b].name; };
    std::priority_queue<GateId, std::vector<GateId>, decltype(cmp)> ready(cmp);
    for (GateId g = 0; g < n; ++g) {
        const auto& gate = gates_[g];
        if (gate.type == GateType::Input || gate.type == GateType::Dff) {
            ready.push(g);
            continue;
        }
        std::set<GateId> distinct(gate.inputs.begin(), gate.inputs.end());
        pending[g] = distinct.size();
        if (pending[g] == 0) ready.push(g);
    }
    std::vector<GateId> order;
    order.reserve(n);
    while (!ready.empty()) {
        const auto g = ready.top();
        ready.pop();
        order.push_back(g);
        for (auto f : gates_[g].fanouts) {
            if (gates_[f].type == GateType::Dff) continue;
            if (--pending[f] == 0) ready.push(f);
        }
    }
    if (order.size() != n) {
        for (GateId g = 0; g < n; ++g) {
            if (pending[g] != 0) {
                throw NetlistError("combinational cycle through signal '" + gates_[g].name + "'");
            }
        }
    }
    return order;
}

void Netlist::validate() const {
    std::size_t indexed = 0;
    for (std::size_t t = 0; t < kGateTypeCount; ++t) {
        for (auto id : type_index_[t]) {
            if (static_cast<std::size_t>(gates_.at(id).type) != t) {
                throw NetlistError("type index out of sync at '" + gates_[id].name + "'");
            }
        }
        indexed += type_index_[t].size();
    }
    if (indexed != gates_.size()) throw NetlistError("type index does not cover every gate");

    std::vector<std::set<GateId>> expected(gates_.size());
    for (GateId g = 0; g < gates_.size(); ++g) {
        const auto& gate = gates_[g];
        if (!arity_ok(gate.type, gate.inputs.size())) {
            throw NetlistError("arity violation at '" + gate.name + "'");
        }
        for (auto in : gate.inputs) {
            if (in >= gates_.size()) throw NetlistError("dangling input at '" + gate.name + "'");
            expected[in].insert(g);
        }
        if (by_name_.at(gate.name) != g) throw NetlistError("name table out of sync at '" + gate.name + "'");
    }
    for (GateId g = 0; g < gates_.size(); ++g) {
        std::set<GateId> actual(gates_[g].fanouts.begin(), gates_[g].fanouts.end());
        if (actual.size() != gates_[g].fanouts.size() || actual != expected[g]) {
            throw NetlistError("fanout list inconsistent at '" + gates_[g].name + "'");
        }
    }
    for (auto k : key_inputs_) {
        if (gates_[k].type != GateType::Input || !is_key_input_name(gates_[k].name)) {
            throw NetlistError("bad key input '" + gates_[k].name + "'");
        }
    }
    (void)topological_order();
}

std::string Netlist::fresh_name(std::string_view prefix) {
    auto& k = fresh_counter_[std::string(prefix)];
    for (;; ++k) {
        std::string candidate = std::string(prefix) + std::to_string(k);
        if (!by_name_.contains(candidate)) {
            ++k;
            return candidate;
        }
    }
}

// ---------------------------------------------------------------------------
// .bench I/O

namespace {

struct Definition {
    std::string name;
    GateType type;
    std::vector<std::string> inputs;
    std::size_t line;
};

std::vector<std::string> split_args(std::string_view args, std::size_t line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= args.size()) {
        auto comma = args.find(',', start);
        if (comma == std::string_view::npos) comma = args.size();
        auto tok = trim(args.substr(start, comma - start));
        if (tok.empty()) {
            if (!(out.empty() && comma == args.size())) throw ParseError(line, "empty signal name");
        } else {
            out.emplace_back(tok);
        }
        start = comma + 1;
    }
    return out;
}

// Splits `KEYWORD(args)` into keyword and argument text.
bool split_call(std::string_view s, std::string_view& keyword, std::string_view& args) {
    auto open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')') return false;
    keyword = trim(s.substr(0, open));
    args = s.substr(open + 1, s.size() - open - 2);
    return true;
}

}  // namespace

Netlist parse_bench(std::string_view text) {
    std::vector<std::pair<std::string, std::size_t>> inputs;
    std::vector<std::pair<std::string, std::size_t>> outputs;
    std::vector<Definition> defs;
    std::unordered_map<std::string, std::size_t> defined_at;

    auto define = [&](const std::string& name, std::size_t line) {
        auto [it, fresh] = defined_at.emplace(name, line);
        if (!fresh) {
            throw ParseError(line, "duplicate definition of '" + name + "' (first defined on line " +
                                       std::to_string(it->second) + ")");
        }
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        auto raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto line = trim(raw);
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }

        std::string_view keyword, args;
        if (auto eq = line.find('='); eq != std::string_view::npos) {
            auto lhs = trim(line.substr(0, eq));
            auto rhs = trim(line.substr(eq + 1));
            if (lhs.empty()) throw ParseError(line_no, "missing signal name before '='");
            if (!split_call(rhs, keyword, args)) throw ParseError(line_no, "expected GATE(inputs...)");
            auto type = gate_type_from_keyword(keyword);
            if (!type) throw ParseError(line_no, "unknown gate type '" + std::string(keyword) + "'");
            auto ins = split_args(args, line_no);
            if (!arity_ok(*type, ins.size())) {
                throw ParseError(line_no, "arity violation: " + std::string(to_string(*type)) + " '" +
                                              std::string(lhs) + "' has " + std::to_string(ins.size()) +
                                              " input(s)");
            }
            define(std::string(lhs), line_no);
            defs.push_back(Definition{std::string(lhs), *type, std::move(ins), line_no});
        } else {
            if (!split_call(line, keyword, args)) throw ParseError(line_no, "unrecognized statement");
            auto k = upper(keyword);
            auto name = std::string(trim(args));
            if (name.empty() || name.find(',') != std::string::npos) {
                throw ParseError(line_no, "expected a single signal name");
            }
            if (k == "INPUT") {
                define(name, line_no);
                inputs.emplace_back(std::move(name), line_no);
            } else if (k == "OUTPUT") {
                outputs.emplace_back(std::move(name), line_no);
            } else {
                throw ParseError(line_no, "unknown declaration '" + std::string(keyword) + "'");
            }
        }
        if (eol == text.size()) break;
    }

    Netlist n;
    for (auto& [name, line] : inputs) n.add_input(name);

    // Gates may reference signals defined later in the file, so resolve in
    // dependency order: DFS over definitions, breaking at DFFs.
    std::unordered_map<std::string, std::size_t> def_index;
    for (std::size_t i = 0; i < defs.size(); ++i) def_index.emplace(defs[i].name, i);
    for (const auto& d : defs) {
        for (const auto& in : d.inputs) {
            if (!defined_at.contains(in)) {
                throw ParseError(d.line, "reference to undefined signal '" + in + "' in '" + d.name + "'");
            }
        }
    }

    // Placeholder-free construction: gates are created in file order after a
    // topological pre-pass so that every input id exists at creation time.
    std::vector<int> state(defs.size(), 0);  // 0 new, 1 on stack, 2 placed
    std::vector<std::size_t> order;
    order.reserve(defs.size());
    std::vector<std::size_t> deferred_dffs;
    for (std::size_t root = 0; root < defs.size(); ++root) {
        if (state[root] != 0) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        state[root] = 1;
        while (!stack.empty()) {
            auto& [cur, next] = stack.back();
            const auto& d = defs[cur];
            if (d.type == GateType::Dff || next == d.inputs.size()) {
                state[cur] = 2;
                order.push_back(cur);
                stack.pop_back();
                continue;
            }
            const auto& in = d.inputs[next++];
            auto it = def_index.find(in);
            if (it == def_index.end()) continue;  // primary input
            const auto dep = it->second;
            if (state[dep] == 1) {
                throw ParseError(defs[dep].line, "combinational cycle through signal '" + defs[dep].name + "'");
            }
            if (state[dep] == 0) {
                state[dep] = 1;
                stack.emplace_back(dep, 0);
            }
        }
    }

    // DFFs are created with a placeholder input and wired once their driver exists.
    std::vector<std::pair<GateId, std::size_t>> dff_fixups;
    for (auto idx : order) {
        const auto& d = defs[idx];
        std::vector<GateId> ins;
        if (d.type == GateType::Dff) {
            auto driver = n.find(d.inputs[0]);
            if (!driver) {
                if (n.empty()) throw ParseError(d.line, "DFF '" + d.name + "' precedes every other signal");
                dff_fixups.emplace_back(static_cast<GateId>(n.size()), idx);
                ins.push_back(0);  // rewired below
            } else {
                ins.push_back(*driver);
            }
        } else {
            for (const auto& in : d.inputs) ins.push_back(n.id(in));
        }
        n.add_gate(d.name, d.type, std::move(ins));
    }
    for (auto [dff, idx] : dff_fixups) {
        const auto placeholder = n.gate(dff).inputs[0];
        n.replace_input(dff, placeholder, n.id(defs[idx].inputs[0]));
    }

    for (auto& [name, line] : outputs) {
        auto id = n.find(name);
        if (!id) throw ParseError(line, "OUTPUT references undefined signal '" + name + "'");
        n.add_output(*id);
    }
    return n;
}

Netlist read_bench_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetlistError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_bench(buf.str());
}

std::string write_bench(const Netlist& n) {
    std::ostringstream out;
    for (auto pi : n.primary_inputs()) out << "INPUT(" << n.name(pi) << ")\n";
    for (auto po : n.primary_outputs()) out << "OUTPUT(" << n.name(po) << ")\n";
    if (n.logic_gate_count() > 0) out << "\n";
    for (auto g : n.topological_order()) {
        const auto& gate = n.gate(g);
        if (gate.type == GateType::Input) continue;
        out << gate.name << " = " << to_string(gate.type) << "(";
        for (std::size_t i = 0; i < gate.inputs.size(); ++i) {
            if (i) out << ", ";
            out << n.name(gate.inputs[i]);
        }
        out << ")\n";
    }
    return out.str();
}

void write_bench_file(const Netlist& n, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NetlistError("cannot write '" + path + "'");
    out << write_bench(n);
}

// ---------------------------------------------------------------------------
// Simulation

Simulator::Simulator(const Netlist& n)
    : netlist_(&n), inputs_(n.combinational_inputs()), outputs_(n.combinational_outputs()) {
    for (auto g : n.topological_order()) {
        const auto t = n.gate(g).type;
        if (t != GateType::Input && t != GateType::Dff) order_.push_back(g);
    }
}

std::vector<std::uint64_t> Simulator::run(std::span<const std::uint64_t> in) const {
    if (in.size() != inputs_.size()) throw NetlistError("simulator input width mismatch");
    std::vector<std::uint64_t> value(netlist_->size(), 0);
    for (std::size_t i = 0; i < inputs_.size(); ++i) value[inputs_[i]] = in[i];
    std::vector<std::uint64_t> scratch;
    for (auto g : order_) {
        const auto& gate = netlist_->gate(g);
        scratch.clear();
        for (auto src : gate.inputs) scratch.push_back(value[src]);
        value[g] = evaluate(gate.type, scratch);
    }
    std::vector<std::uint64_t> out;
    out.reserve(outputs_.size());
    for (auto o : outputs_) out.push_back(value[o]);
    return out;
}

std::map<std::string, bool> simulate(const Netlist& n, const SimVector& v) {
    Simulator sim(n);
    std::vector<std::uint64_t> words;
    for (auto src : sim.inputs()) {
        const auto& name = n.name(src);
        const auto& primary = n.is_key_input(src) ? v.key_assignment : v.assignment;
        const auto& secondary = n.is_key_input(src) ? v.assignment : v.key_assignment;
        auto it = primary.find(name);
        if (it == primary.end()) {
            it = secondary.find(name);
            if (it == secondary.end()) throw NetlistError("missing assignment for signal '" + name + "'");
        }
        words.push_back(it->second ? 1 : 0);
    }
    auto result = sim.run(words);
    std::map<std::string, bool> out;
    for (std::size_t i = 0; i < result.size(); ++i) out[n.name(sim.outputs()[i])] = (result[i] & 1) != 0;
    return out;
}

}  // namespace tga

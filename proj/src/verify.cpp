#include "tga/verify.hpp"

#include "tga/random.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

namespace tga {

namespace {

// DFF pseudo-outputs are labelled by the DFF, so rewiring its data input
// through a key gate keeps the label stable.
std::vector<std::string> output_labels(const Netlist& n) {
    std::vector<std::string> labels;
    for (auto po : n.primary_outputs()) labels.push_back(n.name(po));
    std::vector<GateId> dffs(n.gates_of_type(GateType::Dff).begin(), n.gates_of_type(GateType::Dff).end());
    std::sort(dffs.begin(), dffs.end());
    for (auto d : dffs) labels.push_back("D:" + n.name(d));
    return labels;
}

}  // namespace

std::map<std::string, bool> key_map(const Netlist& locked, const std::vector<bool>& bits) {
    const auto& keys = locked.key_inputs();
    if (bits.size() != keys.size()) {
        throw NetlistError("key has " + std::to_string(bits.size()) + " bits, netlist has " +
                           std::to_string(keys.size()) + " key inputs");
    }
    std::map<std::string, bool> out;
    for (std::size_t i = 0; i < keys.size(); ++i) out[locked.name(keys[i])] = bits[i];
    return out;
}

EquivalenceResult check_equivalence(const Netlist& original, const Netlist& locked,
                                    const std::map<std::string, bool>& key, std::size_t vectors,
                                    std::uint64_t seed) {
    const Simulator ref(original);
    const Simulator dut(locked);

    // Shared data sources, in the reference's order.
    std::vector<std::string> sources;
    for (auto g : ref.inputs()) {
        if (original.is_key_input(g)) throw InterfaceMismatch("reference netlist has key inputs");
        sources.push_back(original.name(g));
    }
    std::unordered_map<std::string, std::size_t> src_index;
    for (std::size_t i = 0; i < sources.size(); ++i) src_index[sources[i]] = i;
    for (auto g : dut.inputs()) {
        if (locked.is_key_input(g)) {
            if (!key.contains(locked.name(g))) throw NetlistError("missing assignment for signal '" + locked.name(g) + "'");
            continue;
        }
        if (!src_index.contains(locked.name(g))) {
            throw InterfaceMismatch("input '" + locked.name(g) + "' is not an input of the reference");
        }
    }
    if (dut.inputs().size() - locked.key_inputs().size() != sources.size()) {
        throw InterfaceMismatch("input sets differ");
    }
    const auto ref_labels = output_labels(original);
    const auto dut_labels = output_labels(locked);
    std::unordered_map<std::string, std::size_t> dut_out;
    for (std::size_t i = 0; i < dut_labels.size(); ++i) dut_out[dut_labels[i]] = i;
    std::vector<std::size_t> out_map;
    for (const auto& label : ref_labels) {
        auto it = dut_out.find(label);
        if (it == dut_out.end()) throw InterfaceMismatch("output '" + label + "' missing from the locked netlist");
        out_map.push_back(it->second);
    }
    if (dut_labels.size() != ref_labels.size()) throw InterfaceMismatch("output sets differ");

    EquivalenceResult result;
    result.exhaustive = sources.size() <= kExhaustiveInputLimit;
    const std::size_t rows = result.exhaustive ? (std::size_t{1} << sources.size()) : vectors;
    result.vectors = rows;
    Rng rng(seed);

    std::vector<std::uint64_t> ref_in(sources.size());
    std::vector<std::uint64_t> dut_in(dut.inputs().size());
    for (std::size_t base = 0; base < rows; base += 64) {
        const std::size_t width = std::min<std::size_t>(64, rows - base);
        const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
        for (std::size_t i = 0; i < sources.size(); ++i) {
            if (result.exhaustive) {
                std::uint64_t w = 0;
                for (std::size_t r = 0; r < width; ++r) w |= std::uint64_t{((base + r) >> i) & 1u} << r;
                ref_in[i] = w;
            } else {
                ref_in[i] = rng.next();
            }
        }
        for (std::size_t i = 0; i < dut_in.size(); ++i) {
            const auto g = dut.inputs()[i];
            if (locked.is_key_input(g)) {
                dut_in[i] = key.at(locked.name(g)) ? ~std::uint64_t{0} : 0;
            } else {
                dut_in[i] = ref_in[src_index.at(locked.name(g))];
            }
        }
        const auto want = ref.run(ref_in);
        const auto got = dut.run(dut_in);
        for (std::size_t o = 0; o < want.size(); ++o) {
            const auto diff = (want[o] ^ got[out_map[o]]) & mask;
            if (!diff) continue;
            const auto row = static_cast<unsigned>(std::countr_zero(diff));
            Counterexample cex;
            for (std::size_t i = 0; i < sources.size(); ++i) cex.inputs[sources[i]] = (ref_in[i] >> row) & 1u;
            cex.output = ref_labels[o];
            cex.expected = (want[o] >> row) & 1u;
            cex.actual = (got[out_map[o]] >> row) & 1u;
            result.equivalent = false;
            result.counterexample = std::move(cex);
            return result;
        }
    }
    return result;
}

}  // namespace tga

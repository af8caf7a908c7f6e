#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tga {

enum class GateType : std::uint8_t {
    Input,
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Dff,
};

inline constexpr std::size_t kGateTypeCount = 10;

std::string_view to_string(GateType type);

/// Case-insensitive `.bench` keyword lookup (`BUFF` and `BUF` both map to Buf).
std::optional<GateType> gate_type_from_keyword(std::string_view keyword);

constexpr bool is_unary(GateType t) {
    return t == GateType::Not || t == GateType::Buf || t == GateType::Dff;
}

constexpr bool is_logic(GateType t) { return t != GateType::Input && t != GateType::Dff; }

constexpr bool is_xor_family(GateType t) { return t == GateType::Xor || t == GateType::Xnor; }

/// True for types whose output complement is another GateType.
constexpr bool has_complement(GateType t) { return is_logic(t); }

/// AND<->NAND, OR<->NOR, XOR<->XNOR, NOT<->BUF.
GateType complement(GateType t);

/// Dual used when every input of the gate is complemented:
/// AND(a,b) = NOR(~a,~b), NAND -> OR, OR -> NAND, NOR -> AND.
std::optional<GateType> demorgan_dual(GateType t);

bool arity_ok(GateType t, std::size_t n_inputs);

/// Bit-parallel evaluation: each word carries 64 independent rows.
std::uint64_t evaluate(GateType t, std::span<const std::uint64_t> inputs);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NetlistError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using GateId = std::uint32_t;
inline constexpr GateId kNoGate = static_cast<GateId>(-1);

inline constexpr std::string_view kKeyInputPrefix = "keyinput";

struct Gate {
    std::string name;
    GateType type = GateType::Input;
    std::vector<GateId> inputs;
    std::vector<GateId> fanouts;
};

/// Gate-level netlist. Every signal is the output of exactly one Gate
/// (primary inputs are Gates of type Input). DFFs are kept in the graph but
/// are cut for combinational purposes: a DFF output behaves as a pseudo
/// primary input and its data input as a pseudo primary output.
class Netlist {
public:
    GateId add_input(std::string name);
    GateId add_gate(std::string name, GateType type, std::vector<GateId> inputs);
    void add_output(GateId id);

    void set_type(GateId id, GateType type);
    /// Rewires every occurrence of `from` in gate's input list to `to`.
    void replace_input(GateId gate, GateId from, GateId to);
    /// Moves every consumer of `from` (except `keep`) onto `to`.
    void move_fanouts(GateId from, GateId to, GateId keep = kNoGate);

    std::size_t size() const noexcept { return gates_.size(); }
    bool empty() const noexcept { return gates_.empty(); }
    const Gate& gate(GateId id) const { return gates_.at(id); }
    const std::vector<Gate>& gates() const noexcept { return gates_; }
    std::optional<GateId> find(std::string_view name) const;
    GateId id(std::string_view name) const;
    const std::string& name(GateId id) const { return gates_.at(id).name; }

    const std::vector<GateId>& primary_inputs() const noexcept { return primary_inputs_; }
    const std::vector<GateId>& primary_outputs() const noexcept { return primary_outputs_; }
    const std::vector<GateId>& key_inputs() const noexcept { return key_inputs_; }
    std::vector<GateId> data_inputs() const;
    const std::vector<GateId>& gates_of_type(GateType t) const {
        return type_index_[static_cast<std::size_t>(t)];
    }

    bool is_primary_output(GateId id) const { return po_flag_.at(id); }
    bool is_key_input(GateId id) const { return key_flag_.at(id); }
    /// XOR/XNOR gate with exactly one key-input fanin.
    bool is_key_gate(GateId id) const;
    /// The key input driving a key gate, or kNoGate.
    GateId key_input_of(GateId key_gate) const;
    /// The non-key fanin of a key gate.
    GateId locked_net_of(GateId key_gate) const;
    std::vector<GateId> key_gates() const;

    /// Number of gates excluding primary inputs.
    std::size_t logic_gate_count() const noexcept { return gates_.size() - primary_inputs_.size(); }

    /// Combinational evaluation sources: primary inputs (including keys), then DFF outputs.
    std::vector<GateId> combinational_inputs() const;
    /// Combinational sinks: primary outputs, then DFF data inputs.
    std::vector<GateId> combinational_outputs() const;

    /// Topological order over the DFF-cut graph, smallest name first among ready gates.
    /// Throws NetlistError naming a signal on a combinational cycle.
    std::vector<GateId> topological_order() const;

    /// Checks every structural invariant; throws NetlistError on violation.
    void validate() const;

    /// Returns a name not already in use, of the form `<prefix><k>`.
    std::string fresh_name(std::string_view prefix);

private:
    GateId push(std::string name, GateType type);
    void index_remove(GateType t, GateId id);

    std::vector<Gate> gates_;
    std::unordered_map<std::string, GateId> by_name_;
    std::vector<GateId> primary_inputs_;
    std::vector<GateId> primary_outputs_;
    std::vector<GateId> key_inputs_;
    std::vector<char> po_flag_;
    std::vector<char> key_flag_;
    std::array<std::vector<GateId>, kGateTypeCount> type_index_;
    std::unordered_map<std::string, std::size_t> fresh_counter_;
};

bool is_key_input_name(std::string_view name);

Netlist parse_bench(std::string_view text);
Netlist read_bench_file(const std::string& path);
std::string write_bench(const Netlist& n);
void write_bench_file(const Netlist& n, const std::string& path);

/// Input assignment for `simulate`: data primary inputs (and DFF outputs) plus key inputs.
struct SimVector {
    std::map<std::string, bool> assignment;
    std::map<std::string, bool> key_assignment;
};

/// Single-vector reference simulation. Result is keyed by primary output name
/// (and by DFF data-input name for sequential netlists).
std::map<std::string, bool> simulate(const Netlist& n, const SimVector& v);

/// Compiled bit-parallel simulator over a fixed netlist.
class Simulator {
public:
    explicit Simulator(const Netlist& n);

    /// `inputs` is ordered as Netlist::combinational_inputs(); the result as
    /// Netlist::combinational_outputs(). Each word holds 64 rows.
    std::vector<std::uint64_t> run(std::span<const std::uint64_t> inputs) const;

    const std::vector<GateId>& inputs() const noexcept { return inputs_; }
    const std::vector<GateId>& outputs() const noexcept { return outputs_; }

private:
    const Netlist* netlist_;
    std::vector<GateId> order_;
    std::vector<GateId> inputs_;
    std::vector<GateId> outputs_;
};

}  // namespace tga

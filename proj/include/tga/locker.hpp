#pragma once

#include "tga/netlist.hpp"
#include "tga/pattern.hpp"
#include "tga/random.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tga {

enum class Scheme { Rll, Sll, Cm };
enum class Variant { Passthrough0, PrecedingInvert1, Demorgan1 };

std::string_view to_string(Scheme s);
std::string_view to_string(Variant v);
Scheme scheme_from_string(std::string_view s);

struct KeyGateRecord {
    std::string key_input;
    std::string gate_id;
    GateType gate_type = GateType::Xor;
    /// Signal the key gate interposes.
    std::string locked_net;
    Variant variant = Variant::Passthrough0;
    bool truth_bit = false;
};

/// Per-family metadata emitted by the countermeasure.
struct FamilyRecord {
    std::string fingerprint;
    Pattern pattern;
    std::vector<std::string> instance_roots;
    std::vector<std::string> key_inputs;
    std::vector<std::string> key_gates;
    bool shared_key = true;
};

struct LockedCircuit {
    Netlist netlist;
    /// Truth value per key input, ordered as netlist.key_inputs().
    std::vector<bool> key;
    std::vector<KeyGateRecord> records;
    Scheme scheme = Scheme::Rll;
    std::vector<FamilyRecord> families;
};

/// Transparency value of a key gate: the key bit that makes it a wire.
constexpr bool transparent_bit(GateType key_gate_type) { return key_gate_type == GateType::Xnor; }

/// In-place key-gate insertion engine shared by every locking scheme.
class KeyInserter {
public:
    KeyInserter(Netlist& n, Rng& rng) : n_(n), rng_(rng) {}

    /// Adds a fresh key input `keyinput<k>` (k = number of key inputs so far).
    GateId new_key_input();

    /// Interposes an XOR/XNOR on `net`. With `consumer` set only that pin is
    /// rewired, otherwise every consumer of the net is. The gate type is a
    /// coin flip, and when the bit is non-transparent Case-I (complement the
    /// driver) or Case-II (DeMorgan the successor) is picked by coin among
    /// the legal ones. Returns std::nullopt if neither case is legal.
    std::optional<KeyGateRecord> insert(GateId net, GateId key_input, bool bit, GateId consumer = kNoGate);

    /// Same, with the gate type and preferred variant fixed by the caller.
    std::optional<KeyGateRecord> insert_as(GateId net, GateId key_input, bool bit, GateType type,
                                           Variant preferred, GateId consumer = kNoGate);

    /// Whether a non-transparent key gate on `net` could use each variant.
    bool can_invert_driver(GateId net, GateId consumer) const;
    bool can_demorgan(GateId net, GateId consumer) const;

private:
    std::string fresh_lock_name();

    Netlist& n_;
    Rng& rng_;
};

/// DeMorgan rewrite of the successor `at` of a key gate: `at` becomes its dual
/// and every input other than the key gate is complemented (absorbed into a
/// single-fanout driver's type where possible, else through a new NOT gate).
/// With the key gate inverting its net, the circuit function is unchanged.
/// Throws NetlistError if `at` is not AND/NAND/OR/NOR or reads no key gate.
Netlist apply_demorgan(const Netlist& n, GateId at);

/// In-place form used by the inserter; `key_gate` names the pin left untouched.
void apply_demorgan_in_place(Netlist& n, GateId at, GateId key_gate,
                             const std::function<std::string()>& fresh_name);

/// Nets eligible for key gates: logic-gate outputs that are not primary
/// outputs, not key gates, and have at least one consumer.
std::vector<GateId> lockable_nets(const Netlist& n);

LockedCircuit lock_rll(const Netlist& n, std::size_t key_size, std::uint64_t seed);
LockedCircuit lock_sll(const Netlist& n, std::size_t key_size, std::size_t cluster, std::uint64_t seed);

/// `keyinput<i>=<bit>` lines in key-input order.
std::string format_key_file(const LockedCircuit& c);
/// Parses a key file into (key input name, bit) pairs.
std::vector<std::pair<std::string, bool>> parse_key_file(std::string_view text);

}  // namespace tga

#include "tga/attack.hpp"
#include "tga/countermeasure.hpp"
#include "tga/experiment.hpp"
#include "tga/locker.hpp"
#include "tga/report.hpp"
#include "tga/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void dump(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << text;
}

tga::Netlist load(const std::string& path) { return tga::parse_bench(slurp(path)); }

// Key material is never an attack input.
bool looks_like_key_file(const std::string& path) {
    if (fs::path(path).extension() == ".key") return true;
    try {
        return !tga::parse_key_file(slurp(path)).empty();
    } catch (const tga::ParseError&) {
        return false;
    }
}

struct LockArgs {
    std::string input;
    std::string scheme = "rll";
    std::size_t keys = 128;
    std::string budget = "32:64";
    std::size_t cluster = 3;
    std::string cm_base = "rll";
    bool independent = false;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_lock(const LockArgs& a) {
    const auto n = load(a.input);
    const auto scheme = tga::scheme_from_string(a.scheme);
    tga::LockedCircuit c;
    if (scheme == tga::Scheme::Cm) {
        tga::CmOptions opt;
        opt.scheme = tga::scheme_from_string(a.cm_base);
        opt.cluster = a.cluster;
        opt.shared_key = !a.independent;
        opt.workers = tga::workers_from_env();
        c = tga::lock_cm(n, tga::parse_budget(a.budget), opt, a.seed);
    } else if (scheme == tga::Scheme::Sll) {
        c = tga::lock_sll(n, a.keys, a.cluster, a.seed);
    } else {
        c = tga::lock_rll(n, a.keys, a.seed);
    }
    const auto prefix = a.out.empty() ? fs::path(a.input).stem().string() + "_" + a.scheme + "_s" + std::to_string(a.seed)
                                      : a.out;
    dump(prefix + ".bench", tga::write_bench(c.netlist));
    dump(prefix + ".key", tga::format_key_file(c));
    dump(prefix + ".json", tga::locked_record_json(c));
    std::cout << "locked " << c.records.size() << " key gates on " << c.netlist.key_inputs().size()
              << " key inputs -> " << prefix << ".{bench,key,json}\n";
    return kOk;
}

struct AttackArgs {
    std::string input;
    int max_layers = 4;
    std::size_t max_uf_keys = tga::kMaxUfKeys;
    std::string out;
    bool timing = false;
};

int cmd_attack(const AttackArgs& a) {
    if (looks_like_key_file(a.input)) throw UsageError("the attack reads a locked netlist, not key material");
    const auto n = load(a.input);
    if (n.key_inputs().empty()) std::cerr << "warning: '" << a.input << "' has no key inputs\n";
    tga::AttackOptions opt;
    opt.max_layers = a.max_layers;
    opt.max_uf_keys = a.max_uf_keys;
    opt.workers = tga::workers_from_env();
    const auto report = tga::tga(n, opt);
    const auto prefix = a.out.empty() ? fs::path(a.input).stem().string() : a.out;
    dump(prefix + ".pred", tga::format_predictions(report));
    dump(prefix + ".report.json", tga::attack_report_json(report, a.timing));
    std::cout << "sr " << tga::round2(report.sr) << "% over " << report.predictions.size() << " key inputs -> "
              << prefix << ".{pred,report.json}\n";
    return kOk;
}

struct VerifyArgs {
    std::string original;
    std::string locked;
    std::string key;
    std::size_t vectors = tga::kDefaultVectors;
    std::uint64_t seed = 1;
};

int cmd_verify(const VerifyArgs& a) {
    const auto orig = load(a.original);
    const auto locked = load(a.locked);
    std::map<std::string, bool> key;
    for (const auto& [name, bit] : tga::parse_key_file(slurp(a.key))) key[name] = bit;
    tga::EquivalenceResult r;
    try {
        r = tga::check_equivalence(orig, locked, key, a.vectors, a.seed);
    } catch (const tga::InterfaceMismatch& e) {
        throw UsageError(e.what());
    }
    if (r.equivalent) {
        std::cout << "PASS " << r.vectors << (r.exhaustive ? " exhaustive" : " random") << " vectors\n";
        return kOk;
    }
    const auto& cex = *r.counterexample;
    std::cout << "FAIL output " << cex.output << " expected " << cex.expected << " got " << cex.actual << "\n";
    std::cout << "counterexample:";
    for (const auto& [name, bit] : cex.inputs) std::cout << " " << name << "=" << bit;
    std::cout << "\n";
    return kVerifyFailed;
}

struct EvalArgs {
    LockArgs lock;
    std::size_t runs = 20;
    int max_layers = 4;
    std::size_t max_uf_keys = tga::kMaxUfKeys;
};

int cmd_eval(const EvalArgs& a) {
    tga::ExperimentSpec spec;
    spec.benchmark = fs::path(a.lock.input).filename().string();
    spec.scheme = tga::scheme_from_string(a.lock.scheme);
    spec.key_size = a.lock.keys;
    spec.budget = tga::parse_budget(a.lock.budget);
    spec.cluster = a.lock.cluster;
    spec.cm_base = tga::scheme_from_string(a.lock.cm_base);
    spec.runs = a.runs;
    spec.base_seed = a.lock.seed;
    spec.max_layers = a.max_layers;
    spec.max_uf_keys = a.max_uf_keys;
    const auto n = load(a.lock.input);
    const auto result = tga::run_experiment(n, spec, tga::workers_from_env());
    const auto prefix = a.lock.out.empty() ? fs::path(a.lock.input).stem().string() + "_" + a.lock.scheme : a.lock.out;
    dump(prefix + ".csv", tga::results_csv(result));
    dump(prefix + ".json", tga::aggregate_json(result));
    dump(prefix + ".timing.csv", tga::timing_csv(result));
    dump(prefix + ".timing.json", tga::timing_json(result));
    std::cout << "runs " << spec.runs << " sr_mean " << tga::round2(result.sr_mean) << " sr_stddev "
              << tga::round2(result.sr_stddev) << " mr_mean " << tga::round2(result.mr_mean) << " time "
              << result.time_min << "/" << result.time_mean << "/" << result.time_max << " s\n";
    return kOk;
}

void add_lock_options(CLI::App* cmd, LockArgs& a) {
    cmd->add_option("input", a.input, "original .bench netlist")->required()->check(CLI::ExistingFile);
    cmd->add_option("--scheme", a.scheme, "rll, sll or cm")
        ->check(CLI::IsMember({"rll", "sll", "cm"}, CLI::ignore_case));
    cmd->add_option("--keys", a.keys, "key size for rll/sll")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", a.budget, "countermeasure key budget <min>:<max>");
    cmd->add_option("--cluster", a.cluster, "key gates per convergent cluster")->check(CLI::PositiveNumber);
    cmd->add_option("--cm-base", a.cm_base, "placement inside countermeasure families: rll or sll")
        ->check(CLI::IsMember({"rll", "sll"}, CLI::ignore_case));
    cmd->add_option("--seed", a.seed, "random seed");
    cmd->add_option("-o,--out", a.out, "output path prefix");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logic locking, topology-guided key recovery and its countermeasure"};
    app.require_subcommand(1);

    LockArgs lock;
    auto* lock_cmd = app.add_subcommand("lock", "lock a netlist; writes .bench, .key and .json");
    add_lock_options(lock_cmd, lock);
    lock_cmd->add_flag("--independent-keys", lock.independent, "countermeasure: one key per family instance");

    AttackArgs attack;
    auto* attack_cmd = app.add_subcommand("attack", "recover key bits from a locked netlist alone");
    attack_cmd->add_option("locked", attack.input, "locked .bench netlist")->required()->check(CLI::ExistingFile);
    attack_cmd->add_option("--max-layers", attack.max_layers, "largest unit-function depth")
        ->check(CLI::PositiveNumber);
    attack_cmd->add_option("--max-uf-keys", attack.max_uf_keys, "skip unit functions with more key gates")
        ->check(CLI::PositiveNumber);
    attack_cmd->add_option("-o,--out", attack.out, "output path prefix");
    attack_cmd->add_flag("--timing", attack.timing, "include timings in the JSON report");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "check a locked netlist against the original under a key");
    verify_cmd->add_option("original", verify.original)->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("locked", verify.locked)->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("key", verify.key, "key file")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--vectors", verify.vectors, "random vectors above 16 inputs")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", verify.seed, "random seed");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "lock, attack and score many seeded instances");
    add_lock_options(eval_cmd, eval.lock);
    eval_cmd->add_option("--runs", eval.runs, "instances")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--max-layers", eval.max_layers, "largest unit-function depth")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--max-uf-keys", eval.max_uf_keys, "skip unit functions with more key gates")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*lock_cmd) return cmd_lock(lock);
        if (*attack_cmd) return cmd_attack(attack);
        if (*verify_cmd) return cmd_verify(verify);
        if (*eval_cmd) return cmd_eval(eval);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

#include "tga/experiment.hpp"

#include "tga/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace tga {

using nlohmann::ordered_json;

unsigned workers_from_env() {
    if (const char* v = std::getenv(kWorkersEnv); v && *v) {
        char* end = nullptr;
        const auto n = std::strtoul(v, &end, 10);
        if (end && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

LockedCircuit lock_for_spec(const Netlist& n, const ExperimentSpec& spec, std::uint64_t seed) {
    switch (spec.scheme) {
        case Scheme::Rll: return lock_rll(n, spec.key_size, seed);
        case Scheme::Sll: return lock_sll(n, spec.key_size, spec.cluster, seed);
        case Scheme::Cm: {
            CmOptions opt;
            opt.scheme = spec.cm_base;
            opt.cluster = spec.cluster;
            opt.check_layers = spec.max_layers;
            return lock_cm(n, spec.budget, opt, seed);
        }
    }
    throw NetlistError("unknown scheme");
}

namespace {

RunResult one_run(const Netlist& n, const ExperimentSpec& spec, std::size_t run) {
    RunResult r;
    r.run = run;
    r.seed = spec.base_seed + run;
    const auto locked = lock_for_spec(n, spec, r.seed);
    r.key_size = locked.key.size();
    r.verified = check_equivalence(n, locked.netlist, key_map(locked.netlist, locked.key)).equivalent;
    AttackOptions opt;
    opt.max_layers = spec.max_layers;
    opt.max_uf_keys = spec.max_uf_keys;
    const auto report = tga(locked.netlist, opt);
    r.seconds = report.wall_time;
    r.score = score(report, locked.key);
    return r;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void aggregate(ExperimentResult& r) {
    const auto n = r.runs.size();
    if (n == 0) return;
    double sr = 0, mr = 0, t = 0;
    r.time_min = r.runs.front().seconds;
    r.time_max = r.runs.front().seconds;
    for (const auto& run : r.runs) {
        sr += run.score.sr;
        mr += run.score.mr;
        t += run.seconds;
        r.time_min = std::min(r.time_min, run.seconds);
        r.time_max = std::max(r.time_max, run.seconds);
    }
    r.sr_mean = sr / static_cast<double>(n);
    r.mr_mean = mr / static_cast<double>(n);
    r.time_mean = t / static_cast<double>(n);
    double var = 0;
    for (const auto& run : r.runs) var += (run.score.sr - r.sr_mean) * (run.score.sr - r.sr_mean);
    r.sr_stddev = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
}

ExperimentResult run_experiment(const Netlist& n, const ExperimentSpec& spec, unsigned workers) {
    if (spec.runs == 0) throw std::invalid_argument("runs must be at least 1");
    ExperimentResult result;
    result.spec = spec;
    result.runs.resize(spec.runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (auto i = next.fetch_add(1); i < spec.runs; i = next.fetch_add(1)) {
            try {
                result.runs[i] = one_run(n, spec, i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const auto count = std::clamp<std::size_t>(workers, 1, spec.runs);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < count; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    aggregate(result);
    return result;
}

std::string results_csv(const ExperimentResult& r) {
    std::ostringstream out;
    out << kCsvSchema << "\n";
    out << "run,seed,key_size,verified,sr,mr,x_rate\n";
    for (const auto& run : r.runs) {
        out << run.run << "," << run.seed << "," << run.key_size << "," << (run.verified ? 1 : 0) << ","
            << fixed2(run.score.sr) << "," << fixed2(run.score.mr) << "," << fixed2(run.score.x_rate) << "\n";
    }
    return out.str();
}

std::string timing_csv(const ExperimentResult& r) {
    std::ostringstream out;
    out << kCsvSchema << " timing\n";
    out << "run,seed,seconds\n";
    for (const auto& run : r.runs) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", run.seconds);
        out << run.run << "," << run.seed << "," << buf << "\n";
    }
    return out.str();
}

namespace {

ordered_json spec_json(const ExperimentSpec& s) {
    ordered_json j{
        {"benchmark", s.benchmark},
        {"scheme", std::string(to_string(s.scheme))},
        {"runs", s.runs},
        {"base_seed", s.base_seed},
        {"max_layers", s.max_layers},
        {"max_uf_keys", s.max_uf_keys},
    };
    if (s.scheme == Scheme::Cm) {
        j["budget"] = {s.budget.k_min, s.budget.k_max};
        j["cm_base"] = std::string(to_string(s.cm_base));
    } else {
        j["key_size"] = s.key_size;
    }
    if (s.scheme != Scheme::Rll) j["cluster"] = s.cluster;
    return j;
}

}  // namespace

std::string aggregate_json(const ExperimentResult& r) {
    ordered_json j;
    j["spec"] = spec_json(r.spec);
    j["sr_mean"] = round2(r.sr_mean);
    j["sr_stddev"] = round2(r.sr_stddev);
    j["mr_mean"] = round2(r.mr_mean);
    j["all_verified"] = std::all_of(r.runs.begin(), r.runs.end(), [](const auto& x) { return x.verified; });
    return j.dump(2) + "\n";
}

std::string timing_json(const ExperimentResult& r) {
    ordered_json j;
    j["spec"] = spec_json(r.spec);
    j["seconds"] = {{"min", r.time_min}, {"mean", r.time_mean}, {"max", r.time_max}};
    return j.dump(2) + "\n";
}

}  // namespace tga

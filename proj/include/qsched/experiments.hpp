#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qsched/dnl.hpp"
#include "qsched/io.hpp"
#include "qsched/jssp.hpp"
#include "qsched/oracle.hpp"
#include "qsched/qaoa.hpp"
#include "qsched/varqite.hpp"

namespace qsched {

// --- shared plumbing --------------------------------------------------------

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (threads <= 0) threads = hw > 0 ? static_cast<int>(hw) : 1;
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// --- canonical desk-scale benchmark set -------------------------------------

// Small master used by the validation experiments; its sub-instances stay
// inside the exhaustive-enumeration range.
inline JsspInstance benchmark_master() { return build_synthetic_instance(4); }

inline FreeSpec benchmark_free_spec_12() { return {{2, 2, 2}, {}}; }

// 17 free variables minus one refrozen (base value 0) gives a 16-variable
// problem touching all three machines.
inline FreeSpec benchmark_free_spec_16() { return {{3, 2, 2}, {{{1, 4, 2}}}}; }

inline SubInstance benchmark_sub_instance(const FreeSpec& spec) {
    const JsspInstance master = benchmark_master();
    return derive_sub_instance(master, diagonal_base(master), spec);
}

// --- single runs ------------------------------------------------------------

struct RunSummary {
    std::string best_bitstring;
    double best_energy = 0.0;
    std::optional<double> gs_prob;
    std::string gantt;
    bool feasible = false;
    long long cost = 0;
};

inline RunSummary summarize_best(const SubInstance& sub, const SampleSet& samples,
                                 std::optional<double> ground_energy) {
    RunSummary s;
    s.best_energy = std::numeric_limits<double>::infinity();
    for (const auto& [b, e] : samples.energies)
        if (e < s.best_energy) { s.best_energy = e; s.best_bitstring = b; }
    if (ground_energy) s.gs_prob = samples.mass_at_energy(*ground_energy);
    const DecodedSchedule d = decode_bitstring(sub, s.best_bitstring);
    s.gantt = render_gantt(sub.instance, d.assignment);
    s.feasible = d.feasible;
    s.cost = d.cost;
    return s;
}

// --- parameter sweep --------------------------------------------------------

struct SweepConfig {
    std::vector<double> deltas;
    std::vector<int> depths;
    long long shots = 4000;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = hardware concurrency
};

struct SweepPoint {
    double delta = 0.0;
    int p = 0;
    double mean_energy = 0.0;
    double normalized_energy = 0.0;
    std::optional<double> gs_prob;
};

// LR-QAOA landscape over (delta, p); grid points run independently on a
// bounded worker pool, each with its own derived seed.
inline std::vector<SweepPoint> sweep_lr_qaoa(const IsingHamiltonian& h, const SweepConfig& cfg,
                                             std::optional<double> ground_energy = std::nullopt) {
    if (cfg.deltas.empty() || cfg.depths.empty())
        throw std::invalid_argument("sweep: delta and p grids must be nonempty");
    std::vector<SweepPoint> points(cfg.deltas.size() * cfg.depths.size());
    parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
        const double delta = cfg.deltas[i / cfg.depths.size()];
        const int p = cfg.depths[i % cfg.depths.size()];
        const SampleSet samples = run_qaoa(h, linear_ramp(p, delta, delta), std::nullopt,
                                           MixerKind::standard, cfg.shots, mix_seed(cfg.seed, i));
        SweepPoint& pt = points[i];
        pt.delta = delta;
        pt.p = p;
        pt.mean_energy = samples.mean_energy();
        if (ground_energy) pt.gs_prob = samples.mass_at_energy(*ground_energy);
    });
    double max_mean = -std::numeric_limits<double>::infinity();
    for (const SweepPoint& pt : points) max_mean = std::max(max_mean, pt.mean_energy);
    for (SweepPoint& pt : points)
        pt.normalized_energy = (max_mean != 0.0) ? pt.mean_energy / max_mean : 0.0;
    return points;
}

inline std::string sweep_to_csv(const std::vector<SweepPoint>& points, bool with_timestamp) {
    std::ostringstream out;
    out.precision(12);
    if (with_timestamp) out << "# generated_at " << utc_timestamp() << "\n";
    out << "delta,p,mean_energy,normalized_energy,gs_prob\n";
    for (const SweepPoint& pt : points) {
        out << pt.delta << "," << pt.p << "," << pt.mean_energy << "," << pt.normalized_energy << ",";
        if (pt.gs_prob) out << *pt.gs_prob;
        out << "\n";
    }
    return out.str();
}

// --- reproduction chain -------------------------------------------------------

struct ReproConfig {
    std::string out_dir;
    std::uint64_t seed = 7;
    bool timestamp = true;
    int threads = 0;
};

// Runs the full desk-scale experiment chain into out_dir. Every file is a
// deterministic function of the seed (plus the optional timestamp headers).
inline std::vector<std::string> run_repro(const ReproConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> written;
    auto path = [&](const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); };
    auto emit_json = [&](const std::string& name, const json& j) {
        write_json_file(path(name), j);
        written.push_back(path(name));
    };
    auto emit_text = [&](const std::string& name, const std::string& text) {
        write_text_file(path(name), text);
        written.push_back(path(name));
    };
    auto jsonl_header = [&](std::ostringstream& out) {
        if (cfg.timestamp) out << json{{"meta", {{"generated_at", utc_timestamp()}}}}.dump() << "\n";
    };

    const JsspInstance master = benchmark_master();
    const ScheduleAssignment base = diagonal_base(master);
    emit_json("instance.json", instance_to_json(master));
    emit_json("base.json", json{{"base_assignment", assignment_to_json(master, base)}});

    const SubInstance sub12 = derive_sub_instance(master, base, benchmark_free_spec_12());
    const SubInstance sub16 = derive_sub_instance(master, base, benchmark_free_spec_16());
    emit_json("sub12.json", sub_instance_to_json(sub12, benchmark_free_spec_12()));
    emit_json("sub16.json", sub_instance_to_json(sub16, benchmark_free_spec_16()));

    const QuboProblem qubo12 = build_qubo(sub12);
    const IsingHamiltonian ising12 = qubo_to_ising(qubo12);
    const IsingHamiltonian ising16 = qubo_to_ising(build_qubo(sub16));
    emit_json("qubo12.json", qubo_to_json(qubo12));
    emit_json("ising12.json", ising_to_json(ising12));

    const OracleResult oracle12 = brute_force(ising12);
    const OracleResult oracle16 = brute_force(ising16);
    emit_json("oracle12.json", oracle_to_json(oracle12));
    emit_json("oracle16.json", oracle_to_json(oracle16));

    // Single fixed-schedule run on the 12-variable problem.
    {
        const SampleSet s = run_qaoa(ising12, linear_ramp(4, 0.17, 0.17), std::nullopt,
                                     MixerKind::standard, 4000, mix_seed(cfg.seed, 1));
        std::ostringstream out;
        jsonl_header(out);
        IterationRecord rec;
        rec.iteration = 0;
        rec.samples = s;
        rec.best_bitstring = summarize_best(sub12, s, oracle12.ground_energy).best_bitstring;
        rec.best_energy = s.best_energy();
        rec.gs_prob = s.mass_at_energy(oracle12.ground_energy);
        out << iteration_record_to_json(rec).dump() << "\n";
        emit_text("lr12.jsonl", out.str());
    }

    // Iterative warm-start run on the 16-variable problem.
    {
        IterQaoaConfig qcfg;
        qcfg.seed = mix_seed(cfg.seed, 2);
        const auto records = iterative_qaoa(ising16, qcfg, oracle16.ground_energy);
        std::ostringstream out;
        jsonl_header(out);
        for (const auto& rec : records) out << iteration_record_to_json(rec).dump() << "\n";
        emit_text("iter16.jsonl", out.str());
    }

    // Coarse landscape on the 12-variable problem.
    {
        SweepConfig scfg;
        scfg.deltas = {0.05, 0.17, 0.35, 0.65, 0.95, 1.25};
        scfg.depths = {2, 6, 10, 16};
        scfg.seed = mix_seed(cfg.seed, 3);
        scfg.threads = cfg.threads;
        const auto points = sweep_lr_qaoa(ising12, scfg, oracle12.ground_energy);
        emit_text("sweep12.csv", sweep_to_csv(points, cfg.timestamp));
    }

    // Imaginary-time evolution on the 12-variable problem.
    {
        VarQiteConfig vcfg;
        vcfg.seed = mix_seed(cfg.seed, 4);
        const Ansatz ansatz = build_ansatz(ising12.num_qubits, 2);
        const VarQiteResult res = run_varqite(ising12, ansatz, vcfg);
        std::ostringstream out;
        jsonl_header(out);
        for (const auto& step : res.trajectory) out << varqite_step_to_json(step).dump() << "\n";
        json tail = {{"final_energy", res.final_energy},
                     {"evaluations", res.evaluations},
                     {"final_samples", sample_set_to_json(res.final_samples)}};
        out << tail.dump() << "\n";
        emit_text("varqite12.jsonl", out.str());
    }

    // Noisy variants of the 16-variable final state, then mitigation.
    {
        IterQaoaConfig qcfg;
        qcfg.seed = mix_seed(cfg.seed, 5);
        const auto records = iterative_qaoa(ising16, qcfg, oracle16.ground_energy);
        const InitAngles final_init = *records.back().init_angles;
        const Schedule sched = linear_ramp(qcfg.p, qcfg.delta_beta, qcfg.delta_gamma);
        const NoiseModel noise =
            NoiseModel::random_asymmetric(ising16.num_qubits, 0.02, mix_seed(cfg.seed, 6));
        auto runner = [&] { return qaoa_state(ising16, sched, final_init, MixerKind::warm_start); };
        const VariantSet vs =
            generate_variants(runner, ising16, 25, 4000, mix_seed(cfg.seed, 7), noise);
        fs::create_directories(path("variants"));
        for (int v = 0; v < vs.v_max; ++v) {
            const std::string name = "variants/variant_" + std::to_string(v) + ".json";
            emit_json(name, sample_set_to_json(vs.samples[static_cast<std::size_t>(v)]));
        }
        const auto mitigated = aggregate(vs, DnlConfig{});
        emit_json("mitigated.json", mitigated_to_json(mitigated, 4000));
    }
    return written;
}

} // namespace qsched

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsched/rng.hpp"
#include "qsched/simulator.hpp"

namespace qsched {

// One symmetrized realization of the target circuit: a logical->physical slot
// permutation plus a final-NOT mask, undone classically after readout.
struct VariantTransform {
    std::vector<int> slot_permutation;
    std::vector<bool> not_mask;
};

struct VariantSet {
    int v_max = 0;
    long long shots_per_variant = 0;
    std::vector<SampleSet> samples;
    std::vector<VariantTransform> transforms;
};

struct DnlConfig {
    double alpha = 4.0;
    int v_th = 2;
    int v_max = 25;
};

// Runs v_max noisy executions of the same logical circuit, each under a fresh
// random slot permutation and final-NOT mask. All variants coincide in the
// noiseless limit.
inline VariantSet generate_variants(const std::function<Statevector()>& circuit_runner,
                                    const IsingHamiltonian& h, int v_max, long long shots,
                                    std::uint64_t seed, const std::optional<NoiseModel>& noise) {
    if (v_max < 1) throw std::invalid_argument("generate_variants: v_max must be >= 1");
    const Statevector ideal = circuit_runner();
    const int n = ideal.num_qubits();
    if (noise) noise->validate(n);

    VariantSet vs;
    vs.v_max = v_max;
    vs.shots_per_variant = shots;
    for (int v = 0; v < v_max; ++v) {
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(v)));
        VariantTransform tf;
        tf.slot_permutation.resize(static_cast<std::size_t>(n));
        std::iota(tf.slot_permutation.begin(), tf.slot_permutation.end(), 0);
        for (int q = n - 1; q > 0; --q)
            std::swap(tf.slot_permutation[static_cast<std::size_t>(q)],
                      tf.slot_permutation[rng.below(static_cast<std::uint64_t>(q + 1))]);
        tf.not_mask.resize(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) tf.not_mask[static_cast<std::size_t>(q)] = rng.below(2) == 1;

        Statevector state = ideal;
        for (int q = 0; q < n; ++q)
            if (tf.not_mask[static_cast<std::size_t>(q)]) state.apply_x(q);

        std::optional<NoiseModel> variant_noise;
        if (noise) variant_noise = noise->remapped(tf.slot_permutation);
        // Sample the NOT-conjugated state, then classically undo the mask.
        SampleSet raw = sample(state, h, shots, rng.next_u64(), variant_noise);
        SampleSet undone;
        undone.total_shots = raw.total_shots;
        for (const auto& [s, c] : raw.counts) {
            std::uint64_t k = bitstring_to_index(s);
            for (int q = 0; q < n; ++q)
                if (tf.not_mask[static_cast<std::size_t>(q)]) k ^= (1ULL << q);
            undone.counts[index_to_bitstring(k, n)] += c;
        }
        for (const auto& [s, _] : undone.counts)
            undone.energies[s] = h.energy_of_index(bitstring_to_index(s));
        vs.samples.push_back(std::move(undone));
        vs.transforms.push_back(std::move(tf));
    }
    return vs;
}

// W(v) = (v/v_max)^alpha above the threshold, 0 at or below it.
inline double dnl_weight(int observed_variants, const DnlConfig& cfg) {
    if (observed_variants < 0 || observed_variants > cfg.v_max)
        throw std::invalid_argument("dnl_weight: variant count outside 0..v_max");
    if (observed_variants <= cfg.v_th) return 0.0;
    return std::pow(static_cast<double>(observed_variants) / static_cast<double>(cfg.v_max), cfg.alpha);
}

// Weighted average of per-variant frequencies, filtered by how many variants
// observed each bitstring, then renormalized. Alternative weightings plug in
// through the weight function.
inline std::map<std::string, double> aggregate_with(
    const VariantSet& vs, const std::function<double(int)>& weight_of_count) {
    if (vs.samples.empty()) throw std::invalid_argument("aggregate: empty variant set");
    std::map<std::string, double> mean;
    std::map<std::string, int> seen_by;
    for (const SampleSet& s : vs.samples) {
        for (const auto& [b, c] : s.counts) {
            mean[b] += static_cast<double>(c) / static_cast<double>(s.total_shots);
            seen_by[b] += 1;
        }
    }
    double total = 0.0;
    std::map<std::string, double> out;
    for (auto& [b, m] : mean) {
        const double mass = (m / static_cast<double>(vs.v_max)) * weight_of_count(seen_by[b]);
        if (mass > 0.0) {
            out[b] = mass;
            total += mass;
        }
    }
    if (total <= 0.0)
        throw std::runtime_error("aggregate: every outcome fell below the variant threshold");
    for (auto& [b, m] : out) m /= total;
    return out;
}

inline std::map<std::string, double> aggregate(const VariantSet& vs, const DnlConfig& cfg) {
    return aggregate_with(vs, [&cfg](int v) { return dnl_weight(v, cfg); });
}

} // namespace qsched

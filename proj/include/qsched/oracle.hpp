#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsched/bits.hpp"
#include "qsched/ising.hpp"
#include "qsched/qubo.hpp"
#include "qsched/rng.hpp"

namespace qsched {

struct OracleResult {
    double ground_energy = 0.0;
    std::vector<std::string> ground_states;          // all minimizing bitstrings
    std::vector<std::pair<double, long long>> spectrum; // k lowest distinct energies + degeneracies
};

// Exhaustive enumeration over all 2^N bitstrings. Energies produced by the
// scheduling pipeline are exact multiples of 1/4, so exact comparison is safe.
inline OracleResult brute_force(const IsingHamiltonian& h, int spectrum_depth = 8, int cap = 28) {
    if (h.num_qubits > cap)
        throw std::invalid_argument("brute_force: " + std::to_string(h.num_qubits) +
                                    " qubits exceeds cap " + std::to_string(cap));
    if (spectrum_depth < 1) throw std::invalid_argument("brute_force: spectrum depth must be >= 1");

    const std::uint64_t dim = 1ULL << h.num_qubits;
    OracleResult out;
    std::map<double, long long> head; // bounded: keeps the spectrum_depth lowest energies
    std::vector<std::uint64_t> argmin;
    double best = std::numeric_limits<double>::infinity();

    for (std::uint64_t k = 0; k < dim; ++k) {
        const double e = h.energy_of_index(k);
        if (e < best) {
            best = e;
            argmin.clear();
        }
        if (e == best) argmin.push_back(k);
        auto it = head.find(e);
        if (it != head.end()) {
            ++it->second;
        } else if (static_cast<int>(head.size()) < spectrum_depth) {
            head[e] = 1;
        } else if (e < head.rbegin()->first) {
            head.erase(std::prev(head.end()));
            head[e] = 1;
        }
    }
    out.ground_energy = best;
    for (std::uint64_t k : argmin) out.ground_states.push_back(index_to_bitstring(k, h.num_qubits));
    for (const auto& [e, d] : head) out.spectrum.emplace_back(e, d);
    return out;
}

struct SaResult {
    std::vector<int> best_bits;
    double best_energy = 0.0;
};

struct SaConfig {
    int sweeps = 100;
    int restarts = 32;
    std::uint64_t seed = 0;
    double t_final = 0.01;
};

// Single-bit-flip Metropolis with a geometric temperature ladder from
// 10 * max|coefficient| down to t_final, restarted from random bitstrings.
inline SaResult simulated_annealing(const QuboProblem& q, const SaConfig& cfg) {
    if (cfg.sweeps < 1 || cfg.restarts < 1)
        throw std::invalid_argument("simulated_annealing: sweeps and restarts must be >= 1");
    const int n = q.num_vars;

    // Neighbor lists for O(1) flip deltas.
    std::vector<double> lin(static_cast<std::size_t>(n), 0.0);
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    double max_coef = 0.0;
    for (const auto& [i, c] : q.linear) {
        lin[static_cast<std::size_t>(i)] = c;
        max_coef = std::max(max_coef, std::abs(c));
    }
    for (const auto& [ij, c] : q.quadratic) {
        adj[static_cast<std::size_t>(ij.first)].emplace_back(ij.second, c);
        adj[static_cast<std::size_t>(ij.second)].emplace_back(ij.first, c);
        max_coef = std::max(max_coef, std::abs(c));
    }
    const double t_start = std::max(10.0 * max_coef, 1.0);
    const double decay = (cfg.sweeps > 1) ? std::pow(cfg.t_final / t_start, 1.0 / (cfg.sweeps - 1)) : 1.0;

    SaResult best;
    best.best_energy = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
        std::vector<int> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
        double energy = q.energy(x);
        if (energy < best.best_energy) {
            best.best_energy = energy;
            best.best_bits = x;
        }
        double temp = t_start;
        for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
            for (int i = 0; i < n; ++i) {
                double delta = lin[static_cast<std::size_t>(i)];
                for (const auto& [j, w] : adj[static_cast<std::size_t>(i)])
                    delta += w * x[static_cast<std::size_t>(j)];
                if (x[static_cast<std::size_t>(i)]) delta = -delta;
                if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temp)) {
                    x[static_cast<std::size_t>(i)] ^= 1;
                    energy += delta;
                    if (energy < best.best_energy) {
                        best.best_energy = energy;
                        best.best_bits = x;
                    }
                }
            }
            temp *= decay;
        }
    }
    return best;
}

} // namespace qsched

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsched/ising.hpp"
#include "qsched/rng.hpp"
#include "qsched/simulator.hpp"

namespace qsched {

struct Schedule {
    int p = 0;
    std::vector<double> betas;
    std::vector<double> gammas;
};

// beta_k = (1 - k/p) * delta_beta,  gamma_k = (k+1)/p * delta_gamma,  k = 0..p-1.
inline Schedule linear_ramp(int p, double delta_beta, double delta_gamma) {
    if (p < 1) throw std::invalid_argument("linear_ramp: p must be >= 1");
    Schedule s;
    s.p = p;
    for (int k = 0; k < p; ++k) {
        s.betas.push_back((1.0 - static_cast<double>(k) / p) * delta_beta);
        s.gammas.push_back((static_cast<double>(k + 1) / p) * delta_gamma);
    }
    return s;
}

struct BiasVector {
    std::vector<double> z_expectations; // per qubit, in [-1, +1]
};

struct InitAngles {
    std::vector<double> phis; // per-qubit R_y angle in [0, pi]
};

// Per-qubit thermal <sigma_z> under a Boltzmann distribution over measured
// bitstrings. By default every distinct bitstring enters with weight
// exp(-beta_T (E - E_min)); shot_weighted additionally multiplies by its count.
inline BiasVector boltzmann_bias(const SampleSet& samples, double beta_t, bool shot_weighted = false) {
    if (samples.counts.empty()) throw std::invalid_argument("boltzmann_bias: empty sample set");
    if (beta_t < 0.0) throw std::invalid_argument("boltzmann_bias: beta_T must be >= 0");
    double e_min = samples.best_energy();
    const int n = static_cast<int>(samples.counts.begin()->first.size());

    BiasVector bias;
    bias.z_expectations.assign(static_cast<std::size_t>(n), 0.0);
    double z_norm = 0.0;
    for (const auto& [s, c] : samples.counts) {
        double w = std::exp(-beta_t * (samples.energies.at(s) - e_min));
        if (shot_weighted) w *= static_cast<double>(c);
        z_norm += w;
        const std::uint64_t k = bitstring_to_index(s);
        for (int q = 0; q < n; ++q)
            bias.z_expectations[static_cast<std::size_t>(q)] += w * spin_of(k, q);
    }
    for (double& z : bias.z_expectations) z /= z_norm;
    return bias;
}

// p_q = (1 - eta <sigma_z^q>)/2;  phi_q = 2 asin(sqrt(p_q)).
inline InitAngles bias_to_angles(const BiasVector& bias, int eta) {
    if (eta != 1 && eta != -1) throw std::invalid_argument("bias_to_angles: eta must be +1 or -1");
    InitAngles angles;
    for (double z : bias.z_expectations) {
        if (z < -1.0 - 1e-12 || z > 1.0 + 1e-12)
            throw std::invalid_argument("bias_to_angles: bias entry outside [-1, 1]");
        const double p = std::clamp(0.5 * (1.0 - eta * z), 0.0, 1.0);
        angles.phis.push_back(2.0 * std::asin(std::sqrt(p)));
    }
    return angles;
}

enum class BetaTKind { quadratic, constant };

// Per-iteration inverse-temperature values for the bias feedback.
inline std::vector<double> beta_t_schedule(BetaTKind kind, double beta_min, double beta_max, int n_iter) {
    if (n_iter < 1) throw std::invalid_argument("beta_t_schedule: n_iter must be >= 1");
    std::vector<double> out;
    if (kind == BetaTKind::constant) {
        out.assign(static_cast<std::size_t>(n_iter), beta_min);
        return out;
    }
    if (n_iter == 1) return {beta_max};
    for (int j = 0; j < n_iter; ++j) {
        const double f = static_cast<double>(j) / static_cast<double>(n_iter - 1);
        out.push_back(beta_min + (beta_max - beta_min) * f * f);
    }
    return out;
}

// Builds the final QAOA state. Uniform start = H on every qubit with the
// standard R_x mixer; warm start = R_y(phi_q) preparation with the rotated
// mixer R_y(phi) R_z(-2 beta) R_y(-phi) that keeps the prepared product state
// as an eigenstate.
inline Statevector qaoa_state(const IsingHamiltonian& h, const Schedule& sched,
                              const std::optional<InitAngles>& init, MixerKind mixer) {
    if (mixer == MixerKind::warm_start && !init)
        throw std::invalid_argument("qaoa: warm-start mixer requires initial angles");
    if (init && static_cast<int>(init->phis.size()) != h.num_qubits)
        throw std::invalid_argument("qaoa: init angle count != qubit count");

    Statevector sv(h.num_qubits);
    if (init) {
        for (int q = 0; q < h.num_qubits; ++q) sv.apply_ry(q, init->phis[static_cast<std::size_t>(q)]);
    } else {
        for (int q = 0; q < h.num_qubits; ++q) sv.apply_h(q);
    }
    const std::vector<double> energies = diagonal_energies(h);
    for (int k = 0; k < sched.p; ++k) {
        sv.apply_cost_phase(energies, sched.gammas[static_cast<std::size_t>(k)]);
        const double beta = sched.betas[static_cast<std::size_t>(k)];
        if (mixer == MixerKind::standard) {
            for (int q = 0; q < h.num_qubits; ++q) sv.apply_rx(q, 2.0 * beta);
        } else {
            for (int q = 0; q < h.num_qubits; ++q) {
                const double phi = init->phis[static_cast<std::size_t>(q)];
                sv.apply_ry(q, -phi);
                sv.apply_rz(q, -2.0 * beta);
                sv.apply_ry(q, phi);
            }
        }
    }
    return sv;
}

inline SampleSet run_qaoa(const IsingHamiltonian& h, const Schedule& sched,
                          const std::optional<InitAngles>& init, MixerKind mixer, long long shots,
                          std::uint64_t seed, const std::optional<NoiseModel>& noise = std::nullopt) {
    return sample(qaoa_state(h, sched, init, mixer), h, shots, seed, noise);
}

struct IterationRecord {
    int iteration = 0;
    std::optional<InitAngles> init_angles; // absent on the uniform first iteration
    double beta_t = 0.0;
    SampleSet samples;
    std::string best_bitstring;
    double best_energy = 0.0;
    std::optional<double> gs_prob; // set when the ground energy is known
};

struct IterQaoaConfig {
    int p = 4;
    double delta_beta = 0.17;
    double delta_gamma = 0.17;
    int n_iter = 10;
    BetaTKind beta_t_kind = BetaTKind::quadratic;
    double beta_t_min = 0.1;
    double beta_t_max = 1.0;
    int eta = +1;
    long long shots = 4000;
    std::uint64_t seed = 0;
    std::optional<NoiseModel> noise;
    bool shot_weighted_bias = false;
    bool cumulative_samples = false; // feed the bias from all iterations so far
};

// Fixed-schedule QAOA with measurement-driven warm starts: iteration 0 runs
// from the uniform superposition, every later iteration turns the previous
// sample set into per-qubit biases and restarts from the matching product state.
inline std::vector<IterationRecord> iterative_qaoa(const IsingHamiltonian& h, const IterQaoaConfig& cfg,
                                                   std::optional<double> ground_energy = std::nullopt) {
    if (cfg.n_iter < 1) throw std::invalid_argument("iterative_qaoa: n_iter must be >= 1");
    const Schedule sched = linear_ramp(cfg.p, cfg.delta_beta, cfg.delta_gamma);
    const std::vector<double> beta_ts =
        beta_t_schedule(cfg.beta_t_kind, cfg.beta_t_min, cfg.beta_t_max, cfg.n_iter);

    std::vector<IterationRecord> records;
    SampleSet feedback; // previous iteration's samples (or the running union)
    std::string best_s;
    double best_e = std::numeric_limits<double>::infinity();

    for (int j = 0; j < cfg.n_iter; ++j) {
        IterationRecord rec;
        rec.iteration = j;
        rec.beta_t = beta_ts[static_cast<std::size_t>(j)];
        std::optional<InitAngles> init;
        MixerKind mixer = MixerKind::standard;
        if (j > 0) {
            const BiasVector bias = boltzmann_bias(feedback, rec.beta_t, cfg.shot_weighted_bias);
            init = bias_to_angles(bias, cfg.eta);
            mixer = MixerKind::warm_start;
        }
        rec.init_angles = init;
        rec.samples = run_qaoa(h, sched, init, mixer, cfg.shots, mix_seed(cfg.seed, static_cast<std::uint64_t>(j)),
                               cfg.noise);

        for (const auto& [s, e] : rec.samples.energies) {
            if (e < best_e) { best_e = e; best_s = s; }
        }
        rec.best_bitstring = best_s;
        rec.best_energy = best_e;
        if (ground_energy) rec.gs_prob = rec.samples.mass_at_energy(*ground_energy);

        if (cfg.cumulative_samples) {
            feedback.total_shots += rec.samples.total_shots;
            for (const auto& [s, c] : rec.samples.counts) {
                feedback.counts[s] += c;
                feedback.energies[s] = rec.samples.energies.at(s);
            }
        } else {
            feedback = rec.samples;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace qsched

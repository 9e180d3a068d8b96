#pragma once

#include <cmath>
#include <numbers>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qsched/ising.hpp"
#include "qsched/rng.hpp"
#include "qsched/simulator.hpp"

namespace qsched {

// Brickwork ansatz: H on every qubit, then per layer CNOTs on (0,1),(2,3),...
// followed by (1,2),(3,4),... and an R_y(theta) on every qubit. Parameters are
// indexed layer-major: theta[layer*N + qubit].
struct Ansatz {
    int num_qubits = 0;
    int layers = 0;

    int num_parameters() const { return layers * num_qubits; }

    Statevector prepare(const std::vector<double>& theta) const {
        if (static_cast<int>(theta.size()) != num_parameters())
            throw std::invalid_argument("ansatz: parameter count mismatch");
        Statevector sv(num_qubits);
        for (int q = 0; q < num_qubits; ++q) sv.apply_h(q);
        for (int l = 0; l < layers; ++l) {
            for (int q = 0; q + 1 < num_qubits; q += 2) sv.apply_cnot(q, q + 1);
            for (int q = 1; q + 1 < num_qubits; q += 2) sv.apply_cnot(q, q + 1);
            for (int q = 0; q < num_qubits; ++q)
                sv.apply_ry(q, theta[static_cast<std::size_t>(l * num_qubits + q)]);
        }
        return sv;
    }

    // Counted from the constructed circuit.
    GateCount gate_count() const {
        GateCount g;
        g.one_qubit = static_cast<long long>(num_qubits) * (1 + layers);
        g.two_qubit = static_cast<long long>(layers) * (num_qubits / 2 + (num_qubits - 1) / 2);
        return g;
    }
};

inline Ansatz build_ansatz(int num_qubits, int layers) {
    if (num_qubits < 1) throw std::invalid_argument("ansatz: needs at least one qubit");
    if (layers < 1) throw std::invalid_argument("ansatz: needs at least one layer");
    return Ansatz{num_qubits, layers};
}

// A product of Pauli-Z factors; diagonal in the computational basis.
struct PauliZString {
    std::vector<int> qubits;

    double eigenvalue(std::uint64_t basis_index) const {
        int sign = 1;
        for (int q : qubits) sign *= spin_of(basis_index, q);
        return static_cast<double>(sign);
    }
};

inline double expectation(const Statevector& sv, const PauliZString& pauli) {
    double e = 0.0;
    for (std::uint64_t k = 0; k < sv.dim(); ++k) e += sv.probability(k) * pauli.eigenvalue(k);
    return e;
}

// The Hamiltonian's non-constant Pauli terms, fields first then couplings.
struct HamiltonianTerms {
    std::vector<PauliZString> paulis;
    std::vector<double> coeffs;
};

inline HamiltonianTerms pauli_terms(const IsingHamiltonian& h) {
    HamiltonianTerms t;
    for (const auto& [q, c] : h.fields) {
        t.paulis.push_back({{q}});
        t.coeffs.push_back(c);
    }
    for (const auto& [qr, c] : h.couplings) {
        t.paulis.push_back({{qr.first, qr.second}});
        t.coeffs.push_back(c);
    }
    return t;
}

struct LinearSystem {
    Eigen::MatrixXd A;  // (#Pauli terms) x N_p
    Eigen::VectorXd B;
    double e_tau = 0.0; // <H_C> at the current parameters
    int evaluations = 0;
};

namespace detail {

// Per-term expectations <P_i> for one prepared state; optionally estimated
// from a finite number of sampled basis states instead of exact probabilities.
inline std::vector<double> term_expectations(const Statevector& sv, const HamiltonianTerms& terms,
                                             long long shots, SplitMix64* rng) {
    std::vector<double> out(terms.paulis.size(), 0.0);
    if (shots <= 0) {
        for (std::uint64_t k = 0; k < sv.dim(); ++k) {
            const double p = sv.probability(k);
            if (p == 0.0) continue;
            for (std::size_t i = 0; i < terms.paulis.size(); ++i)
                out[i] += p * terms.paulis[i].eigenvalue(k);
        }
        return out;
    }
    // Shot-based estimation path; draws are deterministic for a given rng state.
    std::vector<double> cum(sv.dim());
    double total = 0.0;
    for (std::uint64_t k = 0; k < sv.dim(); ++k) { total += sv.probability(k); cum[k] = total; }
    for (long long s = 0; s < shots; ++s) {
        const double u = rng->uniform() * total;
        const std::uint64_t k = static_cast<std::uint64_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        for (std::size_t i = 0; i < terms.paulis.size(); ++i)
            out[i] += terms.paulis[i].eigenvalue(std::min<std::uint64_t>(k, sv.dim() - 1));
    }
    for (double& v : out) v /= static_cast<double>(shots);
    return out;
}

} // namespace detail

// Assembles A theta_dot = B for the current parameters. Every column of A uses
// two parameter-shift evaluations at theta_j +- pi/2; B and E_tau come from a
// single evaluation at theta. All operators are diagonal, so
// B_i = -<P_i (H_C - E_tau)>.
inline LinearSystem build_system(const Ansatz& ansatz, const std::vector<double>& theta,
                                 const IsingHamiltonian& h, long long shots_per_eval = 0,
                                 SplitMix64* rng = nullptr) {
    if (h.num_qubits != ansatz.num_qubits)
        throw std::invalid_argument("build_system: hamiltonian/ansatz qubit mismatch");
    const HamiltonianTerms terms = pauli_terms(h);
    const int rows = static_cast<int>(terms.paulis.size());
    const int n_p = ansatz.num_parameters();

    LinearSystem sys;
    sys.A.setZero(rows, n_p);
    sys.B.setZero(rows);

    const Statevector base = ansatz.prepare(theta);
    sys.evaluations = 1;
    if (shots_per_eval <= 0) {
        std::vector<double> exp_p(terms.paulis.size(), 0.0), exp_ph(terms.paulis.size(), 0.0);
        std::vector<double> eig(terms.paulis.size());
        for (std::uint64_t k = 0; k < base.dim(); ++k) {
            const double p = base.probability(k);
            if (p == 0.0) continue;
            double e_k = h.constant;
            for (std::size_t i = 0; i < terms.paulis.size(); ++i) {
                eig[i] = terms.paulis[i].eigenvalue(k);
                e_k += terms.coeffs[i] * eig[i];
            }
            for (std::size_t i = 0; i < terms.paulis.size(); ++i) {
                exp_p[i] += p * eig[i];
                exp_ph[i] += p * eig[i] * e_k;
            }
        }
        sys.e_tau = h.constant;
        for (std::size_t i = 0; i < terms.paulis.size(); ++i) sys.e_tau += terms.coeffs[i] * exp_p[i];
        for (int i = 0; i < rows; ++i)
            sys.B(i) = -(exp_ph[static_cast<std::size_t>(i)] - sys.e_tau * exp_p[static_cast<std::size_t>(i)]);
    } else {
        if (!rng) throw std::invalid_argument("build_system: shot mode needs an rng");
        // Estimate <P_i>, <P_i H>, <H> from one batch of sampled basis states.
        std::vector<double> cum(base.dim());
        double total = 0.0;
        for (std::uint64_t k = 0; k < base.dim(); ++k) { total += base.probability(k); cum[k] = total; }
        std::vector<double> exp_p(terms.paulis.size(), 0.0), exp_ph(terms.paulis.size(), 0.0);
        double energy = 0.0;
        for (long long s = 0; s < shots_per_eval; ++s) {
            const double u = rng->uniform() * total;
            std::uint64_t k = static_cast<std::uint64_t>(
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            k = std::min<std::uint64_t>(k, base.dim() - 1);
            double e_k = h.constant;
            std::vector<double> eig(terms.paulis.size());
            for (std::size_t i = 0; i < terms.paulis.size(); ++i) {
                eig[i] = terms.paulis[i].eigenvalue(k);
                e_k += terms.coeffs[i] * eig[i];
            }
            energy += e_k;
            for (std::size_t i = 0; i < terms.paulis.size(); ++i) {
                exp_p[i] += eig[i];
                exp_ph[i] += eig[i] * e_k;
            }
        }
        energy /= static_cast<double>(shots_per_eval);
        for (std::size_t i = 0; i < terms.paulis.size(); ++i) {
            exp_p[i] /= static_cast<double>(shots_per_eval);
            exp_ph[i] /= static_cast<double>(shots_per_eval);
        }
        sys.e_tau = energy;
        for (int i = 0; i < rows; ++i)
            sys.B(i) = -(exp_ph[static_cast<std::size_t>(i)] - sys.e_tau * exp_p[static_cast<std::size_t>(i)]);
    }

    // A_ij = Re<psi|P_i d_j psi> = (  <P_i>(theta_j + pi/2) - <P_i>(theta_j - pi/2) ) / 4.
    for (int j = 0; j < n_p; ++j) {
        std::vector<double> shifted = theta;
        shifted[static_cast<std::size_t>(j)] += std::numbers::pi / 2.0;
        const std::vector<double> plus =
            detail::term_expectations(ansatz.prepare(shifted), terms, shots_per_eval, rng);
        shifted[static_cast<std::size_t>(j)] -= std::numbers::pi;
        const std::vector<double> minus =
            detail::term_expectations(ansatz.prepare(shifted), terms, shots_per_eval, rng);
        sys.evaluations += 2;
        for (int i = 0; i < rows; ++i)
            sys.A(i, j) = (plus[static_cast<std::size_t>(i)] - minus[static_cast<std::size_t>(i)]) / 4.0;
    }
    return sys;
}

struct StepResult {
    std::vector<double> theta;
    std::vector<double> theta_dot;
    bool stalled = false;
};

// Truncated-SVD least squares: singular values below reg * sigma_max are
// dropped, giving the minimum-norm solution on the remaining subspace.
inline StepResult solve_step(const LinearSystem& sys, const std::vector<double>& theta, double dtau,
                             double reg = 1e-8) {
    if (dtau <= 0.0) throw std::invalid_argument("solve_step: dtau must be positive");
    StepResult out;
    out.theta = theta;
    out.theta_dot.assign(theta.size(), 0.0);
    if (sys.A.isZero(0.0)) {
        out.stalled = true;
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(reg);
    const Eigen::VectorXd dot = svd.solve(sys.B);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        out.theta_dot[j] = dot(static_cast<Eigen::Index>(j));
        out.theta[j] += dtau * dot(static_cast<Eigen::Index>(j));
    }
    return out;
}

// Delta_tau = Delta_0 (1 - r)^step.
inline double dtau_schedule(double delta0, double r, int step_index) {
    if (r < 0.0 || r >= 1.0) throw std::invalid_argument("dtau_schedule: r must lie in [0, 1)");
    if (step_index < 0) throw std::invalid_argument("dtau_schedule: negative step index");
    return delta0 * std::pow(1.0 - r, step_index);
}

struct VarQiteStep {
    int step = 0;
    double tau = 0.0;    // accumulated imaginary time entering the step
    double dtau = 0.0;   // step size applied
    double energy = 0.0; // <H_C> at the pre-update parameters
    double theta_norm = 0.0;
    bool stalled = false;
};

struct VarQiteConfig {
    int n_steps = 65;
    double delta0 = 0.1;
    double r = 0.06;
    double reg = 1e-8;
    long long shots_final = 4000;
    std::uint64_t seed = 0;
    long long shots_per_eval = 0; // 0 = exact expectations
};

struct VarQiteResult {
    std::vector<VarQiteStep> trajectory;
    std::vector<double> final_theta;
    double final_energy = 0.0;
    SampleSet final_samples;
    long long evaluations = 0; // n_steps * (2 N_p + 1)
};

inline VarQiteResult run_varqite(const IsingHamiltonian& h, const Ansatz& ansatz, const VarQiteConfig& cfg) {
    if (cfg.n_steps < 1) throw std::invalid_argument("varqite: n_steps must be >= 1");
    std::vector<double> theta(static_cast<std::size_t>(ansatz.num_parameters()), 0.0);
    SplitMix64 rng(mix_seed(cfg.seed, 0x7a51));

    VarQiteResult result;
    double tau = 0.0;
    for (int step = 0; step < cfg.n_steps; ++step) {
        const LinearSystem sys = build_system(ansatz, theta, h, cfg.shots_per_eval,
                                              cfg.shots_per_eval > 0 ? &rng : nullptr);
        result.evaluations += sys.evaluations;
        const double dtau = dtau_schedule(cfg.delta0, cfg.r, step);
        const StepResult upd = solve_step(sys, theta, dtau, cfg.reg);

        VarQiteStep rec;
        rec.step = step;
        rec.tau = tau;
        rec.dtau = dtau;
        rec.energy = sys.e_tau;
        double nrm = 0.0;
        for (double t : theta) nrm += t * t;
        rec.theta_norm = std::sqrt(nrm);
        rec.stalled = upd.stalled;
        result.trajectory.push_back(rec);

        theta = upd.theta;
        tau += dtau;
    }
    const Statevector final_state = ansatz.prepare(theta);
    const std::vector<double> energies = diagonal_energies(h);
    double final_energy = 0.0;
    for (std::uint64_t k = 0; k < final_state.dim(); ++k)
        final_energy += final_state.probability(k) * energies[k];
    result.final_energy = final_energy;
    result.final_theta = theta;
    result.final_samples = sample(final_state, h, cfg.shots_final, mix_seed(cfg.seed, 0xf1a1));
    return result;
}

} // namespace qsched

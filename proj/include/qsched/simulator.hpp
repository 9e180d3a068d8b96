#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsched/bits.hpp"
#include "qsched/ising.hpp"
#include "qsched/rng.hpp"

namespace qsched {

using cplx = std::complex<double>;

// Angle conventions: R_a(theta) = exp(-i theta sigma_a / 2),
// R_ZZ(theta) = exp(-i theta Z(x)Z / 2).
class Statevector {
public:
    explicit Statevector(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1) throw std::invalid_argument("statevector: needs at least one qubit");
        if (num_qubits > qubit_cap())
            throw std::invalid_argument("statevector: " + std::to_string(num_qubits) +
                                        " qubits exceeds cap " + std::to_string(qubit_cap()));
        amps_.assign(1ULL << num_qubits, cplx(0.0, 0.0));
        amps_[0] = cplx(1.0, 0.0);
    }

    int num_qubits() const { return num_qubits_; }
    std::uint64_t dim() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    cplx& amp(std::uint64_t k) { return amps_[k]; }
    const cplx& amp(std::uint64_t k) const { return amps_[k]; }

    double norm_sq() const {
        double s = 0.0;
        for (const cplx& a : amps_) s += std::norm(a);
        return s;
    }

    double probability(std::uint64_t k) const { return std::norm(amps_[k]); }

    void apply_1q(int q, cplx u00, cplx u01, cplx u10, cplx u11) {
        check_qubit(q);
        const std::uint64_t mask = 1ULL << q;
        const std::uint64_t n = dim();
        for (std::uint64_t k = 0; k < n; ++k) {
            if (k & mask) continue;
            const std::uint64_t k1 = k | mask;
            const cplx a0 = amps_[k];
            const cplx a1 = amps_[k1];
            amps_[k] = u00 * a0 + u01 * a1;
            amps_[k1] = u10 * a0 + u11 * a1;
        }
    }

    void apply_h(int q) {
        const double s = 1.0 / std::sqrt(2.0);
        apply_1q(q, {s, 0}, {s, 0}, {s, 0}, {-s, 0});
    }

    void apply_x(int q) { apply_1q(q, {0, 0}, {1, 0}, {1, 0}, {0, 0}); }

    void apply_rx(int q, double theta) {
        const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
        apply_1q(q, {c, 0}, {0, -s}, {0, -s}, {c, 0});
    }

    void apply_ry(int q, double theta) {
        const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
        apply_1q(q, {c, 0}, {-s, 0}, {s, 0}, {c, 0});
    }

    void apply_rz(int q, double theta) {
        check_qubit(q);
        const cplx p0 = std::polar(1.0, -theta / 2.0);
        const cplx p1 = std::polar(1.0, theta / 2.0);
        const std::uint64_t mask = 1ULL << q;
        for (std::uint64_t k = 0; k < dim(); ++k) amps_[k] *= (k & mask) ? p1 : p0;
    }

    void apply_rzz(int q, int r, double theta) {
        check_qubit(q);
        check_qubit(r);
        if (q == r) throw std::invalid_argument("rzz: qubits must differ");
        const cplx even = std::polar(1.0, -theta / 2.0); // z_q z_r = +1
        const cplx odd = std::polar(1.0, theta / 2.0);
        const std::uint64_t mq = 1ULL << q, mr = 1ULL << r;
        for (std::uint64_t k = 0; k < dim(); ++k)
            amps_[k] *= (((k & mq) != 0) == ((k & mr) != 0)) ? even : odd;
    }

    void apply_cnot(int control, int target) {
        check_qubit(control);
        check_qubit(target);
        if (control == target) throw std::invalid_argument("cnot: qubits must differ");
        const std::uint64_t mc = 1ULL << control, mt = 1ULL << target;
        for (std::uint64_t k = 0; k < dim(); ++k) {
            if ((k & mc) && !(k & mt)) std::swap(amps_[k], amps_[k | mt]);
        }
    }

    void apply_global_phase(double phase) {
        const cplx p = std::polar(1.0, phase);
        for (cplx& a : amps_) a *= p;
    }

    // exp(-i gamma H_C) on a diagonal Hamiltonian, given its basis energies.
    void apply_cost_phase(const std::vector<double>& energies, double gamma) {
        if (energies.size() != dim())
            throw std::invalid_argument("cost phase: energy table dimension mismatch");
        if (gamma == 0.0) return;
        for (std::uint64_t k = 0; k < dim(); ++k)
            amps_[k] *= std::polar(1.0, -gamma * energies[k]);
    }

    cplx inner(const Statevector& other) const {
        if (other.dim() != dim()) throw std::invalid_argument("inner: dimension mismatch");
        cplx s(0.0, 0.0);
        for (std::uint64_t k = 0; k < dim(); ++k) s += std::conj(amps_[k]) * other.amps_[k];
        return s;
    }

private:
    void check_qubit(int q) const {
        if (q < 0 || q >= num_qubits_) throw std::invalid_argument("qubit index out of range");
    }

    int num_qubits_;
    std::vector<cplx> amps_;
};

inline void apply_cost_phase(Statevector& sv, const IsingHamiltonian& h, double gamma) {
    if (h.num_qubits != sv.num_qubits())
        throw std::invalid_argument("cost phase: qubit count mismatch");
    sv.apply_cost_phase(diagonal_energies(h), gamma);
}

// Asymmetric readout flips per physical slot; slot_map sends logical qubit q
// to the physical slot whose flip rates apply to it.
struct NoiseModel {
    std::vector<double> flip01; // P(read 1 | prepared 0), per slot
    std::vector<double> flip10; // P(read 0 | prepared 1), per slot
    std::vector<int> slot_map;  // logical qubit -> physical slot

    static NoiseModel uniform(int num_qubits, double p01, double p10) {
        NoiseModel n;
        n.flip01.assign(static_cast<std::size_t>(num_qubits), p01);
        n.flip10.assign(static_cast<std::size_t>(num_qubits), p10);
        n.slot_map.resize(static_cast<std::size_t>(num_qubits));
        for (int q = 0; q < num_qubits; ++q) n.slot_map[static_cast<std::size_t>(q)] = q;
        return n;
    }

    // Per-slot rates drawn once around a scale eps, with stronger 1->0 decay
    // than 0->1 excitation.
    static NoiseModel random_asymmetric(int num_qubits, double eps, std::uint64_t seed) {
        NoiseModel n = uniform(num_qubits, 0.0, 0.0);
        SplitMix64 rng(seed);
        for (int q = 0; q < num_qubits; ++q) {
            n.flip01[static_cast<std::size_t>(q)] = eps * (0.5 + rng.uniform());       // [0.5, 1.5) eps
            n.flip10[static_cast<std::size_t>(q)] = eps * (1.0 + 2.0 * rng.uniform()); // [1.0, 3.0) eps
        }
        return n;
    }

    void validate(int num_qubits) const {
        if (static_cast<int>(slot_map.size()) != num_qubits)
            throw std::invalid_argument("noise: slot_map size != qubit count");
        const int slots = static_cast<int>(flip01.size());
        if (flip10.size() != flip01.size())
            throw std::invalid_argument("noise: flip01/flip10 size mismatch");
        for (int s : slot_map)
            if (s < 0 || s >= slots) throw std::invalid_argument("noise: slot_map entry out of range");
        for (double p : flip01)
            if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise: flip01 outside [0,1]");
        for (double p : flip10)
            if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise: flip10 outside [0,1]");
    }

    // Returns this model with logical qubits re-routed through `perm` first.
    NoiseModel remapped(const std::vector<int>& perm) const {
        NoiseModel n = *this;
        for (std::size_t q = 0; q < perm.size(); ++q)
            n.slot_map[q] = slot_map[static_cast<std::size_t>(perm[q])];
        return n;
    }
};

struct SampleSet {
    std::map<std::string, long long> counts;
    std::map<std::string, double> energies;
    long long total_shots = 0;

    std::vector<std::string> bitstrings() const {
        std::vector<std::string> out;
        out.reserve(counts.size());
        for (const auto& [s, _] : counts) out.push_back(s);
        return out;
    }

    double frequency(const std::string& s) const {
        auto it = counts.find(s);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_shots);
    }

    double mean_energy() const {
        double e = 0.0;
        for (const auto& [s, c] : counts) e += energies.at(s) * static_cast<double>(c);
        return e / static_cast<double>(total_shots);
    }

    double best_energy() const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [s, e] : energies) best = std::min(best, e);
        return best;
    }

    // Total frequency of outcomes at a given energy (handles degenerate optima).
    double mass_at_energy(double energy, double tol = 1e-9) const {
        double p = 0.0;
        for (const auto& [s, c] : counts)
            if (std::abs(energies.at(s) - energy) <= tol) p += static_cast<double>(c);
        return p / static_cast<double>(total_shots);
    }
};

// Draws shots i.i.d. from |amplitude|^2, optionally pushing each bit through
// the readout-noise channel. Deterministic for a fixed seed.
inline SampleSet sample(const Statevector& sv, const IsingHamiltonian& h, long long shots,
                        std::uint64_t seed, const std::optional<NoiseModel>& noise = std::nullopt) {
    if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
    if (h.num_qubits != sv.num_qubits())
        throw std::invalid_argument("sample: hamiltonian/state qubit mismatch");
    if (noise) noise->validate(sv.num_qubits());

    // Two-level search: block prefix sums, then a scan inside the block.
    const std::uint64_t dim = sv.dim();
    const std::uint64_t block = std::min<std::uint64_t>(dim, 4096);
    const std::uint64_t nblocks = (dim + block - 1) / block;
    std::vector<double> block_cum(nblocks, 0.0);
    double total = 0.0;
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        const std::uint64_t end = std::min(dim, (b + 1) * block);
        for (std::uint64_t k = b * block; k < end; ++k) total += sv.probability(k);
        block_cum[b] = total;
    }

    SplitMix64 rng(seed);
    SampleSet out;
    out.total_shots = shots;
    const int n = sv.num_qubits();
    for (long long shot = 0; shot < shots; ++shot) {
        const double u = rng.uniform() * total;
        std::uint64_t b = static_cast<std::uint64_t>(
            std::lower_bound(block_cum.begin(), block_cum.end(), u) - block_cum.begin());
        if (b >= nblocks) b = nblocks - 1;
        double cum = (b == 0) ? 0.0 : block_cum[b - 1];
        std::uint64_t k = b * block;
        const std::uint64_t end = std::min(dim, (b + 1) * block);
        for (; k + 1 < end; ++k) {
            cum += sv.probability(k);
            if (u < cum) break;
        }
        std::uint64_t outcome = k;
        if (noise) {
            std::uint64_t noisy = 0;
            for (int q = 0; q < n; ++q) {
                int bit = bit_of(outcome, q);
                const int slot = noise->slot_map[static_cast<std::size_t>(q)];
                const double p = bit ? noise->flip10[static_cast<std::size_t>(slot)]
                                     : noise->flip01[static_cast<std::size_t>(slot)];
                if (rng.bernoulli(p)) bit ^= 1;
                if (bit) noisy |= (1ULL << q);
            }
            outcome = noisy;
        }
        out.counts[index_to_bitstring(outcome, n)] += 1;
    }
    for (const auto& [s, _] : out.counts) out.energies[s] = h.energy_of_index(bitstring_to_index(s));
    return out;
}

// --- gate accounting ------------------------------------------------------

struct GateCount {
    long long one_qubit = 0;
    long long two_qubit = 0;
};

enum class MixerKind { standard, warm_start };

// Compiled-circuit convention: one R_y preparation layer, then per QAOA layer
// N field R_z gates, |couplings| R_ZZ gates, and a 3-gate mixer per qubit.
// Both mixer kinds are costed identically under this convention.
inline GateCount count_gates(int num_qubits, int p, const IsingHamiltonian& h, MixerKind /*mixer*/) {
    if (p < 0) throw std::invalid_argument("count_gates: negative depth");
    GateCount g;
    g.one_qubit = static_cast<long long>(num_qubits) * (1 + 4 * static_cast<long long>(p));
    g.two_qubit = static_cast<long long>(p) * static_cast<long long>(h.couplings.size());
    return g;
}

} // namespace qsched

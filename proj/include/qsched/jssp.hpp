#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsched/qubo.hpp"

namespace qsched {

// Machines, jobs, and time slots are 1-based throughout, matching the usual
// scheduling notation. Qubit/variable indices are 0-based.

struct VarKey {
    int machine = 0;
    int job = 0;
    int time = 0;
    auto operator<=>(const VarKey&) const = default;
};

struct JsspCosts {
    long long earliness = 1;  // c_e, per slot early
    long long lateness = 3;   // c_l, per slot late
    long long switching = 5;  // c_p, per production-group switch
    long long penalty = 10;   // lambda, per unit constraint violation
};

// A just-in-time job shop: every job visits every machine exactly once, all
// operations take one slot, idle slots are fixed zero-capacity positions.
struct JsspInstance {
    int num_machines = 0;
    int num_jobs = 0;
    std::vector<int> time_slots;                           // T_m, [machine-1]
    std::vector<std::vector<std::string>> production_groups; // [machine-1][job-1]
    std::vector<int> due_times;                            // d_j, [job-1]
    JsspCosts costs;
    std::vector<std::set<int>> idle_slots;                 // I_m, [machine-1]

    int slots(int machine) const { return time_slots[static_cast<std::size_t>(machine - 1)]; }
    int due(int job) const { return due_times[static_cast<std::size_t>(job - 1)]; }

    const std::string& group(int machine, int job) const {
        return production_groups[static_cast<std::size_t>(machine - 1)][static_cast<std::size_t>(job - 1)];
    }

    bool is_idle(int machine, int time) const {
        return idle_slots[static_cast<std::size_t>(machine - 1)].count(time) > 0;
    }

    // Active slots of a machine, ascending.
    std::vector<int> active_slots(int machine) const {
        std::vector<int> a;
        for (int t = 1; t <= slots(machine); ++t)
            if (!is_idle(machine, t)) a.push_back(t);
        return a;
    }

    void validate() const {
        if (num_machines < 1 || num_jobs < 1)
            throw std::invalid_argument("instance: needs at least one machine and one job");
        if (static_cast<int>(time_slots.size()) != num_machines ||
            static_cast<int>(production_groups.size()) != num_machines ||
            static_cast<int>(idle_slots.size()) != num_machines)
            throw std::invalid_argument("instance: per-machine array sizes disagree with machine count");
        if (static_cast<int>(due_times.size()) != num_jobs)
            throw std::invalid_argument("instance: due-time count disagrees with job count");
        int max_t = *std::max_element(time_slots.begin(), time_slots.end());
        for (int m = 1; m <= num_machines; ++m) {
            if (static_cast<int>(production_groups[static_cast<std::size_t>(m - 1)].size()) != num_jobs)
                throw std::invalid_argument("instance: production-group row size disagrees with job count");
            for (int t : idle_slots[static_cast<std::size_t>(m - 1)])
                if (t < 1 || t > slots(m))
                    throw std::invalid_argument("instance: idle slot outside 1..T_m");
            if (static_cast<int>(active_slots(m).size()) != num_jobs)
                throw std::invalid_argument("instance: machine " + std::to_string(m) +
                                            " must have exactly one active slot per job");
        }
        for (int j = 1; j <= num_jobs; ++j)
            if (due(j) < 1 || due(j) > max_t)
                throw std::invalid_argument("instance: due time of job " + std::to_string(j) +
                                            " outside 1..max T_m");
    }
};

// Binary occupation map over the instance's variable index set
// {(m, j, t) : t active on m}. Idle slots carry no variable and read as 0.
struct ScheduleAssignment {
    int num_machines = 0;
    int num_jobs = 0;
    std::vector<int> time_slots;
    std::vector<std::uint8_t> data; // flat [machine][job][time]

    static ScheduleAssignment zeros(const JsspInstance& inst) {
        ScheduleAssignment a;
        a.num_machines = inst.num_machines;
        a.num_jobs = inst.num_jobs;
        a.time_slots = inst.time_slots;
        std::size_t total = 0;
        for (int t : inst.time_slots) total += static_cast<std::size_t>(inst.num_jobs) * static_cast<std::size_t>(t);
        a.data.assign(total, 0);
        return a;
    }

    std::size_t flat_index(int machine, int job, int time) const {
        if (machine < 1 || machine > num_machines || job < 1 || job > num_jobs ||
            time < 1 || time > time_slots[static_cast<std::size_t>(machine - 1)])
            throw std::invalid_argument("assignment: (m,j,t) out of range");
        std::size_t base = 0;
        for (int m = 0; m < machine - 1; ++m)
            base += static_cast<std::size_t>(num_jobs) * static_cast<std::size_t>(time_slots[static_cast<std::size_t>(m)]);
        return base + static_cast<std::size_t>(job - 1) * static_cast<std::size_t>(time_slots[static_cast<std::size_t>(machine - 1)]) +
               static_cast<std::size_t>(time - 1);
    }

    int get(int machine, int job, int time) const { return data[flat_index(machine, job, time)]; }

    void set(int machine, int job, int time, int value) {
        if (value != 0 && value != 1) throw std::invalid_argument("assignment: values must be 0 or 1");
        data[flat_index(machine, job, time)] = static_cast<std::uint8_t>(value);
    }

    bool operator==(const ScheduleAssignment&) const = default;
};

// --- cost terms ----------------------------------------------------------

// Early/late delivery cost of one job, read off the last machine's row.
inline long long earliness_lateness_cost(const JsspInstance& inst, const ScheduleAssignment& x, int job) {
    const int last = inst.num_machines;
    long long cost = 0;
    for (int t : inst.active_slots(last)) {
        if (!x.get(last, job, t)) continue;
        const int d = inst.due(job);
        cost += (t <= d) ? inst.costs.earliness * (d - t) : inst.costs.lateness * (t - d);
    }
    return cost;
}

// Production switching cost on one machine: c_p per adjacent pair of slots
// holding jobs from different groups.
inline long long switching_cost(const JsspInstance& inst, const ScheduleAssignment& x, int machine) {
    long long switches = 0;
    for (int t = 1; t < inst.slots(machine); ++t) {
        if (inst.is_idle(machine, t) || inst.is_idle(machine, t + 1)) continue;
        for (int j1 = 1; j1 <= inst.num_jobs; ++j1) {
            if (!x.get(machine, j1, t)) continue;
            for (int j2 = 1; j2 <= inst.num_jobs; ++j2) {
                if (!x.get(machine, j2, t + 1)) continue;
                if (inst.group(machine, j1) != inst.group(machine, j2)) ++switches;
            }
        }
    }
    return inst.costs.switching * switches;
}

struct PenaltyTriple {
    long long job_assign = 0;
    long long time_assign = 0;
    long long order = 0;
    long long sum() const { return job_assign + time_assign + order; }
    bool all_zero() const { return sum() == 0; }
};

// Quadratic constraint residuals; all three vanish exactly on feasible schedules.
inline PenaltyTriple constraint_penalties(const JsspInstance& inst, const ScheduleAssignment& x) {
    PenaltyTriple p;
    for (int m = 1; m <= inst.num_machines; ++m) {
        for (int j = 1; j <= inst.num_jobs; ++j) {
            long long g = 0;
            for (int t : inst.active_slots(m)) g += x.get(m, j, t);
            p.job_assign += (g - 1) * (g - 1);
        }
        for (int t : inst.active_slots(m)) {
            long long l = 0;
            for (int j = 1; j <= inst.num_jobs; ++j) l += x.get(m, j, t);
            p.time_assign += (l - 1) * (l - 1);
        }
        // Idle slots hold no variables, so their capacity residual is identically zero.
    }
    // Sequential processing: a job placed at slot t on machine m must not appear
    // at any slot t' <= t on machine m+1 (it has to finish first).
    for (int m = 1; m < inst.num_machines; ++m) {
        for (int j = 1; j <= inst.num_jobs; ++j) {
            for (int t = 2; t <= inst.num_jobs && t <= inst.slots(m); ++t) {
                if (inst.is_idle(m, t) || !x.get(m, j, t)) continue;
                for (int tp = 1; tp <= t && tp <= inst.slots(m + 1); ++tp) {
                    if (inst.is_idle(m + 1, tp)) continue;
                    p.order += x.get(m + 1, j, tp);
                }
            }
        }
    }
    return p;
}

inline long long plain_cost(const JsspInstance& inst, const ScheduleAssignment& x) {
    long long c = 0;
    for (int j = 1; j <= inst.num_jobs; ++j) c += earliness_lateness_cost(inst, x, j);
    for (int m = 1; m <= inst.num_machines; ++m) c += switching_cost(inst, x, m);
    return c;
}

inline long long total_cost(const JsspInstance& inst, const ScheduleAssignment& x) {
    return plain_cost(inst, x) + inst.costs.penalty * constraint_penalties(inst, x).sum();
}

// --- makespan bounds (generic durations, jobs x machines) -----------------

inline std::pair<long long, long long> makespan_bounds(const std::vector<std::vector<long long>>& proc_times) {
    if (proc_times.empty()) throw std::invalid_argument("makespan_bounds: empty job set");
    long long t_max = 0, t_min = 0;
    for (const auto& job : proc_times) {
        long long s = 0;
        for (long long p : job) {
            if (p < 0) throw std::invalid_argument("makespan_bounds: negative duration");
            s += p;
        }
        t_max += s;
        t_min = std::max(t_min, s);
    }
    return {t_min, t_max};
}

// --- sub-instances --------------------------------------------------------

struct FreeSpec {
    std::vector<int> free_counts;    // n_m per machine, nonincreasing
    std::vector<VarKey> refreeze;    // individual variables forced back to 0
};

struct SubInstance {
    JsspInstance instance;
    ScheduleAssignment base;         // feasible source of all frozen values
    std::vector<VarKey> free_vars;   // lex-sorted (m, j, t); position = qubit index
    int n_var = 0;

    bool is_free(const VarKey& k) const {
        return std::binary_search(free_vars.begin(), free_vars.end(), k);
    }

    // Frozen variables keep their base value; refrozen ones were 0 in the base.
    int frozen_value(const VarKey& k) const { return base.get(k.machine, k.job, k.time); }

    // Refrozen variables need no handling here: they were 0 in the base.
    ScheduleAssignment merge(const std::vector<int>& bits) const {
        if (static_cast<int>(bits.size()) != n_var)
            throw std::invalid_argument("merge: bit count != n_var");
        ScheduleAssignment x = base;
        for (std::size_t i = 0; i < free_vars.size(); ++i) {
            const VarKey& k = free_vars[i];
            x.set(k.machine, k.job, k.time, bits[i]);
        }
        return x;
    }

    std::vector<VarKey> refrozen;
};

// Unfreezes the last n_m active slots of each machine together with the jobs
// the base schedule places there; everything else stays at its base value.
inline SubInstance derive_sub_instance(const JsspInstance& inst, const ScheduleAssignment& base,
                                       const FreeSpec& spec) {
    if (static_cast<int>(spec.free_counts.size()) != inst.num_machines)
        throw std::invalid_argument("freeze: free_spec needs one count per machine");
    for (std::size_t i = 0; i + 1 < spec.free_counts.size(); ++i)
        if (spec.free_counts[i] < spec.free_counts[i + 1])
            throw std::invalid_argument("freeze: free counts must satisfy n_1 >= n_2 >= ... >= 0");
    if (!spec.free_counts.empty() && spec.free_counts.back() < 0)
        throw std::invalid_argument("freeze: free counts must be nonnegative");
    if (!constraint_penalties(inst, base).all_zero())
        throw std::invalid_argument("freeze: base assignment is not a feasible schedule");

    SubInstance sub;
    sub.instance = inst;
    sub.base = base;
    for (int m = 1; m <= inst.num_machines; ++m) {
        const int n_m = spec.free_counts[static_cast<std::size_t>(m - 1)];
        const auto active = inst.active_slots(m);
        if (n_m > static_cast<int>(active.size()))
            throw std::invalid_argument("freeze: n_" + std::to_string(m) +
                                        " exceeds the machine's active slot count");
        std::vector<int> slots(active.end() - n_m, active.end());
        std::vector<int> jobs;
        for (int t : slots) {
            int occupant = 0;
            for (int j = 1; j <= inst.num_jobs; ++j)
                if (base.get(m, j, t)) occupant = j;
            jobs.push_back(occupant);
        }
        std::sort(jobs.begin(), jobs.end());
        for (int j : jobs)
            for (int t : slots) sub.free_vars.push_back({m, j, t});
    }
    std::sort(sub.free_vars.begin(), sub.free_vars.end());

    for (const VarKey& k : spec.refreeze) {
        auto it = std::lower_bound(sub.free_vars.begin(), sub.free_vars.end(), k);
        if (it == sub.free_vars.end() || *it != k)
            throw std::invalid_argument("freeze: refreeze target is not a free variable");
        if (base.get(k.machine, k.job, k.time) != 0)
            throw std::invalid_argument("freeze: refusing to refreeze a variable whose base value is 1");
        sub.free_vars.erase(it);
        sub.refrozen.push_back(k);
    }
    sub.n_var = static_cast<int>(sub.free_vars.size());
    return sub;
}

// --- QUBO compilation -----------------------------------------------------

namespace detail {

// Either a fixed 0/1 value (frozen or idle) or the qubit index of a free variable.
struct VarRef {
    bool is_var = false;
    int index = 0;  // qubit index when is_var
    int value = 0;  // constant value otherwise
};

class QuboBuilder {
public:
    QuboBuilder(const SubInstance& sub) : sub_(sub) {
        qubo_.num_vars = sub.n_var;
        for (std::size_t i = 0; i < sub.free_vars.size(); ++i)
            index_[sub.free_vars[i]] = static_cast<int>(i);
    }

    VarRef ref(int m, int j, int t) const {
        auto it = index_.find({m, j, t});
        if (it != index_.end()) return {true, it->second, 0};
        return {false, 0, sub_.frozen_value({m, j, t})};
    }

    void add_term(double coeff, const VarRef& a) {
        if (coeff == 0.0) return;
        if (a.is_var) qubo_.add_linear(a.index, coeff);
        else qubo_.add_offset(coeff * a.value);
    }

    void add_product(double coeff, const VarRef& a, const VarRef& b) {
        if (coeff == 0.0) return;
        if (a.is_var && b.is_var) qubo_.add_quadratic(a.index, b.index, coeff);
        else if (a.is_var) { if (b.value) qubo_.add_linear(a.index, coeff); }
        else if (b.is_var) { if (a.value) qubo_.add_linear(b.index, coeff); }
        else qubo_.add_offset(coeff * a.value * b.value);
    }

    // coeff * (sum of refs + shift)^2, expanded with x^2 = x.
    void add_squared_form(double coeff, const std::vector<VarRef>& refs, double shift) {
        double constant = shift;
        std::vector<int> vars;
        for (const VarRef& r : refs) {
            if (r.is_var) vars.push_back(r.index);
            else constant += r.value;
        }
        qubo_.add_offset(coeff * constant * constant);
        for (std::size_t i = 0; i < vars.size(); ++i) {
            qubo_.add_linear(vars[i], coeff * (1.0 + 2.0 * constant));
            for (std::size_t j = i + 1; j < vars.size(); ++j)
                qubo_.add_quadratic(vars[i], vars[j], 2.0 * coeff);
        }
    }

    QuboProblem take() {
        qubo_.compress();
        return std::move(qubo_);
    }

private:
    const SubInstance& sub_;
    QuboProblem qubo_;
    std::map<VarKey, int> index_;
};

} // namespace detail

// Expands the full scheduling cost over the free variables only; frozen values
// fold into linear terms and the offset. Qubit i is free_vars[i].
inline QuboProblem build_qubo(const SubInstance& sub) {
    const JsspInstance& inst = sub.instance;
    detail::QuboBuilder b(sub);
    const double lambda = static_cast<double>(inst.costs.penalty);

    // Delivery deviation, last machine only.
    const int last = inst.num_machines;
    for (int j = 1; j <= inst.num_jobs; ++j) {
        for (int t : inst.active_slots(last)) {
            const int d = inst.due(j);
            const double coeff = (t <= d) ? static_cast<double>(inst.costs.earliness * (d - t))
                                          : static_cast<double>(inst.costs.lateness * (t - d));
            b.add_term(coeff, b.ref(last, j, t));
        }
    }

    // Production-group switches between adjacent active slots.
    for (int m = 1; m <= inst.num_machines; ++m) {
        for (int t = 1; t < inst.slots(m); ++t) {
            if (inst.is_idle(m, t) || inst.is_idle(m, t + 1)) continue;
            for (int j1 = 1; j1 <= inst.num_jobs; ++j1)
                for (int j2 = 1; j2 <= inst.num_jobs; ++j2)
                    if (inst.group(m, j1) != inst.group(m, j2))
                        b.add_product(static_cast<double>(inst.costs.switching),
                                      b.ref(m, j1, t), b.ref(m, j2, t + 1));
        }
    }

    // Job- and time-assignment residuals.
    for (int m = 1; m <= inst.num_machines; ++m) {
        const auto active = inst.active_slots(m);
        for (int j = 1; j <= inst.num_jobs; ++j) {
            std::vector<detail::VarRef> row;
            for (int t : active) row.push_back(b.ref(m, j, t));
            b.add_squared_form(lambda, row, -1.0);
        }
        for (int t : active) {
            std::vector<detail::VarRef> col;
            for (int j = 1; j <= inst.num_jobs; ++j) col.push_back(b.ref(m, j, t));
            b.add_squared_form(lambda, col, -1.0);
        }
    }

    // Sequential processing across consecutive machines.
    for (int m = 1; m < inst.num_machines; ++m) {
        for (int j = 1; j <= inst.num_jobs; ++j) {
            for (int t = 2; t <= inst.num_jobs && t <= inst.slots(m); ++t) {
                if (inst.is_idle(m, t)) continue;
                for (int tp = 1; tp <= t && tp <= inst.slots(m + 1); ++tp) {
                    if (inst.is_idle(m + 1, tp)) continue;
                    b.add_product(lambda, b.ref(m, j, t), b.ref(m + 1, j, tp));
                }
            }
        }
    }
    return b.take();
}

// --- decoding -------------------------------------------------------------

struct DecodedSchedule {
    ScheduleAssignment assignment;
    PenaltyTriple penalties;
    bool feasible = false;
    long long cost = 0;
};

inline DecodedSchedule decode_bits(const SubInstance& sub, const std::vector<int>& bits) {
    DecodedSchedule d;
    d.assignment = sub.merge(bits);
    d.penalties = constraint_penalties(sub.instance, d.assignment);
    d.feasible = d.penalties.all_zero();
    d.cost = total_cost(sub.instance, d.assignment);
    return d;
}

inline DecodedSchedule decode_bitstring(const SubInstance& sub, const std::string& bitstring) {
    if (static_cast<int>(bitstring.size()) != sub.n_var)
        throw std::invalid_argument("decode: bitstring length != n_var");
    std::vector<int> bits(bitstring.size());
    for (std::size_t i = 0; i < bitstring.size(); ++i) {
        if (bitstring[i] != '0' && bitstring[i] != '1')
            throw std::invalid_argument("decode: bitstring must contain only '0'/'1'");
        bits[i] = bitstring[i] - '0';
    }
    return decode_bits(sub, bits);
}

// Machine rows x slot columns; "##" idle, "." empty, "!!" over-assigned.
inline std::string render_gantt(const JsspInstance& inst, const ScheduleAssignment& x) {
    std::ostringstream out;
    const int max_t = *std::max_element(inst.time_slots.begin(), inst.time_slots.end());
    out << "slot ";
    for (int t = 1; t <= max_t; ++t) out << (t < 10 ? "  " : " ") << t;
    out << "\n";
    for (int m = 1; m <= inst.num_machines; ++m) {
        out << "m" << m << "   ";
        for (int t = 1; t <= inst.slots(m); ++t) {
            if (inst.is_idle(m, t)) { out << " ##"; continue; }
            int count = 0, job = 0;
            for (int j = 1; j <= inst.num_jobs; ++j)
                if (x.get(m, j, t)) { ++count; job = j; }
            if (count == 0) out << "  .";
            else if (count > 1) out << " !!";
            else out << (job < 10 ? "  " : " ") << job;
        }
        out << "\n";
    }
    return out.str();
}

// --- instance builders ----------------------------------------------------

// The 3-machine, 20-job master instance used throughout.
inline JsspInstance build_full_instance() {
    JsspInstance inst;
    inst.num_machines = 3;
    inst.num_jobs = 20;
    inst.time_slots = {20, 22, 23};
    inst.production_groups = {
        {"A", "B", "C", "D", "C", "B", "C", "D", "C", "B", "C", "D", "A", "B", "C", "D", "D", "B", "C", "D"},
        {"A", "A", "B", "B", "C", "D", "A", "B", "D", "C", "D", "C", "D", "D", "A", "A", "B", "B", "D", "B"},
        {"B", "B", "B", "A", "A", "A", "C", "C", "B", "D", "D", "A", "A", "A", "B", "D", "B", "D", "C", "B"},
    };
    inst.due_times = {3, 3, 5, 6, 6, 8, 10, 11, 11, 12, 13, 13, 15, 17, 17, 19, 20, 20, 21, 21};
    inst.costs = {1, 3, 5, 10};
    inst.idle_slots = {{}, {1, 22}, {1, 2, 23}};
    inst.validate();
    return inst;
}

// Small master for exhaustive validation and desk-scale experiments: same
// shape as the full instance (leading/trailing idle pattern), J jobs.
inline JsspInstance build_synthetic_instance(int jobs) {
    if (jobs < 3 || jobs > 8)
        throw std::invalid_argument("synthetic instance supports 3..8 jobs");
    JsspInstance inst;
    inst.num_machines = 3;
    inst.num_jobs = jobs;
    inst.time_slots = {jobs, jobs + 2, jobs + 3};
    inst.idle_slots = {{}, {1, jobs + 2}, {1, 2, jobs + 3}};
    static const std::vector<std::string> cycle = {"A", "B", "A", "B", "B", "A", "B", "A"};
    inst.production_groups.assign(3, {});
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < jobs; ++j)
            inst.production_groups[static_cast<std::size_t>(m)].push_back(
                cycle[static_cast<std::size_t>((j + 2 * m) % static_cast<int>(cycle.size()))]);
    // Due times sit near the diagonal completion slot j+2 with a small spread,
    // so both early and late deliveries show up in low-cost schedules.
    for (int j = 1; j <= jobs; ++j) {
        int d = j + 2 + ((j % 3 == 0) ? -1 : (j % 3 == 1 ? 1 : 0));
        inst.due_times.push_back(std::clamp(d, 1, jobs + 3));
    }
    inst.validate();
    return inst;
}

// Canonical feasible base: job j occupies the j-th active slot of every machine.
inline ScheduleAssignment diagonal_base(const JsspInstance& inst) {
    ScheduleAssignment x = ScheduleAssignment::zeros(inst);
    for (int m = 1; m <= inst.num_machines; ++m) {
        const auto active = inst.active_slots(m);
        for (int j = 1; j <= inst.num_jobs; ++j)
            x.set(m, j, active[static_cast<std::size_t>(j - 1)], 1);
    }
    if (!constraint_penalties(inst, x).all_zero())
        throw std::invalid_argument("diagonal base is infeasible for this instance");
    return x;
}

} // namespace qsched

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsched/dnl.hpp"
#include "qsched/ising.hpp"
#include "qsched/jssp.hpp"
#include "qsched/oracle.hpp"
#include "qsched/qaoa.hpp"
#include "qsched/qubo.hpp"
#include "qsched/simulator.hpp"
#include "qsched/varqite.hpp"

namespace qsched {

using json = nlohmann::json;

// --- instance files ---------------------------------------------------------

inline json instance_to_json(const JsspInstance& inst) {
    json j;
    j["machines"] = inst.num_machines;
    j["jobs"] = inst.num_jobs;
    j["time_slots"] = inst.time_slots;
    j["production_groups"] = inst.production_groups;
    j["due_times"] = inst.due_times;
    j["costs"] = {{"c_e", inst.costs.earliness},
                  {"c_l", inst.costs.lateness},
                  {"c_p", inst.costs.switching},
                  {"lambda", inst.costs.penalty}};
    json idle = json::array();
    for (const auto& s : inst.idle_slots) idle.push_back(std::vector<int>(s.begin(), s.end()));
    j["idle_slots"] = idle;
    return j;
}

inline JsspInstance instance_from_json(const json& j) {
    JsspInstance inst;
    inst.num_machines = j.at("machines").get<int>();
    inst.num_jobs = j.at("jobs").get<int>();
    inst.time_slots = j.at("time_slots").get<std::vector<int>>();
    inst.production_groups = j.at("production_groups").get<std::vector<std::vector<std::string>>>();
    inst.due_times = j.at("due_times").get<std::vector<int>>();
    const json& c = j.at("costs");
    inst.costs.earliness = c.at("c_e").get<long long>();
    inst.costs.lateness = c.at("c_l").get<long long>();
    inst.costs.switching = c.at("c_p").get<long long>();
    inst.costs.penalty = c.at("lambda").get<long long>();
    for (const auto& s : j.at("idle_slots")) {
        auto v = s.get<std::vector<int>>();
        inst.idle_slots.emplace_back(v.begin(), v.end());
    }
    inst.validate();
    return inst;
}

inline json assignment_to_json(const JsspInstance& inst, const ScheduleAssignment& x) {
    json triples = json::array();
    for (int m = 1; m <= inst.num_machines; ++m)
        for (int j = 1; j <= inst.num_jobs; ++j)
            for (int t : inst.active_slots(m))
                if (x.get(m, j, t)) triples.push_back({m, j, t});
    return triples;
}

inline ScheduleAssignment assignment_from_json(const JsspInstance& inst, const json& triples) {
    ScheduleAssignment x = ScheduleAssignment::zeros(inst);
    for (const auto& t : triples) {
        if (!t.is_array() || t.size() != 3)
            throw std::invalid_argument("assignment: entries must be [machine, job, time]");
        x.set(t[0].get<int>(), t[1].get<int>(), t[2].get<int>(), 1);
    }
    return x;
}

inline json sub_instance_to_json(const SubInstance& sub, const FreeSpec& spec) {
    json j = instance_to_json(sub.instance);
    j["base_assignment"] = assignment_to_json(sub.instance, sub.base);
    json refreeze = json::array();
    for (const VarKey& k : spec.refreeze) refreeze.push_back({k.machine, k.job, k.time});
    j["free_spec"] = {{"n", spec.free_counts}, {"refreeze", refreeze}};
    return j;
}

inline FreeSpec free_spec_from_json(const json& j) {
    FreeSpec spec;
    spec.free_counts = j.at("n").get<std::vector<int>>();
    if (j.contains("refreeze"))
        for (const auto& t : j.at("refreeze"))
            spec.refreeze.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    return spec;
}

inline SubInstance sub_instance_from_json(const json& j) {
    const JsspInstance inst = instance_from_json(j);
    const ScheduleAssignment base = assignment_from_json(inst, j.at("base_assignment"));
    return derive_sub_instance(inst, base, free_spec_from_json(j.at("free_spec")));
}

// --- problem exports --------------------------------------------------------

inline json qubo_to_json(const QuboProblem& q) {
    json j;
    j["num_vars"] = q.num_vars;
    j["offset"] = q.offset;
    json lin = json::object(), quad = json::object();
    for (const auto& [i, c] : q.linear) lin[std::to_string(i)] = c;
    for (const auto& [ij, c] : q.quadratic)
        quad[std::to_string(ij.first) + "," + std::to_string(ij.second)] = c;
    j["linear"] = lin;
    j["quadratic"] = quad;
    return j;
}

inline QuboProblem qubo_from_json(const json& j) {
    QuboProblem q;
    q.num_vars = j.at("num_vars").get<int>();
    q.offset = j.at("offset").get<double>();
    for (const auto& [k, v] : j.at("linear").items()) q.add_linear(std::stoi(k), v.get<double>());
    for (const auto& [k, v] : j.at("quadratic").items()) {
        const auto comma = k.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("qubo: quadratic key must be 'i,j'");
        q.add_quadratic(std::stoi(k.substr(0, comma)), std::stoi(k.substr(comma + 1)), v.get<double>());
    }
    return q;
}

inline json ising_to_json(const IsingHamiltonian& h) {
    json j;
    j["num_qubits"] = h.num_qubits;
    j["constant"] = h.constant;
    json fields = json::object(), couplings = json::object();
    for (const auto& [q, c] : h.fields) fields[std::to_string(q)] = c;
    for (const auto& [qr, c] : h.couplings)
        couplings[std::to_string(qr.first) + "," + std::to_string(qr.second)] = c;
    j["h"] = fields;
    j["J"] = couplings;
    return j;
}

inline IsingHamiltonian ising_from_json(const json& j) {
    IsingHamiltonian h;
    h.num_qubits = j.at("num_qubits").get<int>();
    h.constant = j.at("constant").get<double>();
    for (const auto& [k, v] : j.at("h").items()) h.add_field(std::stoi(k), v.get<double>());
    for (const auto& [k, v] : j.at("J").items()) {
        const auto comma = k.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("ising: coupling key must be 'q,r'");
        h.add_coupling(std::stoi(k.substr(0, comma)), std::stoi(k.substr(comma + 1)), v.get<double>());
    }
    return h;
}

// --- run artifacts ----------------------------------------------------------

inline json sample_set_to_json(const SampleSet& s) {
    json j;
    j["shots"] = s.total_shots;
    json counts = json::object(), energies = json::object();
    for (const auto& [b, c] : s.counts) counts[b] = c;
    for (const auto& [b, e] : s.energies) energies[b] = e;
    j["counts"] = counts;
    j["energies"] = energies;
    return j;
}

inline SampleSet sample_set_from_json(const json& j) {
    SampleSet s;
    s.total_shots = j.at("shots").get<long long>();
    for (const auto& [b, c] : j.at("counts").items()) s.counts[b] = c.get<long long>();
    for (const auto& [b, e] : j.at("energies").items()) s.energies[b] = e.get<double>();
    long long total = 0;
    for (const auto& [_, c] : s.counts) total += c;
    if (total != s.total_shots)
        throw std::invalid_argument("sample set: counts do not sum to the declared shot total");
    return s;
}

inline json oracle_to_json(const OracleResult& r) {
    json j;
    j["ground_energy"] = r.ground_energy;
    j["ground_states"] = r.ground_states;
    json spec = json::array();
    for (const auto& [e, d] : r.spectrum) spec.push_back({{"energy", e}, {"degeneracy", d}});
    j["spectrum"] = spec;
    return j;
}

inline OracleResult oracle_from_json(const json& j) {
    OracleResult r;
    r.ground_energy = j.at("ground_energy").get<double>();
    r.ground_states = j.at("ground_states").get<std::vector<std::string>>();
    for (const auto& s : j.at("spectrum"))
        r.spectrum.emplace_back(s.at("energy").get<double>(), s.at("degeneracy").get<long long>());
    return r;
}

inline json noise_to_json(const NoiseModel& n) {
    return {{"flip01", n.flip01}, {"flip10", n.flip10}, {"slot_map", n.slot_map}};
}

inline NoiseModel noise_from_json(const json& j) {
    NoiseModel n;
    n.flip01 = j.at("flip01").get<std::vector<double>>();
    n.flip10 = j.at("flip10").get<std::vector<double>>();
    n.slot_map = j.at("slot_map").get<std::vector<int>>();
    return n;
}

inline json iteration_record_to_json(const IterationRecord& rec) {
    json j;
    j["iteration"] = rec.iteration;
    j["beta_T"] = rec.beta_t;
    if (rec.init_angles) j["init_angles"] = rec.init_angles->phis;
    j["best_bitstring"] = rec.best_bitstring;
    j["best_energy"] = rec.best_energy;
    if (rec.gs_prob) j["gs_prob"] = *rec.gs_prob;
    j["samples"] = sample_set_to_json(rec.samples);
    return j;
}

inline json varqite_step_to_json(const VarQiteStep& s) {
    json j;
    j["step"] = s.step;
    j["tau"] = s.tau;
    j["dtau"] = s.dtau;
    j["energy"] = s.energy;
    j["theta_norm"] = s.theta_norm;
    if (s.stalled) j["stalled"] = true;
    return j;
}

inline json mitigated_to_json(const std::map<std::string, double>& probs, long long shots_equivalent) {
    json counts = json::object(), p = json::object();
    for (const auto& [b, v] : probs) {
        p[b] = v;
        counts[b] = v * static_cast<double>(shots_equivalent);
    }
    return {{"counts_equivalent", counts}, {"probabilities", p}};
}

// --- files ------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j;
    in >> j;
    return j;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace qsched

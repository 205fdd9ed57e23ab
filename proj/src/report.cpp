#include "qswap/report.hpp"

#include <charconv>

namespace qswap {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

json to_json(const cplx& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json to_json(const QState& state) {
    json amps = json::array();
    for (const auto& a : state.amps) amps.push_back(to_json(a));
    return json{{"num_sites", state.num_sites}, {"amplitudes", amps}};
}

json to_json(const CorrectionOp& op) {
    json tags = json::array();
    for (PauliTag t : op.site_ops) tags.push_back(to_string(t));
    json out{{"site_ops", tags}};
    if (op.phase_angle != 0.0) {
        out["phase_angle"] = op.phase_angle;
        out["phase_site"] = op.phase_site;
    }
    out["global_phase"] = to_json(op.global_phase);
    return out;
}

json to_json(const ProtocolRunRecord& record) {
    json outcomes = json::array();
    for (BellKind k : record.bell_outcomes) outcomes.push_back(to_string(k));
    json out{{"bell_outcomes", outcomes}};
    if (record.filter_applied) {
        out["filter"] = json{{"epsilon_t", record.filter_applied->epsilon_t},
                             {"target_site", *record.filter_target_site},
                             {"pre_flip", record.pre_flip}};
    }
    if (record.photon_detected) out["photon_detected"] = *record.photon_detected;
    out["correction"] = to_json(record.correction);
    out["success"] = record.success;
    out["fidelity"] = record.fidelity;
    out["branch_probability"] = record.branch_probability;
    out["final_state"] = to_json(record.final_state);
    return out;
}

json to_json(const BranchRecord& branch) {
    json outcomes = json::array();
    for (BellKind k : branch.outcomes) outcomes.push_back(to_string(k));
    return json{{"bell_outcomes", outcomes},
                {"photon_detected", branch.photon_detected},
                {"probability", branch.probability},
                {"success", branch.success},
                {"fidelity", branch.fidelity}};
}

json to_json(const SuccessBreakdown& breakdown) {
    return json{{"p_a", breakdown.p_a}, {"p_b", breakdown.p_b},
                {"p_c", breakdown.p_c}, {"p_d", breakdown.p_d},
                {"total", breakdown.total}};
}

json to_json(const MonteCarloResult& result) {
    return json{{"trials", result.trials},
                {"successes", result.successes},
                {"success_rate", result.success_rate},
                {"mean_conditional_fidelity", result.mean_conditional_fidelity},
                {"ci95", json::array({result.ci95_low, result.ci95_high})}};
}

json to_json(const SweepResult& result) {
    json points = json::array();
    for (const SweepPoint& p : result.points)
        points.push_back(json{{"offset", p.offset},
                              {"success_rate", p.success_rate},
                              {"mean_fidelity", p.mean_fidelity}});
    return json{{"trials", result.trials},
                {"seed", result.seed},
                {"perturb_theta", result.perturb_theta},
                {"perturb_epsilon_t", result.perturb_epsilon_t},
                {"points", points}};
}

} // namespace qswap

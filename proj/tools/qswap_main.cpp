#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qswap/analysis.hpp"
#include "qswap/protocol.hpp"
#include "qswap/report.hpp"

namespace {

using qswap::cplx;
using qswap::json;

struct ComplexPair {
    double re1 = 0.0, im1 = 0.0;
    double re2 = 0.0, im2 = 0.0;
    cplx first() const { return {re1, im1}; }
    cplx second() const { return {re2, im2}; }
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Checks |z1|^2 + |z2|^2 = 1, or rescales both when normalize is set.
void check_pair(cplx& z1, cplx& z2, bool normalize, const std::string& field) {
    const double n2 = std::norm(z1) + std::norm(z2);
    if (normalize) {
        if (n2 <= 0.0) throw ValidationError("field '" + field + "' is zero and cannot be normalized");
        const double n = std::sqrt(n2);
        z1 /= n;
        z2 /= n;
        return;
    }
    if (std::abs(n2 - 1.0) > 2e-10)
        throw ValidationError("field '" + field + "' is not normalized (|.|^2 sums to " +
                              qswap::format_double(n2) + "); pass --normalize to rescale");
}

json config_complex(const cplx& z) { return qswap::to_json(z); }

std::string join_outcomes(const std::vector<qswap::BellKind>& kinds) {
    std::string s;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i) s += '+';
        s += qswap::to_string(kinds[i]);
    }
    return s;
}

struct Output {
    std::string path;   // empty -> stdout
    std::string format; // "json" or "csv"
};

void emit(const Output& out, const json& report, const std::vector<std::string>& csv_header,
          const std::vector<std::vector<std::string>>& csv_rows) {
    std::string text;
    if (out.format == "json") {
        text = report.dump(2);
        text += '\n';
    } else {
        for (std::size_t i = 0; i < csv_header.size(); ++i) {
            if (i) text += ',';
            text += qswap::csv_escape(csv_header[i]);
        }
        text += "\r\n";
        for (const auto& row : csv_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) text += ',';
                text += qswap::csv_escape(row[i]);
            }
            text += "\r\n";
        }
    }
    if (out.path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out.path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + out.path);
        f << text;
    }
}

std::string fmt(double v) { return qswap::format_double(v); }

json make_report(const json& config, const json& results) {
    json report;
    report["config"] = config;
    report["results"] = results;
    report["version"] = qswap::kVersion;
    return report;
}

std::vector<std::vector<std::string>> branch_rows(const std::vector<qswap::BranchRecord>& branches) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& br : branches)
        rows.push_back({join_outcomes(br.outcomes), br.photon_detected ? "1" : "0",
                        fmt(br.probability), br.success ? "1" : "0", fmt(br.fidelity)});
    return rows;
}

json branches_json(const std::vector<qswap::BranchRecord>& branches) {
    json arr = json::array();
    for (const auto& br : branches) arr.push_back(qswap::to_json(br));
    return arr;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-QED entanglement-swapping teleportation simulator"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    Output output{"", "json"};
    bool normalize = false;
    app.add_option("--seed", seed, "master RNG seed (u64)")->capture_default_str();
    app.add_option("--out", output.path, "output path (default stdout)");
    app.add_option("--format", output.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_flag("--normalize", normalize, "rescale input coefficient pairs instead of rejecting");

    // ---- prepare-epr ----
    auto* cmd_prep = app.add_subcommand("prepare-epr", "run the dispersive cavity EPR preparation on a basis pair");
    std::string prep_init = "gg";
    cmd_prep->add_option("--init", prep_init, "initial 2-atom basis state")
        ->check(CLI::IsMember({"gg", "ge", "eg", "ee"}));

    // ---- discriminate ----
    auto* cmd_disc = app.add_subcommand("discriminate", "Bell discrimination of a prepared Bell state");
    std::string disc_kind = "phi+";
    cmd_disc->add_option("--kind", disc_kind, "Bell state to discriminate")
        ->check(CLI::IsMember({"phi+", "phi-", "psi+", "psi-"}));

    // ---- shared teleport inputs ----
    ComplexPair in_ab;
    auto add_input_opts = [&](CLI::App* cmd) {
        cmd->add_option("--a,--a-re", in_ab.re1, "Re(a) of the input a|e..e> + b|g..g>");
        cmd->add_option("--a-im", in_ab.im1, "Im(a)");
        cmd->add_option("--b,--b-re", in_ab.re2, "Re(b)");
        cmd->add_option("--b-im", in_ab.im2, "Im(b)");
    };

    ComplexPair ch1_raw, ch2_raw;
    auto add_channel_opts = [&](CLI::App* cmd) {
        cmd->add_option("--alpha1,--alpha1-re", ch1_raw.re1, "Re(alpha_1)");
        cmd->add_option("--alpha1-im", ch1_raw.im1, "Im(alpha_1)");
        cmd->add_option("--beta1,--beta1-re", ch1_raw.re2, "Re(beta_1)");
        cmd->add_option("--beta1-im", ch1_raw.im2, "Im(beta_1)");
        cmd->add_option("--alpha2,--alpha2-re", ch2_raw.re1, "Re(alpha_2)");
        cmd->add_option("--alpha2-im", ch2_raw.im1, "Im(alpha_2)");
        cmd->add_option("--beta2,--beta2-re", ch2_raw.re2, "Re(beta_2)");
        cmd->add_option("--beta2-im", ch2_raw.im2, "Im(beta_2)");
    };

    int ghz_n = 3;
    std::vector<double> ghz_alpha, ghz_alpha_im, ghz_beta, ghz_beta_im;
    auto add_ghz_opts = [&](CLI::App* cmd) {
        cmd->add_option("--n", ghz_n, "number of teleported atoms (2..8)");
        cmd->add_option("--alpha", ghz_alpha, "per-pair Re(alpha); omit for maximal channels")->delimiter(',');
        cmd->add_option("--alpha-im", ghz_alpha_im, "per-pair Im(alpha)")->delimiter(',');
        cmd->add_option("--beta", ghz_beta, "per-pair Re(beta)")->delimiter(',');
        cmd->add_option("--beta-im", ghz_beta_im, "per-pair Im(beta)")->delimiter(',');
    };

    bool exhaustive = false;

    auto* cmd_max = app.add_subcommand("teleport-maximal", "maximal-channel teleportation");
    add_input_opts(cmd_max);
    cmd_max->add_flag("--exhaustive", exhaustive, "enumerate every measurement branch");

    auto* cmd_non = app.add_subcommand("teleport-nonmaximal", "nonmaximal-channel teleportation with photon filtering");
    add_input_opts(cmd_non);
    add_channel_opts(cmd_non);
    cmd_non->add_flag("--exhaustive", exhaustive, "enumerate every measurement branch");

    auto* cmd_ghz = app.add_subcommand("teleport-ghz", "N-partite GHZ teleportation");
    add_input_opts(cmd_ghz);
    add_ghz_opts(cmd_ghz);
    cmd_ghz->add_flag("--exhaustive", exhaustive, "enumerate every measurement branch");

    auto* cmd_mc = app.add_subcommand("monte-carlo", "seeded Monte Carlo protocol study");
    std::string protocol_id = "maximal";
    std::uint64_t trials = 1000;
    cmd_mc->add_option("--protocol", protocol_id, "protocol to run")
        ->check(CLI::IsMember({"maximal", "nonmaximal", "ghz"}));
    cmd_mc->add_option("--trials", trials, "number of trials")->capture_default_str();
    add_input_opts(cmd_mc);
    add_channel_opts(cmd_mc);
    add_ghz_opts(cmd_mc);

    auto* cmd_sweep = app.add_subcommand("sweep", "timing-error sensitivity sweep");
    std::vector<double> offsets;
    std::string perturb = "theta";
    cmd_sweep->add_option("--protocol", protocol_id, "protocol to run")
        ->check(CLI::IsMember({"maximal", "nonmaximal", "ghz"}));
    cmd_sweep->add_option("--trials", trials, "trials per grid point")->capture_default_str();
    cmd_sweep->add_option("--offsets", offsets, "timing-error offsets")->delimiter(',')->required();
    cmd_sweep->add_option("--perturb", perturb, "which parameter to perturb")
        ->check(CLI::IsMember({"theta", "epsilon", "both"}));
    add_input_opts(cmd_sweep);
    add_channel_opts(cmd_sweep);
    add_ghz_opts(cmd_sweep);

    auto* cmd_an = app.add_subcommand("analytic", "closed-form nonmaximal success probabilities");
    add_channel_opts(cmd_an);

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        json config;
        json results;
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        auto base_config = [&](const std::string& command) {
            json c;
            c["command"] = command;
            c["seed"] = seed;
            c["format"] = output.format;
            return c;
        };

        auto input_state = [&]() {
            cplx a = in_ab.first(), b = in_ab.second();
            check_pair(a, b, normalize, "input (a, b)");
            return qswap::InputState{a, b};
        };
        auto pair_channels = [&]() {
            cplx a1 = ch1_raw.first(), b1 = ch1_raw.second();
            cplx a2 = ch2_raw.first(), b2 = ch2_raw.second();
            check_pair(a1, b1, normalize, "channel 1 (alpha1, beta1)");
            check_pair(a2, b2, normalize, "channel 2 (alpha2, beta2)");
            return std::pair{qswap::ChannelSpec{a1, b1}, qswap::ChannelSpec{a2, b2}};
        };
        auto ghz_channels = [&]() -> std::optional<std::vector<qswap::ChannelSpec>> {
            if (ghz_alpha.empty() && ghz_beta.empty()) return std::nullopt;
            if (ghz_alpha.size() != std::size_t(ghz_n) || ghz_beta.size() != std::size_t(ghz_n))
                throw ValidationError("fields '--alpha'/'--beta' need exactly n entries");
            std::vector<qswap::ChannelSpec> chans;
            for (int j = 0; j < ghz_n; ++j) {
                cplx a{ghz_alpha[j], j < int(ghz_alpha_im.size()) ? ghz_alpha_im[j] : 0.0};
                cplx b{ghz_beta[j], j < int(ghz_beta_im.size()) ? ghz_beta_im[j] : 0.0};
                check_pair(a, b, normalize, "channel " + std::to_string(j + 1));
                chans.push_back({a, b});
            }
            return chans;
        };
        auto scheme_params = [&](const std::string& id) {
            qswap::SchemeParams p;
            if (id == "maximal") {
                p.scheme = qswap::Scheme::Maximal;
            } else if (id == "nonmaximal") {
                auto [c1, c2] = pair_channels();
                p.scheme = qswap::Scheme::Nonmaximal;
                p.channels = std::vector<qswap::ChannelSpec>{c1, c2};
            } else {
                p.scheme = qswap::Scheme::Ghz;
                p.n = ghz_n;
                p.channels = ghz_channels();
            }
            return p;
        };
        auto config_channels = [&](json& c, const qswap::SchemeParams& p) {
            if (!p.channels) return;
            json chans = json::array();
            for (const auto& ch : *p.channels)
                chans.push_back(json{{"alpha", config_complex(ch.alpha)},
                                     {"beta", config_complex(ch.beta)}});
            c["channels"] = chans;
        };

        auto teleport_report = [&](const qswap::SchemeParams& params, const std::string& command) {
            const qswap::InputState input = input_state();
            config = base_config(command);
            config["a"] = config_complex(input.a);
            config["b"] = config_complex(input.b);
            if (params.scheme == qswap::Scheme::Ghz) config["n"] = params.n;
            config_channels(config, params);
            qswap::ProtocolEngine engine(params);
            if (exhaustive) {
                config["exhaustive"] = true;
                const auto branches = engine.enumerate_branches(input);
                results["branches"] = branches_json(branches);
                header = {"bell_outcomes", "photon_detected", "probability", "success", "fidelity"};
                rows = branch_rows(branches);
            } else {
                qswap::RngStream rng = qswap::RngStream::for_trial(seed, 0);
                const auto rec = engine.run(input, rng);
                results["run"] = qswap::to_json(rec);
                header = {"bell_outcomes", "photon_detected", "success", "fidelity", "branch_probability"};
                rows = {{join_outcomes(rec.bell_outcomes),
                         rec.photon_detected ? (*rec.photon_detected ? "1" : "0") : "",
                         rec.success ? "1" : "0", fmt(rec.fidelity), fmt(rec.branch_probability)}};
            }
        };

        if (*cmd_prep) {
            config = base_config("prepare-epr");
            config["init"] = prep_init;
            std::vector<std::array<cplx, 2>> locals;
            for (char c : prep_init)
                locals.push_back(c == 'g' ? std::array<cplx, 2>{1.0, 0.0}
                                          : std::array<cplx, 2>{0.0, 1.0});
            const qswap::QState epr = qswap::prepare_epr_via_cavity(qswap::init_product(locals));
            results["state"] = qswap::to_json(epr);
            results["concurrence"] = qswap::concurrence_2q(epr);
            header = {"basis_index", "re", "im"};
            for (std::size_t i = 0; i < epr.dim(); ++i)
                rows.push_back({std::to_string(i), fmt(epr.amps[i].real()), fmt(epr.amps[i].imag())});
        } else if (*cmd_disc) {
            config = base_config("discriminate");
            config["kind"] = disc_kind;
            const qswap::BellKind kind =
                disc_kind == "phi+" ? qswap::BellKind::PhiPlus
                : disc_kind == "phi-" ? qswap::BellKind::PhiMinus
                : disc_kind == "psi+" ? qswap::BellKind::PsiPlus
                                      : qswap::BellKind::PsiMinus;
            const auto amps = qswap::bell_state(kind);
            qswap::QState st;
            st.num_sites = 2;
            st.amps.assign(amps.begin(), amps.end());
            qswap::RngStream rng = qswap::RngStream::for_trial(seed, 0);
            const auto out = qswap::bell_discriminate(st, 0, 1, rng);
            results["kind"] = qswap::to_string(out.kind);
            results["outcome"] = json::array({out.record.outcome[0], out.record.outcome[1]});
            results["probability"] = out.record.probability;
            results["phase"] = config_complex(out.phase);
            header = {"kind", "outcome_a", "outcome_b", "probability"};
            rows = {{qswap::to_string(out.kind), std::to_string(out.record.outcome[0]),
                     std::to_string(out.record.outcome[1]), fmt(out.record.probability)}};
        } else if (*cmd_max) {
            teleport_report(scheme_params("maximal"), "teleport-maximal");
        } else if (*cmd_non) {
            teleport_report(scheme_params("nonmaximal"), "teleport-nonmaximal");
        } else if (*cmd_ghz) {
            teleport_report(scheme_params("ghz"), "teleport-ghz");
        } else if (*cmd_mc) {
            const qswap::SchemeParams params = scheme_params(protocol_id);
            const qswap::InputState input = input_state();
            config = base_config("monte-carlo");
            config["protocol"] = protocol_id;
            config["trials"] = trials;
            config["a"] = config_complex(input.a);
            config["b"] = config_complex(input.b);
            if (params.scheme == qswap::Scheme::Ghz) config["n"] = params.n;
            config_channels(config, params);
            const auto mc = qswap::monte_carlo(params, input, trials, seed);
            results["trials_summary"] = qswap::to_json(mc);
            header = {"trials", "successes", "success_rate", "mean_conditional_fidelity",
                      "ci95_low", "ci95_high"};
            rows = {{std::to_string(mc.trials), std::to_string(mc.successes),
                     fmt(mc.success_rate), fmt(mc.mean_conditional_fidelity),
                     fmt(mc.ci95_low), fmt(mc.ci95_high)}};
        } else if (*cmd_sweep) {
            const qswap::SchemeParams params = scheme_params(protocol_id);
            const qswap::InputState input = input_state();
            config = base_config("sweep");
            config["protocol"] = protocol_id;
            config["trials"] = trials;
            config["perturb"] = perturb;
            config["offsets"] = offsets;
            config["a"] = config_complex(input.a);
            config["b"] = config_complex(input.b);
            if (params.scheme == qswap::Scheme::Ghz) config["n"] = params.n;
            config_channels(config, params);
            const bool p_theta = perturb == "theta" || perturb == "both";
            const bool p_eps = perturb == "epsilon" || perturb == "both";
            const auto sweep = qswap::timing_sensitivity(params, input, offsets, trials,
                                                         seed, p_theta, p_eps);
            results["sweep"] = qswap::to_json(sweep);
            header = {"offset", "success_rate", "mean_fidelity"};
            for (const auto& p : sweep.points)
                rows.push_back({fmt(p.offset), fmt(p.success_rate), fmt(p.mean_fidelity)});
        } else if (*cmd_an) {
            auto [c1, c2] = pair_channels();
            config = base_config("analytic");
            config["channels"] = json::array(
                {json{{"alpha", config_complex(c1.alpha)}, {"beta", config_complex(c1.beta)}},
                 json{{"alpha", config_complex(c2.alpha)}, {"beta", config_complex(c2.beta)}}});
            const auto breakdown = qswap::analytic_success_prob(c1, c2);
            results["breakdown"] = qswap::to_json(breakdown);
            header = {"p_a", "p_b", "p_c", "p_d", "total"};
            rows = {{fmt(breakdown.p_a), fmt(breakdown.p_b), fmt(breakdown.p_c),
                     fmt(breakdown.p_d), fmt(breakdown.total)}};
        }

        emit(output, make_report(config, results), header, rows);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

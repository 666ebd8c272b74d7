// Command-line front end for the radial vanishing-mean-curvature flow
// construction: staged profile builders, the composite approximation, and the
// quasilinear evolution checks.

#include <CLI11.hpp>
#include <json.hpp>

#include "vmcf/composite.hpp"
#include "vmcf/config.hpp"
#include "vmcf/error.hpp"
#include "vmcf/evolution.hpp"
#include "vmcf/fit.hpp"
#include "vmcf/io.hpp"
#include "vmcf/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

using namespace vmcf;
using nlohmann::json;

namespace {

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path);
    out << j.dump(2) << '\n';
}

std::string sidecar_path(const std::string& csv) {
    auto dot = csv.rfind('.');
    return (dot == std::string::npos ? csv : csv.substr(0, dot)) + ".json";
}

int run_ground_state(double rho_max, double tol, const std::string& out) {
    auto gs = solve_ground_state(rho_max, tol);
    write_curve_csv(out, gs.curve);
    json d;
    for (int n = 2; n <= 5; ++n) d[std::to_string(n)] = gs.d(n);
    write_json(sidecar_path(out),
               {{"gamma", gs.taylor},
                {"d", d},
                {"residuals",
                 {{"tail_fit", gs.tail.residual}, {"ode_max", ode_residual_max(gs)}}}});
    return 0;
}

int run_spectral(const std::string& out, int samples, std::uint64_t seed) {
    auto gs = solve_ground_state(150.0, 1e-10);
    SpectralForm sf(gs);
    write_curve_csv(out, sf.potential);
    write_json(sidecar_path(out),
               {{"coercivity_min", sf.coercivity_check(samples, seed)},
                {"samples", samples},
                {"seed", seed}});
    return 0;
}

struct BuiltProfiles {
    std::unique_ptr<GroundState> gs;
    std::unique_ptr<LinearizedOperator> lin;
    std::unique_ptr<InnerProfile> inner;
    std::unique_ptr<SelfSimilarProfile> ss;
    std::unique_ptr<RemoteProfile> remote;
};

BuiltProfiles build_through_remote(const Config& model, int remote_layers) {
    BuiltProfiles b;
    b.gs = std::make_unique<GroundState>(solve_ground_state(150.0, 1e-10));
    b.lin = std::make_unique<LinearizedOperator>(*b.gs);
    b.inner = std::make_unique<InnerProfile>(build_inner_profile(model, *b.gs, *b.lin));
    b.ss = std::make_unique<SelfSimilarProfile>(solve_low_orders(*b.inner, *b.gs));
    b.remote = std::make_unique<RemoteProfile>(
        build_remote_profile(*b.ss, model.delta, remote_layers));
    return b;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial vanishing-mean-curvature blow-up construction"};
    app.require_subcommand(1);

    // ground-state
    double gs_rho_max = 150.0, gs_tol = 1e-10;
    std::string gs_out = "q.csv";
    auto* cmd_gs = app.add_subcommand("ground-state", "solve the stationary profile");
    cmd_gs->add_option("--rho-max", gs_rho_max);
    cmd_gs->add_option("--tol", gs_tol);
    cmd_gs->add_option("--out", gs_out);

    // spectral
    std::string sp_out = "potential.csv";
    int sp_samples = 50;
    std::uint64_t sp_seed = 12345;
    auto* cmd_sp = app.add_subcommand("spectral", "self-adjoint form and coercivity sampling");
    cmd_sp->add_option("--out", sp_out);
    cmd_sp->add_option("--rayleigh-samples", sp_samples);
    cmd_sp->add_option("--seed", sp_seed);

    // inner
    int in_N = 2;
    double in_t = 0.05;
    std::string in_out = "vin.csv";
    auto* cmd_in = app.add_subcommand("inner", "inner expansion layers");
    cmd_in->add_option("--N", in_N);
    cmd_in->add_option("--t", in_t);
    cmd_in->add_option("--out", in_out);

    // self-similar
    double ss_t = 0.05;
    std::string ss_out = "wss.csv";
    auto* cmd_ss = app.add_subcommand("self-similar", "light-cone region profile");
    cmd_ss->add_option("--t", ss_t);
    cmd_ss->add_option("--out", ss_out);

    // remote
    double rm_delta = 0.1;
    int rm_N = 4;
    std::string rm_out = "gk.csv";
    auto* cmd_rm = app.add_subcommand("remote", "compactly supported remote layers");
    cmd_rm->add_option("--delta", rm_delta);
    cmd_rm->add_option("--N", rm_N);
    cmd_rm->add_option("--out", rm_out);

    // compose
    double co_t = 0.05;
    std::string co_out = "uN.csv";
    bool co_rem = false;
    auto* cmd_co = app.add_subcommand("compose", "glued approximation and remainder");
    cmd_co->add_option("--t", co_t);
    cmd_co->add_option("--out", co_out);
    cmd_co->add_flag("--remainder", co_rem);

    // evolve
    double ev_t1 = 0.05, ev_tend = 0.1, ev_cfl = 0.4;
    int ev_N = 2;
    std::string ev_out = "traj";
    auto* cmd_ev = app.add_subcommand("evolve", "evolve the quasilinear flow from glued data");
    cmd_ev->add_option("--t1", ev_t1);
    cmd_ev->add_option("--t-end", ev_tend);
    cmd_ev->add_option("--N", ev_N);
    cmd_ev->add_option("--cfl", ev_cfl);
    cmd_ev->add_option("--out", ev_out);

    // pipeline / sweep
    std::string pl_config, pl_out = "out";
    auto* cmd_pl = app.add_subcommand("pipeline", "run every stage and write report.json");
    cmd_pl->add_option("--config", pl_config);
    cmd_pl->add_option("--out", pl_out);

    std::string sw_config, sw_out = "sweep";
    std::vector<std::string> sw_params;
    auto* cmd_sw = app.add_subcommand("sweep", "fan a pipeline out over parameter lists");
    cmd_sw->add_option("--config", sw_config);
    cmd_sw->add_option("--out", sw_out);
    cmd_sw->add_option("--set", sw_params,
                       "key=v1,v2,... (repeatable; cartesian over keys)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_gs->parsed()) return run_ground_state(gs_rho_max, gs_tol, gs_out);
        if (cmd_sp->parsed()) return run_spectral(sp_out, sp_samples, sp_seed);

        if (cmd_in->parsed()) {
            Config model;
            model.N = in_N;
            auto gs = solve_ground_state(150.0, 1e-10);
            LinearizedOperator lin(gs);
            auto inner = build_inner_profile(model, gs, lin);
            write_curve_csv(in_out, assemble_inner(inner, in_t));
            json tails = json::array();
            for (int k = 1; k <= model.N; ++k) {
                json terms = json::array();
                const auto& fit = inner.tails[std::size_t(k)];
                for (std::size_t j = 0; j < fit.basis.size(); ++j)
                    terms.push_back({{"n", -fit.basis[j].power},
                                     {"k", k},
                                     {"ell", fit.basis[j].log_power},
                                     {"d", fit.coefficients[j]}});
                tails.push_back({{"k", k}, {"terms", terms}, {"residual", fit.residual}});
            }
            write_json(sidecar_path(in_out), {{"tails", tails}});
            return 0;
        }

        if (cmd_ss->parsed()) {
            Config model;
            auto b = build_through_remote(model, 1);
            write_curve_csv(ss_out, assemble_ss(*b.ss, ss_t));
            json coeffs;
            for (int k = 3; k <= 5; ++k) {
                coeffs["a" + std::to_string(k) + "_plus"] = b.ss->a_plus(k);
                coeffs["a" + std::to_string(k) + "_minus"] = b.ss->a_minus(k);
                coeffs["lambda" + std::to_string(k)] = b.ss->lambda_k(k);
            }
            write_json(sidecar_path(ss_out), coeffs);
            return 0;
        }

        if (cmd_rm->parsed()) {
            Config model;
            model.delta = rm_delta;
            auto b = build_through_remote(model, rm_N);
            const std::string stem =
                rm_out.rfind('.') == std::string::npos ? rm_out : rm_out.substr(0, rm_out.rfind('.'));
            json slopes = json::array();
            for (int k = 0; k <= rm_N; ++k) {
                write_curve_csv(stem + "." + std::to_string(k) + ".csv",
                                b.remote->g_layers[std::size_t(k)]);
                slopes.push_back(b.remote->slope_fits[std::size_t(k)]);
            }
            write_json(stem + ".json", {{"slopes", slopes}, {"mu0", b.remote->mu0},
                                        {"mu1", b.remote->mu1}});
            return 0;
        }

        if (cmd_co->parsed()) {
            Config model;
            auto b = build_through_remote(model, 4);
            auto ca = make_composite(*b.inner, *b.ss, *b.remote);
            const double a = std::pow(co_t, model.nu + 1.0);
            auto ygrid = make_geometric_grid(1e-3, 1.05 * 2.0 * model.delta / a, 2000);
            auto [V, Vt] = blend(ca, co_t, ygrid);
            write_curve_csv(co_out, V);
            json side = {{"t", co_t}};
            if (co_rem) {
                auto norms = global_remainder(ca, co_t);
                side["remainder"] = {{"total", norms.total},
                                     {"inner", norms.inner_part},
                                     {"ss", norms.ss_part},
                                     {"out", norms.out_part}};
                side["overlap_in_ss"] = overlap_in_ss(ca, co_t);
                side["overlap_ss_out"] = overlap_ss_out(ca, co_t);
            }
            write_json(sidecar_path(co_out), side);
            return 0;
        }

        if (cmd_ev->parsed()) {
            Config model;
            model.N = ev_N;
            auto b = build_through_remote(model, 4);
            auto ca = make_composite(*b.inner, *b.ss, *b.remote);
            ca.remote_order = 2; // higher remote layers are unordered at evolution times
            ca.config.eps1 = std::min(model.eps1, 0.05); // glue in the far-tail overlap
            SchemeConfig sc;
            sc.cfl = ev_cfl;
            sc.outer_radius = 4.0 * model.delta + 2.0 * std::abs(ev_tend - ev_t1);
            sc.n_nodes = std::size_t(std::max(
                2000.0, 32.0 * sc.outer_radius / std::pow(std::min(ev_t1, ev_tend) / 1.0,
                                                          model.nu + 1.0)));
            sc.snapshot_dt = std::abs(ev_tend - ev_t1) / 8.0;
            auto data = [&](double rho, double& u, double& ut) {
                const FlowPoint p = ca.eval(ev_t1, rho);
                u = p.u;
                ut = p.ut;
            };
            auto st0 = make_state(ev_t1, sc, data);
            std::filesystem::create_directories(ev_out);
            auto traj = evolve(st0, ev_tend, sc);
            std::ofstream mon(std::filesystem::path(ev_out) / "monitors.csv",
                              std::ios::binary);
            mon << "t,min_u,min_timelike,max_grad,energy\n";
            int snap = 0;
            for (const auto& st : traj) {
                mon << fmt_double(st.t) << ',' << fmt_double(st.monitors.min_u) << ','
                    << fmt_double(st.monitors.min_timelike) << ','
                    << fmt_double(st.monitors.max_grad) << ','
                    << fmt_double(evolution_energy(st)) << '\n';
                SampledCurve c;
                auto grid = std::make_shared<RadialGrid>();
                grid->nodes.resize(st.grid.n);
                for (std::size_t i = 0; i < st.grid.n; ++i) grid->nodes[i] = st.grid.rho(i);
                c.grid = grid;
                c.values = st.u;
                c.deriv1 = st.ut; // second column pair carries u_t
                write_curve_csv((std::filesystem::path(ev_out) /
                                 ("snapshot_" + std::to_string(snap++) + ".csv"))
                                    .string(),
                                c);
            }
            return 0;
        }

        if (cmd_pl->parsed()) {
            RunConfig rc = pl_config.empty() ? RunConfig{} : parse_config(pl_config);
            if (!pl_out.empty()) rc.out_dir = pl_out;
            auto art = run_pipeline(rc);
            write_pipeline_outputs(art);
            std::cout << "report written to " << rc.out_dir << "/report.json\n";
            return 0;
        }

        if (cmd_sw->parsed()) {
            RunConfig base = sw_config.empty() ? RunConfig{} : parse_config(sw_config);
            std::vector<RunConfig> runs{base};
            for (const auto& assignment : sw_params) {
                const auto eq = assignment.find('=');
                if (eq == std::string::npos) throw ParseError("--set needs key=v1,v2,...");
                const std::string key = assignment.substr(0, eq);
                std::vector<std::string> values;
                std::string rest = assignment.substr(eq + 1);
                std::size_t pos = 0;
                while (pos != std::string::npos) {
                    auto comma = rest.find(',', pos);
                    values.push_back(rest.substr(pos, comma - pos));
                    pos = (comma == std::string::npos) ? comma : comma + 1;
                }
                std::vector<RunConfig> next;
                for (const auto& r : runs)
                    for (const auto& v : values)
                        next.push_back(parse_config_text(serialize_config(r) + key + "=" + v + "\n"));
                runs = std::move(next);
            }
            std::vector<std::future<int>> futures;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                runs[i].out_dir = sw_out + "/run" + std::to_string(i);
                futures.push_back(std::async(std::launch::async, [rc = runs[i]] {
                    auto art = run_pipeline(rc);
                    write_pipeline_outputs(art);
                    return 0;
                }));
            }
            int status = 0;
            for (auto& f : futures)
                try {
                    f.get();
                } catch (const std::exception& e) {
                    std::cerr << e.what() << '\n';
                    status = 1;
                }
            return status;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

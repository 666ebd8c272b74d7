#include "vmcf/pipeline.hpp"
#include "vmcf/error.hpp"
#include "vmcf/fit.hpp"
#include "vmcf/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace vmcf {

using nlohmann::json;

namespace {

template <typename F>
void stage(const char* name, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        throw Error(std::string("stage ") + name + ": " + e.what());
    }
}

json tail_to_json(const TailFit& fit) {
    json basis = json::array();
    for (std::size_t j = 0; j < fit.basis.size(); ++j)
        basis.push_back({{"power", fit.basis[j].power},
                         {"log_power", fit.basis[j].log_power},
                         {"coefficient", fit.coefficients[j]}});
    return {{"terms", basis},
            {"window", {fit.window_lo, fit.window_hi}},
            {"residual", fit.residual}};
}

} // namespace

PipelineArtifacts run_pipeline(const RunConfig& cfg, bool with_evolution) {
    cfg.validate();
    PipelineArtifacts art;
    art.cfg = cfg;
    json& rep = art.report;
    rep["config"] = json::parse("{}");
    {
        // echo the configuration in its canonical text form
        rep["config"] = serialize_config(cfg);
    }

    stage("ground-state", [&] {
        art.gs = std::make_unique<GroundState>(
            solve_ground_state(cfg.rho_max, cfg.ode_tol, cfg.grid_n));
        const auto& gs = *art.gs;
        json d;
        for (int n = 2; n <= 5; ++n) d[std::to_string(n)] = gs.d(n);
        const double mid = std::sqrt(gs.tail.window_lo * gs.tail.window_hi);
        rep["ground_state"] = {
            {"gamma", gs.taylor},
            {"d", d},
            {"residuals",
             {{"tail_fit", gs.tail.residual}, {"ode_max", ode_residual_max(gs)}}},
            {"d2_positive", gs.d(2) > 0.0},
            {"d4_flag", std::abs(gs.d(4)) / (mid * mid) >= 0.01 * std::abs(gs.d(2))}};
    });

    stage("linearized", [&] {
        art.lin = std::make_unique<LinearizedOperator>(*art.gs);
        art.spectral = std::make_unique<SpectralForm>(*art.gs);
        const auto& g = *art.gs->curve.grid;
        const std::size_t i100 = g.interval_of(std::min(100.0, 0.8 * cfg.rho_max));
        const double pot_tail = art.spectral->potential.values[i100] * g[i100] * g[i100];
        const double coercivity =
            art.spectral->coercivity_check(cfg.rayleigh_samples, cfg.seed);
        rep["spectral"] = {{"rho2_potential_far", pot_tail},
                           {"coercivity_min", coercivity},
                           {"coercive", coercivity > 0.0}};
    });

    stage("inner", [&] {
        art.inner = std::make_unique<InnerProfile>(
            build_inner_profile(cfg.model, *art.gs, *art.lin));
        json layers = json::array();
        for (int k = 1; k <= cfg.model.N; ++k)
            layers.push_back(tail_to_json(art.inner->tails[std::size_t(k)]));
        json rem = json::array();
        std::vector<std::pair<double, double>> pts;
        for (double t : {0.05, 0.025, 0.0125}) {
            const double nrm = inner_remainder(*art.inner, t);
            rem.push_back({{"t", t}, {"norm", nrm}});
            pts.push_back({t, nrm});
        }
        const double slope = power_fit_exponent(pts);
        const Config& m = cfg.model;
        const double expected =
            2.0 * m.nu + 2.0 * double(m.N) * m.eps1 - 1.5 * (m.nu - m.eps1);
        rep["inner"] = {{"tails", layers},
                        {"remainder", rem},
                        {"remainder_exponent", slope},
                        {"remainder_exponent_expected", expected}};
    });

    stage("self-similar", [&] {
        art.ss = std::make_unique<SelfSimilarProfile>(
            solve_low_orders(*art.inner, *art.gs));
        json coeffs;
        for (int k = 3; k <= 5; ++k) {
            coeffs["a" + std::to_string(k)] = {art.ss->a_plus(k), art.ss->a_minus(k)};
            coeffs["lambda" + std::to_string(k)] = art.ss->lambda_k(k);
        }
        SampledCurve w3 = art.ss->w_layers.at({3, 0});
        rep["self_similar"] = {
            {"coefficients", coeffs},
            {"w3_far_slope", loglog_slope(w3, 100.0, 400.0)},
            {"w3_far_slope_expected", 3.0 * cfg.model.nu + 1.0}};
    });

    stage("remote", [&] {
        art.remote = std::make_unique<RemoteProfile>(
            build_remote_profile(*art.ss, cfg.model.delta, cfg.remote_layers));
        json slopes = json::array(), expected = json::array();
        for (int k = 0; k <= cfg.remote_layers; ++k) {
            slopes.push_back(art.remote->slope_fits[std::size_t(k)]);
            expected.push_back(1.0 - double(k) + 3.0 * cfg.model.nu);
        }
        rep["remote"] = {{"mu0", art.remote->mu0},
                         {"mu1", art.remote->mu1},
                         {"slopes", slopes},
                         {"slopes_expected", expected}};
    });

    stage("compose", [&] {
        art.composite = make_composite(*art.inner, *art.ss, *art.remote);
        json rem = json::array();
        std::vector<std::pair<double, double>> pts;
        for (double t : {0.05, 0.025, 0.0125}) {
            const auto norms = global_remainder(art.composite, t);
            rem.push_back({{"t", t},
                           {"total", norms.total},
                           {"inner", norms.inner_part},
                           {"ss", norms.ss_part},
                           {"out", norms.out_part},
                           {"overlap_in_ss", overlap_in_ss(art.composite, t)},
                           {"overlap_ss_out", overlap_ss_out(art.composite, t)}});
            pts.push_back({t, norms.total});
        }
        rep["composite"] = {{"remainder", rem},
                            {"remainder_exponent", power_fit_exponent(pts)}};
    });

    if (with_evolution) stage("evolve", [&] {
        const double t1 = cfg.t1;
        const double a = std::pow(t1, cfg.model.nu + 1.0);
        SchemeConfig sc;
        sc.cfl = cfg.cfl;
        sc.outer_radius = 4.0 * cfg.model.delta + 2.0 * std::abs(cfg.t_end - t1);
        sc.n_nodes = std::size_t(std::max(2000.0, 32.0 * sc.outer_radius /
                                                      std::pow(t1 / 2.0, cfg.model.nu + 1.0)));
        sc.snapshot_dt = (cfg.t_end - t1) / 8.0;
        CompositeApprox ca = art.composite;
        ca.remote_order = 2;  // the higher remote layers are not ordered at t1
        ca.config.eps1 = std::min(cfg.model.eps1, 0.05); // glue in the far-tail overlap
        auto data = [&](double rho, double& u, double& ut) {
            const FlowPoint p = ca.eval(t1, rho);
            u = p.u;
            ut = p.ut;
        };
        auto st0 = make_state(t1, sc, data);
        auto traj = evolve(st0, cfg.t_end, sc);
        auto disc = track_discrepancy(traj, ca);
        json drec = json::array();
        for (const auto& d : disc)
            drec.push_back({{"t", d.t}, {"dist_u", d.dist_u}, {"dist_ut", d.dist_ut}});

        SchemeConfig scb = sc;
        scb.snapshot_dt = t1 / 16.0;
        // the [t1/2, t1] leg is built forward from the smaller-time data,
        // the same way the existence argument constructs it
        CompositeApprox ca_half = ca;
        ca_half.ss_order = 5; // ordered again at the halved time
        auto half = make_state(t1 / 2.0, scb, [&](double rho, double& u, double& ut) {
            const FlowPoint p = ca_half.eval(t1 / 2.0, rho);
            u = p.u;
            ut = p.ut;
        });
        auto back = evolve(half, t1, scb);
        auto conc = profile_concentration(back, *art.gs, cfg.model.nu, 2.0);
        json crec = json::array();
        std::vector<std::pair<double, double>> inv_pts;
        for (const auto& c : conc) {
            crec.push_back({{"t", c.t}, {"sup_dev", c.sup_dev}, {"inv_u_max", c.inv_u_max}});
            inv_pts.push_back({c.t, c.inv_u_max});
        }
        const auto& mon = traj.back().monitors;
        rep["evolution"] = {
            {"discrepancy", drec},
            {"concentration", crec},
            {"inv_u_slope", power_fit_exponent(inv_pts)},
            {"inv_u_slope_expected", -(cfg.model.nu + 1.0)},
            {"final_monitors",
             {{"min_u", mon.min_u},
              {"min_timelike", mon.min_timelike},
              {"max_grad", mon.max_grad}}}};
        (void)a;
    });

    return art;
}

void write_pipeline_outputs(const PipelineArtifacts& art) {
    namespace fs = std::filesystem;
    const fs::path dir(art.cfg.out_dir);
    fs::create_directories(dir);

    auto write_json = [&](const std::string& name, const json& j) {
        std::ofstream out(dir / name, std::ios::binary);
        out << j.dump(2) << '\n';
    };
    write_curve_csv((dir / "q.csv").string(), art.gs->curve);
    write_json("q.json", art.report["ground_state"]);
    if (art.spectral) {
        write_curve_csv((dir / "potential.csv").string(), art.spectral->potential);
        write_json("potential.json", art.report["spectral"]);
    }
    if (art.inner) {
        for (std::size_t k = 1; k < art.inner->layers.size(); ++k)
            write_curve_csv((dir / ("v" + std::to_string(k) + ".csv")).string(),
                            art.inner->layers[k]);
        write_json("inner.json", art.report["inner"]);
    }
    if (art.ss) {
        for (const auto& [key, w] : art.ss->w_layers)
            write_curve_csv((dir / ("w" + std::to_string(key.first) + "_" +
                                    std::to_string(key.second) + ".csv"))
                                .string(),
                            w);
        write_json("wss.json", art.report["self_similar"]);
    }
    if (art.remote) {
        for (std::size_t k = 0; k < art.remote->g_layers.size(); ++k)
            write_curve_csv((dir / ("g" + std::to_string(k) + ".csv")).string(),
                            art.remote->g_layers[k]);
        write_json("gk.json", art.report["remote"]);
    }
    if (art.report.contains("composite")) write_json("composite.json", art.report["composite"]);
    if (art.report.contains("evolution")) write_json("evolution.json", art.report["evolution"]);

    std::ofstream out(dir / "report.json", std::ios::binary);
    out << art.report.dump(2) << '\n';
}

} // namespace vmcf

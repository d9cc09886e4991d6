#include "bivruin/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "bivruin/csv.hpp"
#include "bivruin/simulator.hpp"
#include "bivruin/transforms.hpp"
#include "bivruin/version.hpp"

namespace bivruin::cli {

namespace {

using nlohmann::json;

void stamp(CsvBuilder& csv, const ExperimentConfig& cfg) {
    csv.comment("config_hash=" + (cfg.config_hash.empty() ? "none" : cfg.config_hash));
    csv.comment("seed=" + std::to_string(cfg.sim.seed));
    csv.comment(std::string("version=") + kVersion);
}

WhConfig wh_config(const ExperimentConfig& cfg) {
    WhConfig wh;
    wh.n_samples = cfg.wh.n_samples;
    wh.seed = cfg.sim.seed;
    wh.workers = cfg.sim.workers;
    wh.rejection_factor = cfg.wh.rejection_factor;
    return wh;
}

std::string path_table(const ExperimentConfig& cfg, double u, double v) {
    CsvBuilder csv;
    stamp(csv, cfg);
    csv.header({"path", "t", "event", "S1", "S2", "L1", "L2", "E1", "E2"});
    const CompiledModel cm = CompiledModel::compile(cfg.model);
    const std::uint64_t n_logged = std::min<std::uint64_t>(cfg.sim.n_paths, 20);
    for (std::uint64_t p = 0; p < n_logged; ++p) {
        auto rng = substream(cfg.sim.seed, StreamRole::survival, p);
        std::vector<PathEvent> log;
        simulate_path(cm, u, v, cfg.sim.t_max, rng, &log);
        SurplusState prev;
        prev.s1 = u;
        prev.s2 = v;
        for (const PathEvent& ev : log) {
            const char* kind = "claim";
            if (ev.after.e1 > prev.e1 || ev.after.e2 > prev.e2) {
                kind = "external";
            } else if (ev.after.l1 > prev.l1) {
                kind = "transfer1";
            } else if (ev.after.l2 > prev.l2) {
                kind = "transfer2";
            }
            csv.row({std::to_string(p), format_double(ev.t), kind, format_double(ev.after.s1),
                     format_double(ev.after.s2), format_double(ev.after.l1),
                     format_double(ev.after.l2), format_double(ev.after.e1),
                     format_double(ev.after.e2)});
            prev = ev.after;
        }
    }
    return csv.text();
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opt) {
    if (opt.seed) cfg.sim.seed = *opt.seed;
    if (opt.workers) cfg.sim.workers = *opt.workers;
    if (opt.out_dir) {
        cfg.output.dir = *opt.out_dir;
    } else if (const char* env = std::getenv("BIVRUIN_OUT"); env && *env) {
        cfg.output.dir = env;
    }
    return cfg;
}

CommandOutput run_simulate(const ExperimentConfig& cfg) {
    cfg.model.validate();
    CommandOutput out;
    {
        CsvBuilder csv;
        stamp(csv, cfg);
        csv.header({"u", "v", "estimate", "std_error", "n", "t_max"});
        for (const auto& [u, v] : cfg.sweep.points) {
            const MCEstimate est = estimate_survival(cfg.model, u, v, cfg.sim);
            csv.row_numeric({u, v, est.value, est.std_error, static_cast<double>(est.n),
                             cfg.sim.t_max});
        }
        out.files.emplace_back("survival.csv", csv.text());
    }
    if (!cfg.sweep.s1.empty() && !cfg.sweep.s2.empty()) {
        CsvBuilder csv;
        stamp(csv, cfg);
        csv.header({"s1", "s2", "f_hat", "f_hat_se", "f1_hat", "f1_hat_se", "f2_hat",
                    "f2_hat_se", "n", "t_max"});
        for (const double s1 : cfg.sweep.s1) {
            for (const double s2 : cfg.sweep.s2) {
                const TransformEstimates est = estimate_transforms(cfg.model, s1, s2, cfg.sim);
                csv.row_numeric({s1, s2, est.f_hat.value, est.f_hat.std_error, est.f1_hat.value,
                                 est.f1_hat.std_error, est.f2_hat.value, est.f2_hat.std_error,
                                 static_cast<double>(cfg.sim.n_paths), cfg.sim.t_max});
            }
        }
        out.files.emplace_back("transform_sim.csv", csv.text());
    }
    if (cfg.sim.record_transfers) {
        const auto [u, v] =
            cfg.sweep.points.empty() ? std::make_pair(0.0, 0.0) : cfg.sweep.points.front();
        out.files.emplace_back("paths.csv", path_table(cfg, u, v));
    }
    out.summary = "simulate: " + std::to_string(cfg.sweep.points.size()) + " survival points, " +
                  std::to_string(cfg.sweep.s1.size() * cfg.sweep.s2.size()) +
                  " transform points";
    return out;
}

CommandOutput run_wh(const ExperimentConfig& cfg) {
    cfg.model.validate();
    const AuxiliaryPair pair = AuxiliaryPair::from(cfg.model, cfg.wh.rejection_factor);
    const MonteCarloFactors factors = MonteCarloFactors::estimate(pair, wh_config(cfg));
    const bool both = factors.has_side(Side::right);
    CommandOutput out;
    {
        CsvBuilder csv;
        stamp(csv, cfg);
        std::vector<std::string> head = {"w", "psi_plus_L", "psi_plus_L_se", "psi_minus_L",
                                         "psi_minus_L_se"};
        if (both) {
            head.insert(head.end(),
                        {"psi_plus_R", "psi_plus_R_se", "psi_minus_R", "psi_minus_R_se"});
        }
        csv.header(head);
        for (int k = 0; k < cfg.wh.w_count; ++k) {
            const double w = cfg.wh.w_max * k / (cfg.wh.w_count - 1);
            const FactorEstimate pl = factors.plus(Side::left, w);
            const FactorEstimate ml = factors.minus(Side::left, -w);
            std::vector<double> row = {w, pl.value.real(), pl.std_error, ml.value.real(),
                                       ml.std_error};
            if (both) {
                const FactorEstimate pr = factors.plus(Side::right, w);
                const FactorEstimate mr = factors.minus(Side::right, -w);
                row.insert(row.end(),
                           {pr.value.real(), pr.std_error, mr.value.real(), mr.std_error});
            }
            csv.row_numeric(row);
        }
        out.files.emplace_back("wh_curves.csv", csv.text());
    }
    {
        CsvBuilder csv;
        stamp(csv, cfg);
        csv.header({"t", "side", "residual_re", "residual_im", "residual_abs", "std_error"});
        for (int k = 1; k < cfg.wh.w_count; ++k) {
            const double t = cfg.wh.w_max * k / (cfg.wh.w_count - 1);
            for (const Side side : {Side::left, Side::right}) {
                if (side == Side::right && !both) continue;
                const FactorEstimate resid = wh_identity_residual(factors, pair, side, {0.0, t});
                csv.row({format_double(t), side == Side::left ? "left" : "right",
                         format_double(resid.value.real()), format_double(resid.value.imag()),
                         format_double(std::abs(resid.value)), format_double(resid.std_error)});
            }
        }
        out.files.emplace_back("wh_identity.csv", csv.text());
    }
    {
        CsvBuilder csv;
        stamp(csv, cfg);
        csv.header({"process", "bound", "value"});
        for (const Side side : {Side::left, Side::right}) {
            if (side == Side::right && !both) continue;
            const char* name = side == Side::left ? "left" : "right";
            for (const double x : factors.sup_samples(side)) {
                csv.row({name, "sup", format_double(x)});
            }
            for (const double x : factors.inf_samples(side)) {
                csv.row({name, "inf", format_double(x)});
            }
        }
        out.files.emplace_back("wh_samples.csv", csv.text());
    }
    {
        std::string gp =
            "set datafile separator \",\"\n"
            "set key autotitle columnhead\n"
            "set terminal pngcairo size 900,600\n"
            "set output \"wh_curves.png\"\n"
            "set xlabel \"w\"\n"
            "set ylabel \"factor\"\n";
        gp += both ? "plot \"wh_curves.csv\" using 1:6 with lines, \\\n"
                     "     \"wh_curves.csv\" using 1:2 with lines, \\\n"
                     "     \"wh_curves.csv\" using 1:4 with lines, \\\n"
                     "     \"wh_curves.csv\" using 1:8 with lines\n"
                   : "plot \"wh_curves.csv\" using 1:2 with lines, \\\n"
                     "     \"wh_curves.csv\" using 1:4 with lines\n";
        out.files.emplace_back("wh_curves.gp", gp);
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf), "wh: %zu samples per side, p_left=%.6g",
                  factors.sample_count(), pair.p_left);
    out.summary = buf;
    if (both) {
        std::snprintf(buf, sizeof(buf), ", p_right=%.6g", pair.p_right);
        out.summary += buf;
    }
    std::snprintf(buf, sizeof(buf), ", sup-zero fraction left %.4f",
                  factors.plus_tail(Side::left).value.real());
    out.summary += buf;
    for (const std::string& warning : factors.warnings()) {
        out.summary += "\nwarning: " + warning;
    }
    return out;
}

CommandOutput run_transform(const ExperimentConfig& cfg) {
    cfg.model.validate();
    if (cfg.sweep.s1.empty() || cfg.sweep.s2.empty()) {
        throw ConfigError("transform sweep needs nonempty sweep.s1 and sweep.s2 grids");
    }
    const MonteCarloFactors factors = MonteCarloFactors::estimate(cfg.model, wh_config(cfg));
    CommandOutput out;
    CsvBuilder csv;
    stamp(csv, cfg);
    std::vector<std::string> head = {"s1", "s2", "f_hat", "std_error", "term1", "term2"};
    if (cfg.sweep.overlay) head.insert(head.end(), {"sim_f_hat", "sim_se"});
    csv.header(head);
    for (const double s1 : cfg.sweep.s1) {
        for (const double s2 : cfg.sweep.s2) {
            const TransformValue val =
                cfg.model.r2.is_disabled()
                    ? restricted_survival_transform(cfg.model, &factors, s1, s2)
                    : survival_transform(cfg.model, factors, s1, s2);
            std::vector<double> row = {s1,           s2,
                                       val.f_hat.real(), val.std_error,
                                       val.term1.real(), val.term2.real()};
            if (cfg.sweep.overlay) {
                const MCEstimate direct = estimate_transforms(cfg.model, s1, s2, cfg.sim).f_hat;
                row.insert(row.end(), {direct.value, direct.std_error});
            }
            csv.row_numeric(row);
        }
    }
    out.files.emplace_back("transform_analytic.csv", csv.text());
    {
        std::string gp =
            "set datafile separator \",\"\n"
            "set key autotitle columnhead\n"
            "set terminal pngcairo size 900,600\n"
            "set output \"transform_sweep.png\"\n"
            "set xlabel \"s1\"\n"
            "set ylabel \"survival probability\"\n"
            "plot \"transform_analytic.csv\" using 1:3 with lines";
        if (cfg.sweep.overlay) gp += ", \\\n     \"transform_analytic.csv\" using 1:7 with points";
        gp += "\n";
        out.files.emplace_back("transform_sweep.gp", gp);
    }
    out.summary = "transform: " +
                  std::to_string(cfg.sweep.s1.size() * cfg.sweep.s2.size()) + " grid points" +
                  (cfg.sweep.overlay ? " with simulation overlay" : "");
    return out;
}

CommandOutput run_reproduce(const ExperimentConfig& cfg) {
    CommandOutput out = run_simulate(cfg);
    CommandOutput wh = run_wh(cfg);
    CommandOutput tr = run_transform(cfg);
    out.files.insert(out.files.end(), wh.files.begin(), wh.files.end());
    out.files.insert(out.files.end(), tr.files.begin(), tr.files.end());

    const MonteCarloFactors factors = MonteCarloFactors::estimate(cfg.model, wh_config(cfg));
    const ZeroCapitalSurvival zero = zero_capital_survival(cfg.model, factors);
    const auto [u, v] =
        cfg.sweep.points.empty() ? std::make_pair(0.0, 0.0) : cfg.sweep.points.front();
    const MCEstimate direct = estimate_survival(cfg.model, u, v, cfg.sim);
    CsvBuilder csv;
    stamp(csv, cfg);
    csv.header({"method", "value", "std_error"});
    csv.row({"via_plus", format_double(zero.via_plus), format_double(zero.se_plus)});
    csv.row({"via_minus", format_double(zero.via_minus), format_double(zero.se_minus)});
    csv.row({"simulation", format_double(direct.value), format_double(direct.std_error)});
    out.files.emplace_back("phi00.csv", csv.text());

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "zero-capital survival: via_plus=%.4f via_minus=%.4f simulation=%.4f",
                  zero.via_plus, zero.via_minus, direct.value);
    out.summary = out.summary + "\n" + wh.summary + "\n" + tr.summary + "\n" + buf;
    return out;
}

void emit(const CommandOutput& out, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : out.files) {
        const std::filesystem::path path = std::filesystem::path(dir) / name;
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + path.string());
        file << content;
    }
    std::cout << out.summary << "\n";
    for (const auto& [name, content] : out.files) {
        std::cout << "wrote " << (std::filesystem::path(dir) / name).string() << "\n";
    }
}

namespace {

int guarded(const ExperimentConfig& cfg, CommandOutput (*runner)(const ExperimentConfig&)) {
    try {
        emit(runner(cfg), cfg.output.dir);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedDriftError& e) {
        std::cerr << "unsupported model: " << e.what() << "\n"
                  << "factor estimation needs strictly positive drift on both lines\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg) { return guarded(cfg, run_simulate); }
int cmd_wh(const ExperimentConfig& cfg) { return guarded(cfg, run_wh); }
int cmd_transform(const ExperimentConfig& cfg) { return guarded(cfg, run_transform); }
int cmd_reproduce(const ExperimentConfig& cfg) { return guarded(cfg, run_reproduce); }

std::string validation_report_json(const std::vector<CheckResult>& results) {
    json checks = json::array();
    bool all = true;
    for (const CheckResult& res : results) {
        all = all && res.passed;
        checks.push_back({{"name", res.name},
                          {"passed", res.passed},
                          {"detail", res.detail},
                          {"values", json::parse(res.values_json)},
                          {"runtime_seconds", res.runtime_seconds}});
    }
    return json{{"version", kVersion}, {"all_passed", all}, {"checks", checks}}.dump(2);
}

int cmd_validate(const ValidationOptions& options, const std::string& dir) {
    std::vector<CheckResult> results;
    try {
        results = run_validation(options, [](const CheckResult& res) {
            std::printf("[%s] %-22s (%6.1f s) %s\n", res.passed ? "PASS" : "FAIL",
                        res.name.c_str(), res.runtime_seconds, res.detail.c_str());
            std::fflush(stdout);
        });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = std::filesystem::path(dir) / "validation_report.json";
    std::ofstream file(path, std::ios::binary);
    file << validation_report_json(results) << "\n";
    std::size_t passed = 0;
    for (const CheckResult& res : results) passed += res.passed ? 1 : 0;
    std::printf("%zu/%zu checks passed; report at %s\n", passed, results.size(),
                path.string().c_str());
    return passed == results.size() ? 0 : 1;
}

}  // namespace bivruin::cli

// Command-line front end: figure sweeps to CSV, single-point evaluation and
// the reproduction check table.
//
//   cavmag sweep --preset fig2b [--out grid.csv] [--points N] [--range key=min:max]
//                [--config file] [--set key=value]
//   cavmag point [--config file] [--set key=value]
//   cavmag verify [--points N]
//
// Exit status: 0 success, 1 usage error, 2 numerical failure, 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavmag/cavmag.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

cavmag::Assignments collect_overrides(const std::string& config_path,
                                      const std::vector<std::string>& sets) {
    cavmag::Assignments out;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw cavmag::UsageError("cannot open config file '" + config_path + "'");
        out = cavmag::read_assignments(in);
    }
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw cavmag::UsageError("expected --set key=value, got '" + s + "'");
        std::string key(cavmag::Config::trim(std::string_view(s).substr(0, eq)));
        std::string value(cavmag::Config::trim(std::string_view(s).substr(eq + 1)));
        cavmag::Config probe;
        probe.set(key, value);
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

int run_sweep_command(const std::string& preset_name, const std::string& out_path, int points,
                      const std::vector<std::string>& ranges, const std::string& config_path,
                      const std::vector<std::string>& sets, unsigned threads) {
    cavmag::SweepSpec spec =
        cavmag::preset(preset_name, points, collect_overrides(config_path, sets));
    for (const auto& r : ranges) cavmag::override_range(spec, r);
    const cavmag::SweepResult result = cavmag::run_sweep(spec, threads);

    if (out_path.empty() || out_path == "-") {
        cavmag::write_csv(result, std::cout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw cavmag::UsageError("cannot write '" + out_path + "'");
        cavmag::write_csv(result, out);
    }

    std::size_t unstable = 0, ill = 0;
    for (const auto& row : result.rows) {
        unstable += !row.stable;
        ill += row.ill_conditioned;
    }
    if (unstable) std::cerr << "note: " << unstable << " grid points have no steady state (flagged unstable)\n";
    if (ill) std::cerr << "warning: " << ill << " grid points have poorly conditioned diffusion (r > 6)\n";
    if (const auto bad = cavmag::certification_violations(result))
        std::cerr << "warning: " << bad << " points violate Duan/Mancini => E > 0\n";
    if (const auto sym = cavmag::mirror_symmetry_violations(result, cavmag::Quantity::log_negativity); sym && *sym)
        std::cerr << "warning: " << *sym << " points break the (delta_a, delta_m) -> (-delta_a, -delta_m) symmetry\n";
    return 0;
}

int run_point_command(const std::string& config_path, const std::vector<std::string>& sets) {
    cavmag::Config cfg;
    cavmag::apply_assignments(cfg, collect_overrides(config_path, sets));
    cfg.validate();
    const cavmag::PointMeasures m = cavmag::evaluate_point(cfg);
    const cavmag::Environment env = cfg.environment();

    const auto line = [](const char* name, double v) {
        std::cout << std::left << std::setw(20) << name << cavmag::format_number(v) << '\n';
    };
    std::cout << std::left << std::setw(20) << "stability" << (m.stability.stable ? "stable" : "unstable") << '\n';
    line("max_real_part", m.stability.max_real_part);
    line("n_m1", env.n_m1());
    line("n_m2", env.n_m2());
    line("input_squeezing_db", cavmag::input_squeezing_db(cfg.r));
    if (!m.stability.stable) {
        std::cerr << "no steady state for this configuration\n";
        return kExitNumerical;
    }
    if (m.ill_conditioned) std::cerr << "warning: poorly conditioned diffusion matrix (r > 6)\n";
    line("log_negativity", m.entanglement.log_negativity);
    line("nu_minus", m.entanglement.nu_minus);
    line("duan_sum", m.duan);
    line("mancini_product", m.mancini);
    line("var_X", m.cov(0, 0));
    line("var_Y", m.cov(1, 1));
    line("var_x1", m.cov(2, 2));
    line("var_y1", m.cov(3, 3));
    line("var_x2", m.cov(4, 4));
    line("var_y2", m.cov(5, 5));
    line("var_Mx", m.collective.var_Mx);
    line("var_My", m.collective.var_My);
    line("var_mx", m.collective.var_mx);
    line("var_my", m.collective.var_my);
    line("squeezing_db_X", cavmag::squeezing_db(m.cov(0, 0)));
    line("squeezing_db_x1", cavmag::squeezing_db(m.cov(2, 2)));
    line("squeezing_db_Mx", cavmag::squeezing_db(m.collective.var_Mx));
    return 0;
}

int run_verify_command(int points) {
    const auto checks = cavmag::verify_reference_numbers(points);
    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS" : "FAIL") << "  [" << std::setw(2) << c.criterion << "] "
                  << c.name << ": " << c.detail << '\n';
        all = all && c.passed;
    }
    std::cout << (all ? "all checks passed" : "verification FAILED") << '\n';
    return all ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state entanglement and squeezing of two magnon modes in a squeezed-vacuum driven cavity"};
    app.require_subcommand(1);

    std::string preset_name, out_path, config_path;
    std::vector<std::string> ranges, sets;
    int points = 101;
    unsigned threads = 0;

    auto* sweep = app.add_subcommand("sweep", "Evaluate a figure preset on a grid and write CSV");
    sweep->add_option("--preset", preset_name, "fig2a fig2b fig3 fig4a fig4b fig5a fig5b fig6a fig6b fig6c")->required();
    sweep->add_option("--out", out_path, "Output CSV path (default stdout)");
    sweep->add_option("--points", points, "Points per axis")->check(CLI::Range(2, 100000));
    sweep->add_option("--range", ranges, "Axis range override key=min:max (detunings in MHz)");
    sweep->add_option("--config", config_path, "Configuration file (key = value lines)");
    sweep->add_option("--set", sets, "Parameter override key=value");
    sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* point = app.add_subcommand("point", "Evaluate every measure at one parameter point");
    point->add_option("--config", config_path, "Configuration file (key = value lines)");
    point->add_option("--set", sets, "Parameter override key=value");

    auto* verify = app.add_subcommand("verify", "Check the reproduced values against the reference numbers");
    verify->add_option("--points", points, "Points per axis for grid checks")->check(CLI::Range(3, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sweep) return run_sweep_command(preset_name, out_path, points, ranges, config_path, sets, threads);
        if (*point) return run_point_command(config_path, sets);
        if (*verify) return run_verify_command(points);
    } catch (const cavmag::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cavmag::DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cavmag::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}

#include "irsa/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "irsa/bench.hpp"
#include "irsa/settings.hpp"

namespace irsa {

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
    auto* c = cmd->add_option("--config", f.config, "config file or preset name");
    if (config_required) c->required();
    cmd->add_option("--seed", f.seed, "base seed (u64)");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "CSV output path (default stdout)");
    cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores");
}

Settings settings_for(const CommonFlags& f) {
    Settings s = load_settings(resolve_config(f.config));
    if (f.seed) s.system.seed = *f.seed;
    if (f.threads) s.threads = *f.threads;
    return s;
}

/// Writes to --out if given, else to the fallback stream.
template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write '" + path + "'");
    write(file);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"IRSA with massive MIMO: Monte Carlo SIC decoding and density evolution"};
    app.require_subcommand(1);

    CommonFlags simulate_f, sweep_f, theta_f, de_f;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo throughput / PLR / rate of one config");
    add_common(simulate, simulate_f, true);
    auto* sweep = app.add_subcommand("sweep", "sweep one parameter axis ([sweep] axis, values)");
    add_common(sweep, sweep_f, true);
    auto* theta = app.add_subcommand("theta", "emit the theta_r table");
    add_common(theta, theta_f, true);
    auto* de = app.add_subcommand("de", "density evolution over [de] loads");
    add_common(de, de_f, true);
    auto* presets = app.add_subcommand("presets", "list shipped presets");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (*presets) {
            out << "name,description,path\n";
            for (const auto& p : list_presets()) {
                std::string desc = p.description;
                for (char& ch : desc)
                    if (ch == ',') ch = ';';
                out << p.name << ',' << desc << ',' << p.path.string() << '\n';
            }
            return 0;
        }

        if (*simulate || *sweep) {
            const CommonFlags& f = *simulate ? simulate_f : sweep_f;
            const Settings s = settings_for(f);
            SweepSpec spec;
            spec.base = s.system;
            spec.trials = f.trials.value_or(s.trials);
            spec.packet_len = s.packet_len;
            spec.threads = s.threads;
            if (*simulate) {
                spec.axis = SweepAxis::Load;
                spec.values = {static_cast<double>(s.system.resolved_num_users()) / s.system.num_res};
                if (s.system.load) spec.values = {*s.system.load};
            } else {
                if (!s.sweep_axis || s.sweep_values.empty())
                    throw std::invalid_argument("sweep needs [sweep] axis and values");
                spec.axis = *s.sweep_axis;
                spec.values = s.sweep_values;
            }
            const auto rows = run_sweep(spec);
            emit(f.out, out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
            for (const auto& r : rows)
                err << "irsa: " << r.axis << '=' << format_number(r.value) << " done in " << r.wall_seconds << " s\n";
            bool any_error = false;
            for (const auto& r : rows) any_error = any_error || r.status.rfind("error", 0) == 0;
            return any_error ? 3 : 0;
        }

        if (*theta) {
            Settings s = settings_for(theta_f);
            if (theta_f.trials) s.de.theta_trials = *theta_f.trials;
            const ThetaTable t = build_theta(s);
            emit(theta_f.out, out, [&](std::ostream& os) { write_theta_csv(os, t); });
            err << "irsa: theta table in " << seconds_since(t0) << " s\n";
            return 0;
        }

        if (*de) {
            Settings s = settings_for(de_f);
            if (de_f.trials) s.de.theta_trials = *de_f.trials;
            const ThetaTable t = build_theta(s);
            const DeRun run = run_de(s, t);
            emit(de_f.out, out, [&](std::ostream& os) { write_de_csv(os, run); });
            if (!s.de.trace_out.empty()) {
                std::ofstream trace(s.de.trace_out);
                if (!trace) throw std::runtime_error("cannot write '" + s.de.trace_out + "'");
                write_de_trace_csv(trace, run);
            }
            if (run.inflection_requested) {
                err << "irsa: inflection load L* = " << format_number(run.inflection.load);
                if (run.inflection.at_boundary) err << " (range boundary, no transition inside)";
                if (!run.inflection.monotone) err << " (p_infty not monotone in L)";
                err << '\n';
            }
            err << "irsa: de in " << seconds_since(t0) << " s\n";
            return 0;
        }
    } catch (const std::exception& e) {
        err << "irsa: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace irsa

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irsa/config.hpp"
#include "irsa/de.hpp"

namespace irsa {

enum class SweepAxis { PilotLen, Antennas, EdgeSnr, Load, RzfLambda, PowerControlZeta, NumRes };

std::string_view to_string(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view s);

/// Where theta comes from for the DE subcommands.
enum class ThetaSource { Empirical, Gamma, Normal, Deterministic, Theta12, Ones, Collision };

std::string_view to_string(ThetaSource s);
ThetaSource parse_theta_source(std::string_view s);

struct DeSettings {
    ThetaSource theta_source = ThetaSource::Empirical;
    int theta_r_max = 40;
    int theta_trials = 10000;
    std::optional<Estimator> theta_estimator;  ///< defaults to chest.estimator
    std::vector<double> loads{1.0};
    DeOptions options;
    bool find_inflection = false;
    double inflection_lo = 0.05;
    double inflection_hi = 4.0;
    double inflection_tol = 1e-3;
    std::string trace_out;  ///< optional per-iteration p/q CSV
};

/// Everything a config file can set.
struct Settings {
    SystemConfig system;
    int packet_len = 100;  ///< tau_c
    int trials = 1000;
    unsigned threads = 1;
    std::optional<SweepAxis> sweep_axis;
    std::vector<double> sweep_values;
    DeSettings de;
};

/// Parses the INI-style text. Unknown sections or keys throw std::invalid_argument.
Settings parse_settings(std::istream& in, const std::string& source = "<config>");
Settings load_settings(const std::filesystem::path& path);

/// Parses "soliton:27", "regular:3" or "masses:2:0.75,3:0.25".
DegreeDistribution parse_degree_distribution(const std::string& text);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(const std::string& text);

/// Directory holding the shipped presets.
std::filesystem::path preset_directory();

struct PresetInfo {
    std::string name;
    std::string description;  ///< first comment line of the file
    std::filesystem::path path;
};
std::vector<PresetInfo> list_presets(const std::filesystem::path& dir = preset_directory());

/// A path to an existing file, or the name of a shipped preset.
std::filesystem::path resolve_config(const std::string& name_or_path);

/// Empirical-theta parameters implied by a scenario (path-loss inversion, rho_0 = edge SNR).
EmpiricalThetaSpec theta_spec_from(const Settings& s);

}  // namespace irsa

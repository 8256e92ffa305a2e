#ifndef BYRD_CONFIG_HPP
#define BYRD_CONFIG_HPP

#include "byrd/engine.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace byrd {

inline constexpr const char* kVersion = "byrd 0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cartesian sweep over aggregation rules, attacks, Byzantine ratios and
// optimizers; every other parameter comes from the base [run] section.
struct GridSpec {
    std::vector<AggregationRule::Kind> rules;
    std::vector<AttackKind::Kind> attacks;
    std::vector<double> byz_ratios;
    std::vector<OptimizerKind> optimizers;
    bool empty() const {
        return rules.empty() && attacks.empty() && byz_ratios.empty() &&
               optimizers.empty();
    }
};

struct ConfigFile {
    RunConfig run;
    GridSpec grid;
};

// INI-style sections + key/value pairs. Unknown keys are rejected with
// the offending line; all RunConfig invariants are re-checked here.
// Relative dataset paths resolve against `data_root` when set.
ConfigFile parse_config_text(const std::string& text, const std::string& name,
                             const std::string& data_root);

// Same, reading the file and taking the data root from $BYRD_DATA_DIR.
ConfigFile parse_config_file(const std::string& path);

// Canonical textual form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

std::vector<RunConfig> expand_grid(const RunConfig& base, const GridSpec& grid);
std::string cell_name(const RunConfig& cfg);

const char* optimizer_name(OptimizerKind k);

// metrics.csv: fixed header, one row per report, >= 9 significant digits.
extern const char* const kMetricsCsvHeader;
std::string metrics_csv_text(const std::vector<RoundReport>& reports);
void write_metrics_csv(const std::string& path, const std::vector<RoundReport>& reports);
std::vector<RoundReport> parse_metrics_csv(const std::string& path);

void write_summary(const std::string& path, const RunSummary& summary);

} // namespace byrd

#endif

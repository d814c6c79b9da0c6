#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gpsampling/sim_engine.hpp"

namespace gpsampling {

/// Version tag written into every JSON log.
inline constexpr const char* kTrialLogSchema = "gpsampling.trial/1";

/// Header of the per-step CSV log.
inline constexpr const char* kStepCsvHeader =
    "step,time_s,robot_id,x_m,y_m,rss_dbm,rmse,mean_var,cum_dist_m,loc_correct";

/// One row per StepRecord, numbers in shortest round-trip form.
void write_step_csv(const TrialLog& log, std::ostream& out);

nlohmann::json to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrialLog& log);
/// Inverse of to_json(TrialLog). Throws std::runtime_error on a schema mismatch.
TrialLog trial_log_from_json(const nlohmann::json& j);

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
void write_trial_files(const TrialLog& log, const std::filesystem::path& dir, const std::string& stem);
TrialLog read_trial_json(const std::filesystem::path& path);

}  // namespace gpsampling

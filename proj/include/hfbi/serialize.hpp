#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfbi/bursts.hpp"
#include "hfbi/calibration.hpp"
#include "hfbi/evidence.hpp"
#include "hfbi/model.hpp"
#include "hfbi/powerlaw.hpp"

namespace hfbi {

// JSON forms used by the CLI artifacts. Every document carries a `schema`
// tag so downstream readers can dispatch without guessing.
void to_json(nlohmann::json& j, const PowerLawFit& fit);
void to_json(nlohmann::json& j, const TwoSampleKs& ks);
void to_json(nlohmann::json& j, const HfbiParams& params);
void to_json(nlohmann::json& j, const AlphaCalibration& cal);
void to_json(nlohmann::json& j, const BurstTable& table);
void to_json(nlohmann::json& j, const TheoryCheck& check);

// Shortest round-trip decimal form of a double (what the JSON artifacts
// use), shared by the CSV writers for consistency.
std::string format_double(double v);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

void write_ccdf_csv(const std::vector<CcdfPoint>& points, const std::filesystem::path& path);
void write_lorenz_csv(const std::vector<LorenzPoint>& points, const std::filesystem::path& path);
void write_propensity_csv(const std::vector<PropensityPoint>& curve,
                          const std::string& x_name, const std::filesystem::path& path);
void write_node_fits_csv(const std::vector<NodeFit>& nodes, const std::filesystem::path& path);
void write_node_calibration_csv(const std::vector<NodeCalibration>& nodes,
                                const std::filesystem::path& path);
void write_bursts_csv(const std::vector<Burst>& bursts, const std::filesystem::path& path);
void write_interval_fits_csv(const std::vector<IntervalFit>& fits,
                             const std::filesystem::path& path);

}  // namespace hfbi

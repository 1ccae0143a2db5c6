#pragma once

#include "kcq/bubbles.hpp"
#include "kcq/config.hpp"
#include "kcq/gn.hpp"
#include "kcq/solver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace kcq {

using json = nlohmann::ordered_json;

json config_json(const RunConfig& cfg);

/// Sharp constants including C_q (filled here from the shooting grid).
SharpConstants full_constants(const PhysicalParams& params);

json constants_json(const PhysicalParams& params, const SharpConstants& consts);
json report_json(const SolveReport& report);
json gn_json(const GroundStateProfile& g);
json bubbles_json(const BubbleFamily& fam, const AsymptoticsSummary& s, const std::vector<double>& a8, double mu_star,
                  const MountainPass& mp);

/// Warnings when the smallness condition fails for the given (rho, mu) on the
/// configured bubble family. Empty when it holds at some eps.
std::vector<std::string> regime_warnings(const RunConfig& cfg, const RieszKernel& kernel, const SharpConstants& consts);

struct SweepPoint {
    double value = 0.0;
    std::string status; // converged | certificates-failed | failed: ...
    bool have_report = false;
    SolveReport report;
};

/// One solve per sweep value over a worker pool sharing the kernel.
/// Throws std::runtime_error only if every point fails.
std::vector<SweepPoint> run_sweep(const RunConfig& cfg, const RieszKernel& kernel);

void write_sweep_csv(const std::vector<SweepPoint>& pts, const std::string& axis, const std::string& path);
json sweep_json(const std::vector<SweepPoint>& pts, const std::string& axis);

std::string utc_timestamp();
void write_json(const json& j, const std::string& path);

} // namespace kcq

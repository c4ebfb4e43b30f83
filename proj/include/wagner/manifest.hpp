#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wagner/chart.hpp"
#include "wagner/connection.hpp"
#include "wagner/finsler.hpp"
#include "wagner/sampling.hpp"
#include "wagner/transport.hpp"
#include "wagner/types.hpp"

namespace wagner::manifest {

struct CurveSpec {
  transport::Curve curve;
  Vec v0;
  transport::Mode mode = transport::Mode::Interior;
  std::string label;
};

// A parsed and validated run description. Charts and metrics are fully
// constructed here, so commands never see raw JSON.
struct Manifest {
  int m = 2;
  std::optional<chart::Chart> chart;
  std::optional<finsler::FinslerMetric> metric;
  connection::Options options;
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
  std::vector<FiberPoint> points;
  std::vector<CurveSpec> curves;
  std::optional<sampling::SampleBox> box;
  std::size_t sample_count = 0;

  // Seeded samples from the box (or the default unit box) appended to the
  // explicit points; `fallback_count` applies when the manifest gives no box.
  std::vector<FiberPoint> sampled_points(std::size_t fallback_count) const;
};

// Both throw ConfigError with a line/column-bearing message on bad input.
Manifest parse_manifest(const std::string& json_text);
Manifest load_manifest(const std::string& path);

}  // namespace wagner::manifest

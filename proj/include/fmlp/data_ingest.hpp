// Copyright 2026 The fmlp-rul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Readers and writers for the C-MAPSS text layout: one observation per line,
// whitespace separated, columns (unit, cycle, setting1..3, sensor1..21).

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fmlp/errors.hpp"

namespace fmlp::data {

inline constexpr std::size_t kNumSettings = 3;
inline constexpr std::size_t kNumSensors = 21;
inline constexpr std::size_t kNumColumns = 2 + kNumSettings + kNumSensors;

using SettingsRow = std::array<double, kNumSettings>;
using SensorRow = std::array<double, kNumSensors>;

/// Processing state of the sensor block; guards against scaling twice.
enum class SensorStage { kRaw, kConditionRemoved, kScaled };

/// One engine's cycle-indexed record.
struct EngineTrajectory {
  std::int64_t unit_id = 0;
  std::vector<std::int64_t> cycles;
  std::vector<SettingsRow> op_settings;
  std::vector<SensorRow> sensors;
  SensorStage stage = SensorStage::kRaw;

  std::size_t length() const noexcept { return cycles.size(); }
};

enum class SubsetId { kFD001, kFD002, kFD003, kFD004 };

inline std::string to_string(SubsetId id) {
  switch (id) {
    case SubsetId::kFD001: return "FD001";
    case SubsetId::kFD002: return "FD002";
    case SubsetId::kFD003: return "FD003";
    case SubsetId::kFD004: return "FD004";
  }
  return "FD00?";
}

inline SubsetId parse_subset_id(std::string_view s) {
  if (s == "FD001") return SubsetId::kFD001;
  if (s == "FD002") return SubsetId::kFD002;
  if (s == "FD003") return SubsetId::kFD003;
  if (s == "FD004") return SubsetId::kFD004;
  throw ArgumentError("unknown subset id '" + std::string(s) + "' (expected FD001..FD004)");
}

/// Window length M_d used for each subset.
inline int window_length(SubsetId id) {
  switch (id) {
    case SubsetId::kFD001: return 31;
    case SubsetId::kFD002: return 21;
    case SubsetId::kFD003: return 38;
    case SubsetId::kFD004: return 19;
  }
  return 0;
}

struct DataSubset {
  SubsetId subset_id = SubsetId::kFD001;
  std::vector<EngineTrajectory> train;
  std::vector<EngineTrajectory> test;
  std::vector<std::int64_t> test_rul;
  int window_length = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  // from_chars rejects a leading '+', which some exports use.
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("malformed numeric field '" + std::string(field) + "'", line_no);
  }
  return v;
}

inline std::int64_t parse_int(std::string_view field, std::size_t line_no) {
  std::int64_t v = 0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("malformed integer field '" + std::string(field) + "'", line_no);
  }
  return v;
}

inline void check_cycles(const EngineTrajectory& t) {
  for (std::size_t i = 0; i < t.cycles.size(); ++i) {
    if (t.cycles[i] != static_cast<std::int64_t>(i) + 1) {
      throw IntegrityError("unit " + std::to_string(t.unit_id) +
                           ": cycles must start at 1 and advance by 1 (found cycle " +
                           std::to_string(t.cycles[i]) + " at position " +
                           std::to_string(i + 1) + ")");
    }
  }
}

}  // namespace detail

/// Parses a train_/test_ file. Fields past column 26 are ignored.
inline std::vector<EngineTrajectory> parse_trajectory_file(std::istream& in) {
  std::vector<EngineTrajectory> out;
  std::unordered_set<std::int64_t> finished;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < kNumColumns) {
      throw ParseError("expected at least " + std::to_string(kNumColumns) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const std::int64_t unit = detail::parse_int(fields[0], line_no);
    const std::int64_t cycle = detail::parse_int(fields[1], line_no);
    if (unit <= 0) throw ParseError("unit id must be positive", line_no);

    if (out.empty() || out.back().unit_id != unit) {
      if (!out.empty()) {
        detail::check_cycles(out.back());
        finished.insert(out.back().unit_id);
      }
      if (finished.contains(unit)) {
        throw IntegrityError("unit " + std::to_string(unit) +
                             ": rows are not contiguous (unit reappears at line " +
                             std::to_string(line_no) + ")");
      }
      out.emplace_back();
      out.back().unit_id = unit;
    }
    EngineTrajectory& t = out.back();
    SettingsRow settings{};
    for (std::size_t k = 0; k < kNumSettings; ++k) {
      settings[k] = detail::parse_double(fields[2 + k], line_no);
    }
    SensorRow sensors{};
    for (std::size_t k = 0; k < kNumSensors; ++k) {
      sensors[k] = detail::parse_double(fields[2 + kNumSettings + k], line_no);
    }
    t.cycles.push_back(cycle);
    t.op_settings.push_back(settings);
    t.sensors.push_back(sensors);
  }
  if (!out.empty()) detail::check_cycles(out.back());
  return out;
}

inline std::vector<std::int64_t> parse_rul_file(std::istream& in) {
  std::vector<std::int64_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = detail::trim(line);
    if (s.empty()) continue;
    const std::int64_t v = detail::parse_int(s, line_no);
    if (v < 0) throw ParseError("RUL must be non-negative, found " + std::string(s), line_no);
    out.push_back(v);
  }
  return out;
}

/// Writes trajectories back in the on-disk layout with round-trip precision.
inline void write_trajectory_file(std::ostream& out, const std::vector<EngineTrajectory>& trajs) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& t : trajs) {
    for (std::size_t i = 0; i < t.length(); ++i) {
      out << t.unit_id << ' ' << t.cycles[i];
      for (double v : t.op_settings[i]) out << ' ' << v;
      for (double v : t.sensors[i]) out << ' ' << v;
      out << '\n';
    }
  }
  out.precision(old_precision);
}

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Loads train_/test_/RUL_ files for one subset from `root`.
inline DataSubset load_subset(const std::filesystem::path& root, SubsetId id) {
  const std::string name = to_string(id);
  DataSubset subset;
  subset.subset_id = id;
  subset.window_length = window_length(id);
  {
    auto in = detail::open_input(root / ("train_" + name + ".txt"));
    subset.train = parse_trajectory_file(in);
  }
  {
    auto in = detail::open_input(root / ("test_" + name + ".txt"));
    subset.test = parse_trajectory_file(in);
  }
  {
    auto in = detail::open_input(root / ("RUL_" + name + ".txt"));
    subset.test_rul = parse_rul_file(in);
  }
  if (subset.test_rul.size() != subset.test.size()) {
    throw IntegrityError(name + ": RUL file has " + std::to_string(subset.test_rul.size()) +
                         " entries but the test file has " + std::to_string(subset.test.size()) +
                         " engines");
  }
  return subset;
}

}  // namespace fmlp::data

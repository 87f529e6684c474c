/*
 * Copyright 2026 The Zonomerge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ZONOMERGE_REPORT_HPP
#define ZONOMERGE_REPORT_HPP

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "zonomerge/instance.hpp"
#include "zonomerge/network.hpp"
#include "zonomerge/verifier.hpp"

namespace zonomerge {

/// Outcome of one batch entry. Exactly one of report / error is meaningful.
struct InstanceResult {
  std::string id;
  std::optional<VerificationReport> report;
  std::string error;
};

struct BatchSummary {
  std::size_t instances = 0;
  std::size_t verified = 0;
  std::size_t failed = 0;  // instances that raised an error
  double vr_percent = 0.0;
  double mean_rn_percent = 0.0;
  std::map<std::size_t, double> mean_remaining;  // keyed by 1-based layer index
  double total_ms = 0.0;
  double mean_ms = 0.0;
};

/// Decimal text with 12 significant digits.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline BatchSummary summarize(const std::vector<InstanceResult>& results) {
  BatchSummary s;
  s.instances = results.size();
  std::map<std::size_t, std::pair<double, std::size_t>> per_layer;
  std::size_t ok = 0;
  for (const auto& r : results) {
    if (!r.report) {
      ++s.failed;
      continue;
    }
    ++ok;
    if (r.report->verdict == Verdict::Verified) ++s.verified;
    s.mean_rn_percent += r.report->rn_percent();
    s.total_ms += r.report->total_ms;
    for (const auto& l : r.report->layers) {
      auto& acc = per_layer[l.layer_index];
      acc.first += static_cast<double>(l.remaining);
      ++acc.second;
    }
  }
  if (s.instances > 0) s.vr_percent = 100.0 * static_cast<double>(s.verified) / static_cast<double>(s.instances);
  if (ok > 0) {
    s.mean_rn_percent /= static_cast<double>(ok);
    s.mean_ms = s.total_ms / static_cast<double>(ok);
  }
  for (const auto& [layer, acc] : per_layer) s.mean_remaining[layer] = acc.first / static_cast<double>(acc.second);
  return s;
}

/// instance_id,verdict,delta_final,time_ms,rn_percent
inline void write_summary_csv(std::ostream& out, const std::vector<InstanceResult>& results) {
  out << "instance_id,verdict,delta_final,time_ms,rn_percent\n";
  for (const auto& r : results) {
    if (!r.report) {
      out << r.id << ",error,,,\n";
      continue;
    }
    out << r.id << ',' << to_string(r.report->verdict) << ',' << format_number(r.report->delta_final) << ','
        << format_number(r.report->total_ms) << ',' << format_number(r.report->rn_percent()) << '\n';
  }
}

/// instance_id,layer_index,original_neurons,remaining_neurons,buckets_used
inline void write_layers_csv(std::ostream& out, const std::vector<InstanceResult>& results) {
  out << "instance_id,layer_index,original_neurons,remaining_neurons,buckets_used\n";
  for (const auto& r : results) {
    if (!r.report) continue;
    for (const auto& l : r.report->layers) {
      out << r.id << ',' << l.layer_index << ',' << l.original << ',' << l.remaining << ',' << l.buckets << '\n';
    }
  }
}

inline nlohmann::json report_to_json(const VerificationReport& report) {
  nlohmann::json doc;
  doc["verdict"] = to_string(report.verdict);
  doc["delta_final"] = report.delta_final;
  doc["mode"] = to_string(report.mode);
  doc["full_network"] = report.full_network;
  doc["attempts"] = report.attempts;
  doc["rn_percent"] = report.rn_percent();
  auto layers = nlohmann::json::array();
  for (const auto& l : report.layers) {
    layers.push_back({{"layer_index", l.layer_index},
                      {"original_neurons", l.original},
                      {"remaining_neurons", l.remaining},
                      {"buckets_used", l.buckets}});
  }
  doc["layers"] = std::move(layers);
  doc["time_ms"] = {{"lookahead", report.times.lookahead_ms},
                    {"enclosure", report.times.enclosure_ms},
                    {"check", report.times.check_ms},
                    {"total", report.total_ms}};
  doc["output_lower"] = detail::vector_to_json(report.output_bounds.lower());
  doc["output_upper"] = detail::vector_to_json(report.output_bounds.upper());
  doc["intersection_fallbacks"] = report.intersection_fallbacks;
  return doc;
}

/// Verifies every instance file against one network. Failures are recorded per
/// instance. Results keep the input order regardless of `jobs`.
inline std::vector<InstanceResult> run_batch(const Network& net, const std::vector<std::filesystem::path>& instances,
                                             const std::vector<double>& schedule, BucketMode mode,
                                             const RunOptions& options = {}, unsigned jobs = 1) {
  validate_schedule(schedule);
  std::vector<InstanceResult> results(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      auto& r = results[i];
      r.id = instances[i].stem().string();
      try {
        const Instance inst = load_instance(instances[i]);
        validate_instance(inst, net);
        r.report = verify(net, inst.input, inst.unsafe, schedule, mode, options);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(instances.size(), 1)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  return results;
}

/// Instance paths from a directory (every *.json except manifest.json, sorted by
/// name) or a manifest file. A manifest is either JSON with an "instances"
/// array or plain text with one path per line; relative paths resolve against
/// the manifest's directory.
inline std::vector<std::filesystem::path> list_instances(const std::filesystem::path& source) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  if (fs::is_directory(source)) {
    for (const auto& entry : fs::directory_iterator(source)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != "manifest.json") {
        paths.push_back(entry.path());
      }
    }
    std::sort(paths.begin(), paths.end());
    return paths;
  }
  if (!fs::is_regular_file(source)) throw ParseError(source.string() + ": no such file or directory");
  const fs::path base = source.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  if (source.extension() == ".json") {
    const auto doc = detail::read_json_file(source);
    if (!doc.is_object() || !doc.contains("instances") || !doc["instances"].is_array()) {
      throw ParseError(source.string() + ": manifest needs an 'instances' array");
    }
    for (const auto& p : doc["instances"]) {
      if (!p.is_string()) throw ParseError(source.string() + ": manifest entries must be strings");
      paths.push_back(resolve(p.get<std::string>()));
    }
    return paths;
  }
  std::ifstream in(source);
  std::string line;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty() || line.front() == '#') continue;
    paths.push_back(resolve(line));
  }
  return paths;
}

}  // namespace zonomerge

#endif  // ZONOMERGE_REPORT_HPP

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

// Command-line front end: single-instance verification and batch runs.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "zonomerge/zonomerge.hpp"

namespace {

using namespace zonomerge;

constexpr int kExitVerified = 0;
constexpr int kExitError = 1;
constexpr int kExitUnknown = 2;

struct CommonFlags {
  std::string model;
  std::string schedule;
  std::string buckets = "dynamic";
};

std::vector<double> parse_schedule(const std::string& text) {
  if (text.empty()) return default_schedule();
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("--delta-schedule: cannot parse '" + item + "'");
    }
  }
  validate_schedule(out);
  return out;
}

void print_report(std::ostream& out, const VerificationReport& r) {
  out << "verdict: " << to_string(r.verdict) << '\n'
      << "delta: " << format_number(r.delta_final) << (r.full_network ? " (full network)" : "") << '\n'
      << "attempts: " << r.attempts << '\n'
      << "remaining neurons: " << format_number(r.rn_percent()) << "%\n";
  for (const auto& l : r.layers) {
    out << "  layer " << l.layer_index << ": " << l.remaining << "/" << l.original << " neurons, " << l.buckets
        << " buckets\n";
  }
  out << "time: " << format_number(r.total_ms) << " ms (look-ahead " << format_number(r.times.lookahead_ms)
      << ", enclosure " << format_number(r.times.enclosure_ms) << ", check " << format_number(r.times.check_ms)
      << ")\n";
}

/// Random points of the input box plus its axis extremes; returns the number
/// of points whose network output lands in the unsafe set.
std::size_t sample_counterexamples(const Network& net, const Instance& inst, std::size_t samples, unsigned seed) {
  const IntervalVector box = inst.input.box();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector mid = center(box);
  std::size_t hits = 0;
  auto probe = [&](const Vector& x) {
    if (is_unsafe(inst.unsafe, eval(net, x))) ++hits;
  };
  for (Index i = 0; i < box.dim(); ++i) {
    Vector x = mid;
    x(i) = box.lower()(i);
    probe(x);
    x(i) = box.upper()(i);
    probe(x);
  }
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x(box.dim());
    for (Index i = 0; i < box.dim(); ++i) x(i) = box.lower()(i) + unit(rng) * (box.upper()(i) - box.lower()(i));
    probe(x);
  }
  return hits;
}

unsigned resolve_jobs(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("ZONOMERGE_JOBS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid ZONOMERGE_JOBS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_verify(const CommonFlags& flags, const std::string& instance_path, const std::string& out_path,
               std::size_t samples_check, unsigned seed) {
  const Network net = load_network(flags.model);
  const Instance inst = load_instance(instance_path);
  validate_instance(inst, net);
  const auto schedule = parse_schedule(flags.schedule);
  const auto mode = parse_bucket_mode(flags.buckets);

  const VerificationReport report = verify(net, inst.input, inst.unsafe, schedule, mode);
  print_report(std::cout, report);

  auto doc = report_to_json(report);
  doc["model"] = flags.model;
  doc["instance"] = instance_path;
  int code = report.verdict == Verdict::Verified ? kExitVerified : kExitUnknown;
  if (samples_check > 0) {
    const std::size_t hits = sample_counterexamples(net, inst, samples_check, seed);
    std::cout << "sampled counterexamples: " << hits << " of " << samples_check + 2 * inst.input.dim() << '\n';
    doc["sampled_counterexamples"] = hits;
    if (hits > 0 && report.verdict == Verdict::Verified) {
      std::cerr << "error: verified instance has a sampled counterexample\n";
      code = kExitError;
    }
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw Error(out_path + ": cannot open for writing");
    out << doc.dump(2) << '\n';
  }
  return code;
}

int cmd_batch(const CommonFlags& flags, const std::string& instances, const std::string& out_dir, unsigned jobs) {
  namespace fs = std::filesystem;
  const Network net = load_network(flags.model);
  const auto schedule = parse_schedule(flags.schedule);
  const auto mode = parse_bucket_mode(flags.buckets);
  const auto paths = list_instances(instances);
  if (paths.empty()) {
    std::cerr << "error: no instances found in " << instances << '\n';
    return kExitError;
  }

  const auto results = run_batch(net, paths, schedule, mode, {}, resolve_jobs(jobs));

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "summary.csv");
    write_summary_csv(out, results);
  }
  {
    std::ofstream out(fs::path(out_dir) / "layers.csv");
    write_layers_csv(out, results);
  }
  for (const auto& r : results) {
    if (!r.report) std::cerr << "instance " << r.id << ": " << r.error << '\n';
  }

  const BatchSummary s = summarize(results);
  std::cout << "instances: " << s.instances << '\n'
            << "verified: " << s.verified << " (VR " << format_number(s.vr_percent) << "%)\n"
            << "errors: " << s.failed << '\n'
            << "mean remaining neurons: " << format_number(s.mean_rn_percent) << "%\n";
  for (const auto& [layer, remaining] : s.mean_remaining) {
    std::cout << "  layer " << layer << ": " << format_number(remaining) << " neurons\n";
  }
  std::cout << "time: " << format_number(s.total_ms) << " ms total, " << format_number(s.mean_ms)
            << " ms per instance\n";
  return kExitVerified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zonotope verification of feed-forward networks with on-the-fly neuron merging"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--model", flags.model, "Model file (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--delta-schedule", flags.schedule, "Comma-separated bucket tolerances, strictly decreasing");
    cmd->add_option("--buckets", flags.buckets, "Bucket construction")
        ->check(CLI::IsMember({"static", "dynamic", "none"}))
        ->capture_default_str();
  };

  auto* verify_cmd = app.add_subcommand("verify", "Verify a single instance");
  add_common(verify_cmd);
  std::string instance_path;
  std::string out_path;
  std::size_t samples_check = 0;
  unsigned seed = 42;
  verify_cmd->add_option("--instance", instance_path, "Instance file (JSON)")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--out", out_path, "Write the JSON report here");
  verify_cmd->add_option("--samples-check", samples_check, "Random counterexample probes after verification");
  verify_cmd->add_option("--seed", seed, "Seed for --samples-check")->capture_default_str();

  auto* batch_cmd = app.add_subcommand("batch", "Verify a set of instances and write CSV summaries");
  add_common(batch_cmd);
  std::string instances;
  std::string out_dir = ".";
  unsigned jobs = 0;
  batch_cmd->add_option("--instances", instances, "Instance directory or manifest")->required();
  batch_cmd->add_option("--out-dir", out_dir, "Directory for summary.csv and layers.csv")->capture_default_str();
  batch_cmd->add_option("--jobs", jobs, "Concurrent instances (default: ZONOMERGE_JOBS or hardware threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(flags, instance_path, out_path, samples_check, seed);
    return cmd_batch(flags, instances, out_dir, jobs);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitError;
}

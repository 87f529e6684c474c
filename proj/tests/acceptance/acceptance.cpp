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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on failure.
//
// Every expected value is produced by the brute-force oracles in
// tests/support, never by the library's own set arithmetic.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support/oracles.hpp"
#include "zonomerge/zonomerge.hpp"

namespace {

using namespace zonomerge;
using testing::Rng;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  enum class Status { Pass, Fail, Skip } status = Status::Pass;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) {
  return {ok ? Outcome::Status::Pass : Outcome::Status::Fail, std::move(detail)};
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixture(const std::string& name) { return std::string(ZONOMERGE_FIXTURES) + "/" + name; }

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------

Outcome kernel_oracles() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index n = testing::uniform_int(rng, 1, 5);
    const int q = testing::uniform_int(rng, 0, 10);
    const Vector c = testing::random_vector(rng, n, -2, 2);
    const Matrix g = testing::random_matrix(rng, n, q, -1, 1);
    const Zonotope z(c, g);

    const auto [lo, hi] = testing::zonotope_bounds_by_vertices(c, g);
    const auto hull = interval_hull(z);
    worst = std::max({worst, max_abs_diff(hull.lower(), lo), max_abs_diff(hull.upper(), hi)});

    const Index m = testing::uniform_int(rng, 1, 5);
    const Matrix w = testing::random_matrix(rng, m, n, -2, 2);
    const Vector b = testing::random_vector(rng, m, -1, 1);
    Matrix wg = Matrix::Zero(m, q);
    Vector wc = b;
    for (Index r = 0; r < m; ++r) {
      for (Index k = 0; k < n; ++k) {
        wc(r) += w(r, k) * c(k);
        for (int j = 0; j < q; ++j) wg(r, j) += w(r, k) * g(k, j);
      }
    }
    const auto [mlo, mhi] = testing::zonotope_bounds_by_vertices(wc, wg);
    const auto mapped = interval_hull(linear_map(w, b, z));
    worst = std::max({worst, max_abs_diff(mapped.lower(), mlo), max_abs_diff(mapped.upper(), mhi)});

    const Vector box_lo = testing::random_vector(rng, n, -1, 0);
    const Vector box_hi = testing::random_vector(rng, n, 0, 1);
    const auto added = interval_hull(add_interval(z, IntervalVector(box_lo, box_hi)));
    worst = std::max({worst, max_abs_diff(added.lower(), lo + box_lo), max_abs_diff(added.upper(), hi + box_hi)});

    const Vector a = testing::random_vector(rng, n, -2, 2);
    worst = std::max(worst, std::abs(halfspace_lower_bound(a, z) - testing::halfspace_min_by_vertices(a, c, g)));
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "1000 cases, max deviation " << worst << ", " << secs << " s";
  return pass_if(worst <= 1e-9 && secs < 10.0, d.str());
}

// ---------------------------------------------------------------------------

Outcome enclosure_soundness() {
  const auto t0 = Clock::now();
  Rng rng(1002);
  const ActivationKind kinds[] = {ActivationKind::ReLU, ActivationKind::Sigmoid, ActivationKind::Tanh};
  long violations = 0;
  double worst_relu = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto kind = kinds[t % 3];
    const Index n = testing::uniform_int(rng, 1, 8);
    const int q = testing::uniform_int(rng, 0, 8);
    const Vector c = testing::random_vector(rng, n, -4, 4);
    const Matrix g = testing::random_matrix(rng, n, q, -1.5, 1.5);
    const Zonotope input(c, g);
    const auto enc = enclose_activation(kind, input);
    const auto hull = interval_hull(enc.output);
    for (int s = 0; s < 10000; ++s) {
      Vector h = c + g * testing::sample_beta(rng, q);
      for (Index i = 0; i < n; ++i) h(i) = testing::reference_activation(kind, h(i));
      if (!hull.contains(h, 1e-9)) ++violations;
    }
    if (kind != ActivationKind::ReLU) continue;
    for (Index i = 0; i < n; ++i) {
      const double l = enc.input_bounds.lower()(i);
      const double u = enc.input_bounds.upper()(i);
      const auto a = approximate_neuron(kind, l, u);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      auto visit = [&](double x) {
        const double d = std::max(0.0, x) - (a.slope * x + a.intercept);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      };
      constexpr int kDense = 100000;
      for (int s = 0; s < kDense; ++s) visit(l + (u - l) * s / (kDense - 1));
      if (l < 0.0 && 0.0 < u) visit(0.0);  // the kink is part of the dense set
      worst_relu = std::max({worst_relu, std::abs(lo - a.error_lower), std::abs(hi - a.error_upper)});
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "2e6 samples, " << violations << " escapes, ReLU error deviation " << worst_relu << ", " << secs << " s";
  return pass_if(violations == 0 && worst_relu <= 1e-9 && secs < 60.0, d.str());
}

// ---------------------------------------------------------------------------

/// Disjoint random buckets whose center/tolerance cover their members.
BucketSet forced_buckets(Rng& rng, const IntervalVector& post) {
  std::vector<Index> order(static_cast<std::size_t>(post.dim()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  BucketSet buckets;
  std::size_t pos = 0;
  while (pos + 1 < order.size()) {
    const auto take = static_cast<std::size_t>(testing::uniform_int(rng, 1, 4));
    std::vector<Index> members(order.begin() + static_cast<std::ptrdiff_t>(pos),
                               order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), pos + take)));
    pos += members.size();
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Index w : members) {
      lo = std::min(lo, post.lower()(w));
      hi = std::max(hi, post.upper()(w));
    }
    buckets.push_back({1, (lo + hi) / 2, (hi - lo) / 2, members});
  }
  return buckets;
}

Outcome merge_containment() {
  Rng rng(1003);
  long violations = 0;
  long removed = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n0 = testing::uniform_int(rng, 1, 4);
    const Index n1 = testing::uniform_int(rng, 2, 10);
    const Index n2 = testing::uniform_int(rng, 1, 5);
    const auto kind = testing::random_kind(rng);
    const Matrix w1 = testing::random_matrix(rng, n1, n0, -3, 3);
    const Vector b1 = testing::random_vector(rng, n1, -2, 2);
    const Matrix w2 = testing::random_matrix(rng, n2, n1, -2, 2);
    const Vector b2 = testing::random_vector(rng, n2, -1, 1);
    const Vector lo = testing::random_vector(rng, n0, -1, 1);
    const Vector hi = lo + testing::random_vector(rng, n0, 0, 1);

    const auto [pre_lo, pre_hi] = testing::interval_affine(w1, b1, b1, lo, hi);
    Vector post_lo(n1);
    Vector post_hi(n1);
    for (Index i = 0; i < n1; ++i) {
      post_lo(i) = testing::reference_activation(kind, pre_lo(i));
      post_hi(i) = testing::reference_activation(kind, pre_hi(i));
    }
    const IntervalVector post(post_lo, post_hi);
    const auto buckets = t % 2 == 0 ? forced_buckets(rng, post) : dynamic_buckets(post, testing::uniform(rng, 0.1, 2.0), 1);
    const auto m = merge(w1, b1, w2, b2, post, buckets);
    removed += static_cast<long>(m.removed.size());

    const auto [r_lo, r_hi] = testing::interval_affine(m.prev_weights, m.prev_bias.lower(), m.prev_bias.upper(), lo, hi);
    Vector a_lo(r_lo.size());
    Vector a_hi(r_hi.size());
    for (Index i = 0; i < r_lo.size(); ++i) {
      a_lo(i) = testing::reference_activation(kind, r_lo(i));
      a_hi(i) = testing::reference_activation(kind, r_hi(i));
    }
    const auto [out_lo, out_hi] = testing::interval_affine(m.next_weights, m.next_bias.lower(), m.next_bias.upper(), a_lo, a_hi);

    const std::vector<Layer> original{LinearLayer{w1, b1}, ActivationLayer{kind, n1}, LinearLayer{w2, b2}};
    for (int s = 0; s < 1000; ++s) {
      const Vector y = testing::reference_eval(original, testing::sample_box(rng, lo, hi));
      for (Index i = 0; i < n2; ++i) {
        if (y(i) < out_lo(i) - 1e-9 || y(i) > out_hi(i) + 1e-9) ++violations;
      }
    }
  }
  std::ostringstream d;
  d << "200 networks, " << removed << " neurons merged, " << violations << " violations";
  return pass_if(violations == 0 && removed > 0, d.str());
}

// ---------------------------------------------------------------------------

/// Returns the first unsafe point found among samples and box vertices.
std::optional<Vector> counterexample(Rng& rng, const Network& net, const InputSpec& spec, const UnsafeSpec& unsafe) {
  const auto box = spec.box();
  for (int s = 0; s < 10000; ++s) {
    const Vector x = testing::sample_box(rng, box.lower(), box.upper());
    if (is_unsafe(unsafe, testing::reference_eval(net.layers(), x))) return x;
  }
  const Index n = spec.dim();
  if (n <= 12) {
    Vector x(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      for (Index i = 0; i < n; ++i) x(i) = (mask >> i) & 1U ? box.upper()(i) : box.lower()(i);
      if (is_unsafe(unsafe, testing::reference_eval(net.layers(), x))) return x;
    }
  }
  return std::nullopt;
}

Outcome end_to_end_soundness() {
  Rng rng(1004);
  long runs = 0;
  long verified = 0;
  long violations = 0;
  for (int t = 0; t < 100; ++t) {
    const Network net = testing::random_network(
        rng, {.min_hidden = 1, .max_hidden = 7, .max_width = 20, .max_input = 12, .max_output = 5,
              .weight_scale = testing::uniform(rng, 0.5, 3.0), .mixed_kinds = t % 2 == 0});
    for (int i = 0; i < 2; ++i) {
      const Vector c = testing::random_vector(rng, net.input_width(), -1, 1);
      const Vector y = testing::reference_eval(net.layers(), c);
      const auto spec = InputSpec::ball(c, std::pow(10.0, testing::uniform(rng, -3, -0.5)));
      UnsafeSpec unsafe;
      if (i == 0) {
        Index label = 0;
        y.maxCoeff(&label);
        unsafe = Classification{label};
      } else {
        // Unsafe set {a·y <= b} placed just beyond the center's output.
        const Vector a = testing::random_vector(rng, net.output_width(), -1, 1);
        unsafe = Halfspaces{a.transpose(), Vector::Constant(1, a.dot(y) - testing::uniform(rng, 0.0, 0.5))};
      }
      for (auto mode : {BucketMode::Static, BucketMode::Dynamic}) {
        const auto report = verify(net, spec, unsafe, default_schedule(), mode);
        ++runs;
        if (report.verdict != Verdict::Verified) continue;
        ++verified;
        if (counterexample(rng, net, spec, unsafe)) ++violations;
      }
    }
  }
  std::ostringstream d;
  d << runs << " runs, " << verified << " verified, " << violations << " refuted";
  return pass_if(violations == 0 && verified > 0, d.str());
}

// ---------------------------------------------------------------------------

Outcome mode_none_identity() {
  Rng rng(1005);
  std::vector<std::pair<Network, std::vector<Zonotope>>> cases;
  for (int t = 0; t < 100; ++t) {
    Network net = testing::random_network(rng, {.max_hidden = 6, .max_width = 16, .trailing_linear = t % 2 == 0});
    std::vector<Zonotope> inputs;
    for (int i = 0; i < 3; ++i) {
      inputs.push_back(input_zonotope(
          InputSpec::ball(testing::random_vector(rng, net.input_width(), -1, 1), testing::uniform(rng, 0, 0.5))));
    }
    cases.emplace_back(std::move(net), std::move(inputs));
  }
  for (const auto& [model, dir] : {std::pair{"sat_sigmoid_6x200.json", "sat_sigmoid_instances"},
                                   std::pair{"dead_relu_4x100.json", "dead_relu_instances"}}) {
    std::vector<Zonotope> inputs;
    const auto paths = list_instances(fixture(dir));
    for (std::size_t i = 0; i < paths.size(); i += 10) inputs.push_back(input_zonotope(load_instance(paths[i]).input));
    cases.emplace_back(load_network(fixture(model)), std::move(inputs));
  }
  cases.emplace_back(load_network(fixture("tiny_relu.json")),
                     std::vector<Zonotope>{input_zonotope(load_instance(fixture("tiny_relu_robust.json")).input),
                                           input_zonotope(load_instance(fixture("tiny_relu_unknown.json")).input)});
  long runs = 0;
  long mismatches = 0;
  for (const auto& [net, inputs] : cases) {
    for (const auto& x : inputs) {
      const Zonotope plain = propagate_plain(net, x);
      for (double delta : {0.0, 0.01, 0.5}) {
        const Zonotope none = run_once(net, x, delta, BucketMode::None).output;
        ++runs;
        const bool same = none.center().size() == plain.center().size() &&
                          none.generators().cols() == plain.generators().cols() &&
                          std::memcmp(none.center().data(), plain.center().data(),
                                      sizeof(double) * static_cast<std::size_t>(plain.center().size())) == 0 &&
                          std::memcmp(none.generators().data(), plain.generators().data(),
                                      sizeof(double) * static_cast<std::size_t>(plain.generators().size())) == 0;
        if (!same) ++mismatches;
      }
    }
  }
  std::ostringstream d;
  d << cases.size() << " networks, " << runs << " runs, " << mismatches << " differ";
  return pass_if(mismatches == 0, d.str());
}

// ---------------------------------------------------------------------------

struct Comparison {
  long instances = 0;
  long verdict_mismatches = 0;
  long reduced_verified = 0;
  double mean_rn = 0.0;
  double reduced_ms = 0.0;
  double full_ms = 0.0;
};

Comparison compare_with_full(const Network& net, const std::vector<fs::path>& paths, double delta, BucketMode mode,
                             std::vector<RunResult>* reduced_runs = nullptr) {
  Comparison cmp;
  auto timed = [&](const Instance& inst, double tol, BucketMode m, double& ms) {
    const auto t0 = Clock::now();
    RunOptions options;
    options.record_trace = reduced_runs != nullptr;
    RunResult run = run_once(net, input_zonotope(inst.input), tol, m, options);
    const Verdict v = check(run.output, inst.unsafe);
    ms += std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return std::pair{v, std::move(run)};
  };
  // Warm-up so the first timed run does not pay for page faults.
  if (!paths.empty()) {
    double ignored = 0.0;
    const auto inst = load_instance(paths.front());
    timed(inst, delta, mode, ignored);
    timed(inst, 0.0, BucketMode::None, ignored);
  }
  for (const auto& p : paths) {
    const auto inst = load_instance(p);
    validate_instance(inst, net);
    auto [reduced, run] = timed(inst, delta, mode, cmp.reduced_ms);
    const auto full = timed(inst, 0.0, BucketMode::None, cmp.full_ms).first;
    ++cmp.instances;
    cmp.mean_rn += remaining_percent(run.layers);
    if (reduced != full) ++cmp.verdict_mismatches;
    if (reduced == Verdict::Verified) ++cmp.reduced_verified;
    if (reduced_runs) reduced_runs->push_back(std::move(run));
  }
  if (cmp.instances > 0) {
    cmp.mean_rn /= static_cast<double>(cmp.instances);
    cmp.reduced_ms /= static_cast<double>(cmp.instances);
    cmp.full_ms /= static_cast<double>(cmp.instances);
  }
  return cmp;
}

Outcome saturated_sigmoid() {
  const Network net = load_network(fixture("sat_sigmoid_6x200.json"));
  const auto paths = list_instances(fixture("sat_sigmoid_instances"));
  const auto cmp = compare_with_full(net, paths, 0.01, BucketMode::Dynamic);
  const double ratio = cmp.full_ms > 0 ? cmp.reduced_ms / cmp.full_ms : 1.0;
  std::ostringstream d;
  d << cmp.instances << " instances, mean RN " << cmp.mean_rn << "%, " << cmp.reduced_verified
    << " verified reduced, " << cmp.verdict_mismatches << " verdict changes, time " << cmp.reduced_ms << " ms vs "
    << cmp.full_ms << " ms (" << ratio << "x)";
  return pass_if(cmp.instances == 100 && cmp.mean_rn <= 50.0 && cmp.verdict_mismatches == 0 && ratio <= 0.6, d.str());
}

Outcome dead_relu() {
  const Network net = load_network(fixture("dead_relu_4x100.json"));
  const auto paths = list_instances(fixture("dead_relu_instances"));
  std::vector<RunResult> runs;
  const auto cmp = compare_with_full(net, paths, 0.0, BucketMode::Static, &runs);

  // By construction rows 0..49 of every hidden layer never activate.
  long wrong_removals = 0;
  for (const auto& run : runs) {
    for (const auto& rec : run.trace) {
      std::vector<Index> live(50);
      std::iota(live.begin(), live.end(), 50);
      if (rec.kept != live) ++wrong_removals;
    }
  }
  std::ostringstream d;
  d << cmp.instances << " instances, mean RN " << cmp.mean_rn << "%, " << wrong_removals << " layers with other removals, "
    << cmp.verdict_mismatches << " verdict changes";
  return pass_if(cmp.instances == 100 && std::abs(cmp.mean_rn - 50.0) <= 2.0 && wrong_removals == 0 &&
                     cmp.verdict_mismatches == 0,
                 d.str());
}

// ---------------------------------------------------------------------------

Outcome external_benchmark() {
  const char* model = std::getenv("ZONOMERGE_EXTERNAL_MODEL");
  const char* instances = std::getenv("ZONOMERGE_EXTERNAL_INSTANCES");
  if (model == nullptr || instances == nullptr) {
    return {Outcome::Status::Skip, "set ZONOMERGE_EXTERNAL_MODEL and ZONOMERGE_EXTERNAL_INSTANCES to run"};
  }
  const Network net = load_network(model);
  const auto results = run_batch(net, list_instances(instances), default_schedule(), BucketMode::Dynamic, {},
                                   std::max(1u, std::thread::hardware_concurrency()));
  const auto s = summarize(results);
  std::ostringstream d;
  d << s.instances << " instances, VR " << s.vr_percent << "%, RN " << s.mean_rn_percent << "%, mean " << s.mean_ms
    << " ms (informational)";
  return {Outcome::Status::Skip, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"zonotope kernel oracle suite", kernel_oracles},
      {"activation enclosure soundness", enclosure_soundness},
      {"merge containment", merge_containment},
      {"end-to-end soundness", end_to_end_soundness},
      {"mode none equals plain propagation", mode_none_identity},
      {"saturated sigmoid reduction", saturated_sigmoid},
      {"dead ReLU removal", dead_relu},
      {"external benchmark (optional)", external_benchmark},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Outcome::Status::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Outcome::Status::Pass ? "[PASS]" : o.status == Outcome::Status::Fail ? "[FAIL]" : "[SKIP]";
    if (o.status == Outcome::Status::Fail) ++failures;
    std::cout << tag << ' ' << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

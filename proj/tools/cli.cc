/*
 * Copyright 2026 The Stabcert Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <CLI11.hpp>

#include "stabcert/bise.h"
#include "stabcert/boolean_function.h"
#include "stabcert/core.h"
#include "stabcert/error.h"
#include "stabcert/external_model.h"
#include "stabcert/hash.h"
#include "stabcert/model.h"
#include "stabcert/parallel.h"
#include "stabcert/perturb.h"
#include "stabcert/report.h"
#include "stabcert/sca.h"
#include "stabcert/smoothing.h"
#include "stabcert/spectral.h"
#include "stabcert/stats.h"

namespace stabcert::cli {
namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<double> kSmoothingGrid = {1.0, 0.9, 0.75, 0.5, 0.25};

struct RunConfig {
  std::string command;
  std::string model = "table";
  std::uint64_t model_seed = 1;
  std::size_t classes = 2;
  std::size_t threshold = 0;
  std::string input;
  std::size_t demo = 0;
  std::size_t features = 16;
  double top_fraction = 0.25;
  std::size_t radius = 1;
  std::vector<std::size_t> radii = {1, 2, 4, 8};
  double epsilon = 0.1;
  double delta = 0.1;
  std::vector<double> lambdas;
  std::size_t mc_samples = kStabilitySamples;
  std::size_t step = 4;
  std::size_t m = 100;
  std::uint64_t seed = 0;
  bool exact = false;
  bool hard = false;
  bool per_k = false;
  std::string out;
  std::string format = "json";
  int workers = 1;
  double gamma = PredictionRelation::kDefaultGap;
  std::string metric = "insertion";
  std::string perturb = "window:12";
  std::size_t trials = 20;
  std::size_t pool_size = 8;
  std::string function = "and2";
  std::string basis = "std";
};

struct Item {
  Features x;
  std::vector<double> scores;
  double top_fraction = 0.25;
};

struct Output {
  Json record;
  std::string csv;
};

std::string Num(double v) { return Json(v).dump(); }

std::string Hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json ConfigJson(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["model"] = c.model;
  j["model_seed"] = c.model_seed;
  j["classes"] = c.classes;
  j["threshold"] = c.threshold;
  j["input"] = c.input;
  j["demo"] = c.demo;
  j["features"] = c.features;
  j["top_fraction"] = c.top_fraction;
  j["radius"] = c.radius;
  j["radii"] = c.radii;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["lambda"] = c.lambdas;
  j["mc_samples"] = c.mc_samples;
  j["step"] = c.step;
  j["m"] = c.m;
  j["seed"] = c.seed;
  j["exact"] = c.exact;
  j["hard"] = c.hard;
  j["per_k"] = c.per_k;
  j["gamma"] = c.gamma;
  j["metric"] = c.metric;
  j["perturb"] = c.perturb;
  j["trials"] = c.trials;
  j["pool_size"] = c.pool_size;
  j["function"] = c.function;
  j["basis"] = c.basis;
  return j;
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void Validate(const RunConfig& c) {
  Require(c.format == "json" || c.format == "csv",
          "--format must be json or csv");
  Require(c.epsilon > 0.0 && c.epsilon < 1.0, "--epsilon must lie in (0, 1)");
  Require(c.delta > 0.0 && c.delta < 1.0, "--delta must lie in (0, 1)");
  Require(c.top_fraction > 0.0 && c.top_fraction <= 1.0,
          "--top-fraction must lie in (0, 1]");
  for (double l : c.lambdas) {
    Require(l >= 0.0 && l <= 1.0, "--lambda values must lie in [0, 1]");
  }
  Require(c.mc_samples >= 1, "--mc-samples must be at least 1");
  Require(c.step >= 1, "--step must be at least 1");
  Require(c.m >= 1, "--m must be at least 1");
  Require(c.workers >= 1, "--workers must be at least 1");
  Require(c.gamma >= 0.0 && std::isfinite(c.gamma),
          "--gamma must be finite and non-negative");
  Require(c.trials >= 1, "--trials must be at least 1");
  Require(c.pool_size >= 1, "--pool-size must be at least 1");
  Require(c.classes >= 1, "--classes must be at least 1");
  Require(!c.radii.empty(), "--radii must not be empty");
  for (std::size_t i = 1; i < c.radii.size(); ++i) {
    Require(c.radii[i] > c.radii[i - 1], "--radii must be strictly increasing");
  }
}

std::vector<Item> LoadItems(const std::string& path, double top_fraction) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file " + path);
  std::vector<Item> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw IoError(where + ": malformed JSON: " + e.what());
    }
    try {
      Item item;
      item.x = j.at("x").get<std::vector<double>>();
      item.scores = j.at("scores").get<std::vector<double>>();
      item.top_fraction = j.value("top_fraction", top_fraction);
      if (item.x.empty()) throw IoError(where + ": empty \"x\"");
      if (item.scores.size() != item.x.size()) {
        throw IoError(where + ": \"scores\" and \"x\" differ in length");
      }
      if (!(item.top_fraction > 0.0 && item.top_fraction <= 1.0)) {
        throw IoError(where + ": \"top_fraction\" must lie in (0, 1]");
      }
      items.push_back(std::move(item));
    } catch (const Json::exception& e) {
      throw IoError(where + ": " + e.what());
    }
  }
  if (items.empty()) throw IoError("input file " + path + " has no items");
  return items;
}

std::vector<Item> DemoItems(std::size_t count, std::size_t n,
                            double top_fraction, std::uint64_t seed) {
  std::vector<Item> items(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = MakeRng(seed, {0xd3, i});
    items[i].x.resize(n);
    items[i].scores.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      items[i].x[j] = 0.5 + UniformDouble(rng);
      items[i].scores[j] = UniformDouble(rng);
    }
    items[i].top_fraction = top_fraction;
  }
  return items;
}

std::unique_ptr<Model> MakeModel(const RunConfig& c, std::size_t n) {
  const std::string kExternal = "external:";
  if (c.model.rfind(kExternal, 0) == 0) {
    const std::string command = c.model.substr(kExternal.size());
    Require(!command.empty(), "external model needs a command");
    try {
      return std::make_unique<ExternalModel>(command);
    } catch (const Error& e) {
      throw IoError(e.what());
    }
  }
  Require(n >= 1, "model needs at least one feature");
  if (c.model == "and") {
    // A seeded subset of max(1, n/8) required features.
    std::vector<std::size_t> slots(n);
    std::iota(slots.begin(), slots.end(), 0);
    Rng rng = MakeRng(c.model_seed, {0xa4d});
    const auto shuffled =
        PerturbRanking(slots, RankingPerturbation::Window(n), rng);
    const std::size_t k = std::max<std::size_t>(1, n / 8);
    return std::make_unique<ConjunctionModel>(Mask::FromIndices(
        n, std::vector<std::size_t>(shuffled.begin(), shuffled.begin() + k)));
  }
  if (c.model == "majority") {
    const std::size_t t = c.threshold == 0 ? n / 2 + 1 : c.threshold;
    Require(t <= n, "--threshold exceeds the feature count");
    return std::make_unique<MajorityModel>(Mask::Ones(n), t);
  }
  if (c.model == "table") {
    Require(n <= 24, "table model supports at most 24 features");
    return std::make_unique<LookupTableModel>(
        LookupTableModel::Random(n, c.classes, c.model_seed));
  }
  throw ConfigError("unknown model '" + c.model +
                    "'; expected and, majority, table or external:<cmd>");
}

PredictionRelation RelationFor(const Model& model, double gamma) {
  return model.num_outputs() == 1 ? PredictionRelation::ScalarGap(gamma)
                                  : PredictionRelation::ArgmaxEqual();
}

struct Session {
  RunConfig config;
  std::vector<Item> items;
  std::unique_ptr<Model> base;
  std::unique_ptr<CountingModel> model;
};

// Loads items and builds the model; every item must match its width.
Session Open(const RunConfig& c, bool need_items) {
  Session s;
  s.config = c;
  if (!c.input.empty()) s.items = LoadItems(c.input, c.top_fraction);
  const std::size_t n = s.items.empty() ? c.features : s.items[0].x.size();
  s.base = MakeModel(c, n);
  s.model = std::make_unique<CountingModel>(*s.base);
  if (c.input.empty() && c.demo > 0) {
    s.items = DemoItems(c.demo, s.base->num_features(), c.top_fraction,
                        c.seed);
  }
  Require(!need_items || !s.items.empty(),
          "no items: pass --input <file> or --demo <count>");
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    Require(s.items[i].x.size() == s.base->num_features(),
            "item " + std::to_string(i) + " has " +
                std::to_string(s.items[i].x.size()) +
                " features, model expects " +
                std::to_string(s.base->num_features()));
  }
  return s;
}

int ItemWorkers(const Session& s) {
  return s.model->concurrency_safe() ? s.config.workers : 1;
}

Json Bootstrap(const std::vector<double>& values, std::uint64_t seed) {
  const ConfidenceInterval ci =
      BootstrapMeanCi(values, kBootstrapResamples, kBootstrapLevel, seed);
  return Json{{"lower", ci.lower},
              {"upper", ci.upper},
              {"level", ci.level},
              {"resamples", ci.resamples}};
}

Json Summary(const std::vector<double>& tau, std::uint64_t seed) {
  Json j;
  j["items"] = tau.size();
  if (!tau.empty()) {
    j["mean_tau_hat"] = Mean(tau);
    j["bootstrap_ci"] = Bootstrap(tau, DeriveSeed(seed, {0xb007}));
  }
  return j;
}

CertificateReport RunCertificate(const Model& model, const Item& item,
                                 const Mask& alpha, std::size_t radius,
                                 const PredictionRelation& rel,
                                 const CertifyOptions& opts,
                                 const RunConfig& c) {
  if (c.hard) return CertifyHard(model, item.x, alpha, radius, rel, opts);
  if (c.per_k) {
    return EstimateStabilityPerSize(model, item.x, alpha, radius, rel, opts);
  }
  return EstimateStability(model, item.x, alpha, radius, rel, opts);
}

CertifyOptions ItemOptions(const RunConfig& c, std::size_t item) {
  CertifyOptions opts;
  opts.epsilon = c.epsilon;
  opts.delta = c.delta;
  opts.seed = DeriveSeed(c.seed, {item});
  opts.workers = 1;
  return opts;
}

Output CmdCertify(Session& s) {
  const RunConfig& c = s.config;
  const PredictionRelation rel = RelationFor(*s.model, c.gamma);
  const std::size_t count = s.items.size();
  std::vector<CertificateReport> reports(count);
  std::vector<Attribution> attrs(count);
  std::vector<std::optional<double>> exact(count);
  ParallelFor(count, ItemWorkers(s), [&](std::size_t i) {
    attrs[i] = BinarizeTopFraction(s.items[i].scores, s.items[i].top_fraction);
    reports[i] = RunCertificate(*s.model, s.items[i], attrs[i].mask, c.radius,
                                rel, ItemOptions(c, i), c);
    if (c.exact) {
      exact[i] = ExactStability(*s.base, s.items[i].x, attrs[i].mask,
                                c.radius, rel);
    }
  });

  Output out;
  Json rows = Json::array();
  std::vector<double> tau;
  std::size_t within = 0;
  std::ostringstream csv;
  csv << "item,n,k,radius,effective_radius,kind,tau_hat,samples,stable,"
         "verdict,evaluations";
  if (c.exact) csv << ",exact_tau";
  csv << '\n';
  for (std::size_t i = 0; i < count; ++i) {
    const CertificateReport& r = reports[i];
    Json row;
    row["item"] = i;
    row["n"] = s.items[i].x.size();
    row["k"] = attrs[i].k;
    row["mask"] = attrs[i].mask.ToString();
    row["report"] = ToJson(r);
    if (exact[i]) {
      row["exact_tau"] = *exact[i];
      if (std::abs(r.tau_hat - *exact[i]) <= c.epsilon) ++within;
    }
    rows.push_back(std::move(row));
    tau.push_back(r.tau_hat);
    csv << i << ',' << s.items[i].x.size() << ',' << attrs[i].k << ','
        << r.radius << ',' << r.effective_radius << ',' << ToString(r.kind)
        << ',' << Num(r.tau_hat) << ',' << r.samples << ',' << r.stable << ','
        << ToString(r.verdict) << ',' << r.evaluations;
    if (exact[i]) csv << ',' << Num(*exact[i]);
    csv << '\n';
  }
  out.record["items"] = std::move(rows);
  out.record["summary"] = Summary(tau, c.seed);
  if (c.exact && count > 0) {
    out.record["summary"]["within_epsilon_fraction"] =
        static_cast<double>(within) / static_cast<double>(count);
  }
  out.csv = csv.str();
  return out;
}

Output CmdCurve(Session& s) {
  const RunConfig& c = s.config;
  const PredictionRelation rel = RelationFor(*s.model, c.gamma);
  const CertificateKind kind = c.hard    ? CertificateKind::kHard
                               : c.per_k ? CertificateKind::kPerSizeSoft
                                         : CertificateKind::kSoft;
  const std::size_t count = s.items.size();
  std::vector<std::vector<CertificateReport>> curves(count);
  std::vector<std::vector<double>> exact(count);
  ParallelFor(count, ItemWorkers(s), [&](std::size_t i) {
    const Attribution a =
        BinarizeTopFraction(s.items[i].scores, s.items[i].top_fraction);
    curves[i] = StabilityCurve(*s.model, s.items[i].x, a.mask, c.radii, rel,
                               ItemOptions(c, i), kind);
    if (c.exact) {
      for (std::size_t r : c.radii) {
        exact[i].push_back(ExactStability(*s.base, s.items[i].x, a.mask, r,
                                          rel));
      }
    }
  });

  Output out;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "item,radius,effective_radius,tau_hat,samples,verdict";
  if (c.exact) csv << ",exact_tau";
  csv << '\n';
  Json per_radius = Json::array();
  for (std::size_t j = 0; j < c.radii.size(); ++j) {
    std::vector<double> tau;
    for (std::size_t i = 0; i < count; ++i) tau.push_back(curves[i][j].tau_hat);
    Json entry = Summary(tau, DeriveSeed(c.seed, {c.radii[j]}));
    entry["radius"] = c.radii[j];
    per_radius.push_back(std::move(entry));
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < c.radii.size(); ++j) {
      const CertificateReport& r = curves[i][j];
      Json row{{"item", i}, {"report", ToJson(r)}};
      if (c.exact) row["exact_tau"] = exact[i][j];
      rows.push_back(std::move(row));
      csv << i << ',' << r.radius << ',' << r.effective_radius << ','
          << Num(r.tau_hat) << ',' << r.samples << ',' << ToString(r.verdict);
      if (c.exact) csv << ',' << Num(exact[i][j]);
      csv << '\n';
    }
  }
  out.record["rows"] = std::move(rows);
  out.record["per_radius"] = std::move(per_radius);
  out.csv = csv.str();
  return out;
}

DenseBooleanFunction SpectrumFunction(Session& s) {
  const RunConfig& c = s.config;
  if (c.function == "and2") {
    return DenseBooleanFunction(2, {0.0, 0.0, 0.0, 1.0});
  }
  if (c.function == "random") {
    Require(c.features <= FunctionCap(), "--features exceeds the table cap");
    Rng rng = MakeRng(c.model_seed, {0x5bec});
    return DenseBooleanFunction::FromFunction(
        c.features, [&](std::uint64_t) { return UniformDouble(rng); });
  }
  if (c.function == "model") {
    Require(!s.items.empty(), "--function model needs --input or --demo");
    Require(s.base->num_features() <= FunctionCap(),
            "model has too many features for a dense table");
    const Item& item = s.items.front();
    std::vector<Features> full{item.x};
    const Scores ref = EvaluateMany(*s.model, full, 1).front();
    const std::size_t target = ref.size() == 1 ? 0 : Argmax(ref);
    return TabulateModel(*s.model, item.x, target, ItemWorkers(s));
  }
  throw ConfigError("unknown --function '" + c.function +
                    "'; expected and2, random or model");
}

double MaxDiff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

Output CmdSpectrum(Session& s) {
  const RunConfig& c = s.config;
  const double lambda = c.lambdas.empty() ? 0.5 : c.lambdas.front();
  const DenseBooleanFunction h = SpectrumFunction(s);
  const std::size_t n = h.n();

  const StdSpectrum fourier = FourierTransform(h);
  const StdSpectrum smoothed = SmoothStd(fourier, lambda);
  const MonotoneSpectrum mono = MonotoneTransform(h);
  const MonotoneSpectrum smoothed_mono = SmoothMonotone(mono, lambda);
  const DenseBooleanFunction exact = ExactSmooth(h, lambda);

  Json checks = Json::array();
  bool all_ok = true;
  auto check = [&](const std::string& name, double error, double tol) {
    const bool ok = error <= tol;
    all_ok = all_ok && ok;
    checks.push_back(Json{{"name", name}, {"max_error", error}, {"ok", ok}});
  };
  check("fourier_round_trip",
        MaxDiff(InverseFourier(fourier).table(), h.table()), 1e-9);
  check("monotone_round_trip",
        MaxDiff(InverseMonotone(mono).table(), h.table()), 1e-9);
  check("smooth_std_vs_exact",
        MaxDiff(InverseFourier(smoothed).table(), exact.table()), 1e-9);
  check("smooth_monotone_vs_exact",
        MaxDiff(InverseMonotone(smoothed_mono).table(), exact.table()), 1e-9);
  check("monotone_contraction",
        MaxDiff(MonotoneTransform(exact).coeffs, smoothed_mono.coeffs), 1e-9);
  double tail_excess = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    tail_excess = std::max(tail_excess,
                           TailMass(smoothed, k) -
                               TailBound(n, k, lambda) * TailMass(fourier, k));
  }
  check("tail_mass_contraction", std::max(0.0, tail_excess), 1e-9);

  Output out;
  out.record["function"] = c.function;
  out.record["n"] = n;
  out.record["lambda"] = lambda;
  out.record["fourier"] = fourier.coeffs;
  out.record["smoothed_fourier"] = smoothed.coeffs;
  out.record["monotone"] = mono.coeffs;
  out.record["smoothed_monotone"] = smoothed_mono.coeffs;
  out.record["checks"] = std::move(checks);
  out.record["all_checks_ok"] = all_ok;

  std::ostringstream csv;
  if (c.basis == "std") {
    WriteSpectrumCsv(csv, n, fourier.coeffs);
  } else if (c.basis == "smoothed") {
    WriteSpectrumCsv(csv, n, smoothed.coeffs);
  } else if (c.basis == "monotone") {
    WriteSpectrumCsv(csv, n, mono.coeffs);
  } else if (c.basis == "smoothed-monotone") {
    WriteSpectrumCsv(csv, n, smoothed_mono.coeffs);
  } else {
    throw ConfigError("unknown --basis '" + c.basis + "'");
  }
  out.csv = csv.str();
  if (!all_ok) out.record["invariant_violation"] = true;
  return out;
}

BiseOptions MakeBiseOptions(const RunConfig& c, std::uint64_t seed) {
  BiseOptions opts;
  opts.step = c.step;
  opts.m = c.m;
  opts.seed = seed;
  opts.influence =
      c.exact ? InfluenceMethod::kExact : InfluenceMethod::kSampled;
  return opts;
}

Output CmdBise(Session& s) {
  const RunConfig& c = s.config;
  const PredictionRelation rel = RelationFor(*s.model, c.gamma);
  const std::size_t count = s.items.size();
  std::vector<BiseScore> ins(count), del(count);
  std::vector<AttributionCurve> ins_test(count), del_test(count);
  ParallelFor(count, ItemWorkers(s), [&](std::size_t i) {
    const ModelIndicator g(*s.model, s.items[i].x, rel, 1);
    const std::vector<std::size_t> ranking = RankByScore(s.items[i].scores);
    const BiseOptions opts = MakeBiseOptions(c, DeriveSeed(c.seed, {i}));
    ins[i] = InsertionBise(g, ranking, opts);
    del[i] = DeletionBise(g, ranking, opts);
    if (!c.exact) {
      ins[i].bounds = ComputeBiseBounds(ins[i], c.delta);
      del[i].bounds = ComputeBiseBounds(del[i], c.delta);
    }
    ins_test[i] = InsertionTest(*s.model, s.items[i].x, ranking, c.step);
    del_test[i] = DeletionTest(*s.model, s.items[i].x, ranking, c.step);
  });

  Output out;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "item,mode,k,phi,lower,upper\n";
  std::vector<double> ins_auc, del_auc;
  for (std::size_t i = 0; i < count; ++i) {
    rows.push_back(Json{{"item", i},
                        {"insertion", ToJson(ins[i])},
                        {"deletion", ToJson(del[i])},
                        {"insertion_test_auc", ins_test[i].auc},
                        {"deletion_test_auc", del_test[i].auc}});
    ins_auc.push_back(ins[i].auc);
    del_auc.push_back(del[i].auc);
    for (const BiseScore* sc : {&ins[i], &del[i]}) {
      for (std::size_t j = 0; j < sc->ks.size(); ++j) {
        const double lo = sc->bounds ? sc->bounds->lower_points[j]
                                     : sc->values[j];
        const double hi = sc->bounds ? sc->bounds->upper_points[j]
                                     : sc->values[j];
        csv << i << ',' << ToString(sc->mode) << ',' << sc->ks[j] << ','
            << Num(sc->values[j]) << ',' << Num(lo) << ',' << Num(hi) << '\n';
      }
    }
  }
  out.record["items"] = std::move(rows);
  out.record["summary"] = Json{
      {"mean_insertion_auc", ins_auc.empty() ? 0.0 : Mean(ins_auc)},
      {"mean_deletion_auc", del_auc.empty() ? 0.0 : Mean(del_auc)},
      {"indicator", kIndicatorNote}};
  out.csv = csv.str();
  return out;
}

RankingPerturbation ParsePerturbation(const std::string& text, std::size_t n) {
  if (text == "none") return RankingPerturbation::Swap(0);
  const auto colon = text.find(':');
  Require(colon != std::string::npos,
          "--perturb must be window:<size>, swap:<size> or none");
  const std::string kind = text.substr(0, colon);
  std::size_t size = 0;
  try {
    size = std::stoul(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--perturb size must be an integer");
  }
  if (kind == "window") {
    Require(size >= 1 && size <= n, "window size must lie in [1, n]");
    return RankingPerturbation::Window(size);
  }
  if (kind == "swap") {
    Require(2 * size <= n, "swap size must satisfy 2 * size <= n");
    return RankingPerturbation::Swap(size);
  }
  throw ConfigError("unknown perturbation kind '" + kind + "'");
}

Output CmdRankStab(Session& s) {
  const RunConfig& c = s.config;
  const PredictionRelation rel = RelationFor(*s.model, c.gamma);
  const Item& item = s.items.front();
  const std::size_t n = item.x.size();
  const RankingPerturbation perturbation = ParsePerturbation(c.perturb, n);

  std::vector<std::vector<std::size_t>> pool;
  for (const Item& it : s.items) {
    if (pool.size() == c.pool_size) break;
    pool.push_back(RankByScore(it.scores));
  }
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  for (std::size_t i = pool.size(); i < c.pool_size; ++i) {
    Rng rng = MakeRng(c.seed, {0x9001, i});
    pool.push_back(
        PerturbRanking(identity, RankingPerturbation::Window(n), rng));
  }

  const ModelIndicator g(*s.model, item.x, rel, ItemWorkers(s));
  RankingMetric metric;
  if (c.metric == "insertion" || c.metric == "deletion") {
    const BiseMode mode = c.metric == "insertion" ? BiseMode::kInsertion
                                                  : BiseMode::kDeletion;
    metric = [&, mode](std::span<const std::size_t> r, std::uint64_t seed) {
      return ComputeBise(g, r, mode, MakeBiseOptions(c, seed)).auc;
    };
  } else if (c.metric == "insertion-test") {
    metric = [&](std::span<const std::size_t> r, std::uint64_t) {
      return InsertionTest(*s.model, item.x, r, c.step).auc;
    };
  } else if (c.metric == "deletion-test") {
    metric = [&](std::span<const std::size_t> r, std::uint64_t) {
      return DeletionTest(*s.model, item.x, r, c.step).auc;
    };
  } else {
    throw ConfigError("unknown --metric '" + c.metric + "'");
  }

  const RankingStabilityResult result =
      RankingStability(metric, pool, perturbation, c.trials, c.seed);
  Output out;
  out.record["metric"] = c.metric;
  out.record["perturbation"] = c.perturb;
  out.record["pool_size"] = pool.size();
  out.record["trials"] = c.trials;
  out.record["mean_percent"] = result.mean_percent;
  out.record["sd_percent"] = result.sd_percent;
  out.record["trial_percent"] = result.trial_percent;
  std::ostringstream csv;
  csv << "trial,percent\n";
  for (std::size_t t = 0; t < result.trial_percent.size(); ++t) {
    csv << t << ',' << Num(result.trial_percent[t]) << '\n';
  }
  out.csv = csv.str();
  return out;
}

Output CmdSmooth(Session& s) {
  const RunConfig& c = s.config;
  const std::vector<double> grid =
      c.lambdas.empty() ? kSmoothingGrid : c.lambdas;
  const std::size_t count = s.items.size();
  const bool certify_mus =
      s.model->num_outputs() >= 2 && s.model->emits_probabilities();

  Output out;
  Json per_lambda = Json::array();
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "lambda,item,tau_hat,samples,mus_radius,mus_radius_int,heuristic\n";
  for (std::size_t li = 0; li < grid.size(); ++li) {
    SmoothingConfig sc;
    sc.lambda = grid[li];
    sc.samples = c.mc_samples;
    sc.seed = DeriveSeed(c.seed, {0x5300});
    sc.mode = c.exact ? SmoothingMode::kExact : SmoothingMode::kMonteCarlo;
    const SmoothedModel smoothed(*s.model, sc);
    const PredictionRelation rel = RelationFor(smoothed, c.gamma);

    std::vector<CertificateReport> reports(count);
    std::vector<std::optional<MusCertificate>> certs(count);
    ParallelFor(count, ItemWorkers(s), [&](std::size_t i) {
      const Attribution a =
          BinarizeTopFraction(s.items[i].scores, s.items[i].top_fraction);
      reports[i] = RunCertificate(smoothed, s.items[i], a.mask, c.radius, rel,
                                  ItemOptions(c, i), c);
      if (certify_mus && grid[li] > 0.0) {
        certs[i] = smoothed.Certify(s.items[i].x, a.mask);
      }
    });
    std::vector<double> tau;
    for (std::size_t i = 0; i < count; ++i) {
      Json row{{"lambda", grid[li]}, {"item", i}, {"report", ToJson(reports[i])}};
      if (certs[i]) {
        row["mus_radius"] = certs[i]->radius.real;
        row["mus_radius_int"] = certs[i]->radius.integer;
        row["heuristic"] = certs[i]->heuristic;
      }
      rows.push_back(std::move(row));
      tau.push_back(reports[i].tau_hat);
      csv << Num(grid[li]) << ',' << i << ',' << Num(reports[i].tau_hat) << ','
          << reports[i].samples << ',';
      if (certs[i]) {
        csv << Num(certs[i]->radius.real) << ',' << certs[i]->radius.integer
            << ',' << (certs[i]->heuristic ? "true" : "false");
      } else {
        csv << ",,";
      }
      csv << '\n';
    }
    Json entry = Summary(tau, DeriveSeed(c.seed, {0x5301, li}));
    entry["lambda"] = grid[li];
    per_lambda.push_back(std::move(entry));
  }
  out.record["rows"] = std::move(rows);
  out.record["per_lambda"] = std::move(per_lambda);
  out.csv = csv.str();
  return out;
}

void AddCommon(CLI::App* sub, RunConfig& c) {
  sub->add_option("--model", c.model,
                  "and | majority | table | external:<command>");
  sub->add_option("--model-seed", c.model_seed, "Seed of builtin models");
  sub->add_option("--classes", c.classes, "Outputs of the table model");
  sub->add_option("--threshold", c.threshold,
                  "Majority threshold (default n/2 + 1)");
  sub->add_option("--input", c.input,
                  "JSON-lines items {\"x\", \"scores\", \"top_fraction\"}");
  sub->add_option("--demo", c.demo, "Generate this many random items");
  sub->add_option("--features", c.features, "Feature count for demo items");
  sub->add_option("--top-fraction", c.top_fraction,
                  "Fraction of features kept by the explanation");
  sub->add_option("--seed", c.seed, "Base seed");
  sub->add_option("--out", c.out, "Output file (default stdout)");
  sub->add_option("--format", c.format, "json | csv");
  sub->add_option("--workers", c.workers, "Worker threads");
  sub->add_option("--gamma", c.gamma, "Gap for single-output models");
}

void AddCertification(CLI::App* sub, RunConfig& c,
                      const std::string& exact_help) {
  sub->add_option("--epsilon", c.epsilon, "Accuracy parameter");
  sub->add_option("--delta", c.delta, "Failure probability");
  sub->add_flag("--hard", c.hard, "Hard-stability screen");
  sub->add_flag("--per-k", c.per_k, "Minimum over per-size estimates");
  sub->add_flag("--exact", c.exact, exact_help);
}

void WriteOutput(const RunConfig& c, const Output& o, std::ostream& out) {
  const std::string text =
      c.format == "csv" ? o.csv : o.record.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open output file " + c.out);
  f << text;
  if (!f) throw IoError("failed to write " + c.out);
}

int Execute(RunConfig& c, std::ostream& out, std::ostream& err) {
  Validate(c);
  const auto start = std::chrono::steady_clock::now();
  const bool spectrum = c.command == "spectrum";
  const bool needs_model = !spectrum || c.function == "model";
  Session s;
  if (needs_model) {
    s = Open(c, true);
  } else {
    s.config = c;
  }

  Output o;
  if (c.command == "certify") {
    o = CmdCertify(s);
  } else if (c.command == "curve") {
    o = CmdCurve(s);
  } else if (spectrum) {
    o = CmdSpectrum(s);
  } else if (c.command == "bise") {
    o = CmdBise(s);
  } else if (c.command == "rankstab") {
    o = CmdRankStab(s);
  } else {
    o = CmdSmooth(s);
  }

  Json record;
  record["command"] = c.command;
  const Json config = ConfigJson(c);
  record["config_hash"] = Hex(HashBytes(config.dump()));
  record["config"] = config;
  if (s.base) {
    record["model"] = Json{{"n", s.base->num_features()},
                           {"m", s.base->num_outputs()},
                           {"probabilities", s.base->emits_probabilities()}};
  }
  for (auto& [key, value] : o.record.items()) record[key] = value;
  if (s.model) record["evaluations"] = s.model->evaluations();
  o.record = std::move(record);
  WriteOutput(c, o, out);

  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  err << "stabcert " << c.command << ": " << s.items.size() << " items, "
      << (s.model ? s.model->evaluations() : 0) << " model evaluations, "
      << ms << " ms\n";
  if (o.record.contains("invariant_violation")) {
    throw InvariantError("a spectral identity check failed");
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  RunConfig c;
  CLI::App app{"Stability certificates for feature attributions", "stabcert"};
  app.require_subcommand(1);

  auto* certify = app.add_subcommand("certify", "Certify each item");
  AddCommon(certify, c);
  AddCertification(certify, c, "Add the exact stability rate");
  certify->add_option("--radius", c.radius, "Perturbation radius");

  auto* curve = app.add_subcommand("curve", "Stability rate per radius");
  AddCommon(curve, c);
  AddCertification(curve, c, "Add the exact stability rate");
  curve->add_option("--radii", c.radii, "Strictly increasing radii")
      ->delimiter(',');

  auto* spectrum =
      app.add_subcommand("spectrum", "Spectra and identity checks");
  AddCommon(spectrum, c);
  spectrum->add_option("--function", c.function, "and2 | random | model");
  spectrum->add_option("--lambda", c.lambdas, "Smoothing parameter")
      ->delimiter(',');
  spectrum->add_option("--basis", c.basis,
                       "CSV basis: std | smoothed | monotone | "
                       "smoothed-monotone");

  auto* bise = app.add_subcommand("bise", "Insertion and deletion BISE");
  AddCommon(bise, c);
  bise->add_option("--step", c.step, "Curve step");
  bise->add_option("--m", c.m, "Influence samples per curve point");
  bise->add_option("--delta", c.delta, "Failure probability of the bounds");
  bise->add_flag("--exact", c.exact, "Exact influence (small n)");

  auto* rankstab =
      app.add_subcommand("rankstab", "Ranking stability of a metric");
  AddCommon(rankstab, c);
  rankstab->add_option("--metric", c.metric,
                       "insertion | deletion | insertion-test | "
                       "deletion-test");
  rankstab->add_option("--perturb", c.perturb,
                       "window:<size> | swap:<size> | none");
  rankstab->add_option("--trials", c.trials, "Perturbation trials");
  rankstab->add_option("--pool-size", c.pool_size, "Attributions compared");
  rankstab->add_option("--step", c.step, "Curve step");
  rankstab->add_option("--m", c.m, "Influence samples per curve point");
  rankstab->add_flag("--exact", c.exact, "Exact influence (small n)");

  auto* smooth =
      app.add_subcommand("smooth", "Certification of smoothed models");
  AddCommon(smooth, c);
  AddCertification(smooth, c, "Exact smoothing instead of Monte Carlo");
  smooth->add_option("--radius", c.radius, "Perturbation radius");
  smooth->add_option("--lambda", c.lambdas, "Keep probabilities")
      ->delimiter(',');
  smooth->add_option("--mc-samples", c.mc_samples, "Monte Carlo width");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    return Execute(c, out, err);
  } catch (const ConfigError& e) {
    err << "stabcert: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "stabcert: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvariantError& e) {
    err << "stabcert: invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const ProtocolError& e) {
    err << "stabcert: protocol error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ModelError& e) {
    err << "stabcert: model error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ArgumentError& e) {
    err << "stabcert: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionError& e) {
    err << "stabcert: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ResourceError& e) {
    err << "stabcert: configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace stabcert::cli

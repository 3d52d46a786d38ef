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

#include "stabcert/report.h"

namespace stabcert {

Json ToJson(const CertificateReport& report) {
  Json j;
  j["kind"] = ToString(report.kind);
  j["radius"] = report.radius;
  j["effective_radius"] = report.effective_radius;
  j["tau_hat"] = report.tau_hat;
  j["epsilon"] = report.epsilon;
  j["delta"] = report.delta;
  j["samples"] = report.samples;
  j["stable"] = report.stable;
  j["seed"] = report.seed;
  j["verdict"] = ToString(report.verdict);
  j["evaluations"] = report.evaluations;
  if (!report.per_size.empty()) {
    Json sizes = Json::array();
    for (const auto& s : report.per_size) {
      sizes.push_back(Json{{"size", s.size},
                           {"samples", s.samples},
                           {"stable", s.stable},
                           {"rate", s.rate}});
    }
    j["per_size"] = std::move(sizes);
  }
  j["notes"] = report.notes;
  return j;
}

Json ToJson(const BiseBounds& bounds) {
  return Json{{"lower", bounds.lower},
              {"upper", bounds.upper},
              {"delta", bounds.delta},
              {"half_width", bounds.half_width}};
}

Json ToJson(const BiseScore& score) {
  Json j;
  j["mode"] = ToString(score.mode);
  j["step"] = score.step;
  j["m"] = score.m;
  j["auc_rule"] = score.rule == AucRule::kMean ? "mean" : "trapezoid";
  j["auc"] = score.auc;
  j["k"] = score.ks;
  j["phi"] = score.values;
  if (score.bounds) j["bounds"] = ToJson(*score.bounds);
  j["indicator"] = score.note;
  return j;
}

}  // namespace stabcert

/* Copyright 2026 The Coop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>
#include <map>

#include "coop/dataset.hpp"
#include "coop/random.hpp"
#include "json.hpp"

namespace coop {

std::string_view subset_name(Subset s) noexcept {
  switch (s) {
    case Subset::kTrain:
      return "train";
    case Subset::kTest:
      return "test";
    case Subset::kVal:
      return "val";
  }
  return "?";
}

bool SplitRatios::valid() const noexcept {
  for (double r : {train, test, val})
    if (!(r >= 0.0 && r <= 1.0)) return false;
  return std::abs(train + test + val - 1.0) <= 1e-9;
}

SplitRatios SplitRatios::parse(std::string_view csv) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t end = csv.find(',', pos);
    if (end == std::string_view::npos) end = csv.size();
    const std::string tok(csv.substr(pos, end - pos));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size())
      throw DatasetError("bad ratio: '" + tok + "'");
    parts.push_back(v);
    pos = end + 1;
  }
  if (parts.size() != 3)
    throw DatasetError("ratios need three values: train,test,val");
  SplitRatios r{parts[0], parts[1], parts[2]};
  if (!r.valid()) throw DatasetError("ratios must be in [0,1] and sum to 1");
  return r;
}

std::size_t SplitManifest::count(Subset s) const {
  return static_cast<std::size_t>(std::count_if(
      assignment.begin(), assignment.end(),
      [s](const auto& kv) { return kv.second == s; }));
}

std::string SplitManifest::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["ratios"] = {ratios.train, ratios.test, ratios.val};
  auto& a = j["assignment"] = nlohmann::json::object();
  for (const auto& [id, s] : assignment) a[id] = std::string(subset_name(s));
  return j.dump(2) + "\n";
}

SplitManifest SplitManifest::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& r = j.at("ratios");
    m.ratios = {r.at(0).get<double>(), r.at(1).get<double>(),
                r.at(2).get<double>()};
    for (const auto& [id, v] : j.at("assignment").items()) {
      const auto name = v.get<std::string>();
      if (name == "train")
        m.assignment[id] = Subset::kTrain;
      else if (name == "test")
        m.assignment[id] = Subset::kTest;
      else if (name == "val")
        m.assignment[id] = Subset::kVal;
      else
        throw DatasetError("bad subset name: " + name);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("bad split manifest: ") + e.what());
  }
}

namespace {

void shuffle(std::vector<std::string>& ids, Rng& rng) {
  for (std::size_t i = ids.size(); i > 1; --i)
    std::swap(ids[i - 1], ids[rng.below(i)]);
}

void assign(const std::vector<std::string>& ids, const SplitRatios& r,
            std::map<std::string, Subset>& out) {
  const auto n = static_cast<double>(ids.size());
  const auto n_train = static_cast<std::size_t>(std::floor(n * r.train + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * r.test + 1e-9));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[ids[i]] = i < n_train            ? Subset::kTrain
                  : i < n_train + n_test ? Subset::kTest
                                         : Subset::kVal;
  }
}

}  // namespace

SplitManifest split_dataset(std::span<const LabeledImage> corpus,
                            SplitRatios ratios, std::uint64_t seed,
                            SplitOptions options) {
  if (corpus.empty()) throw DatasetError("cannot split an empty corpus");
  if (!ratios.valid())
    throw DatasetError("ratios must be in [0,1] and sum to 1");

  SplitManifest m;
  m.seed = seed;
  m.ratios = ratios;
  Rng rng(seed);

  if (!options.stratify) {
    std::vector<std::string> ids;
    for (const auto& img : corpus) ids.push_back(img.image_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    shuffle(ids, rng);
    assign(ids, ratios, m.assignment);
    return m;
  }

  // Primary class = smallest class id present; -1 for background images.
  std::map<int, std::vector<std::string>> groups;
  for (const auto& img : corpus) {
    int primary = -1;
    for (const auto& a : img.annotations)
      if (primary < 0 || a.class_id < primary) primary = a.class_id;
    groups[primary].push_back(img.image_id);
  }
  for (auto& [cls, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    shuffle(ids, rng);
    assign(ids, ratios, m.assignment);
  }
  return m;
}

}  // namespace coop

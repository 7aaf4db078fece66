// Copyright 2026 The Emojiprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emojiprobe/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "emojiprobe/errors.hpp"

namespace emojiprobe::attribution {

std::vector<TokenLogprob> ChatLogprobClient::first_token_top_logprobs(
    const std::string& prompt) {
  std::vector<ChatMessage> messages;
  if (!preamble_.empty()) messages.push_back({"system", preamble_});
  messages.push_back({"user", prompt});
  ChatOptions options;
  options.temperature = 0.0;
  options.max_tokens = 1;
  options.want_logprobs = true;
  options.top_logprobs = top_k_;
  ModelResponse response = client_.complete(messages, options);
  if (!response.first_token_top_logprobs ||
      response.first_token_top_logprobs->empty()) {
    throw InvalidArgument(
        "endpoint returned no first-token logprobs; PACT requires a "
        "logprob-capable endpoint");
  }
  return *response.first_token_top_logprobs;
}

std::string target_from_rejection(const ModelResponse& response) {
  if (!response.token_logprobs || response.token_logprobs->empty()) {
    throw InvalidArgument(
        "response carries no token-level data; cannot extract a target token");
  }
  return response.token_logprobs->front().token;
}

namespace {

// Flooring rule for a target missing from a top-k list: one natural-log
// "k-way split" below the worst listed alternative.
std::pair<double, bool> lookup_or_floor(const std::vector<TokenLogprob>& top,
                                        const std::string& target, int k) {
  for (const auto& entry : top) {
    if (entry.token == target) return {entry.logprob, false};
  }
  if (top.empty()) {
    throw InvalidArgument("empty top-k logprob list");
  }
  double min_lp = top.front().logprob;
  for (const auto& entry : top) min_lp = std::min(min_lp, entry.logprob);
  return {min_lp - std::log(static_cast<double>(std::max(k, 2))), true};
}

}  // namespace

PactRecord compute_pact(LogprobClient& client, const std::string& x,
                        const std::string& x_e, const std::string& y) {
  if (y.empty()) throw InvalidArgument("target token must be non-empty");
  PactRecord rec;
  rec.x = x;
  rec.x_e = x_e;
  rec.y = y;

  auto raw_top = client.first_token_top_logprobs(x);
  auto emoji_top = client.first_token_top_logprobs(x_e);
  int k = client.top_k();

  std::tie(rec.lp_raw, rec.lp_raw_floored) = lookup_or_floor(raw_top, y, k);
  std::tie(rec.lp_emoji, rec.lp_emoji_floored) =
      lookup_or_floor(emoji_top, y, k);
  rec.pact = rec.lp_emoji - rec.lp_raw;
  rec.resolved = !(rec.lp_raw_floored && rec.lp_emoji_floored);
  return rec;
}

PactSummary pact_distribution(const std::vector<PactRecord>& records,
                              const std::vector<double>& bin_edges) {
  std::vector<double> values;
  PactSummary summary;
  for (const auto& rec : records) {
    if (rec.resolved) values.push_back(rec.pact);
    else summary.n_unresolved++;
  }
  if (values.empty()) {
    throw InvalidArgument("no resolved PACT records to summarize");
  }
  summary.n_resolved = values.size();

  double sum = 0.0;
  size_t negative = 0;
  for (double v : values) {
    sum += v;
    if (v < 0.0) negative++;
  }
  summary.mean = sum / static_cast<double>(values.size());
  summary.fraction_negative =
      static_cast<double>(negative) / static_cast<double>(values.size());

  std::sort(values.begin(), values.end());
  size_t n = values.size();
  summary.median = n % 2 == 1 ? values[n / 2]
                              : 0.5 * (values[n / 2 - 1] + values[n / 2]);

  summary.bin_edges = bin_edges;
  if (!std::is_sorted(bin_edges.begin(), bin_edges.end())) {
    throw InvalidArgument("histogram bin edges must be sorted");
  }
  summary.histogram.assign(bin_edges.size() + 1, 0);
  for (double v : values) {
    size_t bin =
        std::upper_bound(bin_edges.begin(), bin_edges.end(), v) -
        bin_edges.begin();
    summary.histogram[bin]++;
  }
  return summary;
}

namespace {

void check_dimensions(const VectorSet& set, size_t dim,
                      const std::string& which) {
  if (set.vectors.empty()) {
    throw InvalidArgument("vector set '" + set.label + "' is empty");
  }
  for (const auto& v : set.vectors) {
    if (v.size() != dim) {
      throw InvalidArgument("dimension mismatch in set '" + set.label +
                            "' (" + which + "): expected " +
                            std::to_string(dim) + ", got " +
                            std::to_string(v.size()));
    }
  }
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

SeparationScore separation_score(const VectorSet& a, const VectorSet& b) {
  if (a.vectors.empty() || b.vectors.empty()) {
    throw InvalidArgument("both vector sets must be non-empty");
  }
  size_t dim = a.vectors.front().size();
  if (dim == 0) throw InvalidArgument("vectors must have dimension >= 1");
  check_dimensions(a, dim, "first");
  check_dimensions(b, dim, "second");
  if (a.vectors.size() < 2 || b.vectors.size() < 2) {
    throw InvalidArgument("silhouette needs at least 2 vectors per set");
  }

  SeparationScore score;
  std::vector<double> ca(dim, 0.0), cb(dim, 0.0);
  for (const auto& v : a.vectors) {
    for (size_t i = 0; i < dim; ++i) ca[i] += v[i];
  }
  for (const auto& v : b.vectors) {
    for (size_t i = 0; i < dim; ++i) cb[i] += v[i];
  }
  for (size_t i = 0; i < dim; ++i) {
    ca[i] /= static_cast<double>(a.vectors.size());
    cb[i] /= static_cast<double>(b.vectors.size());
  }
  score.centroid_distance = euclidean(ca, cb);

  auto mean_dist = [](const std::vector<double>& point,
                      const std::vector<std::vector<double>>& others,
                      bool exclude_identical_index, size_t self_index) {
    double sum = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < others.size(); ++i) {
      if (exclude_identical_index && i == self_index) continue;
      sum += euclidean(point, others[i]);
      count++;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
  };

  double total = 0.0;
  size_t n = 0;
  auto accumulate = [&](const VectorSet& own, const VectorSet& other) {
    for (size_t i = 0; i < own.vectors.size(); ++i) {
      double within = mean_dist(own.vectors[i], own.vectors, true, i);
      double between = mean_dist(own.vectors[i], other.vectors, false, 0);
      double denom = std::max(within, between);
      total += denom == 0.0 ? 0.0 : (between - within) / denom;
      n++;
    }
  };
  accumulate(a, b);
  accumulate(b, a);
  score.silhouette = total / static_cast<double>(n);
  return score;
}

void export_vectors_csv(const std::vector<VectorSet>& sets,
                        const std::string& path) {
  size_t dim = 0;
  for (const auto& set : sets) {
    if (!set.vectors.empty()) {
      dim = set.vectors.front().size();
      break;
    }
  }
  for (const auto& set : sets) {
    for (const auto& v : set.vectors) {
      if (v.size() != dim) {
        throw InvalidArgument("all exported vectors must share one dimension");
      }
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "label";
  for (size_t i = 0; i < dim; ++i) out << ",dim" << i;
  out << "\n";
  char buf[64];
  for (const auto& set : sets) {
    for (const auto& v : set.vectors) {
      out << set.label;
      for (double value : v) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        out << ',' << buf;
      }
      out << "\n";
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<VectorSet> load_vectors_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError(path, 1, "missing CSV header");
  }
  if (header.rfind("label", 0) != 0) {
    throw ParseError(path, 1, "header must start with 'label'");
  }
  std::vector<VectorSet> sets;
  std::string line;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string label;
    if (!std::getline(ss, label, ',')) {
      throw ParseError(path, lineno, "missing label");
    }
    std::vector<double> v;
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        v.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ParseError(path, lineno, "bad numeric field '" + field + "'");
      }
    }
    auto it = std::find_if(sets.begin(), sets.end(), [&](const VectorSet& s) {
      return s.label == label;
    });
    if (it == sets.end()) {
      sets.push_back(VectorSet{label, {}});
      it = std::prev(sets.end());
    }
    it->vectors.push_back(std::move(v));
  }
  return sets;
}

}  // namespace emojiprobe::attribution

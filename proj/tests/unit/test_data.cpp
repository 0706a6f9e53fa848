// Copyright 2026 The EDBA-FL Authors
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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "data/datasets.hpp"
#include "data/partition.hpp"
#include "data/poison.hpp"
#include "data/snapshot.hpp"

using namespace edba;

namespace {

std::vector<std::size_t> all_indices(const std::vector<ClientPartition>& parts) {
  std::vector<std::size_t> out;
  for (const auto& p : parts) out.insert(out.end(), p.indices.begin(), p.indices.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool is_cover(const std::vector<ClientPartition>& parts, std::size_t n) {
  auto idx = all_indices(parts);
  if (idx.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (idx[i] != i) return false;
  return true;
}

}  // namespace

TEST_CASE("vision dataset: empty, deterministic, bounded, balanced") {
  CHECK(make_vision_dataset(1, 0, 8, 3, 0.1).size() == 0);
  auto a = make_vision_dataset(7, 300, 8, 3, 0.1);
  auto b = make_vision_dataset(7, 300, 8, 3, 0.1);
  CHECK(a.inputs == b.inputs);
  CHECK(a.labels == b.labels);
  for (double v : a.inputs.data) CHECK((v >= 0.0 && v <= 1.0));
  std::vector<int> hist(3, 0);
  for (int y : a.labels) ++hist[y];
  CHECK(*std::max_element(hist.begin(), hist.end()) - *std::min_element(hist.begin(), hist.end()) <= 1);
  CHECK_THROWS_AS(make_vision_dataset(1, 10, 8, 1, 0.1), Error);
}

TEST_CASE("vision dataset: well-separated clusters are linearly separable") {
  auto ds = make_vision_dataset(3, 400, 16, 2, 0.02);
  // Perceptron probe, trained in the test as the oracle.
  std::vector<double> w(17, 0.0);
  for (int epoch = 0; epoch < 200; ++epoch) {
    int mistakes = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double y = ds.labels[i] == 1 ? 1.0 : -1.0;
      double s = w[16];
      for (std::size_t k = 0; k < 16; ++k) s += w[k] * ds.inputs.at(i, k);
      if (y * s <= 0.0) {
        ++mistakes;
        for (std::size_t k = 0; k < 16; ++k) w[k] += y * ds.inputs.at(i, k);
        w[16] += y;
      }
    }
    if (mistakes == 0) break;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double s = w[16];
    for (std::size_t k = 0; k < 16; ++k) s += w[k] * ds.inputs.at(i, k);
    correct += (s > 0.0) == (ds.labels[i] == 1);
  }
  CHECK(correct == ds.size());
}

TEST_CASE("text dataset: labelling rule, determinism, balance") {
  TextVocab v = TextVocab::standard(64, 4);
  std::vector<std::uint32_t> seq(10, v.indicative_begin);  // class-0 tokens only
  CHECK(majority_label(seq, v) == 0);
  for (auto t : v.rare_tokens()) CHECK(v.token_class(t) == -1);

  auto a = make_text_dataset(5, 401, 16, 64, 4);
  auto b = make_text_dataset(5, 401, 16, 64, 4);
  CHECK(a.sequences.tokens == b.sequences.tokens);
  CHECK(a.labels == b.labels);
  std::vector<int> hist(4, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.labels[i] == majority_label(a.sequences.row(i), a.vocab));
    ++hist[a.labels[i]];
  }
  CHECK(*std::max_element(hist.begin(), hist.end()) - *std::min_element(hist.begin(), hist.end()) <= 1);
  const auto rare_list = a.vocab.rare_tokens();
  std::set<std::uint32_t> rare(rare_list.begin(), rare_list.end());
  for (auto t : a.sequences.tokens) CHECK(rare.count(t) == 0);
}

TEST_CASE("partition: iid and dirichlet are disjoint covers") {
  auto ds = make_vision_dataset(2, 503, 8, 5, 0.1);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto iid = iid_partition(503, 7, seed);
    CHECK(is_cover(iid, 503));
    std::size_t lo = 1000, hi = 0;
    for (const auto& p : iid) {
      lo = std::min(lo, p.indices.size());
      hi = std::max(hi, p.indices.size());
    }
    CHECK(hi - lo <= 1);
    for (double alpha : {0.01, 0.5, 100.0}) CHECK(is_cover(dirichlet_partition(ds.labels, 7, alpha, seed), 503));
  }
  auto one = iid_partition(50, 1, 3);
  CHECK(one.size() == 1);
  CHECK(is_cover(one, 50));
  CHECK(is_cover(dirichlet_partition(ds.labels, 1, 0.5, 3), 503));
}

TEST_CASE("partition: very large alpha tracks the global class mix") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto ds = make_vision_dataset(seed, 2000, 8, 10, 0.1);
    auto parts = dirichlet_partition(ds.labels, 10, 1e6, seed);
    for (const auto& p : parts) {
      std::vector<double> hist(10, 0.0);
      for (auto i : p.indices) hist[ds.labels[i]] += 1.0;
      for (double h : hist) CHECK(std::abs(h / p.indices.size() - 0.1) <= 0.02);
    }
  }
}

TEST_CASE("partition: small alpha lowers label entropy") {
  double low = 0.0, mid = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto ds = make_vision_dataset(seed, 1000, 8, 10, 0.1);
    for (const auto& p : dirichlet_partition(ds.labels, 10, 0.01, seed))
      low += label_entropy(ds.labels, p.indices, 10);
    for (const auto& p : dirichlet_partition(ds.labels, 10, 0.5, seed))
      mid += label_entropy(ds.labels, p.indices, 10);
  }
  CHECK(low < mid);
}

TEST_CASE("largest remainder: exact total and lower-index ties") {
  std::vector<double> w{1, 1, 1};
  auto a = largest_remainder(w, 4);
  CHECK(a == std::vector<std::size_t>{2, 1, 1});
  std::vector<double> w2{0.5, 0.3, 0.2};
  CHECK(largest_remainder(w2, 10) == std::vector<std::size_t>{5, 3, 2});
}

TEST_CASE("poisoning: row counts, zero trigger, clip boundary") {
  Rng rng(1);
  Tensor batch({64, 6});
  for (auto& v : batch.data) v = uniform01(rng);
  std::vector<int> labels(64, 3);
  PoisonSpec spec;  // 5/64
  spec.target_label = 1;
  Tensor zero({6}, 0.0);
  auto pb = poison_vision_batch(batch, labels, spec, zero, rng);
  CHECK(pb.poisoned_rows.size() == 5);
  CHECK(std::is_sorted(pb.poisoned_rows.begin(), pb.poisoned_rows.end()));
  CHECK(pb.inputs == batch);
  for (std::size_t i = 0; i < 64; ++i) {
    const bool hit = std::count(pb.poisoned_rows.begin(), pb.poisoned_rows.end(), i) > 0;
    CHECK(pb.labels[i] == (hit ? 1 : 3));
  }

  Tensor ones({4, 6}, 1.0);
  std::vector<int> l4(4, 0);
  PoisonSpec all{0.99, 2};  // rounds to every row
  auto clipped = poison_vision_batch(ones, l4, all, Tensor({6}, 1.0), rng);
  for (double v : clipped.inputs.data) CHECK(v == 1.0);

  PoisonSpec none{0.0, 0};
  Rng before = rng;
  auto untouched = poison_vision_batch(ones, l4, none, Tensor({6}, 1.0), rng);
  CHECK(untouched.nothing_poisoned);
  CHECK(rng == before);

  for (std::uint64_t s = 1; s <= 50; ++s) {
    Rng r(s);
    const std::size_t b = 1 + s % 64;
    Tensor x({b, 6}, 0.5);
    std::vector<int> y(b, 0);
    PoisonSpec p{0.3, 1};
    CHECK(poison_vision_batch(x, y, p, zero, r).poisoned_rows.size() ==
          static_cast<std::size_t>(std::llround(0.3 * b)));
  }
}

TEST_CASE("text poisoning: token replacement rules") {
  std::vector<std::uint32_t> seq{9, 8, 7, 6};
  CHECK(poison_text_sequence(seq, {}, {}) == seq);
  std::vector<std::uint32_t> t{1};
  std::vector<std::size_t> p0{0};
  CHECK(poison_text_sequence(seq, t, p0) == std::vector<std::uint32_t>{1, 8, 7, 6});
  std::vector<std::uint32_t> full{1, 2, 3, 4};
  std::vector<std::size_t> pos{0, 1, 2, 3};
  CHECK(poison_text_sequence(seq, full, pos) == full);
  std::vector<std::size_t> bad{4};
  CHECK_THROWS_AS(poison_text_sequence(seq, t, bad), Error);
}

TEST_CASE("dataset snapshots and csv export") {
  const auto dir = std::filesystem::temp_directory_path() / "edba_data_test";
  std::filesystem::create_directories(dir);
  AnyDataset v = make_vision_dataset(1, 20, 6, 3, 0.1);
  AnyDataset t = make_text_dataset(1, 20, 8, 32, 2);
  for (const auto& ds : {v, t}) {
    const auto path = (dir / "snap.bin").string();
    save_dataset(path, ds);
    AnyDataset back = load_dataset(path);
    CHECK(back.index() == ds.index());
    if (ds.index() == 0) {
      CHECK(std::get<0>(back).inputs == std::get<0>(ds).inputs);
      CHECK(std::get<0>(back).labels == std::get<0>(ds).labels);
    } else {
      CHECK(std::get<1>(back).sequences.tokens == std::get<1>(ds).sequences.tokens);
      CHECK(std::get<1>(back).labels == std::get<1>(ds).labels);
    }
    const auto csv = (dir / "out.csv").string();
    export_dataset_csv(csv, ds);
    std::ifstream in(csv);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines >= 20);
  }
  std::filesystem::remove_all(dir);
}
